// SPDX-License-Identifier: Apache-2.0
//
// grassfeed: limited-feedback block diagonalization simulator
// Copyright (C) 2026 The grassfeed authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <benchmark/benchmark.h>

#include "grassfeed/ensembles.hpp"
#include "grassfeed/grassmann.hpp"
#include "grassfeed/linalg.hpp"
#include "grassfeed/quant_emulator.hpp"
#include "grassfeed/simulator.hpp"

using namespace grassfeed;

static void BM_ThinQr(benchmark::State& state) {
    RngStream rng(1, 0);
    const ComplexMatrix a = gaussian_matrix(rng, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) benchmark::DoNotOptimize(linalg::thin_qr(a));
}
BENCHMARK(BM_ThinQr)->Arg(4)->Arg(8)->Arg(16);

static void BM_ExhaustiveQuantize(benchmark::State& state) {
    RngStream rng(2, 0);
    const SubspaceFrame h = isotropic_frame(rng, 6, 2);
    const auto bits = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(quantize_with_fresh_codebook(rng, h, bits));
}
BENCHMARK(BM_ExhaustiveQuantize)->DenseRange(6, 12, 2);

static void BM_EmulatedQuantize(benchmark::State& state) {
    RngStream rng(3, 0);
    const QuantEmulator em(6, 2);
    const SubspaceFrame h = isotropic_frame(rng, 6, 2);
    const auto bits = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(em.emulate(rng, h, bits));
}
BENCHMARK(BM_EmulatedQuantize)->Arg(10)->Arg(20)->Arg(40);

static void BM_TrialBatch(benchmark::State& state) {
    ExperimentSpec spec;
    spec.M = static_cast<int>(state.range(0));
    spec.N = 2;
    spec.snr_grid_db = {20.0};
    spec.policy = FeedbackPolicy::quantized_emulated(BitSchedule::scaled_3db());
    spec.trials = 1000;
    spec.seed = 4;
    spec.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 1000);
}
BENCHMARK(BM_TrialBatch)->Arg(4)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
