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

#include <cmath>
#include <vector>

#include "grassfeed/grassmann.hpp"
#include "grassfeed/quant_emulator.hpp"
#include "grassfeed/rng.hpp"
#include "grassfeed/stats.hpp"
#include "grassfeed_tools/cli.hpp"

namespace grassfeed::tools {

SelftestResult run_selftest_case(const SelftestCase& c, std::size_t samples, std::uint64_t seed, double alpha,
                                 double mean_tolerance) {
    const auto M = static_cast<std::size_t>(c.M);
    const auto N = static_cast<std::size_t>(c.N);
    EmulatorOptions options;
    options.min_effective_codebook = 1.0;
    const QuantEmulator emulator(c.M, c.N, options);

    std::vector<double> exhaustive(samples), emulated(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        RngStream ch = RngStream::derive(seed, {0, i});
        const SubspaceFrame h = isotropic_frame(ch, M, N);
        RngStream cb = RngStream::derive(seed, {1, i});
        exhaustive[i] = quantize_with_fresh_codebook(cb, h, c.bits).d2;
        RngStream em = RngStream::derive(seed, {2, i});
        emulated[i] = emulator.emulate(em, h, c.bits).d2;
    }
    SelftestResult r{};
    r.config = c;
    r.mean_exhaustive = stats::summarize(exhaustive).mean;
    r.mean_emulated = stats::summarize(emulated).mean;
    r.relative_mean_error = std::abs(r.mean_emulated - r.mean_exhaustive) / r.mean_exhaustive;
    const auto ks = stats::ks_two_sample(std::move(exhaustive), std::move(emulated));
    r.ks_statistic = ks.statistic;
    r.p_value = ks.p_value;
    r.truncation_probability = min_d2_tail_probability(emulator.constants(), c.bits);
    r.passed = ks.p_value > alpha && r.relative_mean_error < mean_tolerance;
    return r;
}

} // namespace grassfeed::tools
