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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grassfeed/grassmann.hpp"
#include "grassfeed/precoding.hpp"
#include "grassfeed/quant_emulator.hpp"

namespace grassfeed {

enum class FeedbackMode { Perfect, QuantizedEmulated, QuantizedExhaustive, Analog };

std::string_view to_string(FeedbackMode mode) noexcept;
FeedbackMode parse_feedback_mode(std::string_view name);

/// Bits per user as a function of the SNR point.
struct BitSchedule {
    enum class Kind { Fixed, Scaled3dB, Custom };

    Kind kind = Kind::Fixed;
    unsigned fixed_bits = 0;
    std::map<double, unsigned> table; // P_dB -> bits, Custom only

    static BitSchedule fixed(unsigned bits) { return {Kind::Fixed, bits, {}}; }
    /// ceil(bd_3db_bits(M, N, P_dB)), floored at zero.
    static BitSchedule scaled_3db() { return {Kind::Scaled3dB, 0, {}}; }
    static BitSchedule custom(std::map<double, unsigned> table) { return {Kind::Custom, 0, std::move(table)}; }

    [[nodiscard]] unsigned bits_at(int M, int N, double p_db) const;
};

struct FeedbackPolicy {
    FeedbackMode mode = FeedbackMode::Perfect;
    std::optional<BitSchedule> schedule; // quantized modes only
    std::optional<double> beta;          // analog only

    static FeedbackPolicy perfect() { return {}; }
    static FeedbackPolicy quantized_emulated(BitSchedule s) { return {FeedbackMode::QuantizedEmulated, std::move(s), {}}; }
    static FeedbackPolicy quantized_exhaustive(BitSchedule s) { return {FeedbackMode::QuantizedExhaustive, std::move(s), {}}; }
    static FeedbackPolicy analog(double beta) { return {FeedbackMode::Analog, {}, beta}; }

    /// Throws IncompatiblePolicy when mode, schedule and beta disagree.
    void validate() const;
};

struct ExperimentSpec {
    int M = 4;
    int N = 2;
    std::vector<double> snr_grid_db;
    FeedbackPolicy policy;
    std::size_t trials = 1000;
    std::uint64_t seed = 0;
    PrecoderKind precoder = PrecoderKind::BlockDiagonal;
    EmulatorOptions emulator;
    std::size_t codebook_cap = kDefaultCodebookCap;
    /// 0 picks GRASSFEED_THREADS or the hardware concurrency.
    unsigned threads = 0;
};

struct RatePoint {
    double p_db = 0.0;
    double sum_rate = 0.0;
    double per_user_rate = 0.0;
    double ci99 = 0.0; // for sum_rate
    unsigned bits_used = 0;
};

struct RateCurve {
    FeedbackMode mode = FeedbackMode::Perfect;
    std::vector<RatePoint> points;
};

/// Ergodic sum rate per SNR point: fresh channels and a fresh feedback
/// realization for every trial. Trial t at point p draws from streams
/// derived from (seed, p, t), so results do not depend on the thread count.
RateCurve run_experiment(const ExperimentSpec& spec);

struct RateLossPoint {
    double p_db = 0.0;
    double loss_per_user = 0.0; // E[perfect - policy] / K
    double ci99 = 0.0;          // for loss_per_user
    double reference_sum_rate = 0.0;
    double test_sum_rate = 0.0;
    unsigned bits_used = 0;
};

/// Paired estimate of the per-user rate loss relative to perfect CSIT with
/// the same precoder family, evaluated on identical channel draws.
std::vector<RateLossPoint> run_rate_loss(const ExperimentSpec& spec);

struct SnrGap {
    double mean_db = 0.0;
    std::vector<std::pair<double, double>> per_point; // (test P_dB, offset dB)
};

/// Horizontal offset (dB) by which `test` lags `reference`: for every test
/// point inside the reference's rate range, the reference SNR reaching the
/// same sum rate is found by piecewise-linear interpolation, and the offset
/// is test P_dB minus that SNR. Throws NoOverlap.
SnrGap estimate_snr_gap(const RateCurve& reference, const RateCurve& test);

/// CSV with header `p_db,sum_rate,per_user_rate,ci99,mode,bits_used`,
/// 6 significant digits.
void write_csv(std::ostream& os, const RateCurve& curve);
RateCurve read_csv(std::istream& is);

/// Flat `key = value` experiment description; '#' starts a comment. Keys:
/// M, N, snr_start, snr_stop, snr_step, mode, schedule (fixed | scaled_3db |
/// custom), B, schedule_table ("p_db:bits,..."), beta, trials, seed,
/// precoder (bd | zf), emu_guard, sampler_cache, threads.
ExperimentSpec parse_experiment_config(std::istream& is);
/// Applies one key (also accepts `snr` = "start:stop:step"); throws
/// UsageError on unknown keys or bad values.
void apply_experiment_setting(ExperimentSpec& spec, std::string_view key, std::string_view value);
/// Drops settings the chosen mode does not use (bits for perfect/analog,
/// beta for non-analog) and validates the policy. A quantized mode without
/// a bit schedule or an analog mode without beta is a UsageError.
void finalize_experiment_spec(ExperimentSpec& spec);
/// Builds snr_grid_db from start/stop/step; inclusive of stop.
std::vector<double> make_snr_grid(double start, double stop, double step);

/// Worker count: `requested` if nonzero, else GRASSFEED_THREADS, else the
/// hardware concurrency.
unsigned resolve_thread_count(unsigned requested);

} // namespace grassfeed
