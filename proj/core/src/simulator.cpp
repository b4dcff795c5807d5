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

#include "grassfeed/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "grassfeed/error.hpp"
#include "grassfeed/scaling.hpp"
#include "grassfeed/stats.hpp"

namespace grassfeed {

std::string_view to_string(FeedbackMode mode) noexcept {
    switch (mode) {
    case FeedbackMode::Perfect: return "perfect";
    case FeedbackMode::QuantizedEmulated: return "quantized_emulated";
    case FeedbackMode::QuantizedExhaustive: return "quantized_exhaustive";
    case FeedbackMode::Analog: return "analog";
    }
    return "unknown";
}

FeedbackMode parse_feedback_mode(std::string_view name) {
    for (auto m : {FeedbackMode::Perfect, FeedbackMode::QuantizedEmulated, FeedbackMode::QuantizedExhaustive,
                   FeedbackMode::Analog}) {
        if (name == to_string(m)) return m;
    }
    throw Error(ErrorKind::UsageError, "unknown feedback mode '" + std::string(name) + "'");
}

unsigned BitSchedule::bits_at(int M, int N, double p_db) const {
    switch (kind) {
    case Kind::Fixed: return fixed_bits;
    case Kind::Scaled3dB: {
        const double b = std::ceil(bd_3db_bits(M, N, p_db));
        return b <= 0.0 ? 0u : static_cast<unsigned>(b);
    }
    case Kind::Custom: {
        for (const auto& [p, bits] : table) {
            if (std::abs(p - p_db) < 1e-9) return bits;
        }
        throw Error(ErrorKind::IncompatiblePolicy, "custom bit schedule has no entry for " + std::to_string(p_db) + " dB");
    }
    }
    return 0;
}

void FeedbackPolicy::validate() const {
    const bool quantized = mode == FeedbackMode::QuantizedEmulated || mode == FeedbackMode::QuantizedExhaustive;
    if (quantized != schedule.has_value()) {
        throw Error(ErrorKind::IncompatiblePolicy, "a bit schedule is required for, and only for, quantized modes");
    }
    if ((mode == FeedbackMode::Analog) != beta.has_value()) {
        throw Error(ErrorKind::IncompatiblePolicy, "beta is required for, and only for, analog feedback");
    }
    if (beta && !(*beta > 0.0)) throw Error(ErrorKind::IncompatiblePolicy, "analog feedback needs beta > 0");
}

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GRASSFEED_THREADS")) {
        unsigned v = 0;
        const std::string_view s(env);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) return v;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

enum Purpose : std::uint64_t { kChannel = 0, kFeedback = 1 };

// Per-antenna budget for zero forcing: equal split, remainder to the first antennas.
unsigned antenna_bits(unsigned bits, int n, int antenna) {
    const unsigned base = bits / static_cast<unsigned>(n);
    return base + (static_cast<unsigned>(antenna) < bits % static_cast<unsigned>(n) ? 1u : 0u);
}

class TrialEngine {
public:
    explicit TrialEngine(const ExperimentSpec& spec) : spec_(spec) {
        spec_.policy.validate();
        if (spec.trials < 1) throw Error(ErrorKind::ParameterError, "trials must be >= 1");
        if (spec.snr_grid_db.empty()) throw Error(ErrorKind::ParameterError, "empty SNR grid");
        for (std::size_t i = 1; i < spec.snr_grid_db.size(); ++i) {
            if (!(spec.snr_grid_db[i] > spec.snr_grid_db[i - 1])) {
                throw Error(ErrorKind::ParameterError, "SNR grid must be strictly increasing");
            }
        }
        SystemConfig::make(spec.M, spec.N, 1.0);
        bits_.reserve(spec.snr_grid_db.size());
        for (double p : spec.snr_grid_db) {
            bits_.push_back(spec.policy.schedule ? spec.policy.schedule->bits_at(spec.M, spec.N, p) : 0u);
        }

        const FeedbackMode mode = spec.policy.mode;
        const bool zf = spec.precoder == PrecoderKind::ZeroForcing;
        const int quant_dim = zf ? 1 : spec.N;
        if (mode == FeedbackMode::QuantizedEmulated) {
            if (quant_dim > 2) {
                throw Error(ErrorKind::IncompatiblePolicy, "emulated quantization supports N <= 2; use exhaustive mode");
            }
            emulator_.emplace(spec.M, quant_dim, spec.emulator);
        }
        if (mode == FeedbackMode::QuantizedEmulated || mode == FeedbackMode::QuantizedExhaustive) {
            for (unsigned b : bits_) {
                const unsigned per = zf ? antenna_bits(b, spec.N, 0) : b;
                const bool emulated = emulator_ && emulator_->admits(zf ? antenna_bits(b, spec.N, spec.N - 1) : b);
                const bool fits = per < 63 && (std::size_t{1} << per) <= spec.codebook_cap;
                if (!emulated && !fits) {
                    throw Error(ErrorKind::IncompatiblePolicy,
                                "codebook of 2^" + std::to_string(per) + " entries exceeds the exhaustive-search cap");
                }
            }
        }
    }

    [[nodiscard]] const std::vector<unsigned>& bits() const noexcept { return bits_; }

    // Sum rates (policy, perfect-CSIT reference) for one trial.
    std::pair<double, double> run(std::size_t point, std::size_t trial, bool with_reference) const {
        const SystemConfig cfg = SystemConfig::make(spec_.M, spec_.N, std::pow(10.0, spec_.snr_grid_db[point] / 10.0));
        RngStream channel_rng = RngStream::derive(spec_.seed, {point, trial, kChannel});
        const ChannelSet channels = draw_channels(channel_rng, cfg);

        const auto precode = [&](std::span<const ComplexMatrix> knowledge, CsitSource source) {
            return spec_.precoder == PrecoderKind::BlockDiagonal ? bd_precoders(knowledge, source)
                                                                 : zf_precoders(knowledge, source);
        };

        double reference = 0.0;
        if (with_reference || spec_.policy.mode == FeedbackMode::Perfect) {
            reference = instant_sum_rate(cfg, channels, precode(channels, CsitSource::Perfect));
            if (spec_.policy.mode == FeedbackMode::Perfect) return {reference, reference};
        }

        std::vector<ComplexMatrix> knowledge;
        knowledge.reserve(channels.size());
        CsitSource source = CsitSource::Quantized;
        for (std::size_t k = 0; k < channels.size(); ++k) {
            RngStream fb = RngStream::derive(spec_.seed, {point, trial, kFeedback, k});
            if (spec_.policy.mode == FeedbackMode::Analog) {
                source = CsitSource::Analog;
                knowledge.push_back(analog_feedback(fb, cfg, channels[k], *spec_.policy.beta).estimate);
            } else if (spec_.precoder == PrecoderKind::ZeroForcing) {
                ComplexMatrix dirs(cfg.M, cfg.N);
                for (int a = 0; a < cfg.N; ++a) {
                    const SubspaceFrame h = SubspaceFrame::span_of(ComplexMatrix(channels[k].col(a)));
                    dirs.col(a) = quantize_subspace(fb, h, antenna_bits(bits_[point], cfg.N, a)).col(0);
                }
                knowledge.push_back(std::move(dirs));
            } else {
                knowledge.push_back(quantize_subspace(fb, SubspaceFrame::span_of(channels[k]), bits_[point]));
            }
        }
        const double test = instant_sum_rate(cfg, channels, precode(knowledge, source));
        return {test, reference};
    }

private:
    ComplexMatrix quantize_subspace(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits) const {
        if (spec_.policy.mode == FeedbackMode::QuantizedEmulated && emulator_->admits(bits)) {
            return emulator_->emulate(rng, h_tilde, bits).h_hat.basis();
        }
        return quantize_with_fresh_codebook(rng, h_tilde, bits, spec_.codebook_cap).h_hat.basis();
    }

    const ExperimentSpec& spec_;
    std::vector<unsigned> bits_;
    std::optional<QuantEmulator> emulator_;
};

// Runs fn(trial) for trial in [0, n) on `threads` workers; each trial writes
// only its own slot.
template <typename Fn>
void parallel_trials(std::size_t n, unsigned threads, Fn&& fn) {
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    if (threads <= 1) {
        for (std::size_t t = 0; t < n; ++t) fn(t);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    constexpr std::size_t kChunk = 64;
    auto worker = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(kChunk);
                if (begin >= n) return;
                const std::size_t end = std::min(n, begin + kChunk);
                for (std::size_t t = begin; t < end; ++t) fn(t);
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(n);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace

RateCurve run_experiment(const ExperimentSpec& spec) {
    const TrialEngine engine(spec);
    const unsigned threads = resolve_thread_count(spec.threads);
    const double k_users = static_cast<double>(spec.M / spec.N);

    RateCurve curve{spec.policy.mode, {}};
    std::vector<double> samples(spec.trials);
    for (std::size_t p = 0; p < spec.snr_grid_db.size(); ++p) {
        parallel_trials(spec.trials, threads, [&](std::size_t t) { samples[t] = engine.run(p, t, false).first; });
        const stats::Summary s = stats::summarize(samples);
        curve.points.push_back({spec.snr_grid_db[p], s.mean, s.mean / k_users, s.ci99, engine.bits()[p]});
    }
    return curve;
}

std::vector<RateLossPoint> run_rate_loss(const ExperimentSpec& spec) {
    const TrialEngine engine(spec);
    const unsigned threads = resolve_thread_count(spec.threads);
    const double k_users = static_cast<double>(spec.M / spec.N);

    std::vector<RateLossPoint> out;
    std::vector<double> loss(spec.trials), ref(spec.trials), test(spec.trials);
    for (std::size_t p = 0; p < spec.snr_grid_db.size(); ++p) {
        parallel_trials(spec.trials, threads, [&](std::size_t t) {
            const auto [policy_rate, reference_rate] = engine.run(p, t, true);
            test[t] = policy_rate;
            ref[t] = reference_rate;
            loss[t] = (reference_rate - policy_rate) / k_users;
        });
        const stats::Summary s = stats::summarize(loss);
        out.push_back({spec.snr_grid_db[p], s.mean, s.ci99, stats::summarize(ref).mean, stats::summarize(test).mean,
                       engine.bits()[p]});
    }
    return out;
}

SnrGap estimate_snr_gap(const RateCurve& reference, const RateCurve& test) {
    const auto& ref = reference.points;
    SnrGap gap;
    if (ref.size() >= 2) {
        for (const auto& pt : test.points) {
            for (std::size_t i = 0; i + 1 < ref.size(); ++i) {
                const double r0 = ref[i].sum_rate;
                const double r1 = ref[i + 1].sum_rate;
                if (!(r1 > r0) || pt.sum_rate < r0 || pt.sum_rate > r1) continue;
                const double p_ref = ref[i].p_db + (pt.sum_rate - r0) / (r1 - r0) * (ref[i + 1].p_db - ref[i].p_db);
                gap.per_point.emplace_back(pt.p_db, pt.p_db - p_ref);
                break;
            }
        }
    }
    if (gap.per_point.empty()) throw Error(ErrorKind::NoOverlap, "rate curves do not overlap");
    double acc = 0.0;
    for (const auto& [p, off] : gap.per_point) acc += off;
    gap.mean_db = acc / static_cast<double>(gap.per_point.size());
    return gap;
}

void write_csv(std::ostream& os, const RateCurve& curve) {
    std::ostringstream buf;
    buf << std::setprecision(6);
    buf << "p_db,sum_rate,per_user_rate,ci99,mode,bits_used\n";
    for (const auto& p : curve.points) {
        buf << p.p_db << ',' << p.sum_rate << ',' << p.per_user_rate << ',' << p.ci99 << ',' << to_string(curve.mode)
            << ',' << p.bits_used << '\n';
    }
    os << buf.str();
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto pos = s.find(sep);
        out.push_back(trim(s.substr(0, pos)));
        if (pos == std::string_view::npos) return out;
        s.remove_prefix(pos + 1);
    }
}

double to_double(std::string_view s, std::string_view what) {
    const std::string tmp(trim(s));
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (tmp.empty() || end != tmp.c_str() + tmp.size() || !std::isfinite(v)) {
        throw Error(ErrorKind::UsageError, "bad number for " + std::string(what) + ": '" + tmp + "'");
    }
    return v;
}

template <typename Int>
Int to_integer(std::string_view s, std::string_view what) {
    s = trim(s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        throw Error(ErrorKind::UsageError, "bad integer for " + std::string(what) + ": '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

RateCurve read_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || trim(line) != "p_db,sum_rate,per_user_rate,ci99,mode,bits_used") {
        throw Error(ErrorKind::FormatError, "unexpected CSV header");
    }
    RateCurve curve;
    bool first = true;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 6) throw Error(ErrorKind::FormatError, "CSV row needs 6 fields: " + line);
        RatePoint p{to_double(f[0], "p_db"), to_double(f[1], "sum_rate"), to_double(f[2], "per_user_rate"),
                    to_double(f[3], "ci99"), to_integer<unsigned>(f[5], "bits_used")};
        const FeedbackMode mode = parse_feedback_mode(f[4]);
        if (first) curve.mode = mode;
        first = false;
        curve.points.push_back(p);
    }
    return curve;
}

std::vector<double> make_snr_grid(double start, double stop, double step) {
    if (!(step > 0.0) || stop < start) throw Error(ErrorKind::UsageError, "SNR grid needs step > 0 and stop >= start");
    std::vector<double> grid;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
}

void apply_experiment_setting(ExperimentSpec& spec, std::string_view key, std::string_view value) {
    value = trim(value);
    if (key == "M") {
        spec.M = to_integer<int>(value, key);
    } else if (key == "N") {
        spec.N = to_integer<int>(value, key);
    } else if (key == "snr") {
        const auto f = split(value, ':');
        if (f.size() != 3) throw Error(ErrorKind::UsageError, "snr expects start:stop:step");
        spec.snr_grid_db = make_snr_grid(to_double(f[0], "snr start"), to_double(f[1], "snr stop"), to_double(f[2], "snr step"));
    } else if (key == "mode") {
        spec.policy.mode = parse_feedback_mode(value);
    } else if (key == "schedule") {
        if (value == "fixed") {
            const unsigned b = spec.policy.schedule ? spec.policy.schedule->fixed_bits : 0u;
            spec.policy.schedule = BitSchedule::fixed(b);
        } else if (value == "scaled_3db") {
            spec.policy.schedule = BitSchedule::scaled_3db();
        } else if (value == "custom") {
            if (!spec.policy.schedule || spec.policy.schedule->kind != BitSchedule::Kind::Custom) {
                spec.policy.schedule = BitSchedule::custom({});
            }
        } else {
            throw Error(ErrorKind::UsageError, "schedule must be fixed, scaled_3db or custom");
        }
    } else if (key == "B") {
        const auto b = to_integer<unsigned>(value, key);
        if (spec.policy.schedule && spec.policy.schedule->kind != BitSchedule::Kind::Fixed) {
            spec.policy.schedule->fixed_bits = b;
        } else {
            spec.policy.schedule = BitSchedule::fixed(b);
        }
    } else if (key == "schedule_table") {
        std::map<double, unsigned> table;
        for (auto entry : split(value, ',')) {
            const auto kv = split(entry, ':');
            if (kv.size() != 2) throw Error(ErrorKind::UsageError, "schedule_table expects p_db:bits pairs");
            table[to_double(kv[0], "schedule_table p_db")] = to_integer<unsigned>(kv[1], "schedule_table bits");
        }
        spec.policy.schedule = BitSchedule::custom(std::move(table));
    } else if (key == "beta") {
        spec.policy.beta = to_double(value, key);
    } else if (key == "trials") {
        spec.trials = to_integer<std::size_t>(value, key);
    } else if (key == "seed") {
        spec.seed = to_integer<std::uint64_t>(value, key);
    } else if (key == "precoder") {
        if (value == "bd") spec.precoder = PrecoderKind::BlockDiagonal;
        else if (value == "zf") spec.precoder = PrecoderKind::ZeroForcing;
        else throw Error(ErrorKind::UsageError, "precoder must be bd or zf");
    } else if (key == "emu_guard") {
        spec.emulator.min_effective_codebook = to_double(value, key);
    } else if (key == "sampler_cache") {
        spec.emulator.sampler_cache_dir = std::string(value);
    } else if (key == "threads") {
        spec.threads = to_integer<unsigned>(value, key);
    } else {
        throw Error(ErrorKind::UsageError, "unknown setting '" + std::string(key) + "'");
    }
}

void finalize_experiment_spec(ExperimentSpec& spec) {
    const bool quantized = spec.policy.mode == FeedbackMode::QuantizedEmulated ||
                           spec.policy.mode == FeedbackMode::QuantizedExhaustive;
    if (!quantized) spec.policy.schedule.reset();
    if (spec.policy.mode != FeedbackMode::Analog) spec.policy.beta.reset();
    if (quantized && !spec.policy.schedule) throw Error(ErrorKind::UsageError, "quantized mode needs B or a schedule");
    if (spec.policy.mode == FeedbackMode::Analog && !spec.policy.beta) {
        throw Error(ErrorKind::UsageError, "analog mode needs beta");
    }
    if (spec.snr_grid_db.empty()) throw Error(ErrorKind::UsageError, "no SNR grid given");
    spec.policy.validate();
}

ExperimentSpec parse_experiment_config(std::istream& is) {
    ExperimentSpec spec;
    std::optional<double> start, stop, step;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        std::string_view view(line);
        if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
        view = trim(view);
        if (view.empty()) continue;
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorKind::UsageError, "config line " + std::to_string(line_no) + " is not key = value");
        }
        const auto key = trim(view.substr(0, eq));
        const auto value = trim(view.substr(eq + 1));
        if (key == "snr_start") start = to_double(value, key);
        else if (key == "snr_stop") stop = to_double(value, key);
        else if (key == "snr_step") step = to_double(value, key);
        else apply_experiment_setting(spec, key, value);
    }
    if (start || stop || step) {
        if (!start || !stop || !step) throw Error(ErrorKind::UsageError, "snr_start, snr_stop and snr_step go together");
        spec.snr_grid_db = make_snr_grid(*start, *stop, *step);
    }
    return spec;
}

} // namespace grassfeed
