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

#include "grassfeed_tools/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "grassfeed/error.hpp"
#include "grassfeed/precoding.hpp"
#include "grassfeed/scaling.hpp"
#include "grassfeed/simulator.hpp"

namespace grassfeed::tools {

namespace {

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::string> M, N, snr, mode, schedule, B, schedule_table, beta, trials, precoder, emu_guard,
        sampler_cache, threads;
    std::optional<std::uint64_t> seed;
    bool rate_loss = false;
};

struct ScalingArgs {
    std::string mode = "bd3db";
    int M = 6;
    int N = 2;
    std::string snr = "0:30:5";
    double b = 2.0;
    double beta = 2.0;
};

struct GapArgs {
    std::string ref;
    std::string test;
};

struct SelftestArgs {
    std::size_t samples = 10000;
    std::uint64_t seed = 20240601;
};

std::vector<double> parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
    if (parts.size() != 3) throw Error(ErrorKind::UsageError, "--snr expects start:stop:step");
    try {
        return make_snr_grid(std::stod(parts[0]), std::stod(parts[1]), std::stod(parts[2]));
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::UsageError, "--snr expects numbers, got '" + text + "'");
    }
}

RateCurve load_curve(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::UsageError, "cannot open " + path);
    return read_csv(is);
}

int run_simulate(const SimulateArgs& a, std::ostream& out) {
    ExperimentSpec spec;
    if (!a.config.empty()) {
        std::ifstream is(a.config);
        if (!is) throw Error(ErrorKind::UsageError, "cannot open " + a.config);
        spec = parse_experiment_config(is);
    }
    const std::pair<const char*, const std::optional<std::string>*> overrides[] = {
        {"M", &a.M},         {"N", &a.N},         {"snr", &a.snr},           {"mode", &a.mode},
        {"schedule", &a.schedule}, {"B", &a.B},   {"schedule_table", &a.schedule_table},
        {"beta", &a.beta},   {"trials", &a.trials}, {"precoder", &a.precoder}, {"emu_guard", &a.emu_guard},
        {"sampler_cache", &a.sampler_cache}, {"threads", &a.threads}};
    for (const auto& [key, value] : overrides) {
        if (*value) apply_experiment_setting(spec, key, **value);
    }
    spec.seed = *a.seed;
    finalize_experiment_spec(spec);

    std::ofstream file;
    std::ostream* dest = &out;
    if (!a.out.empty() && a.out != "-") {
        file.open(a.out);
        if (!file) throw Error(ErrorKind::UsageError, "cannot write " + a.out);
        dest = &file;
    }
    if (a.rate_loss) {
        std::ostringstream buf;
        buf << std::setprecision(6) << "p_db,loss_per_user,ci99,reference_sum_rate,test_sum_rate,bits_used\n";
        for (const auto& p : run_rate_loss(spec)) {
            buf << p.p_db << ',' << p.loss_per_user << ',' << p.ci99 << ',' << p.reference_sum_rate << ','
                << p.test_sum_rate << ',' << p.bits_used << '\n';
        }
        *dest << buf.str();
    } else {
        write_csv(*dest, run_experiment(spec));
    }
    dest->flush();
    return *dest ? 0 : 1;
}

int run_scaling(const ScalingArgs& a, std::ostream& out) {
    const std::vector<double> grid = parse_grid(a.snr);
    out << std::setprecision(6);
    if (a.mode == "bd3db") {
        out << "p_db,bits,bits_ceil\n";
        for (double p : grid) {
            const double b = bd_3db_bits(a.M, a.N, p);
            out << p << ',' << b << ',' << std::max(0.0, std::ceil(b)) << '\n';
        }
    } else if (a.mode == "zf3db") {
        out << "p_db,bits_per_antenna,bits_ceil\n";
        for (double p : grid) {
            const double b = zf_3db_bits(a.M, p);
            out << p << ',' << b << ',' << std::max(0.0, std::ceil(b)) << '\n';
        }
    } else if (a.mode == "bits") {
        out << "p_db,approx_bits,exact_bits,gamma_term,in_bound_region\n";
        for (double p : grid) {
            const BitRequirement r = bits_for_rate_loss({a.M, a.N, p, a.b});
            out << p << ',' << r.approx_bits << ',' << r.exact_bits << ',' << r.gamma_term << ','
                << (r.exact_in_bound_region ? 1 : 0) << '\n';
        }
    } else if (a.mode == "bd-vs-zf") {
        out << "p_db,zf_bits_per_antenna,bd_bits_per_user_approx,bd_bits_per_user_exact\n";
        for (double p : grid) {
            const BitRequirement bd = bd_bits_for_zf_target(a.M, a.N, p);
            out << p << ',' << std::max(0.0, std::ceil(zf_3db_bits(a.M, p))) << ','
                << std::max(0.0, std::ceil(bd.approx_bits)) << ',' << std::max(0.0, std::ceil(bd.exact_bits)) << '\n';
        }
    } else if (a.mode == "analog") {
        out << "p_db,quant_bound,analog_bound,analog_limit\n";
        for (double p : grid) {
            const double P = std::pow(10.0, p / 10.0);
            const FeedbackBoundComparison c = analog_vs_quantized_bounds(a.M, a.N, a.beta, P);
            const AnalogBound ab = analog_bound(SystemConfig::make(a.M, a.N, P), a.beta);
            out << p << ',' << c.quant_bound << ',' << c.analog_bound << ',' << ab.limit << '\n';
        }
    } else {
        throw Error(ErrorKind::UsageError, "unknown scaling mode '" + a.mode + "'");
    }
    return 0;
}

int run_gap(const GapArgs& a, std::ostream& out) {
    const SnrGap gap = estimate_snr_gap(load_curve(a.ref), load_curve(a.test));
    out << std::setprecision(6) << "mean_gap_db " << gap.mean_db << '\n';
    for (const auto& [p, off] : gap.per_point) out << "p_db " << p << " gap_db " << off << '\n';
    return 0;
}

int run_selftest(const SelftestArgs& a, std::ostream& out) {
    bool ok = true;
    out << std::setprecision(4);
    for (const SelftestCase& c : kSelftestCases) {
        const SelftestResult r = run_selftest_case(c, a.samples, a.seed);
        ok = ok && r.passed;
        out << (r.passed ? "PASS" : "FAIL") << " M=" << c.M << " N=" << c.N << " B=" << c.bits
            << " ks=" << r.ks_statistic << " p=" << r.p_value << " mean_exh=" << r.mean_exhaustive
            << " mean_emu=" << r.mean_emulated << " rel_err=" << r.relative_mean_error
            << " tail=" << r.truncation_probability << '\n';
    }
    return ok ? 0 : 1;
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"grassfeed: limited-feedback block diagonalization simulator", "grassfeed"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo sum-rate sweep, CSV output");
    simulate->add_option("--config", sim.config, "key = value experiment file")->check(CLI::ExistingFile);
    simulate->add_option("--out", sim.out, "CSV destination (default stdout)");
    simulate->add_option("--seed", sim.seed, "64-bit seed")->required();
    simulate->add_option("--M", sim.M, "transmit antennas");
    simulate->add_option("--N", sim.N, "receive antennas per user");
    simulate->add_option("--snr", sim.snr, "start:stop:step in dB");
    simulate->add_option("--mode", sim.mode, "perfect | quantized_emulated | quantized_exhaustive | analog");
    simulate->add_option("--schedule", sim.schedule, "fixed | scaled_3db | custom");
    simulate->add_option("--B", sim.B, "bits per user for the fixed schedule");
    simulate->add_option("--schedule-table", sim.schedule_table, "p_db:bits,... for the custom schedule");
    simulate->add_option("--beta", sim.beta, "analog feedback uplink power ratio");
    simulate->add_option("--trials", sim.trials, "trials per SNR point");
    simulate->add_option("--precoder", sim.precoder, "bd | zf");
    simulate->add_option("--emu-guard", sim.emu_guard, "minimum C_MN 2^B for emulation");
    simulate->add_option("--sampler-cache", sim.sampler_cache, "directory for eigenvalue sampler tables");
    simulate->add_option("--threads", sim.threads, "worker threads (default GRASSFEED_THREADS or all cores)");
    simulate->add_flag("--rate-loss", sim.rate_loss, "emit the paired per-user rate loss against perfect CSIT");

    ScalingArgs sc;
    auto* scaling = app.add_subcommand("scaling", "Feedback bit requirements and bound tables");
    scaling->add_option("--mode", sc.mode, "bd3db | zf3db | bits | bd-vs-zf | analog")->capture_default_str();
    scaling->add_option("--M", sc.M)->capture_default_str();
    scaling->add_option("--N", sc.N)->capture_default_str();
    scaling->add_option("--snr", sc.snr, "start:stop:step in dB")->capture_default_str();
    scaling->add_option("--b", sc.b, "rate loss target log2(b) for --mode bits")->capture_default_str();
    scaling->add_option("--beta", sc.beta, "for --mode analog")->capture_default_str();

    GapArgs gp;
    auto* gap = app.add_subcommand("gap", "SNR gap between two simulate CSV files");
    gap->add_option("--ref", gp.ref, "reference curve")->required()->check(CLI::ExistingFile);
    gap->add_option("--test", gp.test, "test curve")->required()->check(CLI::ExistingFile);

    SelftestArgs st;
    auto* selftest = app.add_subcommand("emu-selftest", "KS equivalence of emulated and exhaustive quantization");
    selftest->add_option("--samples", st.samples, "draws per method and case")->capture_default_str();
    selftest->add_option("--seed", st.seed)->capture_default_str();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "grassfeed: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) return run_simulate(sim, out);
        if (scaling->parsed()) return run_scaling(sc, out);
        if (gap->parsed()) return run_gap(gp, out);
        return run_selftest(st, out);
    } catch (const Error& e) {
        err << "grassfeed: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return e.kind() == ErrorKind::UsageError ? 2 : 1;
    } catch (const std::exception& e) {
        err << "grassfeed: " << e.what() << '\n';
        return 1;
    }
}

} // namespace grassfeed::tools
