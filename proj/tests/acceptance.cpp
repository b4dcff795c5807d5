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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "grassfeed/grassmann.hpp"
#include "grassfeed/precoding.hpp"
#include "grassfeed/quant_emulator.hpp"
#include "grassfeed/scaling.hpp"
#include "grassfeed/simulator.hpp"
#include "grassfeed/stats.hpp"
#include "oracles.hpp"

using namespace grassfeed;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ExperimentSpec spec_for(int M, FeedbackPolicy policy, std::vector<double> grid, std::size_t trials, std::uint64_t seed) {
    ExperimentSpec s;
    s.M = M;
    s.N = 2;
    s.snr_grid_db = std::move(grid);
    s.policy = std::move(policy);
    s.trials = trials;
    s.seed = seed;
    return s;
}

std::vector<double> grid_0_30() { return make_snr_grid(0.0, 30.0, 5.0); }

Outcome zf_bit_table() {
    const int expected[] = {9, 17, 25, 34, 42, 50};
    std::string got;
    bool ok = true;
    for (int i = 0; i < 6; ++i) {
        const int b = static_cast<int>(std::ceil(zf_3db_bits(6, 5.0 * (i + 1))));
        ok = ok && b == expected[i];
        got += std::to_string(b) + (i < 5 ? "," : "");
    }
    return {ok, "ceil bits {" + got + "}"};
}

Outcome snr_gaps() {
    const std::pair<int, double> cases[] = {{4, 2.65}, {6, 2.72}, {8, 2.84}};
    bool ok = true;
    std::string detail;
    for (auto [M, target] : cases) {
        const auto ref = run_experiment(spec_for(M, FeedbackPolicy::perfect(), grid_0_30(), 20000, 2024));
        const auto test = run_experiment(
            spec_for(M, FeedbackPolicy::quantized_emulated(BitSchedule::scaled_3db()), grid_0_30(), 20000, 2024));
        const double gap = estimate_snr_gap(ref, test).mean_db;
        ok = ok && std::abs(gap - target) <= 0.35;
        detail += fmt("M=%d %.3f dB (target %.2f) ", M, gap, target);
    }
    return {ok, detail};
}

Outcome rate_loss_bound() {
    bool ok = true;
    double worst_margin = 1e9;
    int count = 0;
    for (int M : {4, 6})
        for (unsigned B : {10u, 14u, 20u}) {
            const auto gc = GrassmannConstants::make(M, 2);
            const double dbar = distortion_bound(gc, B).total;
            std::vector<double> grid{0.0, 10.0, 20.0};
            const auto loss = run_rate_loss(spec_for(M, FeedbackPolicy::quantized_emulated(BitSchedule::fixed(B)), grid, 10000, 7 + B));
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double P = std::pow(10.0, grid[i] / 10.0);
                const double bound = thm1_bound(SystemConfig::make(M, 2, P), dbar);
                const double margin = bound + loss[i].ci99 - loss[i].loss_per_user;
                worst_margin = std::min(worst_margin, margin);
                ok = ok && margin >= 0.0;
                ++count;
            }
        }
    return {ok, fmt("%d (M,B,P) cases, smallest bound + ci99 - loss = %.4f", count, worst_margin)};
}

// Brute-force quantizer sharing no code with the library's search.
double brute_force_d2(RngStream& rng, const ComplexMatrix& h, int M, int N, unsigned bits) {
    double best = 1e9;
    for (std::size_t i = 0; i < (std::size_t{1} << bits); ++i) {
        ComplexMatrix w(M, N);
        for (int c = 0; c < N; ++c)
            for (int r = 0; r < M; ++r) w(r, c) = rng.complex_normal();
        best = std::min(best, oracle::chordal_d2(h, w));
    }
    return best;
}

Outcome emulator_fidelity() {
    const int cases[][3] = {{4, 2, 8}, {6, 2, 8}, {4, 1, 10}};
    bool ok = true;
    std::string detail;
    for (const auto& c : cases) {
        const int M = c[0], N = c[1];
        const auto bits = static_cast<unsigned>(c[2]);
        EmulatorOptions opts;
        opts.min_effective_codebook = 1.0;
        const QuantEmulator em(M, N, opts);
        const std::size_t n = 10000;
        std::vector<double> exh(n), emu(n);
        for (std::size_t i = 0; i < n; ++i) {
            RngStream hr = RngStream::derive(404, {0, i});
            const SubspaceFrame h = isotropic_frame(hr, M, N);
            RngStream br = RngStream::derive(404, {1, i});
            exh[i] = brute_force_d2(br, h.basis(), M, N, bits);
            RngStream er = RngStream::derive(404, {2, i});
            emu[i] = em.emulate(er, h, bits).d2;
        }
        const double rel = std::abs(stats::summarize(emu).mean / stats::summarize(exh).mean - 1.0);
        const auto ks = stats::ks_two_sample(exh, emu);
        const bool pass = ks.p_value > 0.01 && rel < 0.02;
        ok = ok && pass;
        detail += fmt("(%d,%d,%u) p=%.3f rel=%.4f tail=%.1e; ", M, N, bits, ks.p_value, rel,
                      min_d2_tail_probability(em.constants(), bits));
    }
    return {ok, detail};
}

Outcome structural() {
    RngStream rng(505, 0);
    double bd = 0.0, recon = 0.0, trace = 0.0, orth = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int M = 4 + 2 * (t % 3);
        const auto cfg = SystemConfig::make(M, 2, 10.0);
        const ChannelSet h = draw_channels(rng, cfg);
        const auto v = bd_precoders(h);
        for (int k = 0; k < cfg.K; ++k)
            for (int j = 0; j < cfg.K; ++j)
                if (j != k) bd = std::max(bd, (h[j].adjoint() * v.precoders[k]).norm());

        const SubspaceFrame ht = SubspaceFrame::span_of(h[0]);
        const auto q = emulate_quantization(rng, ht, 24 + t % 12);
        orth = std::max(orth, linalg::orthonormality_residual(q.h_hat.basis()));
        const auto d = decompose(ht, q.h_hat);
        recon = std::max(recon, (q.h_hat.basis() * d.x * d.y + d.s.basis() * d.z - ht.basis()).norm());
        trace = std::max(trace, std::abs((d.z.adjoint() * d.z).trace().real() - q.d2));
        trace = std::max(trace, std::abs(q.d2 - oracle::chordal_d2(ht.basis(), q.h_hat.basis())));
    }
    const bool ok = bd <= 1e-9 && recon <= 1e-9 && trace <= 1e-9 && orth <= 1e-9;
    return {ok, fmt("BD %.1e, decomposition recon %.1e, |tr Z^H Z - d2| %.1e, frame %.1e", bd, recon, trace, orth)};
}

Outcome moments() {
    RngStream rng(606, 0);
    const int draws = 100000;

    // Unordered nonzero eigenvalues of H H^H, M = 4, N = 2.
    double lam[2] = {0.0, 0.0};
    for (int t = 0; t < draws; ++t) {
        const ComplexMatrix h = gaussian_matrix(rng, 4, 2);
        const auto e = linalg::hermitian_eig(h.adjoint() * h);
        const int first = rng.uniform() < 0.5 ? 0 : 1;
        lam[0] += e.eigenvalues(first);
        lam[1] += e.eigenvalues(1 - first);
    }
    const double lam_err = std::max(std::abs(lam[0] / draws / 4.0 - 1.0), std::abs(lam[1] / draws / 4.0 - 1.0));

    // Quantization error Z^H Z under emulation, M = 4, N = 2, B = 10.
    const QuantEmulator em(4, 2);
    ComplexMatrix zz = ComplexMatrix::Zero(2, 2);
    double dsum = 0.0;
    for (int t = 0; t < draws; ++t) {
        const SubspaceFrame h = isotropic_frame(rng, 4, 2);
        const auto q = em.emulate(rng, h, 10);
        const auto d = decompose(h, q.h_hat);
        zz += d.z.adjoint() * d.z;
        dsum += q.d2;
    }
    zz /= draws;
    const double rho = dsum / draws / 2.0;
    const double zz_off = std::abs(zz(0, 1));
    const double zz_diag = std::max(std::abs(zz(0, 0).real() / rho - 1.0), std::abs(zz(1, 1).real() / rho - 1.0));

    // S and V_hat independent and isotropic in the nullspace of H_hat, M = 6, N = 2.
    ComplexMatrix sv = ComplexMatrix::Zero(2, 2);
    for (int t = 0; t < draws; ++t) {
        const SubspaceFrame hh = isotropic_frame(rng, 6, 2);
        const SubspaceFrame s = isotropic_frame_in_nullspace(rng, hh, 2);
        const SubspaceFrame v = isotropic_frame_in_nullspace(rng, hh, 2);
        const ComplexMatrix g = v.basis().adjoint() * s.basis();
        sv += g * g.adjoint();
    }
    sv /= draws;
    const double sv_err = (sv - 0.5 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() / 0.5;

    // Analog residual of user 1 against the precoder of user 0 built from estimates.
    const auto cfg = SystemConfig::make(4, 2, 10.0);
    ComplexMatrix fv = ComplexMatrix::Zero(2, 2);
    for (int t = 0; t < draws; ++t) {
        const ChannelSet h = draw_channels(rng, cfg);
        std::vector<ComplexMatrix> est;
        std::vector<ComplexMatrix> res;
        for (const auto& hk : h) {
            auto obs = analog_feedback(rng, cfg, hk, 1.0);
            est.push_back(std::move(obs.estimate));
            res.push_back(std::move(obs.residual));
        }
        const auto v = bd_precoders(est, CsitSource::Analog);
        const ComplexMatrix g = v.precoders[0].adjoint() * res[1];
        fv += g.adjoint() * g;
    }
    fv /= draws;
    const double fv_err = (fv - 2.0 * ComplexMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() / 2.0;

    const bool ok = lam_err <= 0.01 && zz_off < 0.003 && zz_diag <= 0.01 && sv_err <= 0.02 && fv_err <= 0.02;
    return {ok, fmt("E[Lambda] %.4f, E[Z^H Z] off %.4f diag %.4f, E[VSSV] %.4f, E[FVVF] %.4f (relative errors)", lam_err,
                    zz_off, zz_diag, sv_err, fv_err)};
}

Outcome fz_consistency() {
    bool ok = true;
    std::string detail;
    for (int M : {4, 5, 6, 8}) {
        const double integral =
            oracle::simpson([&](double z) { return z <= 0.0 ? 0.0 : CondEigSampler::trace_pdf(M, z); }, 0.0, 1.0, 200000);
        const double c = GrassmannConstants::make(M, 2).c_mn;
        const double err = std::abs(integral - c);
        ok = ok && err <= 1e-6 && std::abs(c - oracle::c_mn(M, 2)) <= 1e-12;
        detail += fmt("M=%d |int - C|=%.1e ", M, err);
    }
    return {ok, detail};
}

Outcome analog() {
    bool ok = true;
    double worst = 1e9;
    for (int M : {4, 6})
        for (double beta : {0.5, 1.0, 2.0}) {
            const std::vector<double> grid{0.0, 10.0, 20.0};
            auto spec = spec_for(M, FeedbackPolicy::analog(beta), grid, 10000, 808);
            const auto loss = run_rate_loss(spec);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const double P = std::pow(10.0, grid[i] / 10.0);
                const double bound = analog_bound(SystemConfig::make(M, 2, P), beta).finite_p;
                const double margin = bound + loss[i].ci99 - loss[i].loss_per_user;
                worst = std::min(worst, margin);
                ok = ok && margin >= 0.0;
            }
        }
    bool order = true;
    for (double log_p = 2.0; log_p <= 8.0; log_p += 0.05) {
        const auto b = analog_vs_quantized_bounds(4, 2, 2.0, std::pow(10.0, log_p));
        order = order && b.quant_bound < b.analog_bound;
    }
    return {ok && order, fmt("smallest bound + ci99 - loss = %.4f; quantized < analog for P in [1e2, 1e8]: %s", worst,
                             order ? "yes" : "no")};
}

Outcome bd_zf_gap() {
    auto bd = spec_for(6, FeedbackPolicy::perfect(), {30.0}, 10000, 909);
    auto zf = bd;
    zf.precoder = PrecoderKind::ZeroForcing;
    const double diff = run_experiment(bd).points[0].sum_rate - run_experiment(zf).points[0].sum_rate;
    const double rg = bd_zf_rate_gap(6, 2, 3);
    return {std::abs(diff / rg - 1.0) <= 0.15, fmt("BD - ZF = %.3f vs R_g = %.3f", diff, rg)};
}

Outcome fixed_b_divergence() {
    const auto loss = run_rate_loss(spec_for(4, FeedbackPolicy::quantized_emulated(BitSchedule::fixed(10)), {10.0, 30.0}, 10000, 1010));
    const double g10 = loss[0].reference_sum_rate - loss[0].test_sum_rate;
    const double g30 = loss[1].reference_sum_rate - loss[1].test_sum_rate;
    return {g30 > g10 + 2.0, fmt("sum-rate gap %.3f at 10 dB, %.3f at 30 dB", g10, g30)};
}

Outcome bd_zf_ordering() {
    bool ok = true;
    const double rg_per_user = bd_zf_rate_gap(6, 2, 3) / 3.0;
    for (double p = 5.0; p <= 30.0; p += 5.0) {
        for (double b : {4.0, std::exp2(rg_per_user + 1.0), 8.0, 64.0}) {
            const auto q = bits_for_rate_loss({6, 2, p, b});
            const double bd = std::max(std::ceil(q.exact_bits), std::ceil(q.approx_bits)) / 2.0;
            ok = ok && bd < std::ceil(zf_3db_bits(6, p));
        }
        ok = ok && std::ceil(bd_3db_bits(6, 2, p)) / 2.0 < std::ceil(zf_3db_bits(6, p));
    }
    return {ok, "BD bits per antenna < ZF bits per antenna, P_dB 5..30, b in {4, 2^(R_g/K+1), 8, 64}"};
}

} // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"1 ZF 3 dB bit table", zf_bit_table},
        {"2 SNR gaps of the 3 dB bit schedule", snr_gaps},
        {"3 quantized rate loss bound", rate_loss_bound},
        {"4 emulator fidelity", emulator_fidelity},
        {"5 structural identities", structural},
        {"6 moment identities", moments},
        {"7 f_Z consistency", fz_consistency},
        {"8 analog versus quantized", analog},
        {"9 BD-ZF rate gap", bd_zf_gap},
        {"10 fixed-B divergence", fixed_b_divergence},
        {"11 BD-ZF bit ordering", bd_zf_ordering},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s [%s] %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
