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

#include <doctest.h>

#include <cmath>
#include <vector>

#include "grassfeed/grassmann.hpp"
#include "grassfeed/precoding.hpp"
#include "grassfeed/quant_emulator.hpp"
#include "grassfeed/stats.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace grassfeed;
using linalg::Complex;

namespace {

double zf_rate_oracle(const ComplexMatrix& h_k, const std::vector<ComplexMatrix>& v, std::size_t k, double q) {
    double rate = 0.0;
    for (Eigen::Index a = 0; a < h_k.cols(); ++a) {
        double sig = 0.0, leak = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j)
            for (Eigen::Index b = 0; b < v[j].cols(); ++b) {
                Complex ip = 0.0;
                for (Eigen::Index m = 0; m < h_k.rows(); ++m) ip += std::conj(h_k(m, a)) * v[j](m, b);
                (j == k && a == b ? sig : leak) += q * std::norm(ip);
            }
        rate += std::log2((1.0 + sig + leak) / (1.0 + leak));
    }
    return rate;
}

} // namespace

TEST_CASE("SystemConfig") {
    const auto c = SystemConfig::make(6, 2, 10.0);
    CHECK(c.K == 3);
    CHECK(c.stream_power() == doctest::Approx(10.0 / 6.0));
    CHECK_KIND(SystemConfig::make(2, 2, 1.0), ParameterError);
    CHECK_KIND(SystemConfig::make(5, 2, 1.0), ParameterError);
    CHECK_KIND(SystemConfig::make(4, 2, 0.0), ParameterError);
}

TEST_CASE("BD precoders") {
    std::vector<ComplexMatrix> know{ComplexMatrix::Identity(4, 4).rightCols(2), ComplexMatrix::Identity(4, 4).leftCols(2)};
    const auto ps = bd_precoders(know);
    ComplexMatrix p34 = ComplexMatrix::Zero(4, 4);
    p34(2, 2) = p34(3, 3) = 1.0;
    CHECK((ps.precoders[0] * ps.precoders[0].adjoint() - p34).norm() < 1e-12);
    CHECK(ps.kind == PrecoderKind::BlockDiagonal);

    RngStream rng(1, 0);
    for (int M : {4, 6, 8}) {
        const auto cfg = SystemConfig::make(M, 2, 10.0);
        double worst = 0.0;
        for (int t = 0; t < 1000; ++t) {
            const ChannelSet h = draw_channels(rng, cfg);
            const auto v = bd_precoders(h);
            for (int k = 0; k < cfg.K; ++k) {
                REQUIRE(linalg::orthonormality_residual(v.precoders[k]) < 1e-10);
                for (int j = 0; j < cfg.K; ++j)
                    if (j != k) worst = std::max(worst, (h[j].adjoint() * v.precoders[k]).norm());
            }
        }
        CHECK(worst <= 1e-9);
    }

    const auto cfg = SystemConfig::make(4, 2, 10.0);
    const ChannelSet h = draw_channels(rng, cfg);
    std::vector<ComplexMatrix> q;
    for (const auto& hk : h) q.push_back(emulate_quantization(rng, SubspaceFrame::span_of(hk), 8, EmulatorOptions{1.0}).h_hat.basis());
    const auto vq = bd_precoders(q, CsitSource::Quantized);
    CHECK(vq.source == CsitSource::Quantized);
    CHECK((q[1].adjoint() * vq.precoders[0]).norm() < 1e-9);
    CHECK((h[1].adjoint() * vq.precoders[0]).norm() > 1e-3);

    std::vector<ComplexMatrix> bad{ComplexMatrix::Identity(6, 2), ComplexMatrix::Identity(6, 2), ComplexMatrix::Identity(6, 2)};
    CHECK_KIND(bd_precoders(bad), RankDeficient);
}

TEST_CASE("ZF precoders") {
    std::vector<ComplexMatrix> id{ComplexMatrix::Identity(4, 4).leftCols(2), ComplexMatrix::Identity(4, 4).rightCols(2)};
    const auto z = zf_precoders(id);
    CHECK(z.kind == PrecoderKind::ZeroForcing);
    for (int k = 0; k < 2; ++k)
        for (int a = 0; a < 2; ++a) {
            const Eigen::VectorXcd beam = z.precoders[k].col(a);
            CHECK(std::abs(beam(2 * k + a)) == doctest::Approx(1.0));
        }

    RngStream rng(2, 0);
    const auto cfg = SystemConfig::make(6, 2, 10.0);
    double worst = 0.0;
    for (int t = 0; t < 500; ++t) {
        const ChannelSet h = draw_channels(rng, cfg);
        const auto v = zf_precoders(h);
        for (int k = 0; k < 3; ++k)
            for (int m = 0; m < 2; ++m) {
                REQUIRE(v.precoders[k].col(m).norm() == doctest::Approx(1.0));
                for (int j = 0; j < 3; ++j)
                    for (int n = 0; n < 2; ++n)
                        if (j != k || n != m) worst = std::max(worst, std::abs(h[j].col(n).dot(v.precoders[k].col(m))));
            }
    }
    CHECK(worst <= 1e-9);
    std::vector<ComplexMatrix> bad{ComplexMatrix::Identity(4, 2), ComplexMatrix::Identity(4, 2)};
    CHECK_KIND(zf_precoders(bad), RankDeficient);
}

TEST_CASE("instantaneous rates") {
    RngStream rng(3, 0);
    const auto cfg10 = SystemConfig::make(4, 2, 10.0);
    const ChannelSet h = draw_channels(rng, cfg10);
    const auto v = bd_precoders(h);
    for (std::size_t k = 0; k < 2; ++k) {
        const double r = instant_rate_per_user(cfg10, h[k], v, k);
        CHECK(r == doctest::Approx(oracle::bd_rate(h[k], v.precoders, k, 2.5)).epsilon(1e-12));
        const ComplexMatrix g = h[k].adjoint() * v.precoders[k];
        const double direct = linalg::logdet_hermitian(ComplexMatrix::Identity(2, 2) + 2.5 * g * g.adjoint());
        CHECK(r == doctest::Approx(direct).epsilon(1e-9));
    }

    double prev = -1.0;
    for (double p : {1e-9, 1e-3, 0.1, 1.0, 10.0, 100.0}) {
        const auto cfg = SystemConfig::make(4, 2, p);
        const double r = instant_sum_rate(cfg, h, v);
        CHECK(r > prev);
        if (p == 1e-9) CHECK(r < 1e-7);
        prev = r;
    }

    // Quantized precoders leak; every extra interferer lowers the rate.
    std::vector<ComplexMatrix> q;
    for (const auto& hk : h) q.push_back(quantize_with_fresh_codebook(rng, SubspaceFrame::span_of(hk), 3).h_hat.basis());
    const auto vq = bd_precoders(q, CsitSource::Quantized);
    const double rq = instant_rate_per_user(cfg10, h[0], vq, 0);
    CHECK(rq == doctest::Approx(oracle::bd_rate(h[0], vq.precoders, 0, 2.5)).epsilon(1e-12));
    PrecoderSet quiet = vq;
    quiet.precoders[1].setZero();
    CHECK(instant_rate_per_user(cfg10, h[0], quiet, 0) >= rq);

    const auto vz = zf_precoders(h);
    for (std::size_t k = 0; k < 2; ++k)
        CHECK(instant_rate_per_user(cfg10, h[k], vz, k) == doctest::Approx(zf_rate_oracle(h[k], vz.precoders, k, 2.5)).epsilon(1e-12));
    const auto vzq = zf_precoders(q, CsitSource::Quantized);
    CHECK(instant_rate_per_user(cfg10, h[1], vzq, 1) == doctest::Approx(zf_rate_oracle(h[1], vzq.precoders, 1, 2.5)).epsilon(1e-12));

    CHECK_KIND(instant_rate_per_user(cfg10, h[0], v, 5), DimensionError);
}

TEST_CASE("ZF does not beat BD on average") {
    RngStream rng(4, 0);
    const auto cfg = SystemConfig::make(4, 2, 100.0);
    std::vector<double> diff(10000);
    for (double& d : diff) {
        const ChannelSet h = draw_channels(rng, cfg);
        d = instant_sum_rate(cfg, h, bd_precoders(h)) - instant_sum_rate(cfg, h, zf_precoders(h));
    }
    CHECK(stats::summarize(diff).mean > 0.0);
}

TEST_CASE("analog feedback") {
    RngStream rng(5, 0);
    const auto cfg1 = SystemConfig::make(4, 2, 1.0);
    const ComplexMatrix h = gaussian_matrix(rng, 4, 2);
    const auto big = analog_feedback(rng, cfg1, h, 1e8);
    CHECK((h - big.estimate).norm() <= 1e-3);
    CHECK((big.estimate - std::sqrt(1e8) / (1.0 + 1e8) * big.received).norm() == 0.0);

    const auto cfg = SystemConfig::make(4, 2, 10.0);
    const int draws = 100000;
    double err = 0.0, fpow = 0.0, fre2 = 0.0;
    Complex fmean = 0.0;
    for (int t = 0; t < draws; ++t) {
        const ComplexMatrix hk = gaussian_matrix(rng, 4, 2);
        const auto obs = analog_feedback(rng, cfg, hk, 1.0);
        err += (hk - obs.estimate).squaredNorm();
        fpow += obs.residual.squaredNorm();
        fmean += obs.residual.sum();
        fre2 += obs.residual.real().squaredNorm();
    }
    CHECK(err / draws == doctest::Approx(8.0 / 11.0).epsilon(0.02));
    CHECK(fpow / (8.0 * draws) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(fre2 / (8.0 * draws) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(fmean) / (8.0 * draws) < 0.01);
    CHECK_KIND(analog_feedback(rng, cfg, h, 0.0), ParameterError);
}

TEST_CASE("rate loss bounds") {
    CHECK(thm1_bound(SystemConfig::make(4, 2, 10.0), 0.0) == 0.0);
    CHECK(thm1_bound(SystemConfig::make(4, 2, 10.0), 0.2) == doctest::Approx(2.0));
    CHECK_KIND(thm1_bound(SystemConfig::make(4, 2, 10.0), -0.1), ParameterError);

    const auto lim = analog_bound(SystemConfig::make(4, 2, 1e6), 1.0);
    CHECK(lim.limit == doctest::Approx(2.0 * std::log2(1.5)));
    CHECK(lim.limit == doctest::Approx(1.1699).epsilon(1e-4));
    for (double p : {0.1, 1.0, 10.0, 1e3, 1e6}) {
        const auto b = analog_bound(SystemConfig::make(4, 2, p), 1.0);
        CHECK(b.finite_p < b.limit);
        CHECK(b.finite_p == doctest::Approx(2.0 * std::log2(1.0 + 0.5 * p / (1.0 + p))));
    }
    const auto huge = analog_bound(SystemConfig::make(4, 2, 10.0), 1e12);
    CHECK(huge.finite_p < 1e-10);
    CHECK(huge.limit < 1e-10);
    CHECK_KIND(analog_bound(SystemConfig::make(4, 2, 10.0), -1.0), ParameterError);
}
