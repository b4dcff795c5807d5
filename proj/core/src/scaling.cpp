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

#include "grassfeed/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "grassfeed/error.hpp"
#include "grassfeed/grassmann.hpp"

namespace grassfeed {

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

void check_dims(int M, int N) {
    if (N < 1 || M <= N) throw Error(ErrorKind::ParameterError, "scaling needs M > N >= 1");
}

} // namespace

BitRequirement bits_for_rate_loss(const ScalingQuery& q) {
    check_dims(q.M, q.N);
    if (!(q.target_b > 1.0)) throw Error(ErrorKind::Infeasible, "rate loss target log2(b) must be positive");
    const auto gc = GrassmannConstants::make(q.M, q.N);
    const double t = gc.T;
    const double n = q.N;

    BitRequirement out{};
    out.gamma_term = t * std::log2(std::tgamma(1.0 / t) / t);
    out.approx_bits = t / 3.0 * q.p_db - t * std::log2(n * (std::pow(q.target_b, 1.0 / n) - 1.0)) + out.gamma_term -
                      std::log2(gc.c_mn);

    const double p = db_to_linear(q.p_db);
    const double target = std::log2(q.target_b);
    const auto loss = [&](double bits) { return n * std::log2(1.0 + p / n * distortion_main_term(gc, bits)); };
    double lo = 0.0;
    double hi = std::max(1.0, 4.0 * t * (q.p_db / 3.0 + 10.0));
    if (loss(lo) <= target) {
        out.exact_bits = 0.0;
    } else {
        while (loss(hi) > target) hi *= 2.0;
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            if (loss(mid) > target) lo = mid; else hi = mid;
        }
        out.exact_bits = 0.5 * (lo + hi);
    }
    out.exact_in_bound_region = std::log2(gc.c_mn) + out.exact_bits >= 0.0;
    return out;
}

double c_prime(int M, int N) {
    check_dims(M, N);
    const auto gc = GrassmannConstants::make(M, N);
    return std::pow(static_cast<double>(N), gc.T) * gc.c_mn;
}

double c_double_prime(int M, int N) {
    check_dims(M, N);
    const auto gc = GrassmannConstants::make(M, N);
    const double t = gc.T;
    return std::tgamma(1.0 / t) / (static_cast<double>(N) * N * (M - N)) * std::pow(gc.c_mn, -1.0 / t);
}

double bd_3db_bits(int M, int N, double p_db) {
    check_dims(M, N);
    return static_cast<double>(N * (M - N)) / 3.0 * p_db - std::log2(c_prime(M, N));
}

double zf_3db_bits(int M, double p_db) {
    if (M < 2) throw Error(ErrorKind::ParameterError, "zf_3db_bits needs M >= 2");
    return static_cast<double>(M - 1) * p_db / 3.0;
}

double bd_zf_rate_gap(int M, int N, int K) {
    if (N < 1 || K < 1 || K * N != M) throw Error(ErrorKind::ParameterError, "bd_zf_rate_gap needs K = M / N");
    double repulsion = 0.0;
    for (int j = 1; j <= N; ++j) repulsion += static_cast<double>(N - j) / j;
    return K * std::numbers::log2e * repulsion;
}

BitRequirement bd_bits_for_zf_target(int M, int N, double p_db, double zf_loss_per_user) {
    if (M % N != 0) throw Error(ErrorKind::ParameterError, "bd_bits_for_zf_target needs K = M / N integral");
    const int k = M / N;
    const double per_user_gap = bd_zf_rate_gap(M, N, k) / k;
    return bits_for_rate_loss({M, N, p_db, std::exp2(per_user_gap + zf_loss_per_user)});
}

FeedbackBoundComparison analog_vs_quantized_bounds(int M, int N, double beta, double P) {
    check_dims(M, N);
    if (!(beta > 0.0) || !(P > 0.0)) throw Error(ErrorKind::ParameterError, "bounds need beta > 0 and P > 0");
    const double n = N;
    const double decay = std::exp(-beta * std::log1p(P)); // (1 + P)^{-beta}
    return {n * std::log2(1.0 + P * c_double_prime(M, N) * decay),
            n * std::log2(1.0 + static_cast<double>(M - N) / M * P / (1.0 + beta * P))};
}

} // namespace grassfeed
