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

namespace grassfeed {

/// Feedback budget question: how many bits per user keep the per-user rate
/// loss below log2(target_b) at total SNR p_db?
struct ScalingQuery {
    int M = 0;
    int N = 0;
    double p_db = 0.0;
    double target_b = 2.0;
};

struct BitRequirement {
    double approx_bits;  // closed-form linear-in-dB law (3 dB per doubling)
    double exact_bits;   // bisection on N log2(1 + (P/N) D_main(B)) = log2 b
    double gamma_term;   // N(M-N) log2(Gamma(1/T) / T) contribution inside approx_bits
    bool exact_in_bound_region; // C_MN 2^exact_bits >= 1
};

BitRequirement bits_for_rate_loss(const ScalingQuery& q);

/// C'_MN = N^{N(M-N)} C_MN.
double c_prime(int M, int N);
/// C''_MN = Gamma(1/T) / (N^2 (M-N)) C_MN^{-1/T}, T = N(M-N).
double c_double_prime(int M, int N);

/// Bits per user keeping block diagonalization within 3 dB of perfect CSIT:
/// N(M-N)/3 P_dB - log2(C'_MN).
double bd_3db_bits(int M, int N, double p_db);

/// Bits per receive antenna keeping zero forcing within 3 dB: (M-1)/3 P_dB.
double zf_3db_bits(int M, double p_db);

/// High-SNR sum-rate advantage of BD over ZF under perfect CSIT:
/// K log2(e) sum_{j=1}^{N} (N-j)/j.
double bd_zf_rate_gap(int M, int N, int K);

/// Bits per user for BD to match the sum rate of ZF-with-perfect-CSIT minus
/// `zf_loss_per_user` bits per user, i.e. b = 2^{R_g/K + zf_loss_per_user}.
BitRequirement bd_bits_for_zf_target(int M, int N, double p_db, double zf_loss_per_user = 1.0);

struct FeedbackBoundComparison {
    double quant_bound;  // N log2(1 + P C''_MN / (1 + P)^beta), B = beta N(M-N) log2(1+P)
    double analog_bound; // N log2(1 + ((M-N)/M) P / (1 + beta P))
};

/// Rate loss bounds of quantized and analog feedback at an equal number of
/// feedback channel uses.
FeedbackBoundComparison analog_vs_quantized_bounds(int M, int N, double beta, double P);

} // namespace grassfeed
