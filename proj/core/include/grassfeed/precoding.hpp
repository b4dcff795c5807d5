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
#include <span>
#include <vector>

#include "grassfeed/ensembles.hpp"

namespace grassfeed {

/// M transmit antennas, N antennas per user, K = M / N users, total power P
/// (linear, over unit noise). Each of the M streams gets P / M.
struct SystemConfig {
    int M = 0;
    int N = 0;
    int K = 0;
    double P = 1.0;

    /// Validates K = M / N exactly with K >= 2, and P > 0.
    static SystemConfig make(int M, int N, double P);
    [[nodiscard]] double stream_power() const noexcept { return P / M; }
};

using ChannelSet = std::vector<ComplexMatrix>;

/// K i.i.d. CN(0, 1) channel matrices of size M x N.
ChannelSet draw_channels(RngStream& rng, const SystemConfig& cfg);

enum class CsitSource { Perfect, Quantized, Analog };
enum class PrecoderKind { BlockDiagonal, ZeroForcing };

/// One M x N precoder per user. Block diagonalization yields orthonormal
/// columns; zero forcing yields N unit-norm beams per user.
struct PrecoderSet {
    std::vector<ComplexMatrix> precoders;
    CsitSource source = CsitSource::Perfect;
    PrecoderKind kind = PrecoderKind::BlockDiagonal;
};

/// Block diagonalization from per-user knowledge (raw channels, frames or
/// estimates; only the column spans matter): V_k spans the left nullspace
/// of the other users' stacked knowledge.
PrecoderSet bd_precoders(std::span<const ComplexMatrix> knowledge, CsitSource source = CsitSource::Perfect);

/// Zero forcing: beam (k, m) is the unit vector orthogonal to every column
/// of the aggregate M x M knowledge matrix except column m of user k.
PrecoderSet zf_precoders(std::span<const ComplexMatrix> knowledge, CsitSource source = CsitSource::Perfect);

/// Instantaneous rate of user k in bits/s/Hz given the true channel H_k.
/// Block diagonalization: joint decoding of the user's N streams,
///   log2|I + (P/M) sum_j H^H V_j V_j^H H| - log2|I + (P/M) sum_{j!=k} ...|.
/// Zero forcing: each antenna decodes its own stream and treats every other
/// beam as interference.
double instant_rate_per_user(const SystemConfig& cfg, const ComplexMatrix& h_k, const PrecoderSet& precoders,
                             std::size_t k);

/// Sum of instant_rate_per_user over all users.
double instant_sum_rate(const SystemConfig& cfg, std::span<const ComplexMatrix> channels, const PrecoderSet& precoders);

/// Analog channel feedback: G = sqrt(beta P) H + N, MMSE estimate
/// H_est = sqrt(beta P) / (1 + beta P) G, and the normalized residual
/// F = sqrt(1 + beta P) (H - H_est).
struct AnalogObservation {
    double beta = 1.0;
    ComplexMatrix received;
    ComplexMatrix estimate;
    ComplexMatrix residual;
};

AnalogObservation analog_feedback(RngStream& rng, const SystemConfig& cfg, const ComplexMatrix& h_k, double beta);

/// Per-user rate loss bound N log2(1 + (P/N) D) for quantized feedback with
/// distortion D.
double thm1_bound(const SystemConfig& cfg, double distortion);

struct AnalogBound {
    double finite_p; // N log2(1 + ((M-N)/M) P / (1 + beta P))
    double limit;    // P -> infinity: N log2(1 + ((M-N)/M) / beta)
};

AnalogBound analog_bound(const SystemConfig& cfg, double beta);

} // namespace grassfeed
