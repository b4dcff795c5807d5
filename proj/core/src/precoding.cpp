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

#include "grassfeed/precoding.hpp"

#include <cmath>
#include <string>

#include "grassfeed/error.hpp"

namespace grassfeed {

SystemConfig SystemConfig::make(int M, int N, double P) {
    if (N < 1 || M < 2 * N || M % N != 0) {
        throw Error(ErrorKind::ParameterError, "SystemConfig needs K = M / N integral and K >= 2 (M=" +
                                                   std::to_string(M) + ", N=" + std::to_string(N) + ")");
    }
    if (!(P > 0.0) || !std::isfinite(P)) throw Error(ErrorKind::ParameterError, "SystemConfig needs P > 0");
    return {M, N, M / N, P};
}

ChannelSet draw_channels(RngStream& rng, const SystemConfig& cfg) {
    ChannelSet out;
    out.reserve(static_cast<std::size_t>(cfg.K));
    for (int k = 0; k < cfg.K; ++k) {
        out.push_back(gaussian_matrix(rng, static_cast<std::size_t>(cfg.M), static_cast<std::size_t>(cfg.N)));
    }
    return out;
}

namespace {

void check_knowledge(std::span<const ComplexMatrix> knowledge) {
    if (knowledge.size() < 2) throw Error(ErrorKind::DimensionError, "precoding needs at least two users");
    const Eigen::Index m = knowledge.front().rows();
    const Eigen::Index n = knowledge.front().cols();
    for (const auto& h : knowledge) {
        if (h.rows() != m || h.cols() != n) throw Error(ErrorKind::DimensionError, "users have different shapes");
    }
    if (static_cast<Eigen::Index>(knowledge.size()) * n != m) {
        throw Error(ErrorKind::DimensionError, "precoding needs K N = M aggregate receive antennas");
    }
}

} // namespace

PrecoderSet bd_precoders(std::span<const ComplexMatrix> knowledge, CsitSource source) {
    check_knowledge(knowledge);
    const Eigen::Index m = knowledge.front().rows();
    const Eigen::Index n = knowledge.front().cols();
    const auto k_users = knowledge.size();

    PrecoderSet out{{}, source, PrecoderKind::BlockDiagonal};
    out.precoders.reserve(k_users);
    ComplexMatrix others(m, m - n);
    for (std::size_t k = 0; k < k_users; ++k) {
        Eigen::Index col = 0;
        for (std::size_t j = 0; j < k_users; ++j) {
            if (j == k) continue;
            others.middleCols(col, n) = knowledge[j];
            col += n;
        }
        out.precoders.push_back(linalg::left_nullspace_basis(others));
    }
    return out;
}

PrecoderSet zf_precoders(std::span<const ComplexMatrix> knowledge, CsitSource source) {
    check_knowledge(knowledge);
    const Eigen::Index m = knowledge.front().rows();
    const Eigen::Index n = knowledge.front().cols();

    ComplexMatrix aggregate(m, m);
    for (std::size_t k = 0; k < knowledge.size(); ++k) aggregate.middleCols(static_cast<Eigen::Index>(k) * n, n) = knowledge[k];

    PrecoderSet out{{}, source, PrecoderKind::ZeroForcing};
    out.precoders.assign(knowledge.size(), ComplexMatrix(m, n));
    ComplexMatrix deleted(m, m - 1);
    for (Eigen::Index c = 0; c < m; ++c) {
        if (c > 0) deleted.leftCols(c) = aggregate.leftCols(c);
        if (c < m - 1) deleted.rightCols(m - 1 - c) = aggregate.rightCols(m - 1 - c);
        const ComplexMatrix beam = linalg::left_nullspace_basis(deleted);
        out.precoders[static_cast<std::size_t>(c / n)].col(c % n) = beam.col(0);
    }
    return out;
}

double instant_rate_per_user(const SystemConfig& cfg, const ComplexMatrix& h_k, const PrecoderSet& precoders,
                             std::size_t k) {
    const auto& v = precoders.precoders;
    if (k >= v.size()) throw Error(ErrorKind::DimensionError, "instant_rate_per_user: user index out of range");
    const double snr = cfg.stream_power();
    const Eigen::Index n = h_k.cols();

    if (precoders.kind == PrecoderKind::BlockDiagonal) {
        ComplexMatrix total = ComplexMatrix::Identity(n, n);
        ComplexMatrix interference = ComplexMatrix::Identity(n, n);
        for (std::size_t j = 0; j < v.size(); ++j) {
            const ComplexMatrix g = h_k.adjoint() * v[j];
            const ComplexMatrix term = snr * (g * g.adjoint());
            total += term;
            if (j != k) interference += term;
        }
        return linalg::logdet_hermitian(total) - linalg::logdet_hermitian(interference);
    }

    // Zero forcing: antenna a of user k listens to beam a of user k.
    double rate = 0.0;
    for (Eigen::Index a = 0; a < n; ++a) {
        double signal = 0.0;
        double leak = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
            for (Eigen::Index b = 0; b < v[j].cols(); ++b) {
                const double p = snr * std::norm(h_k.col(a).dot(v[j].col(b)));
                if (j == k && b == a) signal += p; else leak += p;
            }
        }
        rate += std::log2(1.0 + signal + leak) - std::log2(1.0 + leak);
    }
    return rate;
}

double instant_sum_rate(const SystemConfig& cfg, std::span<const ComplexMatrix> channels, const PrecoderSet& precoders) {
    double acc = 0.0;
    for (std::size_t k = 0; k < channels.size(); ++k) acc += instant_rate_per_user(cfg, channels[k], precoders, k);
    return acc;
}

AnalogObservation analog_feedback(RngStream& rng, const SystemConfig& cfg, const ComplexMatrix& h_k, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorKind::ParameterError, "analog_feedback needs beta > 0");
    const double bp = beta * cfg.P;
    const ComplexMatrix noise = gaussian_matrix(rng, static_cast<std::size_t>(h_k.rows()), static_cast<std::size_t>(h_k.cols()));
    AnalogObservation obs;
    obs.beta = beta;
    obs.received = std::sqrt(bp) * h_k + noise;
    obs.estimate = (std::sqrt(bp) / (1.0 + bp)) * obs.received;
    obs.residual = std::sqrt(1.0 + bp) * (h_k - obs.estimate);
    return obs;
}

double thm1_bound(const SystemConfig& cfg, double distortion) {
    if (!(distortion >= 0.0)) throw Error(ErrorKind::ParameterError, "thm1_bound needs D >= 0");
    const double n = cfg.N;
    return n * std::log2(1.0 + cfg.P / n * distortion);
}

AnalogBound analog_bound(const SystemConfig& cfg, double beta) {
    if (!(beta > 0.0)) throw Error(ErrorKind::ParameterError, "analog_bound needs beta > 0");
    const double n = cfg.N;
    const double frac = static_cast<double>(cfg.M - cfg.N) / cfg.M;
    return {n * std::log2(1.0 + frac * cfg.P / (1.0 + beta * cfg.P)), n * std::log2(1.0 + frac / beta)};
}

} // namespace grassfeed
