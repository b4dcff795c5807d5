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

#include "grassfeed/quant_emulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <string>

#include "grassfeed/error.hpp"

namespace grassfeed {

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                         0.9602898564975363};
constexpr std::array<double, 4> kGlWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};
constexpr std::array<char, 4> kCacheMagic{'G', 'F', 'C', 'E'};

} // namespace

QuantDecomposition decompose(const SubspaceFrame& h_tilde, const SubspaceFrame& h_hat) {
    const Eigen::Index m = h_tilde.ambient_dim();
    const Eigen::Index n = h_tilde.dim();
    if (h_hat.ambient_dim() != m || h_hat.dim() != n) {
        throw Error(ErrorKind::DimensionError, "decompose: frame shapes differ");
    }
    if (m < 2 * n) throw Error(ErrorKind::DimensionError, "decompose needs M >= 2N");

    const ComplexMatrix cross = h_hat.basis().adjoint() * h_tilde.basis();
    const ComplexMatrix along = h_hat.basis() * cross;
    const ComplexMatrix across = h_tilde.basis() - along;

    linalg::QrResult col;
    try {
        col = linalg::thin_qr(along);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::RankDeficient) throw;
        throw Error(ErrorKind::DegenerateProjection, "decompose: projection onto span(H_hat) is rank deficient");
    }
    ComplexMatrix x = h_hat.basis().adjoint() * col.q;

    // Identical subspaces leave nothing in the complement; any basis of the
    // nullspace then serves as S.
    if (across.norm() <= linalg::kRankFloor) {
        const ComplexMatrix null_basis = linalg::left_nullspace_basis(h_hat.basis());
        return {std::move(x), std::move(col.r), ComplexMatrix::Zero(n, n),
                SubspaceFrame(null_basis.leftCols(n), SubspaceFrame::Unchecked{})};
    }
    linalg::QrResult comp;
    try {
        comp = linalg::thin_qr(across);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::RankDeficient) throw;
        throw Error(ErrorKind::DegenerateProjection, "decompose: complement projection is rank deficient");
    }
    return {std::move(x), std::move(col.r), std::move(comp.r), SubspaceFrame(std::move(comp.q), SubspaceFrame::Unchecked{})};
}

double min_d2_quantile(const GrassmannConstants& gc, unsigned bits, double u) {
    if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "min_d2_quantile needs u in [0, 1)");
    if (u == 0.0) return 0.0;
    // Per-codeword CDF level F with 1 - (1 - F)^{2^B} = u, i.e.
    // F = -expm1(2^{-B} log1p(-u)), kept in logs for large B.
    const double l = std::log1p(-u); // < 0
    const double x = std::ldexp(l, -static_cast<int>(bits));
    double log_f;
    if (std::abs(x) < 1e-8) {
        log_f = std::log(-l) - static_cast<double>(bits) * std::numbers::ln2 + std::log1p(x / 2.0);
    } else {
        log_f = std::log(-std::expm1(x));
    }
    const double d2 = std::exp((log_f - std::log(gc.c_mn)) / static_cast<double>(gc.T));
    return std::min(d2, static_cast<double>(gc.N));
}

double min_d2_tail_probability(const GrassmannConstants& gc, unsigned bits) {
    if (gc.c_mn >= 1.0) return 0.0;
    return std::exp(std::ldexp(std::log1p(-gc.c_mn), static_cast<int>(bits)));
}

double sample_min_d2(RngStream& rng, const GrassmannConstants& gc, unsigned bits, const EmulatorOptions& options) {
    const double log2_effective = std::log2(gc.c_mn) + static_cast<double>(bits);
    if (!(log2_effective >= std::log2(options.min_effective_codebook))) {
        throw Error(ErrorKind::FallbackRequired, "C_MN 2^B = " + std::to_string(std::exp2(log2_effective)) +
                                                     " is below the emulation guard; quantize exhaustively");
    }
    return min_d2_quantile(gc, bits, rng.uniform());
}

// ---------------------------------------------------------------------------

CondEigSampler::CondEigSampler(int M, std::size_t grid_size)
    : m_(M), grid_size_(grid_size), v_m_(v_m_constant(M)) {
    if (M < 4) throw Error(ErrorKind::ParameterError, "CondEigSampler needs M >= 4");
    if (grid_size < 2) throw Error(ErrorKind::ParameterError, "CondEigSampler needs grid_size >= 2");
    table_.assign(grid_size_ + 1, 0.0);
    const double h = 1.0 / static_cast<double>(grid_size_);
    for (std::size_t i = 0; i < grid_size_; ++i) {
        table_[i + 1] = table_[i] + integrate(static_cast<double>(i) * h, static_cast<double>(i + 1) * h);
    }
    mass_ = table_.back();
    for (double& v : table_) v /= mass_;
    table_.back() = 1.0;
}

CondEigSampler::CondEigSampler(int M, std::size_t grid_size, double mass, std::vector<double> table)
    : m_(M), grid_size_(grid_size), v_m_(v_m_constant(M)), mass_(mass), table_(std::move(table)) {}

double CondEigSampler::v_m_constant(int M) noexcept {
    const double m = M;
    return 0.5 * (m - 1.0) * (m - 2.0) * (m - 2.0) * (m - 3.0);
}

double CondEigSampler::trace_pdf(int M, double z) {
    if (!(z > 0.0 && z <= 1.0)) throw Error(ErrorKind::DomainError, "trace_pdf is only closed-form on (0, 1]");
    const double m = M;
    const double log_coeff = 2.0 * std::lgamma(m) - std::log(m - 1.0) - std::lgamma(2.0 * m - 4.0);
    return std::exp(log_coeff + (2.0 * m - 5.0) * std::log(z));
}

double CondEigSampler::kernel(double t) const noexcept {
    const int a = m_ - 4;
    const double s = 1.0 - 2.0 * t;
    return s * s * std::pow(t * (1.0 - t), a);
}

double CondEigSampler::integrate(double lo, double hi) const noexcept {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t k = 0; k < kGlNodes.size(); ++k) {
        acc += kGlWeights[k] * (kernel(mid - half * kGlNodes[k]) + kernel(mid + half * kGlNodes[k]));
    }
    return acc * half;
}

double CondEigSampler::cdf(double t) const noexcept {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double scaled = t * static_cast<double>(grid_size_);
    const auto i = std::min(static_cast<std::size_t>(scaled), grid_size_ - 1);
    const double lo = static_cast<double>(i) / static_cast<double>(grid_size_);
    return std::clamp(table_[i] + integrate(lo, t) / mass_, 0.0, 1.0);
}

double CondEigSampler::quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw Error(ErrorKind::DomainError, "CondEigSampler::quantile needs u in (0, 1)");
    const auto it = std::upper_bound(table_.begin(), table_.end(), u);
    const auto i = static_cast<std::size_t>(std::distance(table_.begin(), it)) - 1;
    double lo = static_cast<double>(i) / static_cast<double>(grid_size_);
    double hi = static_cast<double>(i + 1) / static_cast<double>(grid_size_);
    double t = 0.5 * (lo + hi);
    // Safeguarded Newton on the exact CDF inside the bracketing cell.
    for (int iter = 0; iter < 100; ++iter) {
        const double f = cdf(t) - u;
        if (f > 0.0) hi = t; else lo = t;
        const double dens = kernel(t) / mass_;
        double next = dens > 0.0 ? t - f / dens : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - t) <= 1e-15 || hi - lo <= 1e-15) return next;
        t = next;
    }
    return t;
}

void CondEigSampler::save(const std::filesystem::path& path) const {
    static_assert(std::endian::native == std::endian::little, "cache I/O assumes a little-endian host");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
    const std::uint32_t version = kCacheVersion;
    const auto m = static_cast<std::uint32_t>(m_);
    const auto g = static_cast<std::uint64_t>(grid_size_);
    os.write(kCacheMagic.data(), kCacheMagic.size());
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&m), sizeof m);
    os.write(reinterpret_cast<const char*>(&g), sizeof g);
    os.write(reinterpret_cast<const char*>(&mass_), sizeof mass_);
    os.write(reinterpret_cast<const char*>(table_.data()), static_cast<std::streamsize>(table_.size() * sizeof(double)));
    if (!os) throw Error(ErrorKind::FormatError, "failed writing " + path.string());
}

CondEigSampler CondEigSampler::load(const std::filesystem::path& path, int M, std::size_t grid_size) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
    std::array<char, 4> magic{};
    std::uint32_t version = 0, m = 0;
    std::uint64_t g = 0;
    double mass = 0.0;
    is.read(magic.data(), magic.size());
    is.read(reinterpret_cast<char*>(&version), sizeof version);
    is.read(reinterpret_cast<char*>(&m), sizeof m);
    is.read(reinterpret_cast<char*>(&g), sizeof g);
    is.read(reinterpret_cast<char*>(&mass), sizeof mass);
    if (!is || magic != kCacheMagic) throw Error(ErrorKind::FormatError, "not a sampler cache file");
    if (version != kCacheVersion || m != static_cast<std::uint32_t>(M) || g != grid_size) {
        throw Error(ErrorKind::FormatError, "sampler cache key mismatch");
    }
    std::vector<double> table(grid_size + 1);
    is.read(reinterpret_cast<char*>(table.data()), static_cast<std::streamsize>(table.size() * sizeof(double)));
    if (!is) throw Error(ErrorKind::FormatError, "truncated sampler cache");
    return {M, grid_size, mass, std::move(table)};
}

CondEigSampler CondEigSampler::cached(const std::filesystem::path& dir, int M, std::size_t grid_size) {
    const auto path = dir / ("condeig_M" + std::to_string(M) + "_G" + std::to_string(grid_size) + ".bin");
    if (std::filesystem::exists(path)) {
        try {
            return load(path, M, grid_size);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::FormatError) throw;
        }
    }
    CondEigSampler fresh(M, grid_size);
    std::filesystem::create_directories(dir);
    fresh.save(path);
    return fresh;
}

std::pair<double, double> sample_cond_eigs(RngStream& rng, const CondEigSampler& sampler, double z) {
    if (!(z > 0.0 && z <= 1.0)) throw Error(ErrorKind::DomainError, "sample_cond_eigs needs z in (0, 1]");
    const double t = sampler.quantile(rng.uniform_open());
    const double d1 = t * z;
    return {d1, z - d1};
}

// ---------------------------------------------------------------------------

QuantEmulator::QuantEmulator(int M, int N, EmulatorOptions options)
    : gc_(GrassmannConstants::make(M, N)), options_(options) {
    if (N > 2) {
        throw Error(ErrorKind::IncompatiblePolicy, "quantization emulation supports N <= 2 only");
    }
    if (M < 2 * N) throw Error(ErrorKind::DimensionError, "quantization emulation needs M >= 2N");
    if (N == 2) {
        if (options_.sampler_cache_dir.empty()) sampler_.emplace(M);
        else sampler_.emplace(CondEigSampler::cached(options_.sampler_cache_dir, M));
    }
}

bool QuantEmulator::admits(unsigned bits) const noexcept {
    return std::log2(gc_.c_mn) + static_cast<double>(bits) >= std::log2(options_.min_effective_codebook);
}

EmulatedQuantization QuantEmulator::emulate(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits) const {
    if (h_tilde.ambient_dim() != gc_.M || h_tilde.dim() != gc_.N) {
        throw Error(ErrorKind::DimensionError, "QuantEmulator::emulate: frame shape does not match emulator");
    }
    const Eigen::Index n = gc_.N;
    const double z = sample_min_d2(rng, gc_, bits, options_);

    ComplexMatrix z_factor(n, n);
    ComplexMatrix y_factor(n, n);
    if (n == 1) {
        z_factor(0, 0) = std::sqrt(z);
        y_factor(0, 0) = std::sqrt(std::max(0.0, 1.0 - z));
    } else {
        const auto [d1, d2] = sample_cond_eigs(rng, *sampler_, z);
        const SubspaceFrame e = isotropic_frame(rng, 2, 2);
        linalg::RealVector d(2);
        d << d1, d2;
        ComplexMatrix gram = e.basis() * d.asDiagonal() * e.basis().adjoint();
        gram = 0.5 * (gram + gram.adjoint()).eval();
        z_factor = linalg::cholesky_upper(gram);
        y_factor = linalg::cholesky_upper(ComplexMatrix::Identity(2, 2) - gram);
    }
    const SubspaceFrame x = isotropic_frame(rng, static_cast<std::size_t>(n), static_cast<std::size_t>(n));
    const SubspaceFrame s = isotropic_frame_in_nullspace(rng, h_tilde, static_cast<std::size_t>(n));
    ComplexMatrix h_hat = h_tilde.basis() * (x.basis() * y_factor) + s.basis() * z_factor;
    return {SubspaceFrame(std::move(h_hat), SubspaceFrame::Unchecked{}), z};
}

EmulatedQuantization emulate_quantization(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits,
                                          const EmulatorOptions& options) {
    const QuantEmulator emulator(static_cast<int>(h_tilde.ambient_dim()), static_cast<int>(h_tilde.dim()), options);
    return emulator.emulate(rng, h_tilde, bits);
}

} // namespace grassfeed
