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

#include "grassfeed/grassmann.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include "grassfeed/error.hpp"

namespace grassfeed {

namespace {

constexpr std::array<char, 4> kCodebookMagic{'G', 'F', 'C', 'B'};
constexpr std::uint32_t kCodebookVersion = 1;

// Exponent of prime p in n! (Legendre).
int legendre(int n, int p) {
    int e = 0;
    for (long long q = p; q <= n; q *= p) e += static_cast<int>(n / q);
    return e;
}

bool is_prime(int n) {
    if (n < 2) return false;
    for (int d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

double trace_overlap(const ComplexMatrix& h_tilde, const ComplexMatrix& w) {
    return (h_tilde.adjoint() * w).squaredNorm();
}

template <typename T>
void put(std::ostream& os, T v) {
    static_assert(std::endian::native == std::endian::little, "codebook I/O assumes a little-endian host");
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is) throw Error(ErrorKind::FormatError, "truncated codebook stream");
    return v;
}

} // namespace

GrassmannConstants GrassmannConstants::make(int M, int N) {
    if (N < 1 || M <= N || M > 16) {
        throw Error(ErrorKind::ParameterError,
                    "GrassmannConstants needs 1 <= N < M <= 16, got M=" + std::to_string(M) + " N=" + std::to_string(N));
    }
    GrassmannConstants gc;
    gc.M = M;
    gc.N = N;
    gc.T = N * (M - N);

    // Exact prime factorization of the factorial ratio; only the final
    // product is rounded.
    std::map<int, int> exponents;
    const int top = std::max(M, gc.T);
    for (int p = 2; p <= top; ++p) {
        if (!is_prime(p)) continue;
        int e = -legendre(gc.T, p);
        for (int i = 1; i <= N; ++i) e += legendre(M - i, p) - legendre(N - i, p);
        if (e != 0) exponents[p] = e;
    }
    long double value = 1.0L;
    for (const auto& [p, e] : exponents) value *= std::pow(static_cast<long double>(p), e);
    gc.c_mn = static_cast<double>(value);
    return gc;
}

linalg::RealVector principal_angles(const SubspaceFrame& a, const SubspaceFrame& b) {
    const ComplexMatrix cross = a.basis().adjoint() * b.basis();
    Eigen::JacobiSVD<ComplexMatrix> svd(cross);
    linalg::RealVector sv = svd.singularValues();
    // Singular values come out descending, so the angles come out ascending.
    linalg::RealVector angles(sv.size());
    for (Eigen::Index j = 0; j < sv.size(); ++j) angles(j) = std::acos(std::clamp(sv(j), 0.0, 1.0));
    return angles;
}

double chordal_distance_sq(const SubspaceFrame& a, const SubspaceFrame& b) {
    if (a.ambient_dim() != b.ambient_dim() || a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionError, "chordal_distance_sq: frame shapes differ");
    }
    return static_cast<double>(a.dim()) - trace_overlap(a.basis(), b.basis());
}

Codebook random_codebook(RngStream& rng, std::size_t M, std::size_t N, unsigned bits, std::size_t cap) {
    if (bits >= 63 || (std::size_t{1} << bits) > cap) {
        throw Error(ErrorKind::MemoryGuard, "codebook with 2^" + std::to_string(bits) + " entries exceeds the cap of " +
                                                std::to_string(cap));
    }
    if (N < 1 || M <= N) throw Error(ErrorKind::DimensionError, "random_codebook needs M > N >= 1");
    Codebook cb{M, N, bits, {}};
    const std::size_t size = std::size_t{1} << bits;
    cb.entries.reserve(size);
    for (std::size_t i = 0; i < size; ++i) cb.entries.push_back(isotropic_frame(rng, M, N));
    return cb;
}

QuantizationResult quantize(const SubspaceFrame& h_tilde, const Codebook& cb) {
    if (cb.entries.empty()) throw Error(ErrorKind::ParameterError, "quantize: empty codebook");
    if (static_cast<std::size_t>(h_tilde.ambient_dim()) != cb.M || static_cast<std::size_t>(h_tilde.dim()) != cb.N) {
        throw Error(ErrorKind::DimensionError, "quantize: channel shape does not match codebook");
    }
    QuantizationResult best{0, std::numeric_limits<double>::infinity()};
    const double n = static_cast<double>(cb.N);
    for (std::size_t i = 0; i < cb.entries.size(); ++i) {
        const double d2 = n - trace_overlap(h_tilde.basis(), cb.entries[i].basis());
        if (d2 < best.d2) best = {i, d2};
    }
    best.d2 = std::clamp(best.d2, 0.0, n);
    return best;
}

QuantizationResult quantize(const ComplexMatrix& h, const Codebook& cb) {
    return quantize(SubspaceFrame::span_of(h), cb);
}

ExhaustiveQuantization quantize_with_fresh_codebook(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits,
                                                    std::size_t cap) {
    if (bits >= 63 || (std::size_t{1} << bits) > cap) {
        throw Error(ErrorKind::MemoryGuard, "codebook with 2^" + std::to_string(bits) + " entries exceeds the cap of " +
                                                std::to_string(cap));
    }
    const auto M = static_cast<std::size_t>(h_tilde.ambient_dim());
    const auto N = static_cast<std::size_t>(h_tilde.dim());
    const std::size_t size = std::size_t{1} << bits;
    const double n = static_cast<double>(N);

    SubspaceFrame best = isotropic_frame(rng, M, N);
    double best_d2 = n - trace_overlap(h_tilde.basis(), best.basis());
    std::size_t best_index = 0;
    for (std::size_t i = 1; i < size; ++i) {
        SubspaceFrame w = isotropic_frame(rng, M, N);
        const double d2 = n - trace_overlap(h_tilde.basis(), w.basis());
        if (d2 < best_d2) {
            best_d2 = d2;
            best_index = i;
            best = std::move(w);
        }
    }
    return {std::move(best), std::clamp(best_d2, 0.0, n), best_index};
}

DistortionBound distortion_bound(const GrassmannConstants& gc, double bits, double a) {
    if (!(a > 0.0 && a < 1.0)) throw Error(ErrorKind::ParameterError, "distortion_bound needs a in (0, 1)");
    const double log2_effective = std::log2(gc.c_mn) + bits; // log2(C_MN 2^B)
    if (!(log2_effective >= 0.0)) {
        throw Error(ErrorKind::ParameterError,
                    "distortion_bound needs C_MN 2^B >= 1 (bits=" + std::to_string(bits) + ")");
    }
    const double main = distortion_main_term(gc, bits);
    const double exponent = std::exp2((1.0 - a) * log2_effective);
    const double tail = static_cast<double>(gc.N) * std::exp(-exponent);
    return {main + tail, main, tail};
}

double distortion_main_term(const GrassmannConstants& gc, double bits) {
    const double t = static_cast<double>(gc.T);
    return std::tgamma(1.0 / t) / t * std::pow(gc.c_mn, -1.0 / t) * std::exp2(-bits / t);
}

double empirical_distortion(RngStream& rng, std::size_t M, std::size_t N, unsigned bits, std::size_t trials) {
    if (trials == 0) throw Error(ErrorKind::ParameterError, "empirical_distortion needs trials >= 1");
    double acc = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const SubspaceFrame h = SubspaceFrame::span_of(gaussian_matrix(rng, M, N));
        acc += quantize_with_fresh_codebook(rng, h, bits).d2;
    }
    return acc / static_cast<double>(trials);
}

void write_codebook(std::ostream& os, const Codebook& cb) {
    os.write(kCodebookMagic.data(), kCodebookMagic.size());
    put<std::uint32_t>(os, kCodebookVersion);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cb.M));
    put<std::uint32_t>(os, static_cast<std::uint32_t>(cb.N));
    put<std::uint32_t>(os, cb.bits);
    for (const auto& e : cb.entries) {
        for (Eigen::Index i = 0; i < e.basis().rows(); ++i) {
            for (Eigen::Index j = 0; j < e.basis().cols(); ++j) {
                put<double>(os, e.basis()(i, j).real());
                put<double>(os, e.basis()(i, j).imag());
            }
        }
    }
    if (!os) throw Error(ErrorKind::FormatError, "failed writing codebook");
}

Codebook read_codebook(std::istream& is) {
    std::array<char, 4> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kCodebookMagic) throw Error(ErrorKind::FormatError, "not a codebook file (bad magic)");
    if (get<std::uint32_t>(is) != kCodebookVersion) throw Error(ErrorKind::FormatError, "unsupported codebook version");
    Codebook cb;
    cb.M = get<std::uint32_t>(is);
    cb.N = get<std::uint32_t>(is);
    cb.bits = get<std::uint32_t>(is);
    if (cb.N < 1 || cb.M <= cb.N || cb.bits >= 63 || (std::size_t{1} << cb.bits) > kDefaultCodebookCap) {
        throw Error(ErrorKind::FormatError, "codebook header out of range");
    }
    const std::size_t size = std::size_t{1} << cb.bits;
    cb.entries.reserve(size);
    for (std::size_t k = 0; k < size; ++k) {
        ComplexMatrix w(static_cast<Eigen::Index>(cb.M), static_cast<Eigen::Index>(cb.N));
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) {
                const double re = get<double>(is);
                const double im = get<double>(is);
                w(i, j) = {re, im};
            }
        }
        cb.entries.emplace_back(std::move(w));
    }
    return cb;
}

void save_codebook(const std::filesystem::path& path, const Codebook& cb) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
    write_codebook(os, cb);
}

Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error(ErrorKind::FormatError, "cannot open " + path.string());
    return read_codebook(is);
}

} // namespace grassfeed
