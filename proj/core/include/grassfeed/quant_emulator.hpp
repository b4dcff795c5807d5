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
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "grassfeed/grassmann.hpp"

namespace grassfeed {

/// H_tilde = H_hat X Y + S Z, relating a channel subspace to its quantization.
struct QuantDecomposition {
    ComplexMatrix x; // N x N unitary
    ComplexMatrix y; // N x N upper triangular, positive diagonal
    ComplexMatrix z; // N x N upper triangular, non-negative diagonal; tr(Z^H Z) = d^2
    SubspaceFrame s; // M x N, inside the left nullspace of the reference frame
};

/// Splits `h_tilde` into its components along span(h_hat) and the
/// orthogonal complement. Needs M >= 2N. Throws DegenerateProjection if
/// either component is rank deficient (an exactly zero complement is
/// accepted and yields Z = 0).
QuantDecomposition decompose(const SubspaceFrame& h_tilde, const SubspaceFrame& h_hat);

struct EmulatorOptions {
    /// Emulation needs C_MN 2^B at least this large; below it the minimum
    /// distance may leave the closed-form CDF region and the caller must
    /// quantize exhaustively.
    double min_effective_codebook = 40.0;
    /// Directory for CondEigSampler cache files; empty disables caching.
    std::filesystem::path sampler_cache_dir;
};

/// Inverse of the min-of-2^B CDF 1 - (1 - C_MN x^T)^{2^B} at probability u,
/// evaluated in the log domain. Valid for any bits.
double min_d2_quantile(const GrassmannConstants& gc, unsigned bits, double u);

/// P(min d^2 > 1), the mass the closed-form CDF does not describe.
double min_d2_tail_probability(const GrassmannConstants& gc, unsigned bits);

/// One draw of the minimum squared chordal distance over 2^bits isotropic
/// codewords. Throws FallbackRequired below the guard.
double sample_min_d2(RngStream& rng, const GrassmannConstants& gc, unsigned bits, const EmulatorOptions& options = {});

/// Conditional law of the eigenvalue split (d1, z - d1) of Z^H Z given its
/// trace z, for N = 2. Given z, t = d1 / z has density proportional to
/// (1 - 2t)^2 t^{M-4} (1 - t)^{M-4} on (0, 1), independent of z, so the
/// tabulated CDF is one-dimensional.
class CondEigSampler {
public:
    static constexpr std::size_t kDefaultGridSize = 4096;
    static constexpr std::uint32_t kCacheVersion = 1;

    explicit CondEigSampler(int M, std::size_t grid_size = kDefaultGridSize);

    [[nodiscard]] int M() const noexcept { return m_; }
    [[nodiscard]] std::size_t grid_size() const noexcept { return grid_size_; }
    /// V_M = (M-1)(M-2)^2(M-3) / 2, the normalizer of the joint eigenvalue density.
    [[nodiscard]] double v_m() const noexcept { return v_m_; }

    /// Unnormalized kernel (1 - 2t)^2 t^{M-4} (1 - t)^{M-4}.
    [[nodiscard]] double kernel(double t) const noexcept;
    /// Integral of kernel over [0, 1].
    [[nodiscard]] double kernel_mass() const noexcept { return mass_; }
    /// Conditional CDF of t = d1 / z.
    [[nodiscard]] double cdf(double t) const noexcept;
    [[nodiscard]] double quantile(double u) const;
    /// CDF values at t_i = i / grid_size, i = 0..grid_size.
    [[nodiscard]] const std::vector<double>& grid_cdf() const noexcept { return table_; }

    /// Density of Z = D1 + D2 on (0, 1]: z^{2M-5} Gamma(M)^2 / ((M-1) Gamma(2M-4)).
    static double trace_pdf(int M, double z);
    static double v_m_constant(int M) noexcept;

    /// Binary cache: "GFCE", u32 version, u32 M, u64 grid_size, f64 mass,
    /// then grid_size + 1 f64 CDF values.
    void save(const std::filesystem::path& path) const;
    /// Throws FormatError when the file is for a different (M, grid size, version).
    static CondEigSampler load(const std::filesystem::path& path, int M, std::size_t grid_size = kDefaultGridSize);
    /// Loads `dir`/condeig_M<M>_G<grid>.bin, or builds the table and writes
    /// that file when it is missing or stale.
    static CondEigSampler cached(const std::filesystem::path& dir, int M, std::size_t grid_size = kDefaultGridSize);

private:
    CondEigSampler(int M, std::size_t grid_size, double mass, std::vector<double> table);
    [[nodiscard]] double integrate(double lo, double hi) const noexcept;

    int m_;
    std::size_t grid_size_;
    double v_m_;
    double mass_ = 0.0;
    std::vector<double> table_;
};

/// Draws (d1, d2) with d1 + d2 = z from the conditional eigenvalue law.
std::pair<double, double> sample_cond_eigs(RngStream& rng, const CondEigSampler& sampler, double z);

struct EmulatedQuantization {
    SubspaceFrame h_hat;
    double d2;
};

/// Draws the quantization of a channel subspace under a fresh random
/// codebook of 2^bits entries without searching the codebook:
/// H_hat = H_tilde X Y + S Z with the distance drawn from the first order
/// statistic. Supports N in {1, 2}, M >= 2N.
class QuantEmulator {
public:
    QuantEmulator(int M, int N, EmulatorOptions options = {});

    [[nodiscard]] const GrassmannConstants& constants() const noexcept { return gc_; }
    [[nodiscard]] const EmulatorOptions& options() const noexcept { return options_; }
    /// True when the guard admits `bits`.
    [[nodiscard]] bool admits(unsigned bits) const noexcept;

    EmulatedQuantization emulate(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits) const;

private:
    GrassmannConstants gc_;
    EmulatorOptions options_;
    std::optional<CondEigSampler> sampler_;
};

/// Convenience wrapper that builds a QuantEmulator for the frame's shape.
EmulatedQuantization emulate_quantization(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits,
                                          const EmulatorOptions& options = {});

} // namespace grassfeed
