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
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "grassfeed/ensembles.hpp"

namespace grassfeed {

/// Dimension constants of G(M, N): T = N (M - N) and the volume constant
/// C_MN = (1 / T!) prod_{i=1}^{N} (M - i)! / (N - i)!, for which a single
/// isotropic codeword satisfies P(d^2 <= x) = C_MN x^T on [0, 1].
struct GrassmannConstants {
    int M = 0;
    int N = 0;
    int T = 0;
    double c_mn = 1.0;

    /// Needs 1 <= N < M <= 16; C_MN is evaluated in exact integer arithmetic.
    static GrassmannConstants make(int M, int N);
};

inline constexpr std::size_t kDefaultCodebookCap = std::size_t{1} << 24;

struct Codebook {
    std::size_t M = 0;
    std::size_t N = 0;
    unsigned bits = 0;
    std::vector<SubspaceFrame> entries;
};

struct QuantizationResult {
    std::size_t index = 0;
    double d2 = 0.0;
};

/// Principal angles in [0, pi/2], ascending.
linalg::RealVector principal_angles(const SubspaceFrame& a, const SubspaceFrame& b);

/// Squared chordal distance N - tr(A^H B B^H A).
double chordal_distance_sq(const SubspaceFrame& a, const SubspaceFrame& b);

/// 2^B independent isotropic frames. Throws MemoryGuard above `cap` entries.
Codebook random_codebook(RngStream& rng, std::size_t M, std::size_t N, unsigned bits,
                         std::size_t cap = kDefaultCodebookCap);

/// Minimum-chordal-distance codeword for span(H); ties go to the lowest index.
QuantizationResult quantize(const ComplexMatrix& h, const Codebook& cb);
QuantizationResult quantize(const SubspaceFrame& h_tilde, const Codebook& cb);

struct ExhaustiveQuantization {
    SubspaceFrame h_hat;
    double d2;
    std::size_t index;
};

/// Same result as quantize(h_tilde, random_codebook(rng, M, N, bits)) with
/// identical RNG consumption, without holding the codebook in memory.
ExhaustiveQuantization quantize_with_fresh_codebook(RngStream& rng, const SubspaceFrame& h_tilde, unsigned bits,
                                                    std::size_t cap = kDefaultCodebookCap);

struct DistortionBound {
    double total;
    double main_term;
    double exp_term;
};

/// Upper bound on the expected quantization distortion of a random codebook
/// with 2^bits entries. Needs C_MN 2^bits >= 1 and a in (0, 1).
DistortionBound distortion_bound(const GrassmannConstants& gc, double bits, double a = 0.5);

/// Main (power-law) term of distortion_bound alone; valid for any bits.
double distortion_main_term(const GrassmannConstants& gc, double bits);

/// Mean quantization distortion over `trials` channels, each quantized with
/// its own fresh random codebook.
double empirical_distortion(RngStream& rng, std::size_t M, std::size_t N, unsigned bits, std::size_t trials);

// Flat binary codebook file, little endian:
//   char[4] "GFCB", u32 version (=1), u32 M, u32 N, u32 bits,
//   then 2^bits entries, each M*N complex numbers in row-major order,
//   each complex number stored as two IEEE-754 doubles (re, im).
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is);
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);

} // namespace grassfeed
