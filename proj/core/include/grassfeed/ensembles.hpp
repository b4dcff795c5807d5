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

#include "grassfeed/linalg.hpp"
#include "grassfeed/rng.hpp"

namespace grassfeed {

using linalg::ComplexMatrix;

/// M x N matrix with orthonormal columns: a point on the Grassmannian
/// represented by one of its bases.
class SubspaceFrame {
public:
    struct Unchecked {};

    /// Validates ||F^H F - I||_F <= 1e-10.
    explicit SubspaceFrame(ComplexMatrix basis);
    /// For bases that are orthonormal by construction (QR output etc).
    SubspaceFrame(ComplexMatrix basis, Unchecked) noexcept : basis_(std::move(basis)) {}

    [[nodiscard]] const ComplexMatrix& basis() const noexcept { return basis_; }
    [[nodiscard]] Eigen::Index ambient_dim() const noexcept { return basis_.rows(); }
    [[nodiscard]] Eigen::Index dim() const noexcept { return basis_.cols(); }

    /// Orthonormal basis of span(a); throws RankDeficient.
    static SubspaceFrame span_of(const ComplexMatrix& a);

private:
    ComplexMatrix basis_;
};

/// i.i.d. CN(0, 1) entries.
ComplexMatrix gaussian_matrix(RngStream& rng, std::size_t m, std::size_t n);

/// Uniform (isotropic) point of G(m, n), as the Q factor of a Gaussian matrix.
/// With m == n this is a Haar unitary.
SubspaceFrame isotropic_frame(RngStream& rng, std::size_t m, std::size_t n);

/// Isotropic n-plane inside the left nullspace of `anchor`.
SubspaceFrame isotropic_frame_in_nullspace(RngStream& rng, const SubspaceFrame& anchor, std::size_t n);

/// n x n complex matrix-variate beta sample H^H (I - W W^H) H with W an
/// isotropic (a+b) x a frame and H an independent isotropic (a+b) x n frame.
/// E[trace] = n b / (a + b).
ComplexMatrix matrix_beta(RngStream& rng, std::size_t n, std::size_t a, std::size_t b);

} // namespace grassfeed
