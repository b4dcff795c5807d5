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

#include "grassfeed/ensembles.hpp"

#include <string>

#include "grassfeed/error.hpp"

namespace grassfeed {

SubspaceFrame::SubspaceFrame(ComplexMatrix basis) : basis_(std::move(basis)) {
    if (basis_.cols() < 1 || basis_.rows() < basis_.cols()) {
        throw Error(ErrorKind::DimensionError, "SubspaceFrame needs rows >= cols >= 1");
    }
    const double res = linalg::orthonormality_residual(basis_);
    if (!(res <= linalg::kOrthoTol)) {
        throw Error(ErrorKind::ParameterError, "SubspaceFrame columns not orthonormal (residual " + std::to_string(res) + ")");
    }
}

SubspaceFrame SubspaceFrame::span_of(const ComplexMatrix& a) {
    return {linalg::thin_qr(a).q, Unchecked{}};
}

ComplexMatrix gaussian_matrix(RngStream& rng, std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) throw Error(ErrorKind::DimensionError, "gaussian_matrix needs m, n >= 1");
    ComplexMatrix g(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    // Row-major fill order so the draw sequence matches the logical layout.
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = rng.complex_normal();
    return g;
}

SubspaceFrame isotropic_frame(RngStream& rng, std::size_t m, std::size_t n) {
    if (n < 1 || m < n) throw Error(ErrorKind::DimensionError, "isotropic_frame needs m >= n >= 1");
    // A Gaussian draw is rank deficient with probability zero; redraw if the
    // floor is ever hit rather than surfacing a spurious error.
    for (;;) {
        try {
            return SubspaceFrame::span_of(gaussian_matrix(rng, m, n));
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::RankDeficient) throw;
        }
    }
}

SubspaceFrame isotropic_frame_in_nullspace(RngStream& rng, const SubspaceFrame& anchor, std::size_t n) {
    const auto m = static_cast<std::size_t>(anchor.ambient_dim());
    const auto k = static_cast<std::size_t>(anchor.dim());
    if (n < 1 || n > m - k) {
        throw Error(ErrorKind::DimensionError,
                    "isotropic_frame_in_nullspace: n=" + std::to_string(n) + " exceeds nullspace dimension " +
                        std::to_string(m - k));
    }
    const ComplexMatrix null_basis = linalg::left_nullspace_basis(anchor.basis());
    const SubspaceFrame inner = isotropic_frame(rng, m - k, n);
    return {null_basis * inner.basis(), SubspaceFrame::Unchecked{}};
}

ComplexMatrix matrix_beta(RngStream& rng, std::size_t n, std::size_t a, std::size_t b) {
    if (n < 1 || a < n || b < n) {
        throw Error(ErrorKind::ParameterError, "matrix_beta needs a >= n and b >= n (n=" + std::to_string(n) +
                                                   ", a=" + std::to_string(a) + ", b=" + std::to_string(b) + ")");
    }
    const std::size_t dim = a + b;
    const SubspaceFrame w = isotropic_frame(rng, dim, a);
    const SubspaceFrame h = isotropic_frame(rng, dim, n);
    const ComplexMatrix proj = h.basis() - w.basis() * (w.basis().adjoint() * h.basis());
    ComplexMatrix out = h.basis().adjoint() * proj;
    return 0.5 * (out + out.adjoint()).eval();
}

} // namespace grassfeed
