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

#include <complex>

#include <Eigen/Dense>

namespace grassfeed::linalg {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Global numerical conventions. Relative to the Frobenius norm of the input.
inline constexpr double kOrthoTol = 1e-10;
inline constexpr double kRankFloor = 1e-12;
inline constexpr double kPsdClamp = 1e-12;
inline constexpr double kPsdReject = 1e-10;

struct QrResult {
    ComplexMatrix q; // m x n, orthonormal columns
    ComplexMatrix r; // n x n, upper triangular, real positive diagonal
};

struct HermitianEigen {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors; // unitary, columns match eigenvalues
};

/// Thin QR with R's diagonal forced real and strictly positive. Throws
/// RankDeficient when any |R_jj| < kRankFloor * ||A||_F.
QrResult thin_qr(const ComplexMatrix& a);

/// Eigen decomposition of a Hermitian matrix, eigenvalues ascending.
HermitianEigen hermitian_eig(const ComplexMatrix& a);

/// Upper triangular U with real non-negative diagonal and U^H U = A.
/// Eigenvalues in [-kPsdReject, 0) are clamped to zero; anything more
/// negative is NotPSD. Zero pivots produce zero rows.
ComplexMatrix cholesky_upper(const ComplexMatrix& a);

/// Orthonormal basis B (m x (m-n)) with B^H A = 0.
ComplexMatrix left_nullspace_basis(const ComplexMatrix& a);

/// log2 det(A) for Hermitian positive definite A via Cholesky.
double logdet_hermitian(const ComplexMatrix& a);

/// ||A^H A - I||_F, the orthonormality residual used throughout.
double orthonormality_residual(const ComplexMatrix& a);

/// Projector A (A^H A)^{-1} A^H onto the column span; only used for
/// subspace comparisons in tests and validation.
ComplexMatrix column_projector(const ComplexMatrix& a);

} // namespace grassfeed::linalg
