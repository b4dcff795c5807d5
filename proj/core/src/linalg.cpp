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

#include "grassfeed/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "grassfeed/error.hpp"

namespace grassfeed {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::NotPD: return "NotPD";
    case ErrorKind::DimensionError: return "DimensionError";
    case ErrorKind::ParameterError: return "ParameterError";
    case ErrorKind::MemoryGuard: return "MemoryGuard";
    case ErrorKind::DegenerateProjection: return "DegenerateProjection";
    case ErrorKind::FallbackRequired: return "FallbackRequired";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::IncompatiblePolicy: return "IncompatiblePolicy";
    case ErrorKind::NoOverlap: return "NoOverlap";
    case ErrorKind::FormatError: return "FormatError";
    case ErrorKind::UsageError: return "UsageError";
    }
    return "Unknown";
}

namespace linalg {

namespace {

std::string shape(const ComplexMatrix& a) {
    std::ostringstream os;
    os << a.rows() << "x" << a.cols();
    return os.str();
}

} // namespace

QrResult thin_qr(const ComplexMatrix& a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (n < 1 || m < n) {
        throw Error(ErrorKind::DimensionError, "thin_qr needs m >= n >= 1, got " + shape(a));
    }
    const double scale = a.norm();
    const double floor = kRankFloor * scale;

    // Classical Gram-Schmidt with one full reorthogonalization pass. R's
    // diagonal comes out real and positive without a phase fix-up.
    QrResult out{ComplexMatrix(m, n), ComplexMatrix::Zero(n, n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        Eigen::VectorXcd v = a.col(j);
        for (int pass = 0; pass < 2 && j > 0; ++pass) {
            const Eigen::VectorXcd coeff = out.q.leftCols(j).adjoint() * v;
            v.noalias() -= out.q.leftCols(j) * coeff;
            out.r.col(j).head(j) += coeff;
        }
        const double rjj = v.norm();
        if (!(rjj >= floor) || rjj == 0.0) {
            throw Error(ErrorKind::RankDeficient,
                        "thin_qr: column " + std::to_string(j) + " is dependent (" + shape(a) + ")");
        }
        out.r(j, j) = rjj;
        out.q.col(j) = v / rjj;
    }
    return out;
}

HermitianEigen hermitian_eig(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionError, "hermitian_eig needs a square matrix, got " + shape(a));
    }
    const double scale = a.norm();
    if ((a - a.adjoint()).norm() > kOrthoTol * std::max(scale, 1e-300)) {
        throw Error(ErrorKind::NotHermitian, "hermitian_eig: input is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(a);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorKind::NotHermitian, "hermitian_eig: eigen solver failed");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix cholesky_upper(const ComplexMatrix& a) {
    const Eigen::Index n = a.rows();
    if (n != a.cols()) {
        throw Error(ErrorKind::DimensionError, "cholesky_upper needs a square matrix, got " + shape(a));
    }
    ComplexMatrix work = a;
    const double scale = a.norm();
    if (scale > 0.0) {
        const HermitianEigen eig = hermitian_eig(a);
        const double lowest = eig.eigenvalues(0);
        if (lowest < -kPsdReject) {
            throw Error(ErrorKind::NotPSD, "cholesky_upper: eigenvalue " + std::to_string(lowest));
        }
        if (lowest < 0.0) {
            const RealVector clamped = eig.eigenvalues.cwiseMax(0.0);
            work = eig.eigenvectors * clamped.asDiagonal() * eig.eigenvectors.adjoint();
        }
    }

    // Pivots below this are treated as exact zeros of a singular PSD input.
    const double pivot_floor = kPsdClamp * std::max(scale, 1.0);
    ComplexMatrix u = ComplexMatrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double d = work(j, j).real();
        for (Eigen::Index i = 0; i < j; ++i) d -= std::norm(u(i, j));
        if (d <= pivot_floor) continue;
        const double ujj = std::sqrt(d);
        u(j, j) = ujj;
        for (Eigen::Index k = j + 1; k < n; ++k) {
            Complex s = work(j, k);
            for (Eigen::Index i = 0; i < j; ++i) s -= std::conj(u(i, j)) * u(i, k);
            u(j, k) = s / ujj;
        }
    }
    return u;
}

ComplexMatrix left_nullspace_basis(const ComplexMatrix& a) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    if (n < 1 || m <= n) {
        throw Error(ErrorKind::DimensionError, "left_nullspace_basis needs m > n >= 1, got " + shape(a));
    }
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    const double floor = kRankFloor * a.norm();
    const auto& packed = qr.matrixQR();
    for (Eigen::Index j = 0; j < n; ++j) {
        if (!(std::abs(packed(j, j)) >= floor) || packed(j, j) == Complex(0.0)) {
            throw Error(ErrorKind::RankDeficient, "left_nullspace_basis: input " + shape(a) + " is rank deficient");
        }
    }
    ComplexMatrix tail = ComplexMatrix::Identity(m, m).rightCols(m - n);
    return qr.householderQ() * tail;
}

double logdet_hermitian(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionError, "logdet_hermitian needs a square matrix, got " + shape(a));
    }
    Eigen::LLT<ComplexMatrix> llt(a);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorKind::NotPD, "logdet_hermitian: matrix is not positive definite");
    }
    const auto& l = llt.matrixLLT();
    double acc = 0.0;
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        const double d = l(j, j).real();
        if (!(d > 0.0)) throw Error(ErrorKind::NotPD, "logdet_hermitian: zero pivot");
        acc += std::log2(d);
    }
    return 2.0 * acc;
}

double orthonormality_residual(const ComplexMatrix& a) {
    return (a.adjoint() * a - ComplexMatrix::Identity(a.cols(), a.cols())).norm();
}

ComplexMatrix column_projector(const ComplexMatrix& a) {
    const ComplexMatrix q = thin_qr(a).q;
    return q * q.adjoint();
}

} // namespace linalg
} // namespace grassfeed
