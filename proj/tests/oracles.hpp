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

// Reference computations written against plain std::complex arrays so that
// the library's Eigen-based paths are checked by something that shares no
// code with them.

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;

struct Dense {
    std::size_t rows = 0, cols = 0;
    std::vector<cd> a; // row-major
    Dense(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}
    explicit Dense(const Eigen::MatrixXcd& m) : Dense(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())) {
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) (*this)(i, j) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    cd& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    cd operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

inline Dense adjoint_times(const Dense& x, const Dense& y) {
    Dense out(x.cols, y.cols);
    for (std::size_t i = 0; i < x.cols; ++i)
        for (std::size_t j = 0; j < y.cols; ++j) {
            cd s = 0.0;
            for (std::size_t m = 0; m < x.rows; ++m) s += std::conj(x(m, i)) * y(m, j);
            out(i, j) = s;
        }
    return out;
}

/// Modified Gram-Schmidt orthonormal basis of the column span.
inline Dense mgs(Dense x) {
    for (std::size_t j = 0; j < x.cols; ++j) {
        for (std::size_t p = 0; p < j; ++p) {
            cd s = 0.0;
            for (std::size_t m = 0; m < x.rows; ++m) s += std::conj(x(m, p)) * x(m, j);
            for (std::size_t m = 0; m < x.rows; ++m) x(m, j) -= s * x(m, p);
        }
        double n = 0.0;
        for (std::size_t m = 0; m < x.rows; ++m) n += std::norm(x(m, j));
        n = std::sqrt(n);
        for (std::size_t m = 0; m < x.rows; ++m) x(m, j) /= n;
    }
    return x;
}

/// N - sum |<a_i, b_j>|^2 on orthonormalized inputs.
inline double chordal_d2(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const Dense g = adjoint_times(mgs(Dense(a)), mgs(Dense(b)));
    double s = 0.0;
    for (const cd& v : g.a) s += std::norm(v);
    return static_cast<double>(g.rows) - s;
}

/// det by Gaussian elimination with partial pivoting.
inline cd determinant(Dense x) {
    const std::size_t n = x.rows;
    cd det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(x(i, k)) > std::abs(x(piv, k))) piv = i;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(x(k, j), x(piv, j));
            det = -det;
        }
        det *= x(k, k);
        if (x(k, k) == cd(0.0)) return 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            const cd f = x(i, k) / x(k, k);
            for (std::size_t j = k; j < n; ++j) x(i, j) -= f * x(k, j);
        }
    }
    return det;
}

inline double log2det(const Eigen::MatrixXcd& m) { return std::log2(std::abs(determinant(Dense(m)))); }

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// C_MN from the Gamma function: (1/T!) prod_{i=1}^{N} (M-i)! / (N-i)!.
inline double c_mn(int M, int N) {
    const int T = N * (M - N);
    double lg = -std::lgamma(T + 1.0);
    for (int i = 1; i <= N; ++i) lg += std::lgamma(M - i + 1.0) - std::lgamma(N - i + 1.0);
    return std::exp(lg);
}

/// Per-user BD rate evaluated from scratch with Gaussian-elimination determinants.
inline double bd_rate(const Eigen::MatrixXcd& h_k, const std::vector<Eigen::MatrixXcd>& v, std::size_t k, double p_over_m) {
    const Eigen::Index n = h_k.cols();
    Eigen::MatrixXcd all = Eigen::MatrixXcd::Identity(n, n);
    Eigen::MatrixXcd interf = Eigen::MatrixXcd::Identity(n, n);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const Eigen::MatrixXcd g = h_k.adjoint() * v[j];
        const Eigen::MatrixXcd t = p_over_m * g * g.adjoint();
        all += t;
        if (j != k) interf += t;
    }
    return log2det(all) - log2det(interf);
}

} // namespace oracle
