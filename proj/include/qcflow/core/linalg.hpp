// Copyright 2026 The qcflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "qcflow/core/error.hpp"

namespace qcflow {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline double max_abs(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

/// max-abs entry of U^dagger U - I.
inline double unitarity_error(const Matrix& u) {
    if (u.rows() != u.cols()) {
        return INFINITY;
    }
    return max_abs(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()));
}

inline bool is_unitary(const Matrix& u, double tol = 1e-10) {
    return unitarity_error(u) <= tol;
}

inline bool is_hermitian(const Matrix& h, double tol = 1e-10) {
    return h.rows() == h.cols() && max_abs(h - h.adjoint()) <= tol;
}

/// exp(-i t H) for Hermitian H by spectral decomposition.
inline Matrix hermitian_expm(const Matrix& h, double t) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    QCFLOW_REQUIRE(es.info() == Eigen::Success, "eigendecomposition failed");
    Vector phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) {
        phases[i] = std::exp(Complex(0.0, -t * es.eigenvalues()[i]));
    }
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Principal square root of a Hermitian positive semidefinite matrix.
/// Slightly negative eigenvalues from round-off are clamped to zero.
inline Matrix psd_sqrt(const Matrix& a) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    QCFLOW_REQUIRE(es.info() == Eigen::Success, "eigendecomposition failed");
    RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

/// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
inline double state_fidelity(const Matrix& rho, const Matrix& sigma) {
    QCFLOW_REQUIRE(rho.rows() == sigma.rows() && rho.cols() == sigma.cols(),
                   "fidelity: dimension mismatch");
    const Matrix s = psd_sqrt(rho);
    const Matrix inner = s * sigma * s;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (inner + inner.adjoint()));
    double tr = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
        tr += std::sqrt(std::max(0.0, es.eigenvalues()[i]));
    }
    return tr * tr;
}

/// Checks trace one, Hermitian, and eigenvalues >= -tol.
inline bool is_density_matrix(const Matrix& rho, double tol = 1e-9) {
    if (rho.rows() != rho.cols() || !is_power_of_two(rho.rows())) {
        return false;
    }
    if (!is_hermitian(rho, tol) || std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) {
        return false;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// log(sum(exp(x))) without overflow.
inline double log_sum_exp(const std::vector<double>& xs) {
    if (xs.empty()) {
        return -INFINITY;
    }
    const double m = *std::max_element(xs.begin(), xs.end());
    double s = 0.0;
    for (double x : xs) {
        s += std::exp(x - m);
    }
    return m + std::log(s);
}

} // namespace qcflow
