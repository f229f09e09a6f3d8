// Copyright 2026 The Kraussim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <complex>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

// Dense complex linear algebra primitives shared by every other header:
// Kronecker constructions, row-stacking vectorization, matrix exponential
// and PSD square root, norms and structure predicates.
//
// Tolerances are absolute values scaled by the max magnitude of the
// operands unless noted otherwise.

namespace kraussim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex imag_unit{0.0, 1.0};

inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Hilbert-Schmidt (Frobenius) norm, sqrt(Tr(A^dag A)).
inline double hs_norm(const Matrix& a) { return a.norm(); }

/// Operator norm (largest singular value).
inline double op_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

struct MatrixNorms {
    double hs;
    double op;
};

inline MatrixNorms matrix_norms(const Matrix& a) { return {hs_norm(a), op_norm(a)}; }

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

/// Per-entry check of A == A^dag within tol * max|entry|.
inline bool is_hermitian(const Matrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = max_abs(a);
    return max_abs(a - a.adjoint()) <= tol * scale;
}

inline bool is_unitary(const Matrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(max_abs(a), 1.0);
    return max_abs(a.adjoint() * a - identity(a.rows())) <= tol * scale * scale;
}

inline bool is_psd(const Matrix& a, double tol = 1e-10) {
    if (!is_hermitian(a, tol)) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) / 2.0);
    const double scale = std::max(max_abs(a), 1.0);
    return es.eigenvalues().minCoeff() >= -tol * scale;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    return Eigen::kroneckerProduct(a, b).eval();
}

enum class KronMode { product, sum };

/// Conjugated Kronecker construction of a square matrix A:
/// product mode gives A (x) conj(A), sum mode gives A (x) I + I (x) conj(A).
inline Matrix conj_kron(const Matrix& a, KronMode mode) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("conj_kron: matrix must be square");
    }
    const Matrix ac = a.conjugate();
    if (mode == KronMode::product) return kron(a, ac);
    const Matrix id = identity(a.rows());
    return kron(a, id) + kron(id, ac);
}

/// Row-stacking vectorization: entry (i*d + j) holds rho(i, j).  With this
/// convention vec(A rho B^dag) = (A (x) conj(B)) vec(rho).
inline Vector vectorize(const Matrix& rho) {
    if (rho.rows() != rho.cols()) {
        throw std::invalid_argument("vectorize: matrix must be square");
    }
    const Eigen::Index d = rho.rows();
    Vector v(d * d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            v(i * d + j) = rho(i, j);
        }
    }
    return v;
}

inline Matrix devectorize(const Vector& v) {
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
    if (d * d != v.size()) {
        throw std::invalid_argument("devectorize: length must be a perfect square");
    }
    Matrix rho(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            rho(i, j) = v(i * d + j);
        }
    }
    return rho;
}

/// True when [A, A^dag] vanishes to tol * ||A||_HS^2.
inline bool is_normal(const Matrix& a, double tol = 1e-10) {
    if (a.rows() != a.cols()) return false;
    const double s = hs_norm(a);
    return hs_norm(a * a.adjoint() - a.adjoint() * a) <= tol * s * s;
}

/// Matrix exponential.  Normal inputs take a Schur diagonalization shortcut
/// (exact up to roundoff for the contraction generators used throughout);
/// everything else goes through Pade scaling-and-squaring.
inline Matrix expm(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("expm: matrix must be square");
    }
    if (a.size() == 0) return a;
    if (is_normal(a)) {
        Eigen::ComplexSchur<Matrix> schur(a);
        const Matrix& t = schur.matrixT();
        const Matrix& u = schur.matrixU();
        // Guard: a near-normal-but-defective input can leave a visible
        // off-diagonal in T; only keep the diagonal when it is negligible.
        Matrix off = t;
        off.diagonal().setZero();
        if (hs_norm(off) <= 1e-12 * std::max(hs_norm(a), 1.0)) {
            const Vector d = t.diagonal().array().exp();
            return u * d.asDiagonal() * u.adjoint();
        }
    }
    return a.exp();
}

/// Hermitian PSD square root.  Eigenvalues in [-1e-10 * scale, 0) are
/// clamped to zero; anything below is rejected.
inline Matrix sqrtm_psd(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument("sqrtm_psd: matrix must be square");
    }
    if (!is_hermitian(a, 1e-10)) {
        throw std::invalid_argument("sqrtm_psd: matrix must be Hermitian");
    }
    const double scale = max_abs(a);
    Eigen::SelfAdjointEigenSolver<Matrix> es((a + a.adjoint()) / 2.0);
    RealVector w = es.eigenvalues();
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (w(i) < -1e-10 * scale) {
            throw std::invalid_argument("sqrtm_psd: matrix has a negative eigenvalue");
        }
        w(i) = std::max(w(i), 0.0);
    }
    return es.eigenvectors() * w.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
}

/// Trace distance (1/2)||a - b||_1.
inline double trace_distance(const Matrix& a, const Matrix& b) {
    Eigen::JacobiSVD<Matrix> svd(a - b);
    return 0.5 * svd.singularValues().sum();
}

}  // namespace kraussim
