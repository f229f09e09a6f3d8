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
#include <optional>
#include <string>
#include <vector>

#include "kraussim/tensor.hpp"

// Open-system model: the master-equation right-hand side, its superoperator
// form, the commutator-structure classifier that decides whether a
// closed-form Kraus series exists, and two classical oracles (dense
// propagator, RK4 integrator).

namespace kraussim {

struct LindbladTerm {
    Matrix op;     // jump operator L_n, dimensionless
    double gamma;  // damping rate, 1/time
};

class LindbladSystem {
  public:
    LindbladSystem(Matrix hamiltonian, std::vector<LindbladTerm> lindblads, double hbar = 1.0)
        : hamiltonian_(std::move(hamiltonian)), lindblads_(std::move(lindblads)), hbar_(hbar) {
        if (hamiltonian_.rows() != hamiltonian_.cols()) {
            throw std::invalid_argument("LindbladSystem: Hamiltonian must be square");
        }
        if (!is_hermitian(hamiltonian_, 1e-10)) {
            throw std::invalid_argument("LindbladSystem: Hamiltonian must be Hermitian");
        }
        if (hbar_ <= 0.0) {
            throw std::invalid_argument("LindbladSystem: hbar must be positive");
        }
        for (const auto& term : lindblads_) {
            if (term.op.rows() != hamiltonian_.rows() || term.op.cols() != hamiltonian_.cols()) {
                throw std::invalid_argument("LindbladSystem: jump operator dimension mismatch");
            }
            if (term.gamma < 0.0) {
                throw std::invalid_argument("LindbladSystem: damping rates must be nonnegative");
            }
        }
    }

    Eigen::Index dim() const { return hamiltonian_.rows(); }
    double hbar() const { return hbar_; }
    const Matrix& hamiltonian() const { return hamiltonian_; }
    const std::vector<LindbladTerm>& lindblads() const { return lindblads_; }

    /// Sum_n gamma_n L_n^dag L_n (Hermitian PSD damping generator).
    Matrix damping_sum() const {
        Matrix g = Matrix::Zero(dim(), dim());
        for (const auto& term : lindblads_) g += term.gamma * term.op.adjoint() * term.op;
        return g;
    }

    /// H - (i hbar / 2) Sum_n gamma_n L_n^dag L_n.
    Matrix effective_hamiltonian() const {
        return hamiltonian_ - (imag_unit * hbar_ / 2.0) * damping_sum();
    }

  private:
    Matrix hamiltonian_;
    std::vector<LindbladTerm> lindblads_;
    double hbar_;
};

struct SuperoperatorPair {
    Matrix h_super;  // conjugated Kronecker sum of -i V_H / hbar
    Matrix l_super;  // Sum_n gamma_n L_n (x) conj(L_n)
    Matrix total() const { return h_super + l_super; }
};

inline SuperoperatorPair build_superoperators(const LindbladSystem& sys) {
    const Matrix v = (-imag_unit / sys.hbar()) * sys.effective_hamiltonian();
    Matrix l = Matrix::Zero(sys.dim() * sys.dim(), sys.dim() * sys.dim());
    for (const auto& term : sys.lindblads()) {
        l += term.gamma * conj_kron(term.op, KronMode::product);
    }
    return {conj_kron(v, KronMode::sum), l};
}

/// Right-hand side of the master equation:
/// -(i/hbar)[H, rho] + Sum_n gamma_n (L rho L^dag - (1/2){L^dag L, rho}).
inline Matrix lindblad_rhs(const LindbladSystem& sys, const Matrix& rho) {
    if (rho.rows() != sys.dim() || rho.cols() != sys.dim()) {
        throw std::invalid_argument("lindblad_rhs: state dimension mismatch");
    }
    Matrix out = (-imag_unit / sys.hbar()) * commutator(sys.hamiltonian(), rho);
    for (const auto& term : sys.lindblads()) {
        const Matrix ldl = term.op.adjoint() * term.op;
        out += term.gamma * (term.op * rho * term.op.adjoint() - 0.5 * anticommutator(ldl, rho));
    }
    return out;
}

/// exp(t (h_super + l_super)) acting on row-stacked states.
inline Matrix exact_propagator(const LindbladSystem& sys, double t) {
    if (t < 0.0) throw std::invalid_argument("exact_propagator: time must be nonnegative");
    return expm((t * build_superoperators(sys).total()).eval());
}

/// Choi matrix of a superoperator in the row-stacking convention:
/// C[(i,m),(j,n)] = S[(m,n),(i,j)].  The map is completely positive iff C is PSD.
inline Matrix choi_matrix(const Matrix& superop) {
    const auto d2 = superop.rows();
    const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(d2))));
    if (d * d != d2 || superop.cols() != d2) {
        throw std::invalid_argument("choi_matrix: superoperator must be d^2 x d^2");
    }
    Matrix c(d2, d2);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index m = 0; m < d; ++m)
            for (Eigen::Index j = 0; j < d; ++j)
                for (Eigen::Index n = 0; n < d; ++n)
                    c(i * d + m, j * d + n) = superop(m * d + n, i * d + j);
    return c;
}

inline bool is_density_matrix(const Matrix& rho, double tol = 1e-9) {
    if (rho.rows() != rho.cols()) return false;
    if (!is_hermitian(rho, tol)) return false;
    if (std::abs(rho.trace() - Complex(1.0, 0.0)) > tol) return false;
    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    return es.eigenvalues().minCoeff() >= -tol;
}

/// Classic fixed-step RK4 on the master equation.
inline Matrix rk4_evolve(const LindbladSystem& sys, const Matrix& rho0, double t, long steps) {
    if (steps < 1) throw std::invalid_argument("rk4_evolve: steps must be >= 1");
    if (t < 0.0) throw std::invalid_argument("rk4_evolve: time must be nonnegative");
    if (!is_density_matrix(rho0, 1e-9)) {
        throw std::invalid_argument("rk4_evolve: initial state is not a density matrix");
    }
    const double h = t / static_cast<double>(steps);
    Matrix rho = rho0;
    for (long s = 0; s < steps; ++s) {
        const Matrix k1 = lindblad_rhs(sys, rho);
        const Matrix k2 = lindblad_rhs(sys, (rho + 0.5 * h * k1).eval());
        const Matrix k3 = lindblad_rhs(sys, (rho + 0.5 * h * k2).eval());
        const Matrix k4 = lindblad_rhs(sys, (rho + h * k3).eval());
        rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

// ---------------------------------------------------------------------------
// Commutator-structure classification.
//
// A closed-form Kraus series exists when [h_super, l_super] = alpha*l_super
// + c*Id with real alpha, c >= 0.  The classifier checks the four
// operator-level commutation conditions (which imply the superoperator
// relation with c = 0) and independently fits the superoperator commutator
// by two-unknown least squares, accepting whichever path passes.
// ---------------------------------------------------------------------------

enum class CommutatorClass {
    scalar,       // [h_super, l_super] = c * Id          (alpha = 0)
    linear,       // [h_super, l_super] = alpha*l_super + c*Id with alpha > 0
    unsupported,  // no such structure within tolerance
};

inline const char* to_string(CommutatorClass c) {
    switch (c) {
        case CommutatorClass::scalar: return "scalar";
        case CommutatorClass::linear: return "linear";
        default: return "unsupported";
    }
}

struct ConditionResiduals {
    double h_damping_commutator = 0.0;   // max ||[H, L^dag L]||
    double damping_pairwise = 0.0;       // max ||[L^dag L, L'^dag L']||
    double eigen_h = 0.0;                // max ||[H, L] - nu L||
    double eigen_damping = 0.0;          // max ||Sum gamma'[L'^dag L', L] - lambda L||
    double superop_fit = 0.0;            // ||[h_super, l_super] - alpha*l_super - c*Id||
};

struct CaseClassification {
    CommutatorClass label = CommutatorClass::unsupported;
    double alpha = 0.0;  // 1/time
    double c = 0.0;      // 1/time^2
    std::optional<Complex> nu;      // shared [H, L] eigen-scalar (energy)
    std::optional<Complex> lambda;  // shared damping-commutator scalar (1/time)
    ConditionResiduals residuals;
    std::string failing_condition;  // set when label == unsupported
    bool via_conditions = false;
    bool via_superop_fit = false;
};

namespace detail {

// Hilbert-Schmidt projection <L, C> / <L, L>.
inline Complex hs_project(const Matrix& onto, const Matrix& of) {
    return (onto.adjoint() * of).trace() / (onto.adjoint() * onto).trace().real();
}

}  // namespace detail

inline CaseClassification classify(const LindbladSystem& sys, double tol = 1e-9) {
    CaseClassification out;

    // Zero-rate and zero-operator entries contribute nothing and would break
    // the projection denominators.
    std::vector<LindbladTerm> active;
    for (const auto& term : sys.lindblads()) {
        if (term.gamma > 0.0 && hs_norm(term.op) > 0.0) active.push_back(term);
    }
    if (active.empty()) {
        out.label = CommutatorClass::scalar;
        out.via_conditions = true;
        return out;
    }

    const Matrix& h = sys.hamiltonian();
    const double h_scale = hs_norm(h);

    // Operator-level conditions.
    bool conditions_ok = true;
    std::string failing;

    std::vector<Matrix> damping(active.size());
    for (std::size_t n = 0; n < active.size(); ++n) {
        damping[n] = active[n].op.adjoint() * active[n].op;
    }

    for (std::size_t n = 0; n < active.size(); ++n) {
        const double r = hs_norm(commutator(h, damping[n]));
        out.residuals.h_damping_commutator = std::max(out.residuals.h_damping_commutator, r);
        if (r > tol * 2.0 * h_scale * hs_norm(damping[n])) {
            conditions_ok = false;
            if (failing.empty()) failing = "condition (i): [H, L^dag L] != 0";
        }
    }
    for (std::size_t n = 0; n < active.size(); ++n) {
        for (std::size_t m = n + 1; m < active.size(); ++m) {
            const double r = hs_norm(commutator(damping[n], damping[m]));
            out.residuals.damping_pairwise = std::max(out.residuals.damping_pairwise, r);
            if (r > tol * 2.0 * hs_norm(damping[n]) * hs_norm(damping[m])) {
                conditions_ok = false;
                if (failing.empty()) failing = "condition (ii): damping generators do not commute";
            }
        }
    }

    // Shared eigen-scalar nu for [H, L_n] = nu L_n, extracted per operator by
    // Hilbert-Schmidt projection and then required to agree.
    Complex nu{0.0, 0.0};
    {
        double weight_sum = 0.0;
        std::vector<Complex> nus(active.size());
        for (std::size_t n = 0; n < active.size(); ++n) {
            const Matrix c_n = commutator(h, active[n].op);
            nus[n] = detail::hs_project(active[n].op, c_n);
            const double hn = hs_norm(active[n].op);
            nu += nus[n] * (hn * hn);
            weight_sum += hn * hn;
        }
        nu /= weight_sum;
        for (std::size_t n = 0; n < active.size(); ++n) {
            const Matrix c_n = commutator(h, active[n].op);
            const double r = hs_norm((c_n - nu * active[n].op).eval());
            out.residuals.eigen_h = std::max(out.residuals.eigen_h, r);
            const double scale = 2.0 * h_scale * hs_norm(active[n].op);
            if (r > tol * scale || std::abs(nus[n] - nu) > tol * std::max(std::abs(nu), 1.0)) {
                conditions_ok = false;
                if (failing.empty()) failing = "condition (iii): [H, L] is not a multiple of L";
            }
        }
        if (nu.imag() < -tol * std::max(std::abs(nu), 1.0)) {
            conditions_ok = false;
            if (failing.empty()) failing = "condition (iii): eigen-scalar has negative imaginary part";
        }
    }

    // Shared scalar lambda for Sum_n' gamma_n' [L'^dag L', L_n] = lambda L_n.
    Complex lambda{0.0, 0.0};
    {
        Matrix weighted = Matrix::Zero(sys.dim(), sys.dim());
        for (std::size_t n = 0; n < active.size(); ++n) weighted += active[n].gamma * damping[n];
        const double w_scale = hs_norm(weighted);

        double weight_sum = 0.0;
        std::vector<Complex> lambdas(active.size());
        for (std::size_t n = 0; n < active.size(); ++n) {
            const Matrix d_n = commutator(weighted, active[n].op);
            lambdas[n] = detail::hs_project(active[n].op, d_n);
            const double hn = hs_norm(active[n].op);
            lambda += lambdas[n] * (hn * hn);
            weight_sum += hn * hn;
        }
        lambda /= weight_sum;
        for (std::size_t n = 0; n < active.size(); ++n) {
            const Matrix d_n = commutator(weighted, active[n].op);
            const double r = hs_norm((d_n - lambda * active[n].op).eval());
            out.residuals.eigen_damping = std::max(out.residuals.eigen_damping, r);
            const double scale = 2.0 * w_scale * hs_norm(active[n].op);
            if (r > tol * scale ||
                std::abs(lambdas[n] - lambda) > tol * std::max(std::abs(lambda), 1.0)) {
                conditions_ok = false;
                if (failing.empty()) failing = "condition (iv): damping commutator is not a multiple of L";
            }
        }
        if (lambda.real() > tol * std::max(std::abs(lambda), 1.0)) {
            conditions_ok = false;
            if (failing.empty()) failing = "condition (iv): scalar has positive real part";
        }
    }

    const double alpha_cond = std::max(2.0 * nu.imag() / sys.hbar() - lambda.real(), 0.0);

    // Independent superoperator fit: [h_super, l_super] ~ alpha*l_super + c*Id
    // by real two-unknown least squares.
    const SuperoperatorPair sup = build_superoperators(sys);
    const Matrix comm = commutator(sup.h_super, sup.l_super);
    const auto d2 = static_cast<double>(comm.rows());
    double alpha_fit = 0.0, c_fit = 0.0;
    {
        const double a11 = sup.l_super.squaredNorm();
        const double a12 = sup.l_super.trace().real();
        const double a22 = d2;
        const double b1 = (sup.l_super.adjoint() * comm).trace().real();
        const double b2 = comm.trace().real();
        const double det = a11 * a22 - a12 * a12;
        if (det > 1e-14 * a11 * a22) {
            alpha_fit = (b1 * a22 - b2 * a12) / det;
            c_fit = (a11 * b2 - a12 * b1) / det;
        } else if (a11 > 0.0) {
            alpha_fit = b1 / a11;
        }
    }
    const double fit_scale = std::max(std::abs(alpha_fit), 1.0);
    if (alpha_fit < 0.0 && alpha_fit > -tol * fit_scale) alpha_fit = 0.0;
    if (c_fit < 0.0 && c_fit > -tol * std::max(std::abs(c_fit), 1.0)) c_fit = 0.0;
    const Matrix fit_residual =
        comm - alpha_fit * sup.l_super - c_fit * Matrix::Identity(comm.rows(), comm.cols());
    out.residuals.superop_fit = hs_norm(fit_residual);
    // Roundoff floor: the commutator of floating-point superoperators carries
    // an absolute error of order eps * ||h_super|| * ||l_super|| even when the
    // exact commutator vanishes.
    const double floor = 1e4 * std::numeric_limits<double>::epsilon() * hs_norm(sup.h_super) *
                         hs_norm(sup.l_super);
    const bool fit_ok = alpha_fit >= 0.0 && c_fit >= 0.0 &&
                        out.residuals.superop_fit <= tol * hs_norm(comm) + floor;

    if (conditions_ok) {
        out.label = alpha_cond > tol ? CommutatorClass::linear : CommutatorClass::scalar;
        out.alpha = alpha_cond > tol ? alpha_cond : 0.0;
        out.c = 0.0;
        out.nu = nu;
        out.lambda = lambda;
        out.via_conditions = true;
        out.via_superop_fit = fit_ok;
        return out;
    }
    if (fit_ok) {
        out.label = alpha_fit > tol ? CommutatorClass::linear : CommutatorClass::scalar;
        out.alpha = alpha_fit > tol ? alpha_fit : 0.0;
        out.c = std::max(c_fit, 0.0);
        out.via_superop_fit = true;
        return out;
    }

    out.label = CommutatorClass::unsupported;
    out.failing_condition = failing.empty() ? "superoperator commutator fit residual too large" : failing;
    return out;
}

}  // namespace kraussim
