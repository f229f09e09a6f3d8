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

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "kraussim/lindblad.hpp"
#include "kraussim/parallel.hpp"

// Closed-form Kraus operator series for systems whose superoperator
// commutator is scalar or linear: term enumeration, matrix-level
// evaluation, truncation bounds, and series simplification helpers.
//
// Every order-m term factors as
//     K_{m,k}(t) = exp(-i t V_H / hbar) * sqrt(h(t) f(t)^m / m!)
//                  * prod_j sqrt(gamma_{k_j}) L_{k_j},
// where (h, f) depend only on the commutator class: for the scalar class
// h = exp(-c t^2 / 2), f = t; for the linear class h = exp(c g(t, alpha)),
// f = (1 - exp(-alpha t)) / alpha with g(t) = -int_0^t f.

namespace kraussim {

/// g(t, alpha) = -(exp(-alpha t) + alpha t - 1) / alpha^2, the negated
/// integral of f.  Small alpha*t goes through a 4-term Taylor series since
/// the direct form is a difference of near-equal quantities.
inline double decay_integral(double t, double alpha) {
    const double x = alpha * t;
    if (x < 1e-6) {
        return -(t * t) * (0.5 - x / 6.0 + x * x / 24.0 - x * x * x / 120.0);
    }
    return -(std::exp(-x) + x - 1.0) / (alpha * alpha);
}

struct ScalarSchedule {
    CommutatorClass label = CommutatorClass::scalar;
    double alpha = 0.0;
    double c = 0.0;

    /// Effective jump time multiplying the jump superoperator.
    double f(double t) const {
        if (label == CommutatorClass::scalar) return t;
        const double x = alpha * t;
        if (x < 1e-6) return t * (1.0 - x / 2.0 + x * x / 6.0 - x * x * x / 24.0);
        return (1.0 - std::exp(-x)) / alpha;
    }

    /// Scalar damping factor multiplying every order of the series.
    double h(double t) const {
        if (label == CommutatorClass::scalar) return std::exp(-c * t * t / 2.0);
        return std::exp(c * decay_integral(t, alpha));
    }
};

inline ScalarSchedule scalar_schedule(const CaseClassification& cls) {
    if (cls.label == CommutatorClass::unsupported) {
        throw std::invalid_argument("scalar_schedule: system has no closed-form series");
    }
    return {cls.label, cls.alpha, cls.c};
}

/// One summand of the series: the unit-norm operator product together with
/// the scalar bookkeeping needed to restore the exact Kraus operator.
struct KrausTerm {
    int order = 0;                // m
    std::vector<int> indices;     // k, 0-based jump-operator indices, size m
    Matrix base;                  // prod_j L_{k_j} / ||L_{k_j}||_op
    double norm_scale = 1.0;      // prod_j sqrt(gamma_{k_j}) * ||L_{k_j}||_op
    std::int64_t multiplicity = 1;  // grouped-enumeration weight
};

/// Scalar weight a(t) with sqrt(h f^m / m!) and the gamma/norm factors
/// folded in, so that a(t) * exp(-i t V_H/hbar) * base recovers K_{m,k}(t).
inline double term_weight(const KrausTerm& term, const ScalarSchedule& sched, double t) {
    double scaled = sched.h(t);
    const double f = sched.f(t);
    for (int j = 1; j <= term.order; ++j) scaled *= f / static_cast<double>(j);
    return std::sqrt(std::max(scaled, 0.0)) * term.norm_scale;
}

namespace detail {

struct RescaledJumps {
    std::vector<Matrix> unit_ops;     // L_n / ||L_n||_op
    std::vector<double> scales;       // sqrt(gamma_n) * ||L_n||_op
};

inline RescaledJumps rescale_jumps(const LindbladSystem& sys) {
    RescaledJumps out;
    for (const auto& term : sys.lindblads()) {
        const double norm = op_norm(term.op);
        if (norm == 0.0 || term.gamma == 0.0) {
            out.unit_ops.push_back(Matrix::Zero(sys.dim(), sys.dim()));
            out.scales.push_back(0.0);
        } else {
            out.unit_ops.push_back(term.op / norm);
            out.scales.push_back(std::sqrt(term.gamma) * norm);
        }
    }
    return out;
}

inline KrausTerm make_term(const RescaledJumps& jumps, const std::vector<int>& k,
                           Eigen::Index d, std::int64_t multiplicity) {
    KrausTerm term;
    term.order = static_cast<int>(k.size());
    term.indices = k;
    term.base = Matrix::Identity(d, d);
    term.multiplicity = multiplicity;
    for (int idx : k) {
        term.base = (term.base * jumps.unit_ops[static_cast<std::size_t>(idx)]).eval();
        term.norm_scale *= jumps.scales[static_cast<std::size_t>(idx)];
    }
    return term;
}

}  // namespace detail

/// Groups order-m index vectors of pairwise-commuting jump superoperators by
/// occupation counts.  Returns (representative k, multinomial multiplicity)
/// in lexicographic order; representatives are the nondecreasing vectors.
inline std::vector<std::pair<std::vector<int>, std::int64_t>> reduce_commuting(
    const LindbladSystem& sys, int max_order, double tol = 1e-10) {
    const auto& jumps = sys.lindblads();
    const int n = static_cast<int>(jumps.size());
    for (int i = 0; i < n; ++i) {
        const Matrix a = conj_kron(jumps[static_cast<std::size_t>(i)].op, KronMode::product);
        for (int j = i + 1; j < n; ++j) {
            const Matrix b = conj_kron(jumps[static_cast<std::size_t>(j)].op, KronMode::product);
            const double scale = std::max(hs_norm(a) * hs_norm(b), 1.0);
            if (hs_norm(commutator(a, b)) > tol * scale) {
                throw std::invalid_argument(
                    "reduce_commuting: jump superoperators do not commute");
            }
        }
    }

    std::vector<std::pair<std::vector<int>, std::int64_t>> out;
    for (int m = 0; m <= max_order; ++m) {
        // Nondecreasing index vectors of length m over {0..n-1}.
        std::vector<int> k(static_cast<std::size_t>(m), 0);
        if (m == 0) {
            out.push_back({{}, 1});
            continue;
        }
        if (n == 0) break;
        while (true) {
            // multiplicity = m! / prod counts!, built as a product of
            // binomials so the integer division is exact at every step
            std::vector<int> counts(static_cast<std::size_t>(n), 0);
            for (int idx : k) counts[static_cast<std::size_t>(idx)]++;
            std::int64_t mult = 1;
            std::int64_t placed = 0;
            for (int c : counts) {
                for (std::int64_t j = 1; j <= c; ++j) {
                    ++placed;
                    mult = mult * placed / j;
                }
            }
            out.push_back({k, mult});

            // Next nondecreasing vector.
            int pos = m - 1;
            while (pos >= 0 && k[static_cast<std::size_t>(pos)] == n - 1) --pos;
            if (pos < 0) break;
            const int v = ++k[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < m; ++q) k[static_cast<std::size_t>(q)] = v;
        }
    }
    return out;
}

/// Enumerates series terms up to max_order in lexicographic (m, k) order.
/// When grouped is set, commuting jump superoperators are required and each
/// representative carries its multinomial multiplicity.
inline std::vector<KrausTerm> enumerate_terms(const LindbladSystem& sys, int max_order,
                                              bool grouped = false,
                                              std::int64_t term_cap = 1'000'000) {
    const auto jumps = detail::rescale_jumps(sys);
    const int n = static_cast<int>(jumps.unit_ops.size());
    std::vector<KrausTerm> terms;

    if (grouped) {
        auto reps = reduce_commuting(sys, max_order);
        if (static_cast<std::int64_t>(reps.size()) > term_cap) {
            throw std::runtime_error("enumerate_terms: term cap exceeded");
        }
        terms.reserve(reps.size());
        for (auto& [k, mult] : reps) terms.push_back(detail::make_term(jumps, k, sys.dim(), mult));
        return terms;
    }

    std::int64_t count = 1;
    for (int m = 0; m <= max_order; ++m) {
        if (m > 0) {
            if (n == 0) break;
            count *= n;
            if (count > term_cap) {
                throw std::runtime_error("enumerate_terms: term cap exceeded");
            }
        }
        std::vector<int> k(static_cast<std::size_t>(m), 0);
        while (true) {
            terms.push_back(detail::make_term(jumps, k, sys.dim(), 1));
            if (m == 0) break;
            int pos = m - 1;
            while (pos >= 0 && k[static_cast<std::size_t>(pos)] == n - 1) --pos;
            if (pos < 0) break;
            ++k[static_cast<std::size_t>(pos)];
            for (int q = pos + 1; q < m; ++q) k[static_cast<std::size_t>(q)] = 0;
        }
    }
    return terms;
}

/// Exact matrix of one series term, prefactor included.
inline Matrix kraus_operator(const LindbladSystem& sys, const CaseClassification& cls, int order,
                             const std::vector<int>& k, double t) {
    if (t < 0.0) throw std::invalid_argument("kraus_operator: time must be nonnegative");
    if (static_cast<int>(k.size()) != order) {
        throw std::invalid_argument("kraus_operator: index vector length must equal the order");
    }
    const auto sched = scalar_schedule(cls);
    const auto jumps = detail::rescale_jumps(sys);
    for (int idx : k) {
        if (idx < 0 || idx >= static_cast<int>(jumps.unit_ops.size())) {
            throw std::invalid_argument("kraus_operator: jump index out of range");
        }
    }
    const KrausTerm term = detail::make_term(jumps, k, sys.dim(), 1);
    const Matrix prefactor =
        expm(((-imag_unit * t / sys.hbar()) * sys.effective_hamiltonian()).eval());
    return term_weight(term, sched, t) * prefactor * term.base;
}

struct SeriesOptions {
    bool grouped = false;
    int jobs = 1;
    std::int64_t term_cap = 1'000'000;
};

/// rho_M(t) = sum over terms of a^2-weighted conjugations, accumulated in
/// lexicographic (m, k) order regardless of job count.
inline Matrix evaluate_series(const LindbladSystem& sys, const CaseClassification& cls,
                              const Matrix& rho0, double t, int max_order,
                              const SeriesOptions& opts = {}) {
    if (rho0.rows() != sys.dim() || rho0.cols() != sys.dim()) {
        throw std::invalid_argument("evaluate_series: state dimension mismatch");
    }
    if (max_order < 0) throw std::invalid_argument("evaluate_series: order must be nonnegative");
    const auto sched = scalar_schedule(cls);
    const auto terms = enumerate_terms(sys, max_order, opts.grouped, opts.term_cap);
    const Matrix prefactor =
        expm(((-imag_unit * t / sys.hbar()) * sys.effective_hamiltonian()).eval());

    std::vector<Matrix> contributions(terms.size());
    parallel_for(terms.size(), opts.jobs, [&](std::size_t i) {
        const auto& term = terms[i];
        const double a = term_weight(term, sched, t);
        const Matrix k = prefactor * term.base;
        contributions[i] = (static_cast<double>(term.multiplicity) * a * a) * (k * rho0 * k.adjoint());
    });

    Matrix out = Matrix::Zero(sys.dim(), sys.dim());
    for (const auto& c : contributions) out += c;
    return out;
}

namespace detail {

/// Upper bound sum_n gamma_n ||L_n||_HS^2 on the jump-superoperator norm.
inline double jump_superop_norm_bound(const LindbladSystem& sys) {
    double bound = 0.0;
    for (const auto& term : sys.lindblads()) {
        const double n = hs_norm(term.op);
        bound += term.gamma * n * n;
    }
    return bound;
}

/// ||exp(t h_super)||: 1 for verified-normal effective Hamiltonians of
/// classified systems, otherwise the computed operator norm.
inline double propagator_prefactor(const LindbladSystem& sys, const CaseClassification& cls,
                                   double t) {
    if (cls.label != CommutatorClass::unsupported &&
        is_normal(sys.effective_hamiltonian(), 1e-9)) {
        return 1.0;
    }
    const Matrix h_super = build_superoperators(sys).h_super;
    return op_norm(expm((t * h_super).eval()));
}

}  // namespace detail

/// Tail bound on ||rho(t) - rho_M(t)||_HS:
///   C h(t) eta (f ||L_super||)^{M+1} / (M+1)!  with eta = (1 - f||L||/(M+1))^{-1}.
/// Returns nullopt when M + 1 <= f ||L_super|| (the geometric factor is
/// undefined there).
inline std::optional<double> error_bound(const LindbladSystem& sys, const CaseClassification& cls,
                                         double t, int max_order) {
    const auto sched = scalar_schedule(cls);
    const double x = sched.f(t) * detail::jump_superop_norm_bound(sys);
    const double m1 = static_cast<double>(max_order) + 1.0;
    if (m1 <= x) return std::nullopt;
    if (x == 0.0) return 0.0;
    const double eta = 1.0 / (1.0 - x / m1);
    double tail = 1.0;
    for (int j = 1; j <= max_order + 1; ++j) tail *= x / static_cast<double>(j);
    return detail::propagator_prefactor(sys, cls, t) * sched.h(t) * eta * tail;
}

struct TruncationOrder {
    int scanned = 0;                  // smallest order with bound <= epsilon
    std::optional<int> analytic;      // advisory closed-form lower bound, when defined
};

/// Upward scan of error_bound; also reports the closed-form order estimate
/// max(ceil(e x^{1+delta}), ceil(log(C h / eps) / (delta log x))) when x > 1.
inline TruncationOrder truncation_order(const LindbladSystem& sys, const CaseClassification& cls,
                                        double t, double epsilon, double delta = 0.5,
                                        int order_cap = 1000) {
    if (epsilon <= 0.0) throw std::invalid_argument("truncation_order: epsilon must be positive");
    TruncationOrder out;

    const auto sched = scalar_schedule(cls);
    const double x = sched.f(t) * detail::jump_superop_norm_bound(sys);
    if (x > 1.0) {
        const double ch = detail::propagator_prefactor(sys, cls, t) * sched.h(t);
        const double m_a = std::numbers::e * std::pow(x, 1.0 + delta);
        const double m_b = ch > epsilon ? std::log(ch / epsilon) / (delta * std::log(x)) : 0.0;
        out.analytic = static_cast<int>(std::ceil(std::max(m_a, m_b)));
    }

    for (int m = 0; m <= order_cap; ++m) {
        const auto bound = error_bound(sys, cls, t, m);
        if (bound && *bound <= epsilon) {
            out.scanned = m;
            return out;
        }
    }
    throw std::runtime_error("truncation_order: order cap exceeded");
}

/// F_{n,m}^theta(x) = sum_k theta^k x^{nk+m} / (nk+m)!, evaluated through the
/// root-of-unity closed form; theta = 0 falls back to direct summation.
inline Complex generalized_hyperbolic(int n, int m, Complex theta, double x) {
    if (n < 1 || m < 0 || m >= n) {
        throw std::invalid_argument("generalized_hyperbolic: need n >= 1 and 0 <= m < n");
    }
    if (theta == Complex(0.0, 0.0)) {
        // Series collapses to its k = 0 term.
        double term = 1.0;
        for (int j = 1; j <= m; ++j) term *= x / static_cast<double>(j);
        return term;
    }
    const Complex root = std::exp(imag_unit * (2.0 * std::numbers::pi / static_cast<double>(n)));
    const Complex theta_root = std::pow(theta, 1.0 / static_cast<double>(n));
    Complex sum{0.0, 0.0};
    for (int k = 0; k < n; ++k) {
        const Complex wk = std::pow(root, static_cast<double>(k));
        sum += std::pow(root, static_cast<double>(-m * k)) * std::exp(wk * theta_root * x);
    }
    return sum * std::pow(theta, -static_cast<double>(m) / static_cast<double>(n)) /
           static_cast<double>(n);
}

}  // namespace kraussim
