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
#include <vector>

#include "kraussim/circuit.hpp"

// Damped harmonic oscillator preset: a truncated nilpotent ladder makes the
// Kraus series exactly finite, and each term fuses into a basis shift, a
// dilated diagonal contraction, and a fixed set of single-qubit phase gates.

namespace kraussim {

struct QhoConfig {
    int n_qubits = 1;
    double omega = 1.0;  // angular frequency
    double gamma = 0.0;  // damping rate
    double hbar = 1.0;

    Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
    int max_occupied() const { return static_cast<int>(dim()) - 1; }
};

/// Lowering operator truncated to m_max + 1 levels: superdiagonal
/// sqrt(1..m_max), nilpotent of index m_max + 1.
inline Matrix truncated_lowering(int max_occupied) {
    if (max_occupied < 1) {
        throw std::invalid_argument("truncated_lowering: need at least two levels");
    }
    const Eigen::Index d = max_occupied + 1;
    Matrix lower = Matrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
    return lower;
}

inline Matrix number_operator(Eigen::Index d) {
    Matrix n = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) n(i, i) = static_cast<double>(i);
    return n;
}

/// H = hbar omega (1/2 + N) with the truncated lowering operator as the
/// single jump.
inline LindbladSystem qho_system(const QhoConfig& cfg) {
    const Eigen::Index d = cfg.dim();
    Matrix h = cfg.hbar * cfg.omega * (0.5 * Matrix::Identity(d, d) + number_operator(d));
    return LindbladSystem(std::move(h), {{truncated_lowering(cfg.max_occupied()), cfg.gamma}},
                          cfg.hbar);
}

namespace detail {

/// log((1 - exp(-gamma t))); -inf at t = 0 or gamma = 0.
inline double log_jump_amplitude(double gamma, double t) {
    return std::log(-std::expm1(-gamma * t));
}

/// Log-space diagonal entries of the order-m fused operator:
/// entry n = exp(-n gamma t / 2) sqrt((1-e^{-gamma t})^m (n+m)!/(n! m!)),
/// for n = 0 .. d-(m+1), zero above (the shifted states are annihilated).
inline std::vector<double> fused_diagonal_entries(const QhoConfig& cfg, int order, double t) {
    const auto d = static_cast<std::size_t>(cfg.dim());
    std::vector<double> entries(d, 0.0);
    const double log_jump = order > 0 ? log_jump_amplitude(cfg.gamma, t) : 0.0;
    for (std::size_t n = 0; n + static_cast<std::size_t>(order) < d; ++n) {
        const double log_ratio = std::lgamma(static_cast<double>(n + order) + 1.0) -
                                 std::lgamma(static_cast<double>(n) + 1.0) -
                                 std::lgamma(static_cast<double>(order) + 1.0);
        double log_entry = -static_cast<double>(n) * cfg.gamma * t / 2.0 + 0.5 * log_ratio;
        if (order > 0) log_entry += 0.5 * static_cast<double>(order) * log_jump;
        entries[n] = std::isinf(log_entry) ? 0.0 : std::exp(log_entry);
    }
    return entries;
}

}  // namespace detail

/// Exact order-m Kraus operator
///   exp(-t [gamma N / 2 + i omega (1/2 + N)]) sqrt((1-e^{-gamma t})^m / m!) a^m,
/// all magnitudes accumulated in log space.  The series is exactly complete
/// over m = 0 .. m_max.
inline Matrix qho_kraus_matrix(const QhoConfig& cfg, int order, double t) {
    if (order < 0 || order > cfg.max_occupied()) {
        throw std::invalid_argument("qho_kraus_matrix: order out of range");
    }
    if (t < 0.0) throw std::invalid_argument("qho_kraus_matrix: time must be nonnegative");
    const Eigen::Index d = cfg.dim();
    const auto entries = detail::fused_diagonal_entries(cfg, order, t);
    Matrix k = Matrix::Zero(d, d);
    for (Eigen::Index n = 0; n + order < d; ++n) {
        const Complex phase =
            std::exp(-imag_unit * cfg.omega * t * (0.5 + static_cast<double>(n)));
        k(n, n + order) = entries[static_cast<std::size_t>(n)] * phase;
    }
    return k;
}

struct QhoDiagonal {
    std::vector<double> entries;     // D_m diagonal, zero on annihilated states
    std::vector<double> contraction; // Lambda_m = D_m / a_m, in [0, 1]
    double weight = 0.0;             // a_m(t) = max entry
};

/// Diagonal factor of the fused decomposition K_m = W(t) D_m(t) SHIFT_m,
/// normalized so the circuit realizes the contraction Lambda_m.
inline QhoDiagonal qho_diagonal(const QhoConfig& cfg, int order, double t) {
    if (order < 0 || order > cfg.max_occupied()) {
        throw std::invalid_argument("qho_diagonal: order out of range");
    }
    QhoDiagonal out;
    out.entries = detail::fused_diagonal_entries(cfg, order, t);
    out.weight = 0.0;
    for (double e : out.entries) out.weight = std::max(out.weight, e);
    out.contraction.assign(out.entries.size(), 0.0);
    if (out.weight > 0.0) {
        for (std::size_t n = 0; n < out.entries.size(); ++n) {
            out.contraction[n] = std::min(out.entries[n] / out.weight, 1.0);
        }
    }
    return out;
}

/// Fused circuit for one oscillator Kraus operator: a modular basis
/// subtraction, the dilated diagonal contraction (one ancilla), and
/// n_qubits single-qubit phase gates with angles 2^j omega t.
inline Circuit build_qho_circuit(const QhoConfig& cfg, int order, double t) {
    const auto diag = qho_diagonal(cfg, order, t);
    const auto d = static_cast<std::size_t>(cfg.dim());
    const int n = cfg.n_qubits;

    Circuit circuit;
    circuit.n_system = n;
    circuit.ancillas.push_back({Ancilla::Role::sznagy, n});
    circuit.postselect_mask.push_back(n);
    circuit.weight = diag.weight;

    // Basis shift |x> -> |x - m mod 2^n>.
    std::vector<int> mapping(d);
    for (std::size_t x = 0; x < d; ++x) {
        mapping[x] = static_cast<int>((x + d - static_cast<std::size_t>(order)) % d);
    }
    std::vector<int> sys_qubits(static_cast<std::size_t>(n));
    std::iota(sys_qubits.begin(), sys_qubits.end(), 0);
    circuit.gates.push_back(Gate::make_permutation(std::move(mapping), sys_qubits));

    detail::append_contraction_ladder(circuit, diag.contraction, sys_qubits, n);

    // W(t) phases exp(-i omega t x) per basis state, plus the tracked
    // half-quantum global phase.
    for (int j = 0; j < n; ++j) {
        circuit.gates.push_back(
            Gate::make_phase(static_cast<double>(Eigen::Index{1} << j) * cfg.omega * t, j));
    }
    circuit.global_phase += 0.5 * cfg.omega * t;
    return circuit;
}

}  // namespace kraussim
