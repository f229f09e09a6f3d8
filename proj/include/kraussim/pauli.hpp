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

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "kraussim/circuit.hpp"

// Continuous-time Pauli channel: symplectic Pauli-string algebra with exact
// phase tracking, error-set probabilities, and the finite circuit suite
// (one parameterless string circuit per error subset).

namespace kraussim {

/// N-qubit Pauli string in the symplectic (x_mask, z_mask) representation
/// with a tracked global factor i^phase_exp.  Per qubit, (x, z) encodes
/// I=(0,0), X=(1,0), Z=(0,1), Y=(1,1); Y contributes its i bookkeeping
/// through phase_exp, so the represented operator is
/// i^phase_exp * tensor of {I, X, Y, Z}.
struct PauliString {
    int n_qubits = 0;
    std::uint64_t x_mask = 0;
    std::uint64_t z_mask = 0;
    int phase_exp = 0;  // mod 4

    static PauliString identity_string(int n_qubits) {
        if (n_qubits < 1 || n_qubits > 60) {
            throw std::invalid_argument("PauliString: qubit count out of range");
        }
        PauliString p;
        p.n_qubits = n_qubits;
        return p;
    }

    /// Parses characters over {I, X, Y, Z}; character j addresses qubit j
    /// (qubit 0 is the least significant basis bit).
    static PauliString from_string(const std::string& text) {
        PauliString p = identity_string(static_cast<int>(text.size()));
        for (std::size_t j = 0; j < text.size(); ++j) {
            const std::uint64_t bit = std::uint64_t{1} << j;
            switch (text[j]) {
                case 'I': break;
                case 'X': p.x_mask |= bit; break;
                case 'Y': p.x_mask |= bit; p.z_mask |= bit; break;
                case 'Z': p.z_mask |= bit; break;
                default:
                    throw std::invalid_argument("PauliString: characters must be I, X, Y or Z");
            }
        }
        return p;
    }

    std::string to_string() const {
        std::string text(static_cast<std::size_t>(n_qubits), 'I');
        for (int j = 0; j < n_qubits; ++j) {
            const bool x = (x_mask >> j) & 1U;
            const bool z = (z_mask >> j) & 1U;
            if (x && z) text[static_cast<std::size_t>(j)] = 'Y';
            else if (x) text[static_cast<std::size_t>(j)] = 'X';
            else if (z) text[static_cast<std::size_t>(j)] = 'Z';
        }
        return text;
    }

    bool same_letters(const PauliString& other) const {
        return n_qubits == other.n_qubits && x_mask == other.x_mask && z_mask == other.z_mask;
    }

    Complex phase() const {
        switch (((phase_exp % 4) + 4) % 4) {
            case 0: return {1.0, 0.0};
            case 1: return {0.0, 1.0};
            case 2: return {-1.0, 0.0};
            default: return {0.0, -1.0};
        }
    }

    Matrix to_matrix() const {
        Matrix out = Matrix::Identity(1, 1) * phase();
        for (int j = n_qubits - 1; j >= 0; --j) {
            const bool x = (x_mask >> j) & 1U;
            const bool z = (z_mask >> j) & 1U;
            Matrix sigma(2, 2);
            if (x && z) sigma << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
            else if (x) sigma << 0, 1, 1, 0;
            else if (z) sigma << 1, 0, 0, -1;
            else sigma = Matrix::Identity(2, 2);
            out = kron(out, sigma);
        }
        return out;
    }
};

namespace detail {

// i-exponent of the single-qubit product: W(a) * W(b) = i^g * W(a xor b),
// indexed by (x_a + 2 z_a, x_b + 2 z_b).  Cyclic products XY, YZ, ZX give
// +i; reversed order gives -i.
inline constexpr int kPauliPhaseTable[4][4] = {
    // b:  I  X  Z  Y        (encoding x + 2z: I=0, X=1, Z=2, Y=3)
    {0, 0, 0, 0},  // a = I
    {0, 0, 3, 1},  // a = X:  XZ = -iY, XY = +iZ
    {0, 1, 0, 3},  // a = Z:  ZX = +iY, ZY = -iX
    {0, 3, 1, 0},  // a = Y:  YX = -iZ, YZ = +iX
};

}  // namespace detail

/// Exact product with phase tracking: to_matrix(a*b) = to_matrix(a)*to_matrix(b).
inline PauliString pauli_multiply(const PauliString& a, const PauliString& b) {
    if (a.n_qubits != b.n_qubits) {
        throw std::invalid_argument("pauli_multiply: size mismatch");
    }
    PauliString out = PauliString::identity_string(a.n_qubits);
    out.x_mask = a.x_mask ^ b.x_mask;
    out.z_mask = a.z_mask ^ b.z_mask;
    int phase = a.phase_exp + b.phase_exp;
    for (int j = 0; j < a.n_qubits; ++j) {
        const int pa = static_cast<int>((a.x_mask >> j) & 1U) + 2 * static_cast<int>((a.z_mask >> j) & 1U);
        const int pb = static_cast<int>((b.x_mask >> j) & 1U) + 2 * static_cast<int>((b.z_mask >> j) & 1U);
        phase += detail::kPauliPhaseTable[pa][pb];
    }
    out.phase_exp = ((phase % 4) + 4) % 4;
    return out;
}

/// Commutator structure of two strings: per-qubit commute signs tau_j and
/// the half-(anti)commutator factors S_j, whose product with the prefactor
/// (1 - prod tau_j) reproduces the dense commutator.
struct PauliCommuteInfo {
    bool commute = false;
    std::vector<int> tau;          // +1 per-qubit commuting pair, -1 otherwise
    std::vector<Matrix> factors;   // S_j, 2x2 each
};

inline PauliCommuteInfo pauli_commutes(const PauliString& a, const PauliString& b) {
    if (a.n_qubits != b.n_qubits) {
        throw std::invalid_argument("pauli_commutes: size mismatch");
    }
    PauliCommuteInfo info;
    int anticommuting = 0;
    for (int j = 0; j < a.n_qubits; ++j) {
        const bool xa = (a.x_mask >> j) & 1U, za = (a.z_mask >> j) & 1U;
        const bool xb = (b.x_mask >> j) & 1U, zb = (b.z_mask >> j) & 1U;
        const bool anti = (xa && zb) ^ (za && xb);
        info.tau.push_back(anti ? -1 : 1);
        anticommuting += anti ? 1 : 0;

        auto single = [](bool x, bool z) {
            Matrix s(2, 2);
            if (x && z) s << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
            else if (x) s << 0, 1, 1, 0;
            else if (z) s << 1, 0, 0, -1;
            else s = Matrix::Identity(2, 2);
            return s;
        };
        const Matrix sa = single(xa, za), sb = single(xb, zb);
        info.factors.push_back(anti ? (0.5 * commutator(sa, sb)).eval()
                                    : (0.5 * anticommutator(sa, sb)).eval());
    }
    info.commute = anticommuting % 2 == 0;
    return info;
}

/// (1 - prod tau_j) * (S_1 (x) ... (x) S_N) * (phase factors of both
/// strings): the closed-form commutator matrix for the structure above.
inline Matrix pauli_commutator_matrix(const PauliString& a, const PauliString& b) {
    const auto info = pauli_commutes(a, b);
    int prod_tau = 1;
    Matrix tensor = Matrix::Identity(1, 1);
    for (int j = a.n_qubits - 1; j >= 0; --j) {
        prod_tau *= info.tau[static_cast<std::size_t>(j)];
        tensor = kron(tensor, info.factors[static_cast<std::size_t>(j)]);
    }
    return (1.0 - static_cast<double>(prod_tau)) * a.phase() * b.phase() * tensor;
}

/// Probabilities over all 2^n error subsets of jump strings with rates
/// gamma: p_E(t) = prod_n (1 +- survival_n)/2 with survival_n =
/// exp(-2 gamma_n t) (the sign is - exactly on the members of E).  Sums to
/// one by telescoping.
inline std::vector<double> error_probabilities(const std::vector<double>& gammas, double t,
                                               int subset_cap = 20) {
    const auto n = static_cast<int>(gammas.size());
    if (n > subset_cap) {
        throw std::invalid_argument("error_probabilities: too many jump strings");
    }
    if (t < 0.0) throw std::invalid_argument("error_probabilities: time must be nonnegative");
    for (double g : gammas) {
        if (g < 0.0) throw std::invalid_argument("error_probabilities: rates must be nonnegative");
    }
    std::vector<double> survival(gammas.size());
    for (std::size_t i = 0; i < gammas.size(); ++i) survival[i] = std::exp(-2.0 * gammas[i] * t);

    std::vector<double> p(std::size_t{1} << n, 1.0);
    for (std::size_t subset = 0; subset < p.size(); ++subset) {
        for (int i = 0; i < n; ++i) {
            const double sign = (subset >> i) & 1U ? -1.0 : 1.0;
            p[subset] *= 0.5 * (1.0 + sign * survival[static_cast<std::size_t>(i)]);
        }
    }
    return p;
}

struct PauliKrausCircuit {
    std::uint64_t error_set = 0;   // subset bit mask over the jump strings
    PauliString reduced;           // product of the subset, phase tracked
    double weight = 0.0;           // sqrt(p_E(t))
    Circuit circuit;               // at most one Pauli gate per qubit, no ancillas
};

/// The finite circuit suite of the channel: one parameterless single-string
/// circuit per error subset, weighted by sqrt(p_E(t)).  All time dependence
/// lives in the weights, so one set of circuit results extrapolates to any t.
inline std::vector<PauliKrausCircuit> build_pauli_kraus(const std::vector<PauliString>& strings,
                                                        const std::vector<double>& gammas,
                                                        double t, int subset_cap = 20) {
    if (strings.size() != gammas.size()) {
        throw std::invalid_argument("build_pauli_kraus: need one rate per string");
    }
    if (strings.empty()) throw std::invalid_argument("build_pauli_kraus: no jump strings");
    const int n_qubits = strings.front().n_qubits;
    for (std::size_t i = 0; i < strings.size(); ++i) {
        if (strings[i].n_qubits != n_qubits) {
            throw std::invalid_argument("build_pauli_kraus: string sizes differ");
        }
        for (std::size_t j = i + 1; j < strings.size(); ++j) {
            if (strings[i].same_letters(strings[j])) {
                throw std::invalid_argument(
                    "build_pauli_kraus: duplicate strings (merge their rates first)");
            }
        }
    }

    const auto probabilities = error_probabilities(gammas, t, subset_cap);
    std::vector<PauliKrausCircuit> out;
    out.reserve(probabilities.size());
    for (std::size_t subset = 0; subset < probabilities.size(); ++subset) {
        PauliKrausCircuit item;
        item.error_set = subset;
        item.reduced = PauliString::identity_string(n_qubits);
        for (std::size_t i = 0; i < strings.size(); ++i) {
            if ((subset >> i) & 1U) item.reduced = pauli_multiply(item.reduced, strings[i]);
        }
        item.weight = std::sqrt(probabilities[subset]);

        item.circuit.n_system = n_qubits;
        item.circuit.weight = item.weight;
        // The gates realize the bare letter tensor; the string's i^s factor
        // is unobservable and lives in the tracked phase gap.
        if (item.reduced.phase_exp != 0) {
            item.circuit.global_phase =
                -static_cast<double>(item.reduced.phase_exp) * std::numbers::pi / 2.0;
        }
        for (int q = 0; q < n_qubits; ++q) {
            const bool x = (item.reduced.x_mask >> q) & 1U;
            const bool z = (item.reduced.z_mask >> q) & 1U;
            if (x && z) item.circuit.gates.push_back(Gate::make_pauli(PauliAxis::y, q));
            else if (x) item.circuit.gates.push_back(Gate::make_pauli(PauliAxis::x, q));
            else if (z) item.circuit.gates.push_back(Gate::make_pauli(PauliAxis::z, q));
        }
        out.push_back(std::move(item));
    }
    return out;
}

/// The same channel as a LindbladSystem (H = 0, the strings as jumps), for
/// oracle comparisons and classification.
inline LindbladSystem pauli_channel_system(const std::vector<PauliString>& strings,
                                           const std::vector<double>& gammas) {
    if (strings.empty() || strings.size() != gammas.size()) {
        throw std::invalid_argument("pauli_channel_system: need one rate per string");
    }
    const Eigen::Index d = Eigen::Index{1} << strings.front().n_qubits;
    std::vector<LindbladTerm> terms;
    for (std::size_t i = 0; i < strings.size(); ++i) {
        terms.push_back({strings[i].to_matrix(), gammas[i]});
    }
    return LindbladSystem(Matrix::Zero(d, d), std::move(terms));
}

}  // namespace kraussim
