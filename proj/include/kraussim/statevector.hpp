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
#include <random>
#include <vector>

#include "kraussim/circuit.hpp"

// Exact statevector execution of the circuit IR, filtered expectation
// values over dilation ancillas, classical recombination of weighted
// results, purification of mixed inputs, and seeded shot sampling.

namespace kraussim {

struct StateVector {
    int n_qubits = 0;
    std::vector<Complex> amps;

    static StateVector zero_state(int n_qubits) {
        StateVector s;
        s.n_qubits = n_qubits;
        s.amps.assign(std::size_t{1} << n_qubits, Complex{0.0, 0.0});
        s.amps[0] = 1.0;
        return s;
    }

    static StateVector from_amplitudes(std::vector<Complex> amplitudes) {
        StateVector s;
        s.n_qubits = log2_exact(amplitudes.size());
        s.amps = std::move(amplitudes);
        return s;
    }

    std::size_t size() const { return amps.size(); }

    double norm() const {
        double sum = 0.0;
        for (const auto& a : amps) sum += std::norm(a);
        return std::sqrt(sum);
    }
};

namespace detail {

inline void check_qubit(const StateVector& state, int qubit) {
    if (qubit < 0 || qubit >= state.n_qubits) {
        throw std::invalid_argument("gate qubit index out of range");
    }
}

inline void check_distinct(const std::vector<int>& qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        for (std::size_t j = i + 1; j < qubits.size(); ++j) {
            if (qubits[i] == qubits[j]) {
                throw std::invalid_argument("gate qubit indices must be distinct");
            }
        }
    }
}

inline bool controls_active(std::size_t index, const std::vector<int>& controls) {
    for (int c : controls) {
        if (!((index >> c) & 1U)) return false;
    }
    return true;
}

inline void apply_pauli(StateVector& state, PauliAxis axis, int qubit) {
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (i & bit) continue;
        const std::size_t j = i | bit;
        switch (axis) {
            case PauliAxis::x: std::swap(state.amps[i], state.amps[j]); break;
            case PauliAxis::y: {
                const Complex a0 = state.amps[i];
                state.amps[i] = -imag_unit * state.amps[j];
                state.amps[j] = imag_unit * a0;
                break;
            }
            case PauliAxis::z: state.amps[j] = -state.amps[j]; break;
        }
    }
}

inline void apply_phase(StateVector& state, double theta, int qubit,
                        const std::vector<int>& controls) {
    const Complex factor = std::exp(-imag_unit * theta);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if ((i & bit) && controls_active(i, controls)) state.amps[i] *= factor;
    }
}

inline void apply_controlled_ry(StateVector& state, double beta, int qubit,
                                const std::vector<int>& controls) {
    const double c = std::cos(beta / 2.0), s = std::sin(beta / 2.0);
    const std::size_t bit = std::size_t{1} << qubit;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if ((i & bit) || !controls_active(i, controls)) continue;
        const std::size_t j = i | bit;
        const Complex a0 = state.amps[i], a1 = state.amps[j];
        state.amps[i] = c * a0 - s * a1;
        state.amps[j] = s * a0 + c * a1;
    }
}

// Gather/scatter application of a dense operator on an ordered qubit list;
// qubits[0] is the least significant bit of the operator's basis index.
template <typename Body>
inline void for_each_subspace(StateVector& state, const std::vector<int>& qubits, Body&& body) {
    const std::size_t k = qubits.size();
    const std::size_t sub = std::size_t{1} << k;
    std::size_t outer_mask = state.size() - 1;
    for (int q : qubits) outer_mask &= ~(std::size_t{1} << q);

    std::vector<Complex> scratch(sub);
    std::size_t base = 0;
    while (true) {
        for (std::size_t b = 0; b < sub; ++b) {
            std::size_t idx = base;
            for (std::size_t q = 0; q < k; ++q) {
                if ((b >> q) & 1U) idx |= std::size_t{1} << qubits[q];
            }
            scratch[b] = state.amps[idx];
        }
        body(scratch);
        for (std::size_t b = 0; b < sub; ++b) {
            std::size_t idx = base;
            for (std::size_t q = 0; q < k; ++q) {
                if ((b >> q) & 1U) idx |= std::size_t{1} << qubits[q];
            }
            state.amps[idx] = scratch[b];
        }
        // Next pattern of the untouched qubits.
        base = (base - outer_mask) & outer_mask;
        if (base == 0) break;
    }
}

inline void apply_opaque(StateVector& state, const Gate& gate) {
    const auto k = gate.qubits.size();
    const auto dim = Eigen::Index{1} << k;
    if (gate.matrix.rows() != dim || gate.matrix.cols() != dim) {
        throw std::invalid_argument("opaque gate matrix does not match its qubit count");
    }
    if (!is_unitary(gate.matrix, 1e-9)) {
        throw std::invalid_argument("opaque gate matrix is not unitary");
    }
    Vector in(dim), out(dim);
    for_each_subspace(state, gate.qubits, [&](std::vector<Complex>& block) {
        for (Eigen::Index b = 0; b < dim; ++b) in(b) = block[static_cast<std::size_t>(b)];
        out.noalias() = gate.matrix * in;
        for (Eigen::Index b = 0; b < dim; ++b) block[static_cast<std::size_t>(b)] = out(b);
    });
}

inline void apply_permutation(StateVector& state, const Gate& gate) {
    const std::size_t sub = std::size_t{1} << gate.qubits.size();
    if (gate.mapping.size() != sub) {
        throw std::invalid_argument("permutation mapping does not match its qubit count");
    }
    std::vector<bool> seen(sub, false);
    for (int image : gate.mapping) {
        if (image < 0 || static_cast<std::size_t>(image) >= sub || seen[static_cast<std::size_t>(image)]) {
            throw std::invalid_argument("permutation mapping is not a bijection");
        }
        seen[static_cast<std::size_t>(image)] = true;
    }
    std::vector<Complex> moved(sub);
    for_each_subspace(state, gate.qubits, [&](std::vector<Complex>& block) {
        for (std::size_t b = 0; b < sub; ++b) moved[static_cast<std::size_t>(gate.mapping[b])] = block[b];
        block = moved;
    });
}

inline void apply_state_prep(StateVector& state, const Gate& gate) {
    const std::size_t sub = std::size_t{1} << gate.qubits.size();
    if (static_cast<std::size_t>(gate.amplitudes.size()) != sub) {
        throw std::invalid_argument("state_prep amplitudes do not match the qubit count");
    }
    if (std::abs(gate.amplitudes.norm() - 1.0) > 1e-12) {
        throw std::invalid_argument("state_prep amplitudes must be normalized");
    }
    for_each_subspace(state, gate.qubits, [&](std::vector<Complex>& block) {
        for (std::size_t b = 1; b < sub; ++b) {
            if (std::abs(block[b]) > 1e-12) {
                throw std::invalid_argument("state_prep target register is not |0...0>");
            }
        }
        const Complex seed = block[0];
        for (std::size_t b = 0; b < sub; ++b) {
            block[b] = seed * gate.amplitudes(static_cast<Eigen::Index>(b));
        }
    });
}

}  // namespace detail

inline void apply_gate(StateVector& state, const Gate& gate) {
    switch (gate.kind) {
        case Gate::Kind::pauli:
            detail::check_qubit(state, gate.target);
            detail::apply_pauli(state, gate.axis, gate.target);
            break;
        case Gate::Kind::phase:
            detail::check_qubit(state, gate.target);
            detail::apply_phase(state, gate.angle, gate.target, {});
            break;
        case Gate::Kind::controlled_phase:
        case Gate::Kind::controlled_ry: {
            detail::check_qubit(state, gate.target);
            for (int c : gate.controls) detail::check_qubit(state, c);
            std::vector<int> touched = gate.controls;
            touched.push_back(gate.target);
            detail::check_distinct(touched);
            if (gate.kind == Gate::Kind::controlled_phase) {
                detail::apply_phase(state, gate.angle, gate.target, gate.controls);
            } else {
                detail::apply_controlled_ry(state, gate.angle, gate.target, gate.controls);
            }
            break;
        }
        case Gate::Kind::opaque_unitary:
            for (int q : gate.qubits) detail::check_qubit(state, q);
            detail::check_distinct(gate.qubits);
            detail::apply_opaque(state, gate);
            break;
        case Gate::Kind::permutation:
            for (int q : gate.qubits) detail::check_qubit(state, q);
            detail::check_distinct(gate.qubits);
            detail::apply_permutation(state, gate);
            break;
        case Gate::Kind::state_prep:
            for (int q : gate.qubits) detail::check_qubit(state, q);
            detail::check_distinct(gate.qubits);
            detail::apply_state_prep(state, gate);
            break;
    }
}

/// Applies the circuit's gates in list order to a working copy of the input.
inline StateVector run_circuit(const Circuit& circuit, const StateVector& input) {
    if (input.n_qubits != circuit.total_qubits()) {
        throw std::invalid_argument("run_circuit: input qubit count does not match the circuit");
    }
    StateVector state = input;
    for (const auto& gate : circuit.gates) apply_gate(state, gate);
    if (std::abs(state.norm() - input.norm()) > 1e-10) {
        throw std::runtime_error("run_circuit: norm drifted beyond tolerance");
    }
    return state;
}

/// <psi| (O_sys (x) |0><0| on masked qubits) |psi>.  Unmasked non-system
/// qubits (preparation registers) are summed over, not filtered.
inline double filtered_expectation(const StateVector& state, const Matrix& obs, int n_system,
                                   const std::vector<int>& postselect_mask) {
    const Eigen::Index d = Eigen::Index{1} << n_system;
    if (obs.rows() != d || obs.cols() != d) {
        throw std::invalid_argument("filtered_expectation: observable dimension mismatch");
    }
    std::size_t mask_bits = 0;
    for (int q : postselect_mask) {
        if (q < n_system || q >= state.n_qubits) {
            throw std::invalid_argument("filtered_expectation: mask must name ancilla qubits");
        }
        mask_bits |= std::size_t{1} << q;
    }
    const std::size_t sys_mask = (std::size_t{1} << n_system) - 1;

    // Group amplitudes by the configuration of unfiltered upper qubits.
    const std::size_t upper = state.size() >> n_system;
    Complex total{0.0, 0.0};
    Vector column(d);
    for (std::size_t u = 0; u < upper; ++u) {
        const std::size_t base = u << n_system;
        if (base & mask_bits) continue;
        for (Eigen::Index s = 0; s < d; ++s) {
            column(s) = state.amps[base | (static_cast<std::size_t>(s) & sys_mask)];
        }
        total += column.dot(obs * column);  // dot conjugates the left factor
    }
    return total.real();
}

/// Weighted recombination sum of squared weights times values, in input order.
inline double recombine(const std::vector<std::pair<double, double>>& weighted_values) {
    double sum = 0.0;
    for (const auto& [weight, value] : weighted_values) {
        if (weight < 0.0) throw std::invalid_argument("recombine: weights must be nonnegative");
        sum += weight * weight * value;
    }
    return sum;
}

/// Purification sum_j sqrt(p_j) |psi_j>|e_j> of a density matrix, with a
/// ceil(log2(rank)) qubit preparation register (at least one).  Eigenpairs
/// are ordered ascending by eigenvalue with stable ties, then filtered to
/// the positive spectrum.
inline StateVector prepare_purification(const Matrix& rho) {
    if (!is_density_matrix(rho, 1e-9)) {
        throw std::invalid_argument("prepare_purification: input is not a density matrix");
    }
    const Eigen::Index d = rho.rows();
    const Eigen::Index d_pad = next_pow2(d);
    const int n_sys = log2_exact(static_cast<std::size_t>(d_pad));

    Eigen::SelfAdjointEigenSolver<Matrix> es((rho + rho.adjoint()) / 2.0);
    std::vector<std::pair<double, Eigen::Index>> spectrum;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (es.eigenvalues()(i) > 1e-12) spectrum.push_back({es.eigenvalues()(i), i});
    }
    const auto rank = static_cast<std::size_t>(spectrum.size());
    int n_prep = 1;
    while ((std::size_t{1} << n_prep) < rank) ++n_prep;

    StateVector out;
    out.n_qubits = n_sys + n_prep;
    out.amps.assign(std::size_t{1} << out.n_qubits, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < rank; ++j) {
        const double root_p = std::sqrt(spectrum[j].first);
        const auto col = es.eigenvectors().col(spectrum[j].second);
        for (Eigen::Index s = 0; s < d; ++s) {
            out.amps[(j << n_sys) | static_cast<std::size_t>(s)] = root_p * col(s);
        }
    }
    // Unit trace guarantees normalization up to roundoff; renormalize it away.
    const double norm = out.norm();
    for (auto& a : out.amps) a /= norm;
    return out;
}

/// Deterministic multinomial sampling from |amplitude|^2 (inverse-CDF over
/// a fixed-width 53-bit draw so histograms are platform independent).
inline std::vector<std::int64_t> sample_counts(const StateVector& state, std::int64_t shots,
                                               std::uint64_t seed) {
    if (shots < 1) throw std::invalid_argument("sample_counts: shots must be >= 1");
    std::vector<double> cdf(state.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        acc += std::norm(state.amps[i]);
        cdf[i] = acc;
    }
    std::mt19937_64 gen(seed);
    std::vector<std::int64_t> histogram(state.size(), 0);
    for (std::int64_t s = 0; s < shots; ++s) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53 * acc;
        const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        const auto idx = static_cast<std::size_t>(it - cdf.begin());
        ++histogram[std::min(idx, state.size() - 1)];
    }
    return histogram;
}

/// Dense matrix of the whole circuit, by running basis columns.  With
/// apply_global_phase the tracked phase gap is corrected, giving the exact
/// represented operator.
inline Matrix circuit_unitary(const Circuit& circuit, bool apply_global_phase = true) {
    const int n = circuit.total_qubits();
    const Eigen::Index dim = Eigen::Index{1} << n;
    Matrix u(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        StateVector basis;
        basis.n_qubits = n;
        basis.amps.assign(static_cast<std::size_t>(dim), Complex{0.0, 0.0});
        basis.amps[static_cast<std::size_t>(col)] = 1.0;
        const StateVector out = run_circuit(circuit, basis);
        for (Eigen::Index row = 0; row < dim; ++row) {
            u(row, col) = out.amps[static_cast<std::size_t>(row)];
        }
    }
    if (apply_global_phase && circuit.global_phase != 0.0) {
        u *= std::exp(-imag_unit * circuit.global_phase);
    }
    return u;
}

/// System block selected by all-|0> dilation ancillas (prep ancillas, when
/// present, are required |0> as well for the block to be meaningful).
inline Matrix postselected_block(const Circuit& circuit, bool apply_global_phase = true) {
    const Matrix u = circuit_unitary(circuit, apply_global_phase);
    const Eigen::Index d = Eigen::Index{1} << circuit.n_system;
    return u.topLeftCorner(d, d);
}

}  // namespace kraussim
