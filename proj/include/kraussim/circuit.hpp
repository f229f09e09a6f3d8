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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "kraussim/kraus_series.hpp"

// Circuit intermediate representation and the builders that compile series
// terms into circuits whose gate count does not depend on the evolution
// time: one-ancilla unitary dilations of contractions, diagonal phase /
// contraction networks parameterized through the fast subset Mobius
// transform, and the composed term circuits.
//
// Conventions: qubit 0 is the least significant bit of a basis index.
// Within each dilation gate the ancilla is the most significant listed
// qubit, so ancilla |0> selects the contraction block.  Phase-type gates
// multiply selected amplitudes by exp(-i theta).

namespace kraussim {

enum class PauliAxis { x, y, z };

struct Gate {
    enum class Kind {
        pauli,
        phase,
        controlled_phase,
        controlled_ry,
        opaque_unitary,
        permutation,
        state_prep,
    };

    Kind kind = Kind::pauli;
    PauliAxis axis = PauliAxis::x;     // pauli
    double angle = 0.0;                // phase / controlled_phase / controlled_ry
    int target = 0;                    // single-target kinds
    std::vector<int> controls;         // controlled kinds
    Matrix matrix;                     // opaque_unitary
    std::vector<int> qubits;           // opaque_unitary / permutation / state_prep
    std::vector<int> mapping;          // permutation: basis b -> mapping[b]
    Vector amplitudes;                 // state_prep

    static Gate make_pauli(PauliAxis axis, int qubit) {
        Gate g;
        g.kind = Kind::pauli;
        g.axis = axis;
        g.target = qubit;
        return g;
    }
    static Gate make_phase(double theta, int qubit) {
        Gate g;
        g.kind = Kind::phase;
        g.angle = theta;
        g.target = qubit;
        return g;
    }
    static Gate make_controlled_phase(double theta, std::vector<int> controls, int target) {
        Gate g;
        g.kind = Kind::controlled_phase;
        g.angle = theta;
        g.controls = std::move(controls);
        g.target = target;
        return g;
    }
    static Gate make_controlled_ry(double beta, std::vector<int> controls, int target) {
        Gate g;
        g.kind = Kind::controlled_ry;
        g.angle = beta;
        g.controls = std::move(controls);
        g.target = target;
        return g;
    }
    static Gate make_opaque(Matrix matrix, std::vector<int> qubits) {
        Gate g;
        g.kind = Kind::opaque_unitary;
        g.matrix = std::move(matrix);
        g.qubits = std::move(qubits);
        return g;
    }
    static Gate make_permutation(std::vector<int> mapping, std::vector<int> qubits) {
        Gate g;
        g.kind = Kind::permutation;
        g.mapping = std::move(mapping);
        g.qubits = std::move(qubits);
        return g;
    }
    static Gate make_state_prep(Vector amplitudes, std::vector<int> qubits) {
        Gate g;
        g.kind = Kind::state_prep;
        g.amplitudes = std::move(amplitudes);
        g.qubits = std::move(qubits);
        return g;
    }

    /// Number of qubits the gate touches.
    int arity() const {
        switch (kind) {
            case Kind::pauli:
            case Kind::phase: return 1;
            case Kind::controlled_phase:
            case Kind::controlled_ry: return 1 + static_cast<int>(controls.size());
            default: return static_cast<int>(qubits.size());
        }
    }
};

struct Ancilla {
    enum class Role { sznagy, prep };
    Role role = Role::sznagy;
    int index = 0;
};

struct Circuit {
    int n_system = 0;
    std::vector<Ancilla> ancillas;
    std::vector<Gate> gates;            // applied left to right
    std::vector<int> postselect_mask;   // ancilla qubits required to read |0>
    double weight = 1.0;                // classical recombination weight a(t)
    // Phase gap between the gate product and the represented operator:
    // operator = exp(-i global_phase) * (gate product).  Never applied in
    // simulation; block extraction may correct for it.
    double global_phase = 0.0;

    int total_qubits() const { return n_system + static_cast<int>(ancillas.size()); }
};

inline Eigen::Index next_pow2(Eigen::Index d) {
    Eigen::Index p = 1;
    while (p < d) p <<= 1;
    return p;
}

inline int log2_exact(std::size_t n) {
    int bits = 0;
    while ((std::size_t{1} << bits) < n) ++bits;
    if ((std::size_t{1} << bits) != n) {
        throw std::invalid_argument("length must be a power of two");
    }
    return bits;
}

/// In-place Mobius transform on the subset lattice: the tensor-power matrix
/// [[1,0],[-1,1]] applied per bit with a Walsh-Hadamard-style butterfly.
/// Exactly N*2^(N-1) subtractions for length 2^N; returns the count.
inline std::size_t subset_mobius_transform(std::vector<double>& u) {
    const std::size_t n = u.size();
    log2_exact(n);
    std::size_t subtractions = 0;
    for (std::size_t step = 1; step < n; step <<= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            if (i & step) {
                u[i] -= u[i - step];
                ++subtractions;
            }
        }
    }
    return subtractions;
}

/// Phase-network parameters theta = t * Q * omega realizing the diagonal
/// diag(exp(-i t omega_n)) up to the global phase theta_0.
inline std::vector<double> diagonal_phase_params(std::vector<double> omega, double t) {
    subset_mobius_transform(omega);
    for (double& x : omega) x *= t;
    return omega;
}

/// Contraction-ladder parameters beta = -2 * Q * arcsin(v) for a diagonal
/// contraction with entries v in [0, 1].
inline std::vector<double> diagonal_contraction_params(std::vector<double> v) {
    for (double& x : v) {
        if (x < -1e-12 || x > 1.0 + 1e-12) {
            throw std::invalid_argument("diagonal_contraction_params: entries must lie in [0, 1]");
        }
        x = std::asin(std::clamp(x, 0.0, 1.0));
    }
    subset_mobius_transform(v);
    for (double& x : v) x *= -2.0;
    return v;
}

/// One-ancilla unitary dilation [[K, D1],[D2, -K^dag]] of a contraction K,
/// with D2 = sqrt(I - K^dag K) and D1 = sqrt(I - K K^dag).  Ancilla |0>
/// carries K.
inline Matrix sznagy_dilation(Matrix k) {
    if (k.rows() != k.cols()) {
        throw std::invalid_argument("sznagy_dilation: matrix must be square");
    }
    const Eigen::Index d = k.rows();
    if (next_pow2(d) != d) {
        throw std::invalid_argument("sznagy_dilation: dimension must be a power of two");
    }
    const double norm = op_norm(k);
    if (norm > 1.0 + 1e-9) {
        throw std::invalid_argument("sznagy_dilation: operator norm exceeds one");
    }
    if (norm > 1.0) k /= norm;
    // Both defect square roots sqrt(I - K^dag K) and sqrt(I - K K^dag) come
    // from one SVD of K, so the off-diagonal blocks of U^dag U cancel to
    // roundoff even when singular values sit exactly at one.
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullU | Eigen::ComputeFullV);
    RealVector defect_diag = svd.singularValues();
    for (Eigen::Index i = 0; i < defect_diag.size(); ++i) {
        const double s = std::min(defect_diag(i), 1.0);
        defect_diag(i) = std::sqrt(std::max((1.0 - s) * (1.0 + s), 0.0));
    }
    const Matrix defect =
        svd.matrixV() * defect_diag.asDiagonal() * svd.matrixV().adjoint();
    const Matrix defect_adj =
        svd.matrixU() * defect_diag.asDiagonal() * svd.matrixU().adjoint();
    Matrix u(2 * d, 2 * d);
    u.topLeftCorner(d, d) = k;
    u.topRightCorner(d, d) = defect_adj;
    u.bottomLeftCorner(d, d) = defect;
    u.bottomRightCorner(d, d) = -k.adjoint();
    return u;
}

namespace detail {

inline std::vector<int> set_bits(std::size_t value) {
    std::vector<int> bits;
    for (int b = 0; value >> b; ++b) {
        if ((value >> b) & 1U) bits.push_back(b);
    }
    return bits;
}

/// Emits the full 2^N - 1 gate phase network for diag(exp(-i t omega_n)) on
/// `qubits`; the untracked theta_0 is accumulated into the circuit's
/// global_phase.  Gate-list length depends only on the qubit count.
inline void append_phase_network(Circuit& circuit, const std::vector<double>& omega, double t,
                                 const std::vector<int>& qubits) {
    const auto theta = diagonal_phase_params(omega, t);
    circuit.global_phase += theta[0];
    for (std::size_t s = 1; s < theta.size(); ++s) {
        auto bits = set_bits(s);
        const int target = qubits[static_cast<std::size_t>(bits.back())];
        bits.pop_back();
        if (bits.empty()) {
            circuit.gates.push_back(Gate::make_phase(theta[s], target));
        } else {
            std::vector<int> controls;
            for (int b : bits) controls.push_back(qubits[static_cast<std::size_t>(b)]);
            circuit.gates.push_back(Gate::make_controlled_phase(theta[s], std::move(controls), target));
        }
    }
}

/// Emits the dilated diagonal-contraction ladder for diag(v): ancilla
/// prepared |1>, then one controlled-Ry per subset parameter.
inline void append_contraction_ladder(Circuit& circuit, const std::vector<double>& v,
                                      const std::vector<int>& qubits, int ancilla) {
    const auto beta = diagonal_contraction_params(v);
    circuit.gates.push_back(Gate::make_pauli(PauliAxis::x, ancilla));
    for (std::size_t s = 0; s < beta.size(); ++s) {
        std::vector<int> controls;
        for (int b : set_bits(s)) controls.push_back(qubits[static_cast<std::size_t>(b)]);
        circuit.gates.push_back(Gate::make_controlled_ry(beta[s], std::move(controls), ancilla));
    }
}

struct NormalModeDecomposition {
    Matrix basis;                 // padded unitary eigenbasis
    std::vector<double> omega;    // phase rates, padded with zeros
    std::vector<double> decay;    // nonnegative decay rates, padded with zeros
    int n_qubits = 0;
};

/// Deterministic eigendecomposition of a normal contraction generator:
/// Schur vectors reordered by (real, imaginary) eigenvalue with stable ties,
/// zero-padded to a power-of-two dimension with identity action.
inline NormalModeDecomposition decompose_normal_generator(const LindbladSystem& sys) {
    const Matrix vh = sys.effective_hamiltonian();
    const double scale = hs_norm(vh);
    if (hs_norm(vh * vh.adjoint() - vh.adjoint() * vh) > 1e-9 * std::max(scale * scale, 1e-300)) {
        throw std::invalid_argument("effective Hamiltonian is not normal");
    }
    Eigen::ComplexSchur<Matrix> schur(vh);
    Vector eig = schur.matrixT().diagonal();
    Matrix u = schur.matrixU();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(eig.size()));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (eig(a).real() != eig(b).real()) return eig(a).real() < eig(b).real();
        return eig(a).imag() < eig(b).imag();
    });

    const Eigen::Index d = sys.dim();
    const Eigen::Index d_pad = next_pow2(d);
    NormalModeDecomposition out;
    out.n_qubits = log2_exact(static_cast<std::size_t>(d_pad));
    out.basis = Matrix::Identity(d_pad, d_pad);
    out.omega.assign(static_cast<std::size_t>(d_pad), 0.0);
    out.decay.assign(static_cast<std::size_t>(d_pad), 0.0);
    for (Eigen::Index i = 0; i < d; ++i) {
        out.basis.block(0, i, d, 1) = u.col(order[static_cast<std::size_t>(i)]);
        const Complex mu = eig(order[static_cast<std::size_t>(i)]);
        out.omega[static_cast<std::size_t>(i)] = mu.real() / sys.hbar();
        // The damping part of the generator is PSD, so negative decay can
        // only be roundoff.
        out.decay[static_cast<std::size_t>(i)] = std::max(-mu.imag() / sys.hbar(), 0.0);
    }
    return out;
}

inline void append_effective_evolution(Circuit& circuit, const NormalModeDecomposition& modes,
                                       double t, int ancilla) {
    std::vector<int> sys_qubits(static_cast<std::size_t>(modes.n_qubits));
    std::iota(sys_qubits.begin(), sys_qubits.end(), 0);

    circuit.gates.push_back(Gate::make_opaque(modes.basis.adjoint(), sys_qubits));
    std::vector<double> v(modes.decay.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(-t * modes.decay[i]);
    append_contraction_ladder(circuit, v, sys_qubits, ancilla);
    append_phase_network(circuit, modes.omega, t, sys_qubits);
    circuit.gates.push_back(Gate::make_opaque(modes.basis, sys_qubits));
}

}  // namespace detail

/// Circuit for the effective-Hamiltonian evolution exp(-i t V_H / hbar):
/// basis change, dilated diagonal contraction (one ancilla), diagonal phase
/// network, inverse basis change.  Gate structure is independent of t.
inline Circuit build_uh_circuit(const LindbladSystem& sys, const CaseClassification& cls,
                                double t) {
    if (cls.label == CommutatorClass::unsupported) {
        throw std::invalid_argument("build_uh_circuit: system has no closed-form series");
    }
    if (t < 0.0) throw std::invalid_argument("build_uh_circuit: time must be nonnegative");
    const auto modes = detail::decompose_normal_generator(sys);
    Circuit circuit;
    circuit.n_system = modes.n_qubits;
    circuit.ancillas.push_back({Ancilla::Role::sznagy, modes.n_qubits});
    circuit.postselect_mask.push_back(modes.n_qubits);
    detail::append_effective_evolution(circuit, modes, t, modes.n_qubits);
    return circuit;
}

/// Circuit for one series term: the dilated unit-norm jump factors applied
/// in reverse index order, then the effective evolution block.  Uses
/// order + 1 dilation ancillas; the postselected block times the circuit
/// weight reproduces the term's Kraus operator.
inline Circuit build_kraus_circuit(const LindbladSystem& sys, const CaseClassification& cls,
                                   const KrausTerm& term, double t) {
    if (cls.label == CommutatorClass::unsupported) {
        throw std::invalid_argument("build_kraus_circuit: system has no closed-form series");
    }
    if (t < 0.0) throw std::invalid_argument("build_kraus_circuit: time must be nonnegative");
    const auto sched = scalar_schedule(cls);
    const auto modes = detail::decompose_normal_generator(sys);
    const Eigen::Index d = sys.dim();
    const Eigen::Index d_pad = next_pow2(d);
    const int n = modes.n_qubits;
    const int m = term.order;

    Circuit circuit;
    circuit.n_system = n;
    for (int j = 0; j <= m; ++j) {
        circuit.ancillas.push_back({Ancilla::Role::sznagy, n + j});
        circuit.postselect_mask.push_back(n + j);
    }

    std::vector<int> sys_qubits(static_cast<std::size_t>(n));
    std::iota(sys_qubits.begin(), sys_qubits.end(), 0);

    const auto jumps = detail::rescale_jumps(sys);
    for (int pos = 0; pos < m; ++pos) {
        // Application order runs the index vector back to front.
        const int idx = term.indices[static_cast<std::size_t>(m - 1 - pos)];
        Matrix a_pad = Matrix::Identity(d_pad, d_pad);
        a_pad.topLeftCorner(d, d) = jumps.unit_ops[static_cast<std::size_t>(idx)];
        std::vector<int> gate_qubits = sys_qubits;
        gate_qubits.push_back(n + pos);
        circuit.gates.push_back(Gate::make_opaque(sznagy_dilation(a_pad), std::move(gate_qubits)));
    }
    detail::append_effective_evolution(circuit, modes, t, n + m);

    // Grouped terms fold their multiplicity into the squared weight.
    circuit.weight =
        term_weight(term, sched, t) * std::sqrt(static_cast<double>(term.multiplicity));
    return circuit;
}

}  // namespace kraussim
