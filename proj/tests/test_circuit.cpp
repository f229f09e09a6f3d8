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

#include <catch2/catch_amalgamated.hpp>

#include "kraussim/circuit.hpp"
#include "kraussim/statevector.hpp"
#include "test_support.hpp"

using namespace kraussim;
using ktest::entry_diff;

namespace {

// Dense tensor-power oracle for the subset difference transform.
Eigen::MatrixXd dense_transform(int n_qubits) {
    Eigen::MatrixXd q(1, 1);
    q(0, 0) = 1.0;
    Eigen::MatrixXd cell(2, 2);
    cell << 1.0, 0.0, -1.0, 1.0;
    for (int j = 0; j < n_qubits; ++j) {
        Eigen::MatrixXd next(q.rows() * 2, q.cols() * 2);
        next.topLeftCorner(q.rows(), q.cols()) = cell(0, 0) * q;
        next.topRightCorner(q.rows(), q.cols()) = cell(0, 1) * q;
        next.bottomLeftCorner(q.rows(), q.cols()) = cell(1, 0) * q;
        next.bottomRightCorner(q.rows(), q.cols()) = cell(1, 1) * q;
        q = next;
    }
    return q;
}

LindbladSystem dephasing_system(double gamma) {
    return LindbladSystem(Matrix::Zero(2, 2), {{ktest::pauli_z(), gamma}});
}

LindbladSystem ladder_system(Eigen::Index d, double omega, double gamma) {
    Matrix lower = Matrix::Zero(d, d);
    for (Eigen::Index n = 1; n < d; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index n = 0; n < d; ++n) h(n, n) = omega * (0.5 + static_cast<double>(n));
    return LindbladSystem(h, {{lower, gamma}});
}

std::vector<std::pair<int, int>> structure_signature(const Circuit& c) {
    std::vector<std::pair<int, int>> sig;
    for (const auto& g : c.gates) sig.push_back({static_cast<int>(g.kind), g.arity()});
    return sig;
}

}  // namespace

TEST_CASE("subset transform base cases") {
    std::vector<double> u = {3.0, 5.0};
    REQUIRE(subset_mobius_transform(u) == 1);
    REQUIRE(u == std::vector<double>{3.0, 2.0});

    std::vector<double> constant(16, 4.5);
    subset_mobius_transform(constant);
    REQUIRE(constant[0] == 4.5);
    for (std::size_t i = 1; i < constant.size(); ++i) REQUIRE(constant[i] == 0.0);

    std::vector<double> bad(6, 1.0);
    REQUIRE_THROWS_AS(subset_mobius_transform(bad), std::invalid_argument);
}

TEST_CASE("subset transform equals the dense tensor power") {
    auto& gen = ktest::rng(501);
    std::uniform_int_distribution<int> ints(-50, 50);
    for (int n : {1, 2, 3, 4}) {
        const std::size_t len = std::size_t{1} << n;
        std::vector<double> u(len);
        Eigen::VectorXd dense_in(static_cast<Eigen::Index>(len));
        for (std::size_t i = 0; i < len; ++i) {
            u[i] = static_cast<double>(ints(gen));
            dense_in(static_cast<Eigen::Index>(i)) = u[i];
        }
        const std::size_t count = subset_mobius_transform(u);
        REQUIRE(count == static_cast<std::size_t>(n) * (len / 2));
        Eigen::VectorXd dense_out = dense_transform(n) * dense_in;
        for (std::size_t i = 0; i < len; ++i) {
            REQUIRE(u[i] == dense_out(static_cast<Eigen::Index>(i)));
        }
    }
}

TEST_CASE("subset transform inverts the subset-sum matrix") {
    auto& gen = ktest::rng(509);
    std::uniform_int_distribution<int> ints(-20, 20);
    for (int n : {1, 3}) {
        const std::size_t len = std::size_t{1} << n;
        // Dense subset-sum matrix: S[n][s] = 1 iff bits(s) subset of bits(n).
        Eigen::MatrixXd zeta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(len),
                                                     static_cast<Eigen::Index>(len));
        for (std::size_t row = 0; row < len; ++row) {
            for (std::size_t col = 0; col < len; ++col) {
                if ((col & row) == col) zeta(static_cast<Eigen::Index>(row),
                                             static_cast<Eigen::Index>(col)) = 1.0;
            }
        }
        std::vector<double> u(len);
        Eigen::VectorXd original(static_cast<Eigen::Index>(len));
        for (std::size_t i = 0; i < len; ++i) {
            u[i] = static_cast<double>(ints(gen));
            original(static_cast<Eigen::Index>(i)) = u[i];
        }
        subset_mobius_transform(u);
        Eigen::VectorXd reconstructed =
            zeta * Eigen::Map<Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(len));
        for (std::size_t i = 0; i < len; ++i) {
            REQUIRE(reconstructed(static_cast<Eigen::Index>(i)) ==
                    original(static_cast<Eigen::Index>(i)));
        }
    }
}

TEST_CASE("diagonal phase parameters") {
    auto theta0 = diagonal_phase_params({0.7, -0.3, 0.1, 0.9}, 0.0);
    for (double th : theta0) REQUIRE(th == 0.0);

    auto theta = diagonal_phase_params({0.0, 1.0}, std::numbers::pi);
    REQUIRE(theta[0] == 0.0);
    REQUIRE(theta[1] == std::numbers::pi);

    // Reconstructed three-qubit diagonal, global phase corrected.
    auto& gen = ktest::rng(502);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    std::vector<double> omega(8);
    for (double& w : omega) w = dist(gen);
    const double t = 1.7;
    Circuit circuit;
    circuit.n_system = 3;
    kraussim::detail::append_phase_network(circuit, omega, t, {0, 1, 2});
    Matrix rebuilt = circuit_unitary(circuit);
    for (int n = 0; n < 8; ++n) {
        REQUIRE(std::abs(rebuilt(n, n) - std::exp(-imag_unit * t * omega[static_cast<std::size_t>(n)])) <
                1e-12);
    }
}

TEST_CASE("diagonal contraction parameters") {
    auto beta_open = diagonal_contraction_params({1.0, 1.0, 1.0, 1.0});
    REQUIRE(std::abs(beta_open[0] + std::numbers::pi) < 1e-15);
    for (std::size_t s = 1; s < beta_open.size(); ++s) REQUIRE(beta_open[s] == 0.0);

    REQUIRE_THROWS_AS(diagonal_contraction_params({0.5, 1.2}), std::invalid_argument);
    REQUIRE_THROWS_AS(diagonal_contraction_params({-0.2, 0.5}), std::invalid_argument);

    auto check_ladder = [](const std::vector<double>& v) {
        const int n = log2_exact(v.size());
        Circuit circuit;
        circuit.n_system = n;
        circuit.ancillas.push_back({Ancilla::Role::sznagy, n});
        std::vector<int> sys(static_cast<std::size_t>(n));
        std::iota(sys.begin(), sys.end(), 0);
        kraussim::detail::append_contraction_ladder(circuit, v, sys, n);
        Matrix block = postselected_block(circuit);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const auto n_idx = static_cast<Eigen::Index>(i);
            REQUIRE(std::abs(std::abs(block(n_idx, n_idx)) - v[i]) < 1e-12);
        }
        REQUIRE(is_unitary(circuit_unitary(circuit), 1e-9));
    };
    check_ladder({1.0, std::exp(-0.5), std::exp(-1.0), std::exp(-1.5)});
    check_ladder({0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("unitary dilation of contractions") {
    Matrix di = sznagy_dilation(identity(2));
    Matrix expect_i(4, 4);
    expect_i.setZero();
    expect_i.topLeftCorner(2, 2) = identity(2);
    expect_i.bottomRightCorner(2, 2) = -identity(2);
    REQUIRE(entry_diff(di, expect_i) < 1e-12);

    Matrix dz = sznagy_dilation(Matrix::Zero(2, 2));
    Matrix expect_z(4, 4);
    expect_z.setZero();
    expect_z.topRightCorner(2, 2) = identity(2);
    expect_z.bottomLeftCorner(2, 2) = identity(2);
    REQUIRE(entry_diff(dz, expect_z) < 1e-12);

    auto& gen = ktest::rng(503);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix m = ktest::random_matrix(4, 4, gen);
        Matrix k = m / op_norm(m);
        Matrix u = sznagy_dilation(k);
        REQUIRE(is_unitary(u, 1e-9));
        REQUIRE(entry_diff(u.topLeftCorner(4, 4), k) < 1e-10);
    }

    REQUIRE_THROWS_AS(sznagy_dilation((2.0 * identity(2)).eval()), std::invalid_argument);
    REQUIRE_THROWS_AS(sznagy_dilation(Matrix::Zero(3, 3)), std::invalid_argument);
}

TEST_CASE("effective-evolution circuit blocks") {
    // Closed system: the contraction is trivial and the block is the
    // Schroedinger evolution.
    auto& gen = ktest::rng(504);
    Matrix h = ktest::random_hermitian(4, gen);
    LindbladSystem closed(h, {});
    auto cls = classify(closed);
    const double t = 0.9;
    Circuit circuit = build_uh_circuit(closed, cls, t);
    REQUIRE(entry_diff(postselected_block(circuit), expm((-imag_unit * t * h).eval())) < 1e-10);

    // Dephasing: a pure contraction by exp(-gamma t / 2).
    auto deph = dephasing_system(1.0);
    auto dcls = classify(deph);
    Matrix block = postselected_block(build_uh_circuit(deph, dcls, 1.0));
    REQUIRE(entry_diff(block, (std::exp(-0.5) * identity(2)).eval()) < 1e-10);

    // Damped ladder at two times.
    auto ladder = ladder_system(4, 1.2, 0.7);
    auto lcls = classify(ladder);
    for (double tt : {0.3, 3.0}) {
        Matrix lblock = postselected_block(build_uh_circuit(ladder, lcls, tt));
        Matrix expect = expm(((-imag_unit * tt) * ladder.effective_hamiltonian()).eval());
        REQUIRE(entry_diff(lblock, expect) < 1e-9);
    }

    // A non-normal effective Hamiltonian is rejected.
    Matrix lower = Matrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    LindbladSystem skew(ktest::pauli_x(), {{lower, 1.0}});
    CaseClassification fake;
    fake.label = CommutatorClass::scalar;
    REQUIRE_THROWS_AS(build_uh_circuit(skew, fake, 1.0), std::invalid_argument);
}

TEST_CASE("term circuits reproduce the matrix-level operators") {
    auto deph = dephasing_system(1.0);
    auto dcls = classify(deph);
    auto dsched = scalar_schedule(dcls);
    auto terms = enumerate_terms(deph, 2);

    // Empty jump sequence: the effective evolution with weight sqrt(h) = 1.
    Circuit c0 = build_kraus_circuit(deph, dcls, terms[0], 1.0);
    REQUIRE(c0.weight == 1.0);
    REQUIRE(c0.ancillas.size() == 1);

    // One jump: block exp(-t/2) Z with weight sqrt(t * gamma).
    Circuit c1 = build_kraus_circuit(deph, dcls, terms[1], 1.0);
    REQUIRE(std::abs(c1.weight - 1.0) < 1e-14);
    REQUIRE(c1.ancillas.size() == 2);
    Matrix block1 = postselected_block(c1);
    REQUIRE(entry_diff(block1, (std::exp(-0.5) * ktest::pauli_z()).eval()) < 1e-10);

    // Every term: block * weight equals the exact Kraus operator.
    for (const auto& term : terms) {
        Circuit c = build_kraus_circuit(deph, dcls, term, 0.8);
        Matrix expect = kraus_operator(deph, dcls, term.order, term.indices, 0.8);
        REQUIRE(entry_diff((c.weight * postselected_block(c)).eval(), expect) < 1e-9);
        REQUIRE(is_unitary(circuit_unitary(c), 1e-9));
        for (const auto& g : c.gates) {
            if (g.kind == Gate::Kind::opaque_unitary) REQUIRE(is_unitary(g.matrix, 1e-9));
        }
    }

    // Damped ladder, order two.
    auto ladder = ladder_system(4, 1.0, 0.9);
    auto lcls = classify(ladder);
    auto lterms = enumerate_terms(ladder, 2);
    const auto& order2 = lterms[2];
    REQUIRE(order2.order == 2);
    Circuit lc = build_kraus_circuit(ladder, lcls, order2, 0.7);
    Matrix got = lc.weight * postselected_block(lc);
    Matrix expect = kraus_operator(ladder, lcls, 2, order2.indices, 0.7);
    REQUIRE(entry_diff(got, expect) < 1e-9);
}

TEST_CASE("gate structure does not depend on time") {
    auto deph = dephasing_system(0.6);
    auto dcls = classify(deph);
    auto ladder = ladder_system(4, 1.0, 0.5);
    auto lcls = classify(ladder);

    REQUIRE(structure_signature(build_uh_circuit(deph, dcls, 0.01)) ==
            structure_signature(build_uh_circuit(deph, dcls, 100.0)));
    REQUIRE(structure_signature(build_uh_circuit(ladder, lcls, 0.01)) ==
            structure_signature(build_uh_circuit(ladder, lcls, 100.0)));

    for (const auto& term : enumerate_terms(ladder, 3)) {
        REQUIRE(structure_signature(build_kraus_circuit(ladder, lcls, term, 0.01)) ==
                structure_signature(build_kraus_circuit(ladder, lcls, term, 100.0)));
    }
}
