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

#include "kraussim/lindblad.hpp"
#include "test_support.hpp"

using namespace kraussim;
using ktest::entry_diff;

namespace {

LindbladSystem random_system(Eigen::Index d, int n_jumps, std::mt19937& gen) {
    std::uniform_real_distribution<double> rate(0.1, 1.0);
    std::vector<LindbladTerm> terms;
    for (int n = 0; n < n_jumps; ++n) {
        terms.push_back({ktest::random_matrix(d, d, gen), rate(gen)});
    }
    return LindbladSystem(ktest::random_hermitian(d, gen), std::move(terms));
}

LindbladSystem dephasing_system(double gamma) {
    return LindbladSystem(Matrix::Zero(2, 2), {{ktest::pauli_z(), gamma}});
}

LindbladSystem qho_system_2level(double omega, double gamma) {
    Matrix h = Matrix::Zero(2, 2);
    h.diagonal() << 0.5 * omega, 1.5 * omega;
    Matrix lower = Matrix::Zero(2, 2);
    lower(0, 1) = 1.0;
    return LindbladSystem(h, {{lower, gamma}});
}

}  // namespace

TEST_CASE("build_superoperators on single-qubit dephasing") {
    auto sup = build_superoperators(dephasing_system(1.0));
    Matrix l_expect = Matrix::Zero(4, 4);
    l_expect.diagonal() << 1.0, -1.0, -1.0, 1.0;
    REQUIRE(entry_diff(sup.l_super, l_expect) < 1e-14);
    REQUIRE(entry_diff(sup.h_super, (-identity(4)).eval()) < 1e-14);
    Matrix total_expect = Matrix::Zero(4, 4);
    total_expect.diagonal() << 0.0, -2.0, -2.0, 0.0;
    REQUIRE(entry_diff(sup.total(), total_expect) < 1e-14);
}

TEST_CASE("build_superoperators trivial and random systems") {
    LindbladSystem empty(Matrix::Zero(2, 2), {});
    auto sup = build_superoperators(empty);
    REQUIRE(max_abs(sup.h_super) == 0.0);
    REQUIRE(max_abs(sup.l_super) == 0.0);

    auto& gen = ktest::rng(201);
    for (int rep = 0; rep < 10; ++rep) {
        auto sys = random_system(3, 2, gen);
        auto s = build_superoperators(sys);
        Matrix rho = ktest::random_matrix(3, 3, gen);
        Vector lhs = s.total() * vectorize(rho);
        Vector rhs = vectorize(lindblad_rhs(sys, rho));
        REQUIRE(entry_diff(lhs, rhs) < 1e-11);
        // Trace of the image vanishes for any rho.
        REQUIRE(std::abs(devectorize(lhs).trace()) < 1e-10);
    }
}

TEST_CASE("lindblad_rhs hand cases") {
    // Stationary: no damping and [H, rho] = 0.
    LindbladSystem free_sys(ktest::pauli_z(), {});
    Matrix rho_diag = Matrix::Zero(2, 2);
    rho_diag.diagonal() << 0.25, 0.75;
    REQUIRE(max_abs(lindblad_rhs(free_sys, rho_diag)) < 1e-15);

    // Dephasing kills off-diagonals at rate 2*gamma and leaves diagonals.
    const double gamma = 0.7;
    auto sys = dephasing_system(gamma);
    Matrix rho(2, 2);
    rho << 0.5, 0.5, 0.5, 0.5;
    Matrix out = lindblad_rhs(sys, rho);
    REQUIRE(std::abs(out(0, 0)) < 1e-14);
    REQUIRE(std::abs(out(1, 1)) < 1e-14);
    REQUIRE(std::abs(out(0, 1) - Complex(-2.0 * gamma * 0.5, 0.0)) < 1e-14);
    auto sup = build_superoperators(sys);
    REQUIRE(entry_diff(vectorize(out), (sup.total() * vectorize(rho)).eval()) < 1e-13);
}

TEST_CASE("lindblad_rhs is trace-free and Hermiticity-preserving") {
    auto& gen = ktest::rng(202);
    for (int rep = 0; rep < 100; ++rep) {
        auto sys = random_system(rep % 2 ? 2 : 3, 1 + rep % 3, gen);
        Matrix rho = ktest::random_density(sys.dim(), gen);
        Matrix out = lindblad_rhs(sys, rho);
        REQUIRE(std::abs(out.trace()) < 1e-11);
        REQUIRE(is_hermitian(out, 1e-12));
    }
}

TEST_CASE("exact_propagator basics") {
    auto sys = dephasing_system(1.0);
    REQUIRE(entry_diff(exact_propagator(sys, 0.0), identity(4)) < 1e-14);
    REQUIRE_THROWS_AS(exact_propagator(sys, -0.1), std::invalid_argument);

    // Off-diagonal decay factor exp(-2t) = 1/4 at t = ln 2.
    Matrix p = exact_propagator(sys, std::log(2.0));
    REQUIRE(std::abs(p(1, 1) - Complex(0.25, 0.0)) < 1e-12);
    REQUIRE(std::abs(p(2, 2) - Complex(0.25, 0.0)) < 1e-12);

    auto& gen = ktest::rng(203);
    auto rnd = random_system(3, 2, gen);
    std::uniform_real_distribution<double> dist(0.1, 1.0);
    const double t1 = dist(gen), t2 = dist(gen);
    Matrix lhs = exact_propagator(rnd, t1) * exact_propagator(rnd, t2);
    Matrix rhs = exact_propagator(rnd, t1 + t2);
    REQUIRE(entry_diff(lhs, rhs) < 1e-10 * std::max(1.0, max_abs(rhs)));
}

TEST_CASE("exact_propagator is CPTP") {
    auto& gen = ktest::rng(204);
    for (int rep = 0; rep < 10; ++rep) {
        auto sys = random_system(2 + rep % 3, 1 + rep % 2, gen);
        const Eigen::Index d = sys.dim();
        Matrix p = exact_propagator(sys, 0.5);
        // Maps density matrices to density matrices.
        Matrix rho = ktest::random_density(d, gen);
        Matrix evolved = devectorize(p * vectorize(rho));
        REQUIRE(std::abs(evolved.trace() - Complex(1.0, 0.0)) < 1e-10);
        REQUIRE(is_hermitian(evolved, 1e-10));
        Eigen::SelfAdjointEigenSolver<Matrix> es((evolved + evolved.adjoint()) / 2.0);
        REQUIRE(es.eigenvalues().minCoeff() >= -1e-9);
        // Complete positivity via the Choi matrix.
        Matrix choi = choi_matrix(p);
        Eigen::SelfAdjointEigenSolver<Matrix> ec((choi + choi.adjoint()) / 2.0);
        REQUIRE(ec.eigenvalues().minCoeff() >= -1e-9);
    }
}

TEST_CASE("rk4_evolve against the dense propagator") {
    auto& gen = ktest::rng(205);
    auto sys = random_system(4, 2, gen);
    Matrix rho0 = ktest::random_density(4, gen);

    REQUIRE(entry_diff(rk4_evolve(sys, rho0, 0.0, 10), rho0) == 0.0);

    Matrix expected = devectorize(exact_propagator(sys, 1.0) * vectorize(rho0));
    Matrix integrated = rk4_evolve(sys, rho0, 1.0, 2000);
    REQUIRE(trace_distance(integrated, expected) < 1e-7);

    Matrix bad = Matrix::Identity(4, 4);  // trace 4, not a state
    REQUIRE_THROWS_AS(rk4_evolve(sys, bad, 1.0, 10), std::invalid_argument);
    REQUIRE_THROWS_AS(rk4_evolve(sys, rho0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("rk4_evolve conserves purity without damping") {
    auto& gen = ktest::rng(206);
    LindbladSystem sys(ktest::random_hermitian(3, gen), {});
    Matrix m = ktest::random_matrix(3, 1, gen);
    Matrix rho0 = m * m.adjoint();
    rho0 /= rho0.trace();
    Matrix rho = rk4_evolve(sys, rho0, 1.0, 1000);
    REQUIRE(std::abs((rho * rho).trace().real() - 1.0) < 1e-8);
}

TEST_CASE("classify recognizes a vanishing superoperator commutator") {
    // Pauli-string jumps with H = 0: everything commutes.
    Matrix xx = ktest::naive_kron(ktest::pauli_x(), ktest::pauli_x());
    Matrix zi = ktest::naive_kron(ktest::pauli_z(), ktest::pauli_i());
    LindbladSystem sys(Matrix::Zero(4, 4), {{xx, 0.3}, {zi, 0.9}});
    auto cls = classify(sys);
    REQUIRE(cls.label == CommutatorClass::scalar);
    REQUIRE(cls.alpha == 0.0);
    REQUIRE(cls.c == 0.0);
    REQUIRE(cls.via_conditions);
    // With unitary jump strings the damping generators are the identity, so
    // both shared scalars vanish.
    REQUIRE(std::abs(*cls.nu) < 1e-12);
    REQUIRE(std::abs(*cls.lambda) < 1e-12);
}

TEST_CASE("classify recognizes the damped-ladder structure") {
    const double omega = 1.3, gamma = 0.8;
    auto cls = classify(qho_system_2level(omega, gamma));
    REQUIRE(cls.label == CommutatorClass::linear);
    REQUIRE(std::abs(cls.alpha - gamma) < 1e-9 * gamma);
    REQUIRE(cls.c <= 1e-9);
    REQUIRE(cls.nu.has_value());
    REQUIRE(std::abs(*cls.nu - Complex(-omega, 0.0)) < 1e-9);
    REQUIRE(cls.lambda.has_value());
    REQUIRE(std::abs(*cls.lambda - Complex(-gamma, 0.0)) < 1e-9);

    // The fitted alpha scales linearly with the rates.
    for (double s : {0.5, 2.0}) {
        auto scaled = classify(qho_system_2level(omega, s * gamma));
        REQUIRE(std::abs(scaled.alpha - s * gamma) < 1e-9 * s * gamma);
    }
}

TEST_CASE("classify rejects a non-eigen jump operator") {
    LindbladSystem sys(ktest::pauli_x(), {{ktest::pauli_z(), 1.0}});
    auto cls = classify(sys);
    REQUIRE(cls.label == CommutatorClass::unsupported);
    REQUIRE_FALSE(cls.failing_condition.empty());
    REQUIRE(cls.residuals.eigen_h > 1.0);
}

TEST_CASE("classify drops zero-rate entries and handles empty systems") {
    LindbladSystem sys(ktest::pauli_z(), {{ktest::pauli_x(), 0.0}, {Matrix::Zero(2, 2), 1.0}});
    auto cls = classify(sys);
    REQUIRE(cls.label == CommutatorClass::scalar);
    REQUIRE(cls.alpha == 0.0);
}

TEST_CASE("system construction rejects invalid input") {
    REQUIRE_THROWS_AS(LindbladSystem(ktest::pauli_x() * imag_unit, {}), std::invalid_argument);
    REQUIRE_THROWS_AS(LindbladSystem(Matrix::Zero(2, 2), {{Matrix::Zero(3, 3), 1.0}}),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(LindbladSystem(Matrix::Zero(2, 2), {{ktest::pauli_x(), -1.0}}),
                      std::invalid_argument);
}
