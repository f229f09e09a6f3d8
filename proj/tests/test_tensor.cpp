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

#include "kraussim/tensor.hpp"
#include "test_support.hpp"

using namespace kraussim;
using ktest::entry_diff;

TEST_CASE("kron identity and diagonal structure") {
    const Matrix i2 = identity(2);
    REQUIRE(entry_diff(kron(i2, i2), identity(4)) == 0.0);

    Matrix d(2, 2);
    d << 3.0, 0.0, 0.0, 7.0;
    Matrix expect = Matrix::Zero(4, 4);
    expect.diagonal() << 3.0, 3.0, 7.0, 7.0;
    REQUIRE(entry_diff(kron(d, i2), expect) == 0.0);
}

TEST_CASE("kron matches action on product vectors") {
    auto& gen = ktest::rng(101);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a = ktest::random_matrix(2, 2, gen);
        Matrix b = ktest::random_matrix(2, 2, gen);
        Vector u = ktest::random_vector(2, gen);
        Vector v = ktest::random_vector(2, gen);
        Vector lhs = kron(a, b) * ktest::naive_kron(u, v);
        Vector rhs = ktest::naive_kron((a * u).eval(), (b * v).eval());
        REQUIRE(entry_diff(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("conj_kron product and sum modes") {
    const Matrix z = ktest::pauli_z();
    Matrix expect = Matrix::Zero(4, 4);
    expect.diagonal() << 1.0, -1.0, -1.0, 1.0;
    REQUIRE(entry_diff(conj_kron(z, KronMode::product), expect) == 0.0);

    // An imaginary multiple of the identity cancels against its conjugate.
    const Matrix a = imag_unit * identity(2);
    REQUIRE(max_abs(conj_kron(a, KronMode::sum)) == 0.0);

    const Matrix y = ktest::pauli_y();
    REQUIRE(entry_diff(conj_kron(y, KronMode::product), ktest::naive_kron(y, (-y).eval())) == 0.0);

    REQUIRE_THROWS_AS(conj_kron(Matrix::Zero(2, 3), KronMode::product), std::invalid_argument);
}

TEST_CASE("vectorize follows row stacking and round-trips") {
    Matrix rho(2, 2);
    rho << Complex(1, 1), Complex(2, -1), Complex(3, 0), Complex(4, 2);
    Vector v = vectorize(rho);
    REQUIRE(v(0) == rho(0, 0));
    REQUIRE(v(1) == rho(0, 1));
    REQUIRE(v(2) == rho(1, 0));
    REQUIRE(v(3) == rho(1, 1));
    REQUIRE(entry_diff(devectorize(v), rho) == 0.0);

    Vector half = vectorize((identity(2) / 2.0).eval());
    Vector expect(4);
    expect << 0.5, 0.0, 0.0, 0.5;
    REQUIRE(entry_diff(half, expect) == 0.0);

    REQUIRE_THROWS_AS(vectorize(Matrix::Zero(2, 3)), std::invalid_argument);
    REQUIRE_THROWS_AS(devectorize(Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("vectorize intertwines sandwiching with kron") {
    auto& gen = ktest::rng(102);
    for (int rep = 0; rep < 20; ++rep) {
        Matrix a = ktest::random_matrix(3, 3, gen);
        Matrix b = ktest::random_matrix(3, 3, gen);
        Matrix rho = ktest::random_matrix(3, 3, gen);
        Vector lhs = vectorize((a * rho * b.adjoint()).eval());
        Vector rhs = kron(a, b.conjugate()) * vectorize(rho);
        REQUIRE(entry_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("expm basic cases") {
    REQUIRE(entry_diff(expm(Matrix::Zero(3, 3)), identity(3)) == 0.0);

    Matrix d = Matrix::Zero(3, 3);
    d.diagonal() << Complex(0.3, 0.1), Complex(-1.0, 2.0), Complex(0.0, -0.5);
    Matrix e = expm(d);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(std::abs(e(i, i) - std::exp(d(i, i))) < 1e-14);
    }

    REQUIRE_THROWS_AS(expm(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("expm agrees with a truncated Taylor series") {
    auto& gen = ktest::rng(103);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix a = ktest::random_matrix(4, 4, gen);
        a /= std::max(op_norm(a), 1.0);
        REQUIRE(entry_diff(expm(a), ktest::taylor_expm(a)) < 1e-10);
    }
}

TEST_CASE("expm inverse and unitarity properties") {
    auto& gen = ktest::rng(104);
    for (int rep = 0; rep < 5; ++rep) {
        Matrix a = ktest::random_matrix(4, 4, gen);
        a *= 10.0 / op_norm(a);
        REQUIRE(max_abs(expm(a) * expm((-a).eval()) - identity(4)) < 1e-10 * max_abs(expm(a)));

        Matrix h = ktest::random_hermitian(4, gen);
        REQUIRE(is_unitary(expm((-imag_unit * h).eval()), 1e-10));
    }
}

TEST_CASE("sqrtm_psd diagonal and random PSD inputs") {
    REQUIRE(entry_diff(sqrtm_psd(identity(3)), identity(3)) < 1e-14);

    Matrix d = Matrix::Zero(2, 2);
    d.diagonal() << 4.0, 9.0;
    Matrix r = sqrtm_psd(d);
    REQUIRE(std::abs(r(0, 0) - 2.0) < 1e-14);
    REQUIRE(std::abs(r(1, 1) - 3.0) < 1e-14);

    auto& gen = ktest::rng(105);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix m = ktest::random_matrix(4, 4, gen);
        Matrix a = m.adjoint() * m;
        Matrix root = sqrtm_psd(a);
        REQUIRE(entry_diff(root * root, a) < 1e-9 * std::max(max_abs(a), 1.0));
        REQUIRE(is_hermitian(root, 1e-12));
        Eigen::SelfAdjointEigenSolver<Matrix> es(root);
        REQUIRE(es.eigenvalues().minCoeff() >= -1e-9);
    }

    REQUIRE_THROWS_AS(sqrtm_psd(ktest::pauli_y() * 2.0 + Matrix::Identity(2, 2) * imag_unit),
                      std::invalid_argument);
    Matrix neg = Matrix::Zero(2, 2);
    neg.diagonal() << 1.0, -0.5;
    REQUIRE_THROWS_AS(sqrtm_psd(neg), std::invalid_argument);
}

TEST_CASE("matrix norms") {
    auto n1 = matrix_norms(identity(5));
    REQUIRE(std::abs(n1.hs - std::sqrt(5.0)) < 1e-14);
    REQUIRE(std::abs(n1.op - 1.0) < 1e-12);

    auto nz = matrix_norms(ktest::pauli_z());
    REQUIRE(std::abs(nz.hs - std::sqrt(2.0)) < 1e-14);
    REQUIRE(std::abs(nz.op - 1.0) < 1e-12);

    auto& gen = ktest::rng(106);
    for (int rep = 0; rep < 10; ++rep) {
        Matrix a = ktest::random_matrix(4, 4, gen);
        auto n = matrix_norms(a);
        REQUIRE(n.hs >= n.op - 1e-12);
        double sum = 0.0;
        for (Eigen::Index i = 0; i < a.rows(); ++i)
            for (Eigen::Index j = 0; j < a.cols(); ++j) sum += std::norm(a(i, j));
        REQUIRE(std::abs(n.hs * n.hs - sum) < 1e-12 * std::max(sum, 1.0));
    }
}
