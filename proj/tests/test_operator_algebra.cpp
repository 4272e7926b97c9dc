#include "kerrsim/operator_algebra.hpp"

#include "doctest.h"

#include <complex>

using namespace kerrsim;
using ops::Complex;
using ops::Matrix;
using ops::Mode;
using ops::ModeLayout;
using ops::QOperator;
using ops::QState;

TEST_CASE("destroy matches the ladder definition") {
    const Matrix a2 = ops::destroy_matrix(2);
    CHECK(a2(0, 1) == Complex(1.0, 0.0));
    CHECK(a2(0, 0) == Complex(0.0, 0.0));
    CHECK(a2(1, 0) == Complex(0.0, 0.0));
    CHECK(a2(1, 1) == Complex(0.0, 0.0));

    const Matrix a3 = ops::destroy_matrix(3);
    CHECK(a3(0, 1).real() == doctest::Approx(1.0));
    CHECK(a3(1, 2).real() == doctest::Approx(std::sqrt(2.0)));

    CHECK_THROWS_AS(ops::destroy_matrix(1), std::invalid_argument);
}

TEST_CASE("truncated commutator [a, a^t] is identity except the last level") {
    for (int dim : {2, 3, 5, 8, 12}) {
        const Matrix a = ops::destroy_matrix(dim);
        const Matrix comm = a * a.adjoint() - a.adjoint() * a;
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                const double expected = (i == j) ? (i == dim - 1 ? -(dim - 1.0) : 1.0) : 0.0;
                CHECK(std::abs(comm(i, j) - Complex(expected, 0.0)) == doctest::Approx(0.0));
            }
        }
    }
}

TEST_CASE("embed places single-mode operators with (A, B, S) ordering") {
    const auto layout = ModeLayout::two_mode(2, 2);
    const QOperator a = ops::embed(ops::destroy_matrix(2), Mode::A, layout);
    CHECK(a.dim() == 4);
    // a x I: nonzero entries (0,2) and (1,3) with value 1
    CHECK(a.mat(0, 2).real() == doctest::Approx(1.0));
    CHECK(a.mat(1, 3).real() == doctest::Approx(1.0));
    CHECK(a.mat.cwiseAbs().sum() == doctest::Approx(2.0));

    const QOperator idb = ops::embed(Matrix::Identity(2, 2), Mode::B, layout);
    CHECK((idb.mat - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    const QOperator b = ops::destroy(layout, Mode::B);
    const QOperator comm = ops::commutator(a, b);
    CHECK(comm.mat.cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    CHECK_THROWS_AS(ops::embed(ops::destroy_matrix(3), Mode::A, layout), std::invalid_argument);
    CHECK_THROWS_AS(ops::destroy(layout, Mode::S), std::invalid_argument);
}

TEST_CASE("embed is an algebra homomorphism per mode") {
    const auto layout = ModeLayout::two_mode(4, 3);
    const Matrix x = ops::destroy_matrix(4);
    const Matrix y = ops::number_matrix(4);
    const QOperator lhs = ops::embed(x * y, Mode::A, layout);
    const QOperator rhs = ops::embed(x, Mode::A, layout) * ops::embed(y, Mode::A, layout);
    CHECK((lhs.mat - rhs.mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("expect on Fock, coherent, and identity") {
    const auto layout = ModeLayout::single(Mode::A, 5);
    const QOperator n = ops::embed(ops::number_matrix(5), Mode::A, layout);
    const QState two = ops::fock_state(layout, {2});
    CHECK(ops::expect(n, two).real() == doctest::Approx(2.0));

    const auto lay20 = ModeLayout::single(Mode::A, 20);
    const QState coh = QState::from_ket(lay20, ops::coherent_vector(20, Complex(0.5, 0.0)));
    const QOperator a = ops::destroy(lay20, Mode::A);
    CHECK(std::abs(ops::expect(a, coh) - Complex(0.5, 0.0)) < 1e-6);

    const QState rho = QState::from_density(lay20, ops::thermal_matrix(20, 0.3));
    CHECK(ops::expect(ops::identity(lay20), rho).real() == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(ops::expect(n, coh), std::invalid_argument);
}

TEST_CASE("expect is linear and real for Hermitian operators") {
    const auto layout = ModeLayout::two_mode(3, 3);
    const QOperator a = ops::destroy(layout, Mode::A);
    const QOperator b = ops::destroy(layout, Mode::B);
    const QOperator h = a.adjoint() * b + b.adjoint() * a;   // Hermitian
    h.assert_hermitian();

    ops::Vector psi = ops::Vector::Zero(9);
    psi(1) = Complex(0.6, 0.0);
    psi(3) = Complex(0.0, 0.8);
    const QState state = QState::from_ket(layout, psi);

    const Complex e1 = ops::expect(h, state);
    CHECK(std::abs(e1.imag()) < 1e-10);

    const QOperator n = a.adjoint() * a;
    const Complex lhs = ops::expect(h + 2.0 * n, state);
    const Complex rhs = e1 + 2.0 * ops::expect(n, state);
    CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("adjoint is an involution") {
    const auto layout = ModeLayout::single(Mode::A, 3);
    const QOperator a = ops::destroy(layout, Mode::A);
    CHECK((a.adjoint().adjoint().mat - a.mat).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
}

TEST_CASE("partial trace of a product state returns the factors") {
    const auto layout = ModeLayout::two_mode(3, 4);
    const Matrix rho_a = ops::thermal_matrix(3, 0.2);
    const Matrix rho_b = ops::thermal_matrix(4, 0.7);
    const QState joint = QState::from_density(layout, ops::kron(rho_a, rho_b));

    const QState red_a = ops::partial_trace(joint, {Mode::A});
    CHECK((red_a.rho - rho_a).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(red_a.rho.trace().real() - 1.0) < 1e-12);

    const QState red_b = ops::partial_trace(joint, {Mode::B});
    CHECK((red_b.rho - rho_b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("partial trace of a Bell-like state is maximally mixed") {
    const auto layout = ModeLayout::two_mode(2, 2);
    ops::Vector bell = ops::Vector::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);   // |00> + |11>
    bell(3) = 1.0 / std::sqrt(2.0);
    const QState state = QState::from_ket(layout, bell);
    const QState red = ops::partial_trace(state, {Mode::A});
    const Matrix expected = 0.5 * Matrix::Identity(2, 2);
    CHECK((red.rho - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("three-mode partial trace keeps the middle mode consistently") {
    const auto layout = ModeLayout::three_mode(2, 3, 2);
    const Matrix ra = ops::thermal_matrix(2, 0.1);
    const Matrix rb = ops::thermal_matrix(3, 0.4);
    const Matrix rs = ops::thermal_matrix(2, 0.9);
    const QState joint = QState::from_density(layout, ops::kron(ops::kron(ra, rb), rs));
    const QState red = ops::partial_trace(joint, {Mode::B});
    CHECK((red.rho - rb).cwiseAbs().maxCoeff() < 1e-12);
    const QState red_as = ops::partial_trace(joint, {Mode::A, Mode::S});
    CHECK((red_as.rho - ops::kron(ra, rs)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("state validation rejects bad inputs") {
    const auto layout = ModeLayout::single(Mode::A, 3);
    ops::Vector bad = ops::Vector::Zero(3);
    bad(0) = 0.9;
    CHECK_THROWS_AS(QState::from_ket(layout, bad), std::invalid_argument);

    Matrix rho = Matrix::Zero(3, 3);
    rho(0, 0) = 1.5;
    rho(1, 1) = -0.5;
    CHECK_THROWS_AS(QState::from_density(layout, rho), std::invalid_argument);

    CHECK_THROWS_AS(ModeLayout::two_mode(1, 4), std::invalid_argument);
}

TEST_CASE("hermiticity flag verifies to tolerance") {
    const auto layout = ModeLayout::single(Mode::A, 3);
    QOperator n = ops::embed(ops::number_matrix(3), Mode::A, layout);
    CHECK(n.is_hermitian());
    n.mat(0, 1) = Complex(0.0, 1e-6);
    CHECK(!n.is_hermitian());
    CHECK_THROWS_AS(n.assert_hermitian(), std::runtime_error);
}
