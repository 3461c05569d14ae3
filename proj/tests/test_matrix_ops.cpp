#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dirac_isp/matrix_ops.hpp"
#include "test_helpers.hpp"

using namespace dirac_isp;
using test_helpers::random_matrix;
using test_helpers::scalar;

TEST_CASE("mat_exp handles the elementary cases") {
    CHECK((mat_exp(CMatrix::Zero(2, 2)) - CMatrix::Identity(2, 2)).norm() == doctest::Approx(0.0));

    CMatrix nilpotent = CMatrix::Zero(2, 2);
    nilpotent(0, 1) = 1.0;
    CMatrix expected(2, 2);
    expected << 1.0, 1.0, 0.0, 1.0;
    CHECK((mat_exp(nilpotent) - expected).norm() < 1e-15);

    // scalar exponential, evaluated independently via polar form
    const Complex want = std::polar(1.0, 1.5);
    CHECK(std::abs(mat_exp(scalar(Complex(0.0, 1.5)))(0, 0) - want) < 1e-15);
    CHECK(mat_exp(scalar(Complex(0.0, 1.5)))(0, 0).real() == doctest::Approx(0.0707372).epsilon(1e-5));
    CHECK(mat_exp(scalar(Complex(0.0, 1.5)))(0, 0).imag() == doctest::Approx(0.9974950).epsilon(1e-5));
}

TEST_CASE("mat_exp rejects non-square and non-finite input") {
    CHECK_THROWS_AS(mat_exp(CMatrix::Zero(2, 3)), std::invalid_argument);
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(mat_exp(bad), std::invalid_argument);
    CHECK_THROWS_AS(mat_exp(scalar(1000.0)), NumericalError);  // overflow is reported
}

TEST_CASE("mat_exp inverse property on random matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng() % 6);
        CMatrix A = random_matrix(n, n, rng, 1.5);
        if (A.norm() > 10.0) A *= 10.0 / A.norm();
        CHECK((mat_exp(A) * mat_exp(-A) - CMatrix::Identity(n, n)).norm() < 1e-10);
    }
}

TEST_CASE("exp_integral basic values") {
    CHECK((exp_integral(CMatrix::Zero(2, 2), 2.0) - 2.0 * CMatrix::Identity(2, 2)).norm() < 1e-14);
    CHECK(exp_integral(scalar(1.0), 0.0).norm() == 0.0);

    // scalar antiderivative (1 - e^{-3x})/3
    for (double x : {0.25, 0.7, 1.3}) {
        const Complex got = exp_integral(scalar(-3.0), x)(0, 0);
        CHECK(std::abs(got - (1.0 - std::exp(-3.0 * x)) / 3.0) < 1e-13);
    }

    CHECK_THROWS_AS(exp_integral(scalar(1.0), -0.5), std::invalid_argument);
    CHECK_THROWS_AS(exp_integral(CMatrix::Zero(1, 2), 1.0), std::invalid_argument);
}

TEST_CASE("exp_integral derivative matches exp(yB) by central differences") {
    std::mt19937_64 rng(11);
    CMatrix B = random_matrix(3, 3, rng);
    const double y = 0.8;
    const double h = 1e-4;
    CMatrix fd = (exp_integral(B, y + h) - exp_integral(B, y - h)) / (2.0 * h);
    CHECK((fd - mat_exp(y * B)).norm() < 20.0 * h * h);
}

TEST_CASE("solve_sylvester worked examples") {
    // i(beta X - X beta*) = Q with beta = 1.5i: -3X = Q
    CMatrix X = solve_sylvester(scalar(Complex(0.0, 1.5)), scalar(1.0));
    CHECK(std::abs(X(0, 0) - Complex(-1.0 / 3.0)) < 1e-14);

    CHECK(solve_sylvester(scalar(Complex(0.0, 1.5)), scalar(0.0)).norm() == 0.0);

    CMatrix beta = CMatrix::Zero(2, 2);
    beta(0, 0) = Complex(0.0, 1.0);
    beta(1, 1) = Complex(0.0, 2.0);
    CMatrix D2 = solve_sylvester(beta, CMatrix::Identity(2, 2));
    CHECK(std::abs(D2(0, 0) - Complex(-0.5)) < 1e-13);
    CHECK(std::abs(D2(1, 1) - Complex(-0.25)) < 1e-13);
    CHECK(std::abs(D2(0, 1)) < 1e-13);
}

TEST_CASE("solve_sylvester residual and hermiticity on random data") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(rng() % 4);
        // shift the spectrum well off the real axis so the identity is solvable
        CMatrix beta = random_matrix(n, n, rng) + Complex(0.0, 3.0) * CMatrix::Identity(n, n);
        CMatrix G = random_matrix(n, n, rng);
        CMatrix Q = 0.5 * (G + G.adjoint());
        CMatrix X = solve_sylvester(beta, Q);
        CHECK((X - X.adjoint()).norm() == 0.0);  // exactly Hermitian by construction
        CHECK((kImag * (beta * X - X * beta.adjoint()) - Q).norm() <= 1e-10 * (1.0 + Q.norm()));
    }
}

TEST_CASE("solve_sylvester error paths") {
    CHECK_THROWS_AS(solve_sylvester(scalar(1.0), scalar(1.0)), SpectraOverlap);  // real eigenvalue
    CMatrix beta = Complex(0.0, 1.0) * CMatrix::Identity(2, 2);
    CMatrix Q(2, 2);
    Q << 1.0, Complex(0.0, 2.0), 0.0, 1.0;  // not Hermitian
    CHECK_THROWS_AS(solve_sylvester(beta, Q), NonHermitianQ);

    // mu = i and nu = -i overlap: mu == conj(nu)
    CMatrix overlap = CMatrix::Zero(2, 2);
    overlap(0, 0) = Complex(0.0, 1.0);
    overlap(1, 1) = Complex(0.0, -1.0);
    CHECK_THROWS_AS(solve_sylvester(overlap, CMatrix::Identity(2, 2)), SpectraOverlap);
}

TEST_CASE("spectrum of reference matrices") {
    CMatrix diag = CMatrix::Zero(2, 2);
    diag(0, 0) = 1.0;
    diag(1, 1) = Complex(0.0, 2.0);
    auto eigs = spectrum(diag);
    std::sort(eigs.begin(), eigs.end(), [](Complex a, Complex b) { return a.real() < b.real(); });
    CHECK(std::abs(eigs[1] - Complex(1.0)) < 1e-12);
    CHECK(std::abs(eigs[0] - Complex(0.0, 2.0)) < 1e-12);

    CMatrix rot(2, 2);
    rot << 0.0, 1.0, -1.0, 0.0;
    auto pm = spectrum(rot);
    std::sort(pm.begin(), pm.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    CHECK(std::abs(pm[0] - Complex(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(pm[1] - Complex(0.0, 1.0)) < 1e-12);

    for (Complex ev : spectrum(CMatrix::Zero(3, 3))) CHECK(std::abs(ev) == 0.0);
}

TEST_CASE("spectrum backward error on random matrices") {
    std::mt19937_64 rng(37);
    CMatrix A = random_matrix(6, 6, rng, 2.0);
    for (Complex mu : spectrum(A)) {
        Eigen::JacobiSVD<CMatrix> svd(A - mu * CMatrix::Identity(6, 6));
        CHECK(svd.singularValues().minCoeff() <= 1e-10 * A.norm());
    }
}

TEST_CASE("solve_linear worked examples and rcond") {
    std::mt19937_64 rng(41);
    CMatrix B = random_matrix(3, 2, rng);
    CHECK((solve_linear(CMatrix::Identity(3, 3), B).X - B).norm() < 1e-14);

    CHECK(std::abs(solve_linear(scalar(2.0), scalar(1.0)).X(0, 0) - Complex(0.5)) < 1e-15);

    CMatrix A(2, 2);
    A << 1.0, 1.0, 0.0, 1.0;
    CMatrix inv = solve_linear(A, CMatrix::Identity(2, 2)).X;
    CMatrix want(2, 2);
    want << 1.0, -1.0, 0.0, 1.0;
    CHECK((inv - want).norm() < 1e-14);

    CMatrix sing = CMatrix::Zero(2, 2);
    sing(0, 0) = 1.0;
    CHECK_THROWS_AS(solve_linear(sing, CMatrix::Identity(2, 2)), Singular);
    try {
        solve_linear(sing, CMatrix::Identity(2, 2));
    } catch (const Singular& err) {
        CHECK(err.rcond <= 1e-14);
    }
}

TEST_CASE("solve_linear residual on well-conditioned random systems") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        CMatrix A = random_matrix(5, 5, rng) + 3.0 * CMatrix::Identity(5, 5);
        CMatrix B = random_matrix(5, 3, rng);
        auto sol = solve_linear(A, B);
        CHECK((A * sol.X - B).norm() <= 1e-8 * B.norm());
        CHECK(sol.rcond > 1e-14);
    }
}
