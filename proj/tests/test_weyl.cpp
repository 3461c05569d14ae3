#include <doctest.h>

#include <cmath>
#include <random>

#include "dirac_isp/transform.hpp"
#include "dirac_isp/weyl.hpp"
#include "test_helpers.hpp"

using namespace dirac_isp;
using namespace test_helpers;

TEST_CASE("validate groups delays and accepts unitary R") {
    WeylData W;
    W.beta = Complex(0.0, 1.0) * CMatrix::Identity(2, 2);
    W.theta1 = CMatrix::Ones(2, 2);
    W.theta2 = CMatrix::Ones(2, 2);
    W.R = CMatrix::Identity(2, 2);

    SUBCASE("equal delays collapse into one group") {
        W.delays = {0.5, 0.5};
        DelayStructure ds = validate(W);
        REQUIRE(ds.count() == 1);
        CHECK(ds.group(1).d == 0.5);
        CHECK(ds.group(1).size == 2);
        CHECK(!ds.first_delay_is_zero());
        CHECK(ds.active_groups(0.25) == 0);  // virtual segment below the first delay
        CHECK(ds.active_groups(0.5) == 0);   // boundary belongs to the lower segment
        CHECK(ds.active_groups(0.75) == 1);
    }

    SUBCASE("distinct delays split") {
        W.delays = {0.0, 1.0};
        DelayStructure ds = validate(W);
        REQUIRE(ds.count() == 2);
        CHECK(ds.group(1).d == 0.0);
        CHECK(ds.group(2).d == 1.0);
        CHECK(ds.group(1).size == 1);
        CHECK(ds.first_delay_is_zero());
    }

    SUBCASE("permutation R is unitary") {
        W.delays = {0.0, 0.0};
        W.R << 0.0, 1.0, 1.0, 0.0;
        CHECK_NOTHROW(validate(W));
    }

    SUBCASE("error paths") {
        W.delays = {1.0, 0.5};
        CHECK_THROWS_AS(validate(W), UnsortedDelays);
        W.delays = {0.0, 0.0};
        W.R *= 2.0;
        CHECK_THROWS_AS(validate(W), NonUnitaryR);
        W.R = CMatrix::Identity(2, 2);
        W.beta = CMatrix::Identity(2, 2);  // real spectrum overlaps its conjugate
        CHECK_THROWS_AS(validate(W), SpectraOverlap);
    }
}

TEST_CASE("eval_phi worked values") {
    WeylData W = scalar_weyl();

    SUBCASE("zero theta2 gives the zero function") {
        W.theta2 = scalar(0.0);
        CHECK(eval_phi(W, Complex(0.3, -2.0)).norm() == 0.0);
    }

    SUBCASE("scalar resolvent value") {
        // i*2/(lambda - 1.5i) at lambda = -i equals -0.8
        CHECK(std::abs(eval_phi(W, Complex(0.0, -1.0))(0, 0) - Complex(-0.8)) < 1e-14);
    }

    SUBCASE("delay multiplies by the exponential factor") {
        WeylData Wd = scalar_weyl(0.5);
        const Complex lambda(0.4, -2.0);
        const Complex expected = eval_phi(W, lambda)(0, 0) * std::exp(-kImag * lambda);
        CHECK(std::abs(eval_phi(Wd, lambda)(0, 0) - expected) < 1e-14);
    }

    SUBCASE("resolvent singular at an eigenvalue") {
        CHECK_THROWS_AS(eval_phi(W, Complex(0.0, 1.5)), ResolventSingular);
    }
}

TEST_CASE("eval_phi decays like 1/|xi| along horizontal lines") {
    WeylData W = scalar_weyl(0.25);
    const double eta = -halfplane_bound(W) - 1.0;
    const double n3 = eval_phi(W, Complex(1e3, eta)).norm();
    const double n4 = eval_phi(W, Complex(1e4, eta)).norm();
    CHECK(n4 < n3);
    CHECK(n3 / n4 == doctest::Approx(10.0).epsilon(0.02));
}

TEST_CASE("halfplane_bound from spectral data") {
    WeylData W = scalar_weyl();
    CHECK(halfplane_bound(W) == doctest::Approx(1.0));

    W.beta = scalar(Complex(0.0, -2.0));
    W.theta1 = scalar(1.0);
    W.theta2 = scalar(1.0);
    CHECK(halfplane_bound(W) == doctest::Approx(3.0));

    WeylData W2;
    W2.beta = CMatrix(2, 2);
    W2.beta << 0.0, 1.0, -1.0, 0.0;  // eigenvalues +-i
    W2.theta1 = CMatrix::Ones(2, 1);
    W2.theta2 = CMatrix::Ones(2, 1);
    W2.delays = {0.0};
    W2.R = scalar(1.0);
    CHECK(halfplane_bound(W2) == doctest::Approx(2.0));
}

TEST_CASE("pe_potential matches the scalar closed form") {
    PseudoExpParams P = scalar_pe_params();
    CHECK(std::abs(pe_potential(P, 0.0)(0, 0) - Complex(4.0)) < 1e-12);  // 2 theta1* theta2
    for (double x : linspace(0.0, 2.0, 21))
        CHECK(std::abs(pe_potential(P, x)(0, 0) - scalar_pe_v(x)) < 1e-9);
}

TEST_CASE("pe_potential grid accumulation agrees with single-shot calls") {
    PseudoExpParams P = scalar_pe_params();
    auto xs = linspace(0.0, 2.0, 9);
    auto vals = pe_potential_grid(P, xs);
    for (std::size_t i = 0; i < xs.size(); ++i)
        CHECK((vals[i] - pe_potential(P, xs[i])).norm() < 1e-11);
}

TEST_CASE("pe_potential trivial cases and validation") {
    PseudoExpParams P = scalar_pe_params();
    P.theta1 = scalar(0.0);
    P.alpha = scalar(Complex(0.0, 0.5));  // alpha - alpha* = i |theta2|^2
    CHECK(pe_potential(P, 1.0).norm() == 0.0);

    PseudoExpParams bad = scalar_pe_params();
    bad.alpha = scalar(Complex(0.0, 1.0));  // identity violated
    CHECK_THROWS_AS(pe_potential(bad, 1.0), ValidationError);
}

TEST_CASE("pe_to_weyl derived parameters") {
    PseudoExpParams P = scalar_pe_params();
    WeylData W = pe_to_weyl(P);
    CHECK(std::abs(W.beta(0, 0) - Complex(0.0, 1.5)) < 1e-15);
    CHECK(W.delays == std::vector<double>{0.0});
    CHECK((W.R - CMatrix::Identity(1, 1)).norm() == 0.0);

    // beta - beta* = i(theta1 theta1* - theta2 theta2*) = 3i
    const CMatrix lhs = W.beta - W.beta.adjoint();
    CHECK(std::abs(lhs(0, 0) - Complex(0.0, 3.0)) < 1e-15);

    SUBCASE("theta2 = 0 keeps beta = alpha") {
        PseudoExpParams P0 = scalar_pe_params();
        P0.theta2 = scalar(0.0);
        P0.alpha = scalar(Complex(0.0, 2.0));  // alpha - alpha* = i*4
        WeylData W0 = pe_to_weyl(P0);
        CHECK(std::abs(W0.beta(0, 0) - P0.alpha(0, 0)) == 0.0);
    }
}

TEST_CASE("pe_to_weyl then eval_phi matches the rational formula at D = 0") {
    std::mt19937_64 rng(101);
    PseudoExpParams P;
    P.theta1 = random_matrix(3, 2, rng, 0.7);
    P.theta2 = random_matrix(3, 2, rng, 0.7);
    P.alpha = random_hermitian(3, rng) +
              Complex(0.0, 0.5) * (P.theta1 * P.theta1.adjoint() + P.theta2 * P.theta2.adjoint());
    WeylData W = pe_to_weyl(P);
    const Complex lambda(0.7, -3.0);
    const CMatrix shifted = lambda * CMatrix::Identity(3, 3) - W.beta;
    const CMatrix direct = kImag * W.theta1.adjoint() * shifted.inverse() * W.theta2;
    CHECK((eval_phi(W, lambda) - direct).norm() < 1e-12);
}
