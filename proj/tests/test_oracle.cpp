#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dirac_isp/oracle.hpp"
#include "dirac_isp/quadrature.hpp"
#include "test_helpers.hpp"

using namespace dirac_isp;
using namespace test_helpers;

TEST_CASE("nystrom operator basics") {
    SUBCASE("zero kernel gives the identity") {
        WeylData W = scalar_weyl();
        W.theta2 = scalar(0.0);
        KernelModel KM = build_kernel_model(W);
        NystromOperator NO = build_nystrom(KM, 1.0, 32);
        CHECK((NO.S - CMatrix::Identity(NO.S.rows(), NO.S.cols())).norm() == 0.0);
        CHECK(min_eigenvalue(NO) == doctest::Approx(1.0));
    }

    SUBCASE("scalar example is positive with small deficit") {
        KernelModel KM = build_kernel_model(scalar_weyl());
        NystromOperator NO = build_nystrom(KM, 1.0, 200);
        CHECK(hermiticity_residual(NO) <= 1e-12);
        CHECK(min_eigenvalue(NO) >= 1.0 - 1e-3);
    }

    SUBCASE("delayed case snaps nodes to the breakpoint") {
        KernelModel KM = build_kernel_model(scalar_weyl(0.5));
        NystromOperator NO = build_nystrom(KM, 1.0, 64);
        CHECK(std::count(NO.nodes.begin(), NO.nodes.end(), 0.5) == 2);  // duplicated
        CHECK(min_eigenvalue(NO) >= 1.0 - 1e-2);
        double total = 0.0;
        for (double w : NO.weights) total += w;
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }

    SUBCASE("deep-verify assembly agrees with the closed form") {
        KernelModel KM = build_kernel_model(scalar_weyl(0.3));
        NystromOperator fast = build_nystrom(KM, 0.8, 16);
        NystromOperator deep = build_nystrom(KM, 0.8, 16, /*deep_verify=*/true);
        CHECK((fast.S - deep.S).norm() < 1e-8);
    }
}

TEST_CASE("build_nystrom argument gates") {
    KernelModel KM = build_kernel_model(scalar_weyl());
    CHECK_THROWS_AS(build_nystrom(KM, 1.0, 8), std::invalid_argument);
    CHECK_THROWS_AS(build_nystrom(KM, 0.0, 64), std::invalid_argument);
}

TEST_CASE("oracle_v endpoint solve") {
    SUBCASE("zero data gives zero") {
        WeylData W = scalar_weyl();
        W.theta2 = scalar(0.0);
        KernelModel KM = build_kernel_model(W);
        CHECK(oracle_v(KM, build_nystrom(KM, 1.0, 32)).norm() == 0.0);
    }

    SUBCASE("converges to the closed-form recovery at second order") {
        KernelModel KM = build_kernel_model(scalar_weyl());
        FundamentalSolution FS = build_U(KM, 1.0 + 1e-6);
        const CMatrix v_exact = recover_v_closed(KM, FS, 1.0);

        const double e100 = (oracle_v(KM, build_nystrom(KM, 1.0, 100)) - v_exact).norm();
        const double e200 = (oracle_v(KM, build_nystrom(KM, 1.0, 200)) - v_exact).norm();
        const double e400 = (oracle_v(KM, build_nystrom(KM, 1.0, 400)) - v_exact).norm();
        CHECK(e400 <= 5e-4);
        CHECK(e100 / e200 > 2.5);
        CHECK(e200 / e400 > 2.5);
    }
}

TEST_CASE("nystrom resolvent approximates the explicit kernel T") {
    KernelModel KM = build_kernel_model(scalar_weyl());
    FundamentalSolution FS = build_U(KM, 1.0);
    ResolventModel RM = build_resolvent(FS);
    const double e64 = nystrom_resolvent_error(build_nystrom(KM, 1.0, 64), RM);
    const double e128 = nystrom_resolvent_error(build_nystrom(KM, 1.0, 128), RM);
    CHECK(e64 / e128 > 2.5);  // second-order trend
    CHECK(e128 < 1e-2);
}

TEST_CASE("forward_solve reference solutions") {
    SUBCASE("v = 0 gives exp(i lambda x j)") {
        auto xs = linspace(0.0, 2.0, 201);
        std::vector<CMatrix> zeros(xs.size(), CMatrix::Zero(1, 1));
        for (Complex lambda : {Complex(0.0, -3.0), Complex(4.0, 3.0), Complex(0.0, 5.0)}) {
            ForwardSolution sol = forward_solve(xs, zeros, lambda, 2.0);
            for (std::size_t i = 0; i < sol.xs.size(); ++i) {
                CMatrix expected = CMatrix::Zero(2, 2);
                expected(0, 0) = std::exp(kImag * lambda * sol.xs[i]);
                expected(1, 1) = std::exp(-kImag * lambda * sol.xs[i]);
                CHECK((sol.u[i] - expected).norm() <= 1e-9 * expected.norm());
            }
        }
    }

    SUBCASE("lambda = 0 with zero potential stays at the identity") {
        auto xs = linspace(0.0, 1.0, 101);
        std::vector<CMatrix> zeros(xs.size(), CMatrix::Zero(1, 1));
        ForwardSolution sol = forward_solve(xs, zeros, Complex(0.0, 0.0), 1.0);
        for (const CMatrix& u : sol.u) CHECK((u - CMatrix::Identity(2, 2)).norm() < 1e-12);
    }

    SUBCASE("u(x, 0) is unitary for a bounded potential") {
        auto xs = linspace(0.0, 2.0, 201);
        std::vector<CMatrix> v(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) v[i] = scalar(scalar_pe_v(xs[i]));
        ForwardSolution sol = forward_solve(xs, v, Complex(0.0, 0.0), 2.0);
        for (const CMatrix& u : sol.u)
            CHECK((u.adjoint() * u - CMatrix::Identity(2, 2)).norm() < 1e-9);
    }
}

TEST_CASE("weyl_check boundedness proxy") {
    // dense sampling: interpolation error is amplified by e^{2 |Im lambda| x},
    // so the growing mode must be fed well below the factor-10 bound
    WeylData W = scalar_weyl();
    PotentialGrid grid = recover_profile(W, linspace(0.0, 2.0, 4001), {false, false});

    SUBCASE("recovered potential passes; negated potential fails") {
        WeylCheckReport rep = weyl_check(W, grid, {Complex(0.0, -3.0), Complex(1.0, -4.0)}, 2.0);
        CHECK(rep.pass);
        for (const auto& e : rep.entries) {
            CHECK(e.margin_ok);
            CHECK(e.pass);
        }

        PotentialGrid negated = grid;
        for (CMatrix& v : negated.v_closed) v = -v;
        WeylCheckReport bad = weyl_check(W, negated, {Complex(0.0, -3.0)}, 2.0);
        CHECK(!bad.pass);
        CHECK(bad.entries.front().ratio > 10.0);
    }

    SUBCASE("margin violations are reported, not thrown") {
        WeylCheckReport rep = weyl_check(W, grid, {Complex(0.0, -1.0)}, 2.0);
        CHECK(!rep.entries.front().margin_ok);
        CHECK(!rep.pass);
    }

    SUBCASE("zero data: g is exactly constant") {
        WeylData W0 = scalar_weyl();
        W0.theta2 = scalar(0.0);
        PotentialGrid g0 = recover_profile(W0, linspace(0.0, 2.0, 321), {false, false});
        WeylCheckReport rep = weyl_check(W0, g0, {Complex(0.0, -3.0)}, 2.0);
        CHECK(rep.entries.front().ratio == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(rep.pass);
    }

    SUBCASE("delay region check applies for positive first delay") {
        WeylData Wd = scalar_weyl(0.5);
        PotentialGrid gd = recover_profile(Wd, linspace(0.0, 2.0, 2001), {false, false});
        WeylCheckReport rep = weyl_check(Wd, gd, {Complex(0.0, -3.0)}, 2.0);
        CHECK(rep.delay_applicable);
        CHECK(rep.delay_pass);
    }
}

TEST_CASE("operator identity residual") {
    SUBCASE("psi = 0 case is exact") {
        WeylData W = scalar_weyl();
        W.theta2 = scalar(0.0);
        KernelModel KM = build_kernel_model(W);
        CHECK(operator_identity_residual(KM, 1.0, 50) <= 1e-10);
    }

    SUBCASE("residual decreases with refinement on the scalar example") {
        KernelModel KM = build_kernel_model(scalar_weyl());
        const double r50 = operator_identity_residual(KM, 1.0, 50);
        const double r100 = operator_identity_residual(KM, 1.0, 100);
        const double r200 = operator_identity_residual(KM, 1.0, 200);
        CHECK(r100 < r50);
        CHECK(r200 < r100);
    }

    SUBCASE("psi equals s by the fundamental theorem of calculus") {
        WeylData W = scalar_weyl(0.4);
        for (double x : {0.2, 0.7, 1.5}) {
            const CMatrix psi = integrate(
                [&](double t) -> CMatrix { return k_of_x_limit(W, t, Side::Right); }, 0.0, x, 1e-11);
            CHECK((psi - s_of_x(W, x)).norm() < 1e-9);
        }
    }
}

TEST_CASE("witness decay rate") {
    CHECK(witness_decay_rate(scalar_weyl()) == doctest::Approx(1.0));
    WeylData W;
    W.beta = scalar(Complex(0.0, -2.0));
    W.theta1 = scalar(1.0);
    W.theta2 = scalar(1.0);
    W.delays = {0.0};
    W.R = scalar(1.0);
    CHECK(witness_decay_rate(W) == doctest::Approx(9.0));
}
