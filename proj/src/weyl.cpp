#include "dirac_isp/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "dirac_isp/quadrature.hpp"

namespace dirac_isp {

Eigen::Index DelayStructure::active_groups(double t) const {
    Eigen::Index m = 0;
    for (const DelayGroup& g : groups)
        if (g.d < t) ++m;
    return m;
}

bool DelayStructure::on_breakpoint(double t) const {
    return std::any_of(groups.begin(), groups.end(), [t](const DelayGroup& g) { return g.d == t; });
}

DelayStructure validate(const WeylData& W, const NumericalPolicy& pol) {
    require_square(W.beta, "WeylData.beta");
    require_square(W.R, "WeylData.R");
    require_finite(W.beta, "WeylData.beta");
    require_finite(W.theta1, "WeylData.theta1");
    require_finite(W.theta2, "WeylData.theta2");
    require_finite(W.R, "WeylData.R");
    const Eigen::Index n = W.n();
    const Eigen::Index p = W.p();
    if (W.theta1.rows() != n || W.theta2.rows() != n || W.theta2.cols() != p)
        throw std::invalid_argument("WeylData: theta1/theta2 must both be n x p");
    if (W.R.rows() != p) throw std::invalid_argument("WeylData: R must be p x p");
    if (static_cast<Eigen::Index>(W.delays.size()) != p)
        throw std::invalid_argument("WeylData: D must have p entries");

    for (std::size_t m = 0; m < W.delays.size(); ++m) {
        const double d = W.delays[m];
        const double prev = m == 0 ? 0.0 : W.delays[m - 1];
        if (!std::isfinite(d) || d < prev) throw UnsortedDelays(m, prev, d);
    }

    const double unitary_dev = (W.R.adjoint() * W.R - CMatrix::Identity(p, p)).norm();
    if (unitary_dev > pol.unitarity_tol) throw NonUnitaryR(unitary_dev);

    check_spectra_overlap(spectrum(W.beta), pol.spectra_overlap_tol * (1.0 + W.beta.norm()));

    // Group equal delays by exact comparison; delays are configuration, not data.
    DelayStructure structure;
    for (Eigen::Index m = 0; m < p;) {
        Eigen::Index end = m;
        while (end < p && W.delays[end] == W.delays[m]) ++end;
        structure.groups.push_back({W.delays[m], m, end - m});
        m = end;
    }
    return structure;
}

CMatrix eval_phi(const WeylData& W, Complex lambda, const NumericalPolicy& pol) {
    const Eigen::Index n = W.n();
    const Eigen::Index p = W.p();
    CMatrix shifted = lambda * CMatrix::Identity(n, n) - W.beta;
    LinearSolve resolvent;
    try {
        resolvent = solve_linear(shifted, CMatrix(W.theta2), pol);
    } catch (const Singular&) {
        throw ResolventSingular(lambda);
    }
    CMatrix phase = CMatrix::Zero(p, p);
    for (Eigen::Index m = 0; m < p; ++m) phase(m, m) = std::exp(-2.0 * kImag * lambda * W.delays[m]);
    return kImag * W.theta1.adjoint() * resolvent.X * phase * W.R;
}

double halfplane_bound(const WeylData& W) {
    double min_im = std::numeric_limits<double>::infinity();
    for (const Complex& mu : spectrum(W.beta)) min_im = std::min(min_im, mu.imag());
    return std::max(0.0, -min_im) + 1.0;
}

void validate_pe(const PseudoExpParams& P, const NumericalPolicy& pol) {
    require_square(P.alpha, "PseudoExpParams.alpha");
    require_finite(P.alpha, "PseudoExpParams.alpha");
    require_finite(P.theta1, "PseudoExpParams.theta1");
    require_finite(P.theta2, "PseudoExpParams.theta2");
    if (P.theta1.rows() != P.alpha.rows() || P.theta2.rows() != P.alpha.rows() ||
        P.theta1.cols() != P.theta2.cols())
        throw std::invalid_argument("PseudoExpParams: theta1/theta2 must both be n x p");
    const CMatrix lhs = P.alpha - P.alpha.adjoint();
    const CMatrix rhs = kImag * (P.theta1 * P.theta1.adjoint() + P.theta2 * P.theta2.adjoint());
    const double dev = (lhs - rhs).norm();
    if (dev > pol.pe_identity_tol * (1.0 + rhs.norm()))
        throw ValidationError("PseudoExpParams: alpha - alpha* = i(theta1 theta1* + theta2 theta2*) violated by " +
                              std::to_string(dev));
}

namespace {

// Lambda(t) j Lambda(t)* with Lambda = [e^{-it alpha} theta1, e^{it alpha} theta2].
CMatrix sigma_integrand(const PseudoExpParams& P, double t) {
    const CMatrix em = mat_exp(-kImag * t * P.alpha);
    const CMatrix ep = mat_exp(kImag * t * P.alpha);
    const CMatrix a = em * P.theta1;
    const CMatrix b = ep * P.theta2;
    return a * a.adjoint() - b * b.adjoint();
}

CMatrix pe_value_from_sigma(const PseudoExpParams& P, double x, const CMatrix& sigma,
                            const NumericalPolicy& pol) {
    Eigen::JacobiSVD<CMatrix> svd(sigma);
    const double smallest = svd.singularValues().minCoeff();
    if (smallest < pol.sigma_min_sv * (1.0 + sigma.norm())) throw SigmaSingular(x, smallest);
    const CMatrix ep = mat_exp(kImag * x * P.alpha);
    const CMatrix ems = mat_exp(kImag * x * P.alpha.adjoint());
    return 2.0 * P.theta1.adjoint() * ems * solve_linear(sigma, CMatrix(ep * P.theta2), pol).X;
}

// Sigma accumulated stepwise so each panel meets the local quadrature gate.
CMatrix accumulate_sigma(const PseudoExpParams& P, double from, double to, const CMatrix& start,
                         const NumericalPolicy& pol) {
    CMatrix sigma = start;
    const double step = 0.125;
    double t = from;
    while (t < to) {
        const double next = std::min(to, t + step);
        sigma += integrate([&](double s) { return sigma_integrand(P, s); }, t, next, pol.quad_sigma_tol,
                           pol.quad_rel_floor);
        t = next;
    }
    return sigma;
}

}  // namespace

CMatrix pe_potential(const PseudoExpParams& P, double x, const NumericalPolicy& pol) {
    validate_pe(P, pol);
    if (x < 0.0) throw std::invalid_argument("pe_potential: x must be nonnegative");
    const Eigen::Index n = P.alpha.rows();
    const CMatrix sigma = accumulate_sigma(P, 0.0, x, CMatrix::Identity(n, n), pol);
    return pe_value_from_sigma(P, x, sigma, pol);
}

std::vector<CMatrix> pe_potential_grid(const PseudoExpParams& P, std::span<const double> xs,
                                       const NumericalPolicy& pol) {
    validate_pe(P, pol);
    const Eigen::Index n = P.alpha.rows();
    std::vector<CMatrix> values;
    values.reserve(xs.size());
    CMatrix sigma = CMatrix::Identity(n, n);
    double reached = 0.0;
    for (double x : xs) {
        if (x < reached) throw std::invalid_argument("pe_potential_grid: grid must be nondecreasing");
        sigma = accumulate_sigma(P, reached, x, sigma, pol);
        reached = x;
        values.push_back(pe_value_from_sigma(P, x, sigma, pol));
    }
    return values;
}

WeylData pe_to_weyl(const PseudoExpParams& P, const NumericalPolicy& pol) {
    validate_pe(P, pol);
    const Eigen::Index p = P.theta1.cols();
    WeylData W;
    W.beta = P.alpha - kImag * P.theta2 * P.theta2.adjoint();
    W.theta1 = P.theta1;
    W.theta2 = P.theta2;
    W.delays.assign(static_cast<std::size_t>(p), 0.0);
    W.R = CMatrix::Identity(p, p);

    const CMatrix lhs = W.beta - W.beta.adjoint();
    const CMatrix rhs = kImag * (W.theta1 * W.theta1.adjoint() - W.theta2 * W.theta2.adjoint());
    if ((lhs - rhs).norm() > pol.pe_identity_tol * (1.0 + rhs.norm()))
        throw ValidationError("pe_to_weyl: derived beta violates beta - beta* = i(theta1 theta1* - theta2 theta2*)");

    validate(W, pol);  // propagates SpectraOverlap for inadmissible draws
    return W;
}

}  // namespace dirac_isp
