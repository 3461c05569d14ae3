#include "dirac_isp/transform.hpp"

#include <algorithm>
#include <cmath>

#include "dirac_isp/quadrature.hpp"

namespace dirac_isp {

namespace {

// chi_m(x) as a column mask; at x == d_m the side argument decides.
bool column_active(double x, double d, Side side) { return x > d || (x == d && side == Side::Right); }

CMatrix k_eval(const WeylData& W, double x, Side side) {
    const Eigen::Index p = W.p();
    const CMatrix exp_beta = mat_exp(2.0 * kImag * x * W.beta);
    CMatrix cols = CMatrix::Zero(W.n(), p);
    for (Eigen::Index m = 0; m < p; ++m) {
        if (!column_active(x, W.delays[m], side)) continue;
        cols.col(m) = mat_exp(-2.0 * kImag * W.delays[m] * W.beta) * W.theta2.col(m);
    }
    return 2.0 * W.theta1.adjoint() * exp_beta * cols * W.R;
}

}  // namespace

CMatrix s_of_x(const WeylData& W, double x) {
    if (x < 0.0) throw std::invalid_argument("s_of_x: x must be nonnegative");
    const Eigen::Index p = W.p();
    CMatrix C = CMatrix::Zero(p, p);
    for (Eigen::Index m = 0; m < p; ++m) {
        const double d = W.delays[m];
        if (x <= d) continue;
        C.col(m) = 2.0 * W.theta1.adjoint() * exp_integral(2.0 * kImag * W.beta, x - d) * W.theta2.col(m);
    }
    return C * W.R;
}

CMatrix k_of_x(const WeylData& W, double x) {
    if (x < 0.0) throw std::invalid_argument("k_of_x: x must be nonnegative");
    if (std::any_of(W.delays.begin(), W.delays.end(), [x](double d) { return d == x; }))
        throw OnBreakpoint(x);
    return k_eval(W, x, Side::Right);
}

CMatrix k_of_x_limit(const WeylData& W, double x, Side side) {
    if (x < 0.0) throw std::invalid_argument("k_of_x_limit: x must be nonnegative");
    return k_eval(W, x, side);
}

KernelModel build_kernel_model(const WeylData& W, const NumericalPolicy& pol) {
    KernelModel KM;
    KM.W = W;
    KM.delays = validate(W, pol);

    const Eigen::Index n = W.n();
    const Eigen::Index p = W.p();
    KM.nu = CMatrix::Zero(n, p);
    for (Eigen::Index m = 0; m < p; ++m)
        KM.nu.col(m) = mat_exp(-2.0 * kImag * W.delays[m] * W.beta) * W.theta2.col(m);

    const Eigen::Index k = KM.delays.count();
    KM.Z.assign(1, CMatrix::Zero(n, n));
    KM.Zt.assign(1, CMatrix::Zero(n, n));
    for (Eigen::Index j = 1; j <= k; ++j) {
        const DelayGroup& g = KM.delays.group(j);
        const CMatrix block = KM.nu.middleCols(g.col, g.size);
        CMatrix Qj = hermitize(block * block.adjoint());  // nu P_j nu*
        CMatrix Xj = solve_sylvester(W.beta, Qj, pol);
        const CMatrix shift = mat_exp(2.0 * kImag * g.d * W.beta);
        KM.Q.push_back(Qj);
        KM.X.push_back(Xj);
        KM.Z.push_back(hermitize(KM.Z.back() + Xj));
        KM.Zt.push_back(hermitize(KM.Zt.back() + shift * Xj * shift.adjoint()));
    }
    return KM;
}

CMatrix kernel_K(const KernelModel& KM, double x, double t) {
    if (x < 0.0 || t < 0.0) throw std::invalid_argument("kernel_K: x, t must be nonnegative");
    if (x < t) return kernel_K(KM, t, x).adjoint().eval();
    const Eigen::Index m = KM.delays.active_groups(t);
    const CMatrix& Z = KM.Z[static_cast<std::size_t>(m)];
    const CMatrix& Zt = KM.Zt[static_cast<std::size_t>(m)];
    const CMatrix ex = mat_exp(2.0 * kImag * x * KM.W.beta);
    const CMatrix et = mat_exp(-2.0 * kImag * t * KM.W.beta.adjoint());
    const CMatrix ext = mat_exp(2.0 * kImag * (x - t) * KM.W.beta);
    return 2.0 * KM.W.theta1.adjoint() * (ex * Z * et - ext * Zt) * KM.W.theta1;
}

CMatrix kernel_K_direct(const WeylData& W, double x, double t, const NumericalPolicy& pol) {
    if (x < 0.0 || t < 0.0) throw std::invalid_argument("kernel_K_direct: x, t must be nonnegative");
    const double lo = std::abs(x - t);
    const double hi = x + t;
    const Eigen::Index p = W.p();
    if (!(hi > lo)) return CMatrix::Zero(p, p);

    // Split where either k argument crosses a delay: r = 2d -+ (x - t).
    std::vector<double> cuts{lo, hi};
    for (double d : W.delays) {
        for (double r : {2.0 * d - (x - t), 2.0 * d + (x - t)})
            if (r > lo && r < hi) cuts.push_back(r);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    CMatrix acc = CMatrix::Zero(p, p);
    const double panel_tol = pol.quad_kernel_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        acc += integrate(
            [&](double r) -> CMatrix {
                const CMatrix ka = k_eval(W, 0.5 * (r + x - t), Side::Right);
                const CMatrix kb = k_eval(W, 0.5 * (r + t - x), Side::Right);
                return 0.5 * ka * kb.adjoint();
            },
            cuts[i], cuts[i + 1], panel_tol, pol.quad_rel_floor);
    }
    return acc;
}

}  // namespace dirac_isp
