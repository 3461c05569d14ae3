#pragma once

#include <vector>

#include "dirac_isp/weyl.hpp"

namespace dirac_isp {

enum class Side { Left, Right };

/// Closed-form transform s(x) of the Weyl function: column m vanishes up to
/// the delay d_m and equals 2 theta1* (integral of e^{2 i t beta}) theta2_m
/// past it; the result is post-multiplied by R.
CMatrix s_of_x(const WeylData& W, double x);

/// k(x) = s'(x) = 2 theta1* e^{2 i x beta} nu chi(x) R. Jumps at the delays;
/// throws OnBreakpoint when x hits one exactly.
CMatrix k_of_x(const WeylData& W, double x);

/// One-sided evaluation of k at breakpoints (elsewhere equal to k_of_x).
CMatrix k_of_x_limit(const WeylData& W, double x, Side side);

/// Piecewise-exponential structure of the kernel of S_l: the jump matrices
/// Q_j = nu P_j nu*, their Hermitian Sylvester solutions X_j, and the
/// accumulated sums driving the semiseparable representation. Z[m] and
/// Zt[m] are indexed by the number of active delay groups, with the empty
/// sums Z[0] = Zt[0] = 0.
struct KernelModel {
    WeylData W;
    DelayStructure delays;
    CMatrix nu;              // n x p, columns e^{-2 i d_m beta} theta2_m
    std::vector<CMatrix> Q;  // k Hermitian jump matrices
    std::vector<CMatrix> X;  // k Hermitian Sylvester solutions
    std::vector<CMatrix> Z;   // k+1 partial sums, Z[0] = 0
    std::vector<CMatrix> Zt;  // k+1 conjugated sums, Zt[0] = 0

    Eigen::Index n() const { return W.n(); }
    Eigen::Index p() const { return W.p(); }
};

KernelModel build_kernel_model(const WeylData& W, const NumericalPolicy& pol = default_policy());

/// Semiseparable kernel K(x, t) of S_l in closed form. For x > t with m
/// delay groups strictly below t:
///   K = 2 theta1* (e^{2ix beta} Z_m e^{-2it beta*} - e^{2i(x-t) beta} Zt_m) theta1,
/// extended by the Hermitian reflection K(x, t) = K(t, x)*. Boundary t on a
/// delay uses the lower segment; the kernel is continuous across it.
CMatrix kernel_K(const KernelModel& KM, double x, double t);

/// Independent route to the same kernel: adaptive quadrature of
///   K(x,t) = 1/2 int_{|x-t|}^{x+t} k((r+x-t)/2) k((r+t-x)/2)* dr,
/// split at every point where either argument crosses a delay.
CMatrix kernel_K_direct(const WeylData& W, double x, double t,
                        const NumericalPolicy& pol = default_policy());

}  // namespace dirac_isp
