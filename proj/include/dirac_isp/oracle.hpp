#pragma once

#include <vector>

#include "dirac_isp/recover.hpp"

namespace dirac_isp {

/// Dense Nystrom discretization of S_l = I + K on a panel-wise uniform
/// trapezoid grid (panels split at the delays). Interior breakpoints appear
/// as duplicated nodes, one per adjacent panel, so sampled functions keep
/// their one-sided values. S is stored in the similarity-symmetrized form
/// I + W^{1/2} K W^{1/2}: Hermitian, same spectrum as I + K W.
struct NystromOperator {
    double l = 0.0;
    int N = 0;  // requested interval count
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<Side> sides;  // sampling side per node, relevant at breakpoints
    CMatrix S;                // (p M) x (p M)
    Eigen::Index p = 0;

    Eigen::Index size() const { return static_cast<Eigen::Index>(nodes.size()); }
};

/// deep_verify routes kernel evaluation through the quadrature oracle
/// kernel_K_direct instead of the closed form (slow; small N only).
NystromOperator build_nystrom(const KernelModel& KM, double l, int N, bool deep_verify = false,
                              const NumericalPolicy& pol = default_policy());

double min_eigenvalue(const NystromOperator& NO);
double hermiticity_residual(const NystromOperator& NO);

/// Endpoint value of S_l^{-1} k via the dense solve; converges to the
/// closed-form recovery at O(h^2).
CMatrix oracle_v(const KernelModel& KM, const NystromOperator& NO);

/// max over grid entries of | (S^{-1} - I)_{ij} / sqrt(w_i w_j) - T(x_i, x_j) |.
double nystrom_resolvent_error(const NystromOperator& NO, const ResolventModel& RM);

/// Fundamental solution u(x, lambda) of u' = (i lambda j + j V) u, u(0) = I,
/// integrated by the classical 4th-order one-step scheme with fixed step and
/// piecewise-linear interpolation of the sampled potential.
struct ForwardSolution {
    std::vector<double> xs;
    std::vector<CMatrix> u;  // 2p x 2p per sample
};

ForwardSolution forward_solve(const std::vector<double>& v_xs, const std::vector<CMatrix>& v_vals,
                              Complex lambda, double l, int steps = 0);

/// Boundedness proxy for the Weyl property: g(x) = |e^{i x lambda} u(x)[phi; I]|
/// must stay within bound_factor of g(0). Report-only; nothing throws on FAIL.
struct WeylCheckEntry {
    Complex lambda;
    double g0 = 0.0;
    double gmax = 0.0;
    double ratio = 0.0;
    bool margin_ok = false;  // Im lambda < -M - 1
    bool pass = false;
};

struct WeylCheckReport {
    std::vector<WeylCheckEntry> entries;
    bool delay_applicable = false;  // first delay positive
    double delay_ratio = 0.0;
    bool delay_pass = true;
    double bound_factor = 10.0;
    bool pass = false;
};

WeylCheckReport weyl_check(const WeylData& W, const PotentialGrid& grid,
                           const std::vector<Complex>& lambdas, double l, double bound_factor = 10.0,
                           const NumericalPolicy& pol = default_policy());

/// Relative residual of the discretized operator identity
///   A S - S A* = i integral of (I_p + psi(x) psi(t)*) dt,
/// with (A f)(x) = i * integral of f over [0, x] and psi = s. The residual
/// decays as the grid refines; the psi = 0 case is exact by construction.
double operator_identity_residual(const KernelModel& KM, double l, int N);

/// Witness constant c with integral of e^{-cx} |k(x)| finite:
/// c = 2 max(0, -2 min Im sigma(beta)) + 1.
double witness_decay_rate(const WeylData& W);

}  // namespace dirac_isp
