#pragma once

#include <span>
#include <vector>

#include "dirac_isp/matrix_ops.hpp"
#include "dirac_isp/types.hpp"

namespace dirac_isp {

/// Parameters of a generalized Weyl function
///   phi(lambda) = i theta1* (lambda I - beta)^{-1} theta2 exp(-2 i lambda D) R
/// with D = diag(delays) >= 0 nondecreasing and R unitary.
struct WeylData {
    CMatrix beta;                // n x n
    CMatrix theta1;              // n x p
    CMatrix theta2;              // n x p
    std::vector<double> delays;  // p entries, nondecreasing, >= 0
    CMatrix R;                   // p x p

    Eigen::Index n() const { return beta.rows(); }
    Eigen::Index p() const { return theta1.cols(); }
};

/// One group of equal delays: columns [col, col + size) share value d.
struct DelayGroup {
    double d;
    Eigen::Index col;
    Eigen::Index size;
};

/// Distinct delays d~_1 < ... < d~_k with multiplicities. Group indices are
/// 1-based to match the running convention Z_0 = 0; group(j) for j in 1..k.
struct DelayStructure {
    std::vector<DelayGroup> groups;

    Eigen::Index count() const { return static_cast<Eigen::Index>(groups.size()); }
    const DelayGroup& group(Eigen::Index j) const { return groups.at(static_cast<std::size_t>(j - 1)); }
    double distinct_delay(Eigen::Index j) const { return group(j).d; }
    bool first_delay_is_zero() const { return !groups.empty() && groups.front().d == 0.0; }

    /// Number of distinct delays strictly below t: the segment index m(t).
    Eigen::Index active_groups(double t) const;

    /// True when t coincides with a distinct delay.
    bool on_breakpoint(double t) const;
};

/// Checks all WeylData invariants and returns the grouped delay structure.
DelayStructure validate(const WeylData& W, const NumericalPolicy& pol = default_policy());

/// phi(lambda); throws ResolventSingular when lambda hits sigma(beta).
CMatrix eval_phi(const WeylData& W, Complex lambda, const NumericalPolicy& pol = default_policy());

/// Halfplane bound M with sigma(beta + i M I) in the upper halfplane with
/// margin >= 1; the Weyl inequality is evaluated below Im lambda = -M.
double halfplane_bound(const WeylData& W);

/// Parameters (alpha, theta1, theta2) of a pseudo-exponential potential,
/// subject to alpha - alpha* = i (theta1 theta1* + theta2 theta2*).
struct PseudoExpParams {
    CMatrix alpha;   // n x n
    CMatrix theta1;  // n x p
    CMatrix theta2;  // n x p
};

void validate_pe(const PseudoExpParams& P, const NumericalPolicy& pol = default_policy());

/// Forward map: v(x) = 2 theta1* e^{i x alpha*} Sigma(x)^{-1} e^{i x alpha} theta2,
/// with Sigma accumulated by quadrature (independent of the closed-form
/// machinery this potential is used to cross-check).
CMatrix pe_potential(const PseudoExpParams& P, double x, const NumericalPolicy& pol = default_policy());

/// Batched forward map on an increasing grid; Sigma is accumulated stepwise.
std::vector<CMatrix> pe_potential_grid(const PseudoExpParams& P, std::span<const double> xs,
                                       const NumericalPolicy& pol = default_policy());

/// Weyl data of the pseudo-exponential potential: beta = alpha - i theta2 theta2*,
/// D = 0, R = I.
WeylData pe_to_weyl(const PseudoExpParams& P, const NumericalPolicy& pol = default_policy());

}  // namespace dirac_isp
