#pragma once

#include <string>
#include <vector>

#include "dirac_isp/semisep.hpp"

namespace dirac_isp {

/// Recovered potential on a grid of endpoint values, produced by the two
/// independent routes (closed form vs quadrature of the resolvent), with
/// per-point discrepancy norms. flags[i] is empty on success and carries
/// the error message when a point failed.
struct PotentialGrid {
    std::vector<double> xs;
    std::vector<CMatrix> v_closed;
    std::vector<CMatrix> v_quad;
    std::vector<double> residuals;
    std::vector<std::string> flags;
    Eigen::Index p = 0;
    bool quadrature_enabled = true;
};

/// Closed-form recovery v(l) = k(l) + F~(l)(I - P^x) Sum_m ... ; at a delay
/// breakpoint l is nudged to the right-sided limit. FS must be built past l.
CMatrix recover_v_closed(const KernelModel& KM, const FundamentalSolution& FS, double l,
                         const NumericalPolicy& pol = default_policy());

/// Independent route: v(l) = k(l) + integral of T(l, t) k(t) over [0, l],
/// with quadrature panels split at the delays.
CMatrix recover_v_quadrature(const KernelModel& KM, const FundamentalSolution& FS, double l,
                             const NumericalPolicy& pol = default_policy());

struct ProfileOptions {
    bool independent_rebuild = false;  // rebuild the fundamental solution per grid point
    bool with_quadrature = true;
};

/// Batches both recovery routes over an increasing grid of l values. The
/// kernel model and (unless independent_rebuild) the fundamental solution
/// are shared across the grid; isolated per-point failures are flagged and
/// the run continues.
PotentialGrid recover_profile(const WeylData& W, const std::vector<double>& xs,
                              const ProfileOptions& opts = {},
                              const NumericalPolicy& pol = default_policy());

}  // namespace dirac_isp
