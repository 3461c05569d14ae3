#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dirac_isp {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr Complex kImag{0.0, 1.0};

/// Every tolerance used by the solver, in one record. Functions take a
/// policy argument and default to default_policy(); tests override fields
/// locally when they probe failure paths.
struct NumericalPolicy {
    double solve_tol = 1e-10;           // linear / Sylvester residual gates
    double acceptance_tol = 1e-8;       // default gate for end-to-end checks
    double spectra_overlap_tol = 1e-8;  // scaled by (1 + |beta|)
    double unitarity_tol = 1e-12;
    double hermiticity_tol = 1e-12;
    double pe_identity_tol = 1e-12;
    double rcond_min = 1e-14;           // solve_linear singularity gate
    double u22_rcond_min = 1e-12;       // projector build pre-check
    double quad_kernel_tol = 1e-10;     // direct kernel quadrature, absolute
    double quad_recover_tol = 1e-9;     // quadrature recovery path, absolute
    double quad_sigma_tol = 1e-11;      // Sigma(x) accumulation, per step
    double quad_rel_floor = 1e-14;      // relative noise floor for quadrature
    double sigma_min_sv = 1e-12;        // Sigma(x) singularity gate
    double breakpoint_nudge = 1e-9;     // one-sided evaluation offset
    double exp_overflow_guard = 1e150;  // norm guard on matrix exponentials
};

inline const NumericalPolicy& default_policy() {
    static const NumericalPolicy policy{};
    return policy;
}

}  // namespace dirac_isp
