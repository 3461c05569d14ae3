#pragma once

#include <vector>

#include "dirac_isp/errors.hpp"
#include "dirac_isp/types.hpp"

namespace dirac_isp {

void require_square(const CMatrix& A, const char* what);
void require_finite(const CMatrix& A, const char* what);
bool all_finite(const CMatrix& A);
bool is_hermitian(const CMatrix& A, double tol);

/// (A + A*)/2
CMatrix hermitize(const CMatrix& A);

/// exp(A) for dense complex square A (scaling-and-squaring). Overflowing
/// results are reported, never returned.
CMatrix mat_exp(const CMatrix& A);

/// Integral of exp(tB) over [0, y], via the top-right block of the
/// augmented exponential exp(y [[B, I], [0, 0]]); valid for singular B.
CMatrix exp_integral(const CMatrix& B, double y);

/// Eigenvalues of a general complex square matrix.
std::vector<Complex> spectrum(const CMatrix& A);

/// min over eigenvalue pairs of |mu - conj(nu)|; the solvability margin of
/// the Sylvester identity i(beta X - X beta*) = Q.
double spectra_overlap_margin(const std::vector<Complex>& eigs);

/// Throws SpectraOverlap (with the offending pair) when the margin of the
/// given spectrum is at or below gate.
void check_spectra_overlap(const std::vector<Complex>& eigs, double gate);

/// Unique Hermitian X with i(beta X - X beta*) = Q, by the Kronecker-
/// vectorized linear system. Throws SpectraOverlap when the margin is below
/// tolerance and NonHermitianQ when Q is not Hermitian.
CMatrix solve_sylvester(const CMatrix& beta, const CMatrix& Q,
                        const NumericalPolicy& pol = default_policy());

struct LinearSolve {
    CMatrix X;
    double rcond;
};

/// Reciprocal-condition estimate combining the L1 estimator with the LU
/// pivot ratio; the plain estimator is blind to exact zero pivots.
double rcond_estimate(const Eigen::PartialPivLU<CMatrix>& lu);

/// X with A X = B; carries a reciprocal-condition estimate and throws
/// Singular when it falls below the policy gate.
LinearSolve solve_linear(const CMatrix& A, const CMatrix& B,
                         const NumericalPolicy& pol = default_policy());

}  // namespace dirac_isp
