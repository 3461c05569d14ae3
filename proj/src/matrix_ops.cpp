#include "dirac_isp/matrix_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace dirac_isp {

void require_square(const CMatrix& A, const char* what) {
    if (A.rows() != A.cols())
        throw std::invalid_argument(std::string(what) + ": matrix must be square, got " +
                                    std::to_string(A.rows()) + "x" + std::to_string(A.cols()));
}

bool all_finite(const CMatrix& A) { return A.allFinite(); }

void require_finite(const CMatrix& A, const char* what) {
    if (!A.allFinite()) throw std::invalid_argument(std::string(what) + ": matrix has non-finite entries");
}

bool is_hermitian(const CMatrix& A, double tol) {
    if (A.rows() != A.cols()) return false;
    return (A - A.adjoint()).norm() <= tol * (1.0 + A.norm());
}

CMatrix hermitize(const CMatrix& A) { return 0.5 * (A + A.adjoint()); }

CMatrix mat_exp(const CMatrix& A) {
    require_square(A, "mat_exp");
    require_finite(A, "mat_exp");
    CMatrix E = A.exp();
    if (!E.allFinite() || E.norm() > default_policy().exp_overflow_guard)
        throw NumericalError("mat_exp: exponential overflow, |A| = " + std::to_string(A.norm()));
    return E;
}

CMatrix exp_integral(const CMatrix& B, double y) {
    require_square(B, "exp_integral");
    require_finite(B, "exp_integral");
    if (y < 0.0) throw std::invalid_argument("exp_integral: negative upper limit");
    const Eigen::Index n = B.rows();
    CMatrix M = CMatrix::Zero(2 * n, 2 * n);
    M.topLeftCorner(n, n) = B;
    M.topRightCorner(n, n) = CMatrix::Identity(n, n);
    return mat_exp(y * M).topRightCorner(n, n);
}

std::vector<Complex> spectrum(const CMatrix& A) {
    require_square(A, "spectrum");
    require_finite(A, "spectrum");
    Eigen::ComplexEigenSolver<CMatrix> solver(A, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("spectrum: eigenvalue iteration failed");
    const CVector& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

double spectra_overlap_margin(const std::vector<Complex>& eigs) {
    double margin = std::numeric_limits<double>::infinity();
    for (const Complex& mu : eigs)
        for (const Complex& nu : eigs) margin = std::min(margin, std::abs(mu - std::conj(nu)));
    return margin;
}

void check_spectra_overlap(const std::vector<Complex>& eigs, double gate) {
    Complex worst_mu{0.0}, worst_nu{0.0};
    double margin = std::numeric_limits<double>::infinity();
    for (const Complex& mu : eigs)
        for (const Complex& nu : eigs) {
            const double gap = std::abs(mu - std::conj(nu));
            if (gap < margin) {
                margin = gap;
                worst_mu = mu;
                worst_nu = nu;
            }
        }
    if (margin <= gate) throw SpectraOverlap(worst_mu, worst_nu, margin);
}

CMatrix solve_sylvester(const CMatrix& beta, const CMatrix& Q, const NumericalPolicy& pol) {
    require_square(beta, "solve_sylvester");
    if (Q.rows() != beta.rows() || Q.cols() != beta.cols())
        throw std::invalid_argument("solve_sylvester: beta and Q must have equal square shape");
    if (!is_hermitian(Q, pol.hermiticity_tol)) throw NonHermitianQ((Q - Q.adjoint()).norm());

    check_spectra_overlap(spectrum(beta), pol.spectra_overlap_tol * (1.0 + beta.norm()));

    // vec(i(beta X - X beta*)) = i (I (x) beta - conj(beta) (x) I) vec(X)
    const Eigen::Index n = beta.rows();
    const CMatrix id = CMatrix::Identity(n, n);
    CMatrix system = kImag * (Eigen::kroneckerProduct(id, beta).eval() -
                              Eigen::kroneckerProduct(beta.conjugate(), id).eval());
    Eigen::Map<const CVector> q_vec(Q.data(), n * n);
    CVector x_vec = system.partialPivLu().solve(q_vec);
    CMatrix X = hermitize(Eigen::Map<const CMatrix>(x_vec.data(), n, n));

    const double residual = (kImag * (beta * X - X * beta.adjoint()) - Q).norm();
    if (residual > pol.solve_tol * (1.0 + Q.norm()))
        throw NumericalError("solve_sylvester: residual " + std::to_string(residual) + " above gate");
    return X;
}

double rcond_estimate(const Eigen::PartialPivLU<CMatrix>& lu) {
    double min_piv = std::numeric_limits<double>::infinity();
    double max_piv = 0.0;
    const CMatrix& LU = lu.matrixLU();
    for (Eigen::Index i = 0; i < LU.rows(); ++i) {
        const double piv = std::abs(LU(i, i));
        min_piv = std::min(min_piv, piv);
        max_piv = std::max(max_piv, piv);
    }
    const double pivot_ratio = max_piv > 0.0 ? min_piv / max_piv : 0.0;
    const double est = lu.rcond();
    return std::isfinite(est) ? std::min(est, pivot_ratio) : pivot_ratio;
}

LinearSolve solve_linear(const CMatrix& A, const CMatrix& B, const NumericalPolicy& pol) {
    require_square(A, "solve_linear");
    require_finite(A, "solve_linear");
    if (A.rows() != B.rows()) throw std::invalid_argument("solve_linear: B row count mismatch");
    Eigen::PartialPivLU<CMatrix> lu(A);
    const double rcond = rcond_estimate(lu);
    if (!(rcond > pol.rcond_min)) throw Singular(rcond);
    return {lu.solve(B), rcond};
}

}  // namespace dirac_isp
