#pragma once

#include <memory>
#include <vector>

#include "dirac_isp/transform.hpp"

namespace dirac_isp {

// The fundamental solution U is J-unitary with exponentially growing norm,
// so identities like U*JU = J are conditioned as eps * |U|^2. The explicit
// formulas are therefore evaluated in extended precision and narrowed to
// double at the interface.
namespace detail {

using LComplex = std::complex<long double>;
using LMatrix = Eigen::Matrix<LComplex, Eigen::Dynamic, Eigen::Dynamic>;

LMatrix widen(const CMatrix& A);
CMatrix narrow(const LMatrix& A);
LMatrix exp_of(const LMatrix& A);

struct LongSegment {
    LMatrix A_cross;
    LMatrix Omega;
    LMatrix Omega_inv;
    LMatrix Xi_inv_U_start;
    LMatrix U_start_inv_Xi;
    LMatrix f_row;  // sqrt(2) theta1* [I, -Zt_m]
    LMatrix g_col;  // sqrt(2) [Zt_m; I] theta1
};

struct LongCore {
    LMatrix beta;
    std::vector<LongSegment> segments;
};

}  // namespace detail

struct FundamentalSolution;

namespace detail {
// Extended-precision evaluation path shared by the resolvent kernel and the
// recovery formula; the public functions narrow these results.
LMatrix f_tilde_long(const FundamentalSolution& FS, double x);
LMatrix g_tilde_long(const FundamentalSolution& FS, double t);
LMatrix p_cross_long(const FundamentalSolution& FS, double l, const NumericalPolicy& pol);
}  // namespace detail

/// One delay segment [left, right] of the fundamental solution, carrying
/// the constant matrices of the explicit formula
///   U(x) = Omega_m e^{-x A} e^{x A_m^x} Xi_m^{-1} U(left),
/// where A = 2i diag(beta, beta*) and A_m^x = A + 2 Y_m.
struct SegmentData {
    Eigen::Index m;  // number of active delay groups on this segment
    double left = 0.0;
    double right = 0.0;
    CMatrix A_cross;  // 2n x 2n
    CMatrix Omega;    // [[I, -Z_m], [0, I]]
    CMatrix Omega_inv;
    CMatrix Xi;  // Omega e^{-left A} e^{left A_cross}
    CMatrix Xi_inv;
    CMatrix U_start;  // U at the left endpoint
};

/// Explicit fundamental solution of U' = B C U on [0, l], U(0) = I, stored
/// per delay segment; evaluation costs two matrix exponentials per query.
struct FundamentalSolution {
    KernelModel km;
    double l = 0.0;
    std::vector<SegmentData> segments;
    std::shared_ptr<const detail::LongCore> core;

    /// Segment index containing x; shared boundaries belong to the lower segment.
    std::size_t segment_slot(double x) const;
    const SegmentData& segment_at(double x) const { return segments[segment_slot(x)]; }
    /// Segment with a given group count m (present for m in [m0, M]).
    std::size_t slot_by_index(Eigen::Index m) const;
};

/// Left factor B(x) (2n x p) and right factor C(x) (p x 2n) of H = B C,
/// recovered from the semiseparable splitting of K.
CMatrix b_of(const KernelModel& KM, double x);
CMatrix c_of(const KernelModel& KM, double x);

FundamentalSolution build_U(const KernelModel& KM, double l,
                            const NumericalPolicy& pol = default_policy());

CMatrix u_at(const FundamentalSolution& FS, double x);

/// U(x)^{-1} = J U(x)* J* via J-unitarity; no linear solve.
CMatrix u_inv_at(const FundamentalSolution& FS, double x);

/// P^x = [[0, 0], [U22(l)^{-1} U21(l), I]]; throws U22Singular when the
/// pre-check on rcond(U22) fails (S_l not numerically invertible).
CMatrix p_cross(const FundamentalSolution& FS, const NumericalPolicy& pol = default_policy());
CMatrix p_cross_at(const FundamentalSolution& FS, double l, const NumericalPolicy& pol = default_policy());

/// Factor functions of the resolvent kernel (x restricted to [0, l]):
///   F~(x) = sqrt(2) theta1* [I, -Zt_m] e^{x A_m^x} Xi_m^{-1} U(d~_m)
///   G~(t) = sqrt(2) U(d~_m)^{-1} Xi_m e^{-t A_m^x} [Zt_m; I] theta1
CMatrix f_tilde(const FundamentalSolution& FS, double x);
CMatrix g_tilde(const FundamentalSolution& FS, double t);

/// Resolvent data: S_l^{-1} = I + integral of T, with
///   T(x, t) = F~(x) (I - P^x) G~(t)   for x > t,
///   T(x, t) = -F~(x) P^x G~(t)        for x < t.
struct ResolventModel {
    FundamentalSolution fs;
    double l = 0.0;
    CMatrix P_cross;
    detail::LMatrix P_long;
};

ResolventModel build_resolvent(const FundamentalSolution& FS, double l,
                               const NumericalPolicy& pol = default_policy());
ResolventModel build_resolvent(const FundamentalSolution& FS,
                               const NumericalPolicy& pol = default_policy());

CMatrix kernel_T(const ResolventModel& RM, double x, double t);

}  // namespace dirac_isp
