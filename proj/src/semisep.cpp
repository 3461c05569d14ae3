#include "dirac_isp/semisep.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace dirac_isp {

namespace detail {

LMatrix widen(const CMatrix& A) { return A.cast<LComplex>(); }
CMatrix narrow(const LMatrix& A) { return A.cast<Complex>(); }
LMatrix exp_of(const LMatrix& A) { return A.exp(); }

}  // namespace detail

namespace {

using detail::LComplex;
using detail::LMatrix;

constexpr long double kSqrt2L = 1.41421356237309504880L;
const LComplex kImagL{0.0L, 1.0L};

// e^{x A} with A = 2i diag(beta, beta*), assembled from the n x n blocks.
LMatrix exp_cal_a(const LMatrix& beta, long double x) {
    const Eigen::Index n = beta.rows();
    LMatrix E = LMatrix::Zero(2 * n, 2 * n);
    E.topLeftCorner(n, n) = detail::exp_of(2.0L * kImagL * x * beta);
    E.bottomRightCorner(n, n) = detail::exp_of(2.0L * kImagL * x * beta.adjoint());
    return E;
}

LMatrix stack_zt_i(const LMatrix& Zt) {
    const Eigen::Index n = Zt.rows();
    LMatrix L(2 * n, n);
    L.topRows(n) = Zt;
    L.bottomRows(n) = LMatrix::Identity(n, n);
    return L;
}

LMatrix row_i_minus_zt(const LMatrix& Zt) {
    const Eigen::Index n = Zt.rows();
    LMatrix Rw(n, 2 * n);
    Rw.leftCols(n) = LMatrix::Identity(n, n);
    Rw.rightCols(n) = -Zt;
    return Rw;
}

// U^{-1} = J U* J* for J-unitary U, i.e. [[U22*, -U12*], [-U21*, U11*]].
LMatrix j_symmetry_inverse(const LMatrix& U) {
    const Eigen::Index n = U.rows() / 2;
    LMatrix inv(2 * n, 2 * n);
    inv.topLeftCorner(n, n) = U.bottomRightCorner(n, n).adjoint();
    inv.topRightCorner(n, n) = -U.topRightCorner(n, n).adjoint();
    inv.bottomLeftCorner(n, n) = -U.bottomLeftCorner(n, n).adjoint();
    inv.bottomRightCorner(n, n) = U.topLeftCorner(n, n).adjoint();
    return inv;
}

LMatrix u_at_long(const FundamentalSolution& FS, double x) {
    const detail::LongSegment& seg = FS.core->segments[FS.segment_slot(x)];
    return seg.Omega * exp_cal_a(FS.core->beta, -static_cast<long double>(x)) *
           detail::exp_of(static_cast<long double>(x) * seg.A_cross) * seg.Xi_inv_U_start;
}

}  // namespace

std::size_t FundamentalSolution::segment_slot(double x) const {
    if (x < 0.0 || x > l) throw std::out_of_range("FundamentalSolution: x outside [0, l]");
    for (std::size_t i = 0; i < segments.size(); ++i)
        if (x <= segments[i].right) return i;
    return segments.size() - 1;
}

std::size_t FundamentalSolution::slot_by_index(Eigen::Index m) const {
    const Eigen::Index m0 = segments.front().m;
    if (m < m0 || m > segments.back().m)
        throw std::out_of_range("FundamentalSolution: no segment with index " + std::to_string(m));
    return static_cast<std::size_t>(m - m0);
}

CMatrix b_of(const KernelModel& KM, double x) {
    const Eigen::Index m = KM.delays.active_groups(x);
    const CMatrix& Z = KM.Z[static_cast<std::size_t>(m)];
    const CMatrix& Zt = KM.Zt[static_cast<std::size_t>(m)];
    const CMatrix em = mat_exp(-2.0 * kImag * x * KM.W.beta);
    const CMatrix ems = mat_exp(-2.0 * kImag * x * KM.W.beta.adjoint());
    const Eigen::Index n = KM.n();
    CMatrix B(2 * n, KM.p());
    B.topRows(n) = (em * Zt - Z * ems) * KM.W.theta1;
    B.bottomRows(n) = ems * KM.W.theta1;
    return std::sqrt(2.0) * B;
}

CMatrix c_of(const KernelModel& KM, double x) {
    const Eigen::Index m = KM.delays.active_groups(x);
    const CMatrix& Z = KM.Z[static_cast<std::size_t>(m)];
    const CMatrix& Zt = KM.Zt[static_cast<std::size_t>(m)];
    const CMatrix ep = mat_exp(2.0 * kImag * x * KM.W.beta);
    const CMatrix eps = mat_exp(2.0 * kImag * x * KM.W.beta.adjoint());
    const Eigen::Index n = KM.n();
    CMatrix C(KM.p(), 2 * n);
    C.leftCols(n) = KM.W.theta1.adjoint() * ep;
    C.rightCols(n) = KM.W.theta1.adjoint() * (ep * Z - Zt * eps);
    return std::sqrt(2.0) * C;
}

FundamentalSolution build_U(const KernelModel& KM, double l, const NumericalPolicy& pol) {
    if (!(l > 0.0)) throw std::invalid_argument("build_U: l must be positive");
    FundamentalSolution FS;
    FS.km = KM;
    FS.l = l;

    const Eigen::Index n = KM.n();
    auto core = std::make_shared<detail::LongCore>();
    core->beta = detail::widen(KM.W.beta);
    const LMatrix theta1 = detail::widen(KM.W.theta1);
    const LMatrix theta_sq = theta1 * theta1.adjoint();
    const LMatrix id2n = LMatrix::Identity(2 * n, 2 * n);

    LMatrix cal_a = LMatrix::Zero(2 * n, 2 * n);
    cal_a.topLeftCorner(n, n) = 2.0L * kImagL * core->beta;
    cal_a.bottomRightCorner(n, n) = 2.0L * kImagL * core->beta.adjoint();

    const Eigen::Index m0 = KM.delays.first_delay_is_zero() ? 1 : 0;
    const Eigen::Index m_end = KM.delays.active_groups(l);

    LMatrix u_start = id2n;  // U(0)
    for (Eigen::Index m = m0; m <= m_end; ++m) {
        const double left = m == 0 ? 0.0 : KM.delays.distinct_delay(m);
        const double right = m == m_end ? l : KM.delays.distinct_delay(m + 1);
        const LMatrix Z = detail::widen(KM.Z[static_cast<std::size_t>(m)]);
        const LMatrix Zt = detail::widen(KM.Zt[static_cast<std::size_t>(m)]);

        detail::LongSegment ls;
        ls.A_cross = cal_a + 2.0L * stack_zt_i(Zt) * theta_sq * row_i_minus_zt(Zt);
        ls.Omega = id2n;
        ls.Omega.topRightCorner(n, n) = -Z;
        ls.Omega_inv = id2n;
        ls.Omega_inv.topRightCorner(n, n) = Z;

        const long double left_l = static_cast<long double>(left);
        const LMatrix xi = ls.Omega * exp_cal_a(core->beta, -left_l) * detail::exp_of(left_l * ls.A_cross);
        const LMatrix xi_inv =
            detail::exp_of(-left_l * ls.A_cross) * exp_cal_a(core->beta, left_l) * ls.Omega_inv;

        ls.Xi_inv_U_start = xi_inv * u_start;
        ls.U_start_inv_Xi = j_symmetry_inverse(u_start) * xi;
        ls.f_row = kSqrt2L * theta1.adjoint() * row_i_minus_zt(Zt);
        ls.g_col = kSqrt2L * stack_zt_i(Zt) * theta1;

        SegmentData seg;
        seg.m = m;
        seg.left = left;
        seg.right = right;
        seg.A_cross = detail::narrow(ls.A_cross);
        seg.Omega = detail::narrow(ls.Omega);
        seg.Omega_inv = detail::narrow(ls.Omega_inv);
        seg.Xi = detail::narrow(xi);
        seg.Xi_inv = detail::narrow(xi_inv);
        seg.U_start = detail::narrow(u_start);

        u_start = ls.Omega * exp_cal_a(core->beta, -static_cast<long double>(right)) *
                  detail::exp_of(static_cast<long double>(right) * ls.A_cross) * ls.Xi_inv_U_start;
        if (!(detail::narrow(u_start).norm() < pol.exp_overflow_guard))
            throw NumericalError("build_U: fundamental solution overflow on segment " + std::to_string(m));

        core->segments.push_back(std::move(ls));
        FS.segments.push_back(std::move(seg));
    }
    FS.core = std::move(core);
    return FS;
}

CMatrix u_at(const FundamentalSolution& FS, double x) { return detail::narrow(u_at_long(FS, x)); }

CMatrix u_inv_at(const FundamentalSolution& FS, double x) {
    return detail::narrow(j_symmetry_inverse(u_at_long(FS, x)));
}

namespace detail {

LMatrix p_cross_long(const FundamentalSolution& FS, double l, const NumericalPolicy& pol) {
    const LMatrix Ul = u_at_long(FS, l);
    const Eigen::Index n = FS.km.n();
    const LMatrix U22 = Ul.bottomRightCorner(n, n);

    // rcond gate evaluated in double; the solve itself stays long.
    Eigen::PartialPivLU<CMatrix> gate(narrow(U22));
    const double rcond = rcond_estimate(gate);
    if (!(rcond > pol.u22_rcond_min)) throw U22Singular(rcond);

    LMatrix P = LMatrix::Zero(2 * n, 2 * n);
    P.bottomLeftCorner(n, n) = U22.partialPivLu().solve(Ul.bottomLeftCorner(n, n));
    P.bottomRightCorner(n, n) = LMatrix::Identity(n, n);
    return P;
}

LMatrix f_tilde_long(const FundamentalSolution& FS, double x) {
    const LongSegment& seg = FS.core->segments[FS.segment_slot(x)];
    return (seg.f_row * exp_of(static_cast<long double>(x) * seg.A_cross)) * seg.Xi_inv_U_start;
}

LMatrix g_tilde_long(const FundamentalSolution& FS, double t) {
    const LongSegment& seg = FS.core->segments[FS.segment_slot(t)];
    return seg.U_start_inv_Xi * (exp_of(-static_cast<long double>(t) * seg.A_cross) * seg.g_col);
}

}  // namespace detail

CMatrix p_cross_at(const FundamentalSolution& FS, double l, const NumericalPolicy& pol) {
    return detail::narrow(detail::p_cross_long(FS, l, pol));
}

CMatrix p_cross(const FundamentalSolution& FS, const NumericalPolicy& pol) {
    return p_cross_at(FS, FS.l, pol);
}

CMatrix f_tilde(const FundamentalSolution& FS, double x) {
    return detail::narrow(detail::f_tilde_long(FS, x));
}

CMatrix g_tilde(const FundamentalSolution& FS, double t) {
    return detail::narrow(detail::g_tilde_long(FS, t));
}

ResolventModel build_resolvent(const FundamentalSolution& FS, double l, const NumericalPolicy& pol) {
    if (!(l > 0.0) || l > FS.l) throw std::invalid_argument("build_resolvent: l outside (0, FS.l]");
    ResolventModel RM;
    RM.fs = FS;
    RM.l = l;
    RM.P_long = detail::p_cross_long(FS, l, pol);
    RM.P_cross = detail::narrow(RM.P_long);
    return RM;
}

ResolventModel build_resolvent(const FundamentalSolution& FS, const NumericalPolicy& pol) {
    return build_resolvent(FS, FS.l, pol);
}

CMatrix kernel_T(const ResolventModel& RM, double x, double t) {
    if (x < 0.0 || t < 0.0 || x > RM.l || t > RM.l)
        throw std::out_of_range("kernel_T: arguments outside [0, l]");
    const Eigen::Index n = RM.fs.km.n();
    const LMatrix id = LMatrix::Identity(2 * n, 2 * n);
    if (x >= t)
        return detail::narrow(detail::f_tilde_long(RM.fs, x) * (id - RM.P_long) *
                              detail::g_tilde_long(RM.fs, t));
    return detail::narrow(-detail::f_tilde_long(RM.fs, x) * RM.P_long * detail::g_tilde_long(RM.fs, t));
}

}  // namespace dirac_isp
