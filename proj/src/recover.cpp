#include "dirac_isp/recover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dirac_isp/quadrature.hpp"

namespace dirac_isp {

namespace {

using detail::LMatrix;

constexpr long double kSqrt2L = 1.41421356237309504880L;
const detail::LComplex kImagL{0.0L, 1.0L};

// The recovery theorem is stated on open delay intervals and k jumps at the
// delays, so breakpoint endpoints evaluate as right-sided limits.
double nudged_endpoint(const DelayStructure& delays, double l, const NumericalPolicy& pol) {
    if (delays.on_breakpoint(l)) return l + pol.breakpoint_nudge * (1.0 + l);
    return l;
}

// nu with only the columns of delay groups 1..m kept, times R.
LMatrix masked_nu_r(const KernelModel& KM, Eigen::Index m) {
    CMatrix masked = CMatrix::Zero(KM.n(), KM.p());
    for (Eigen::Index j = 1; j <= m; ++j) {
        const DelayGroup& g = KM.delays.group(j);
        masked.middleCols(g.col, g.size) = KM.nu.middleCols(g.col, g.size);
    }
    return detail::widen(masked * KM.W.R);
}

// e^{-d A_m^x} e^{d A} [I; 0] = e^{-d A_m^x} [e^{2 i d beta}; 0].
LMatrix sum_factor(const LMatrix& A_cross, const LMatrix& beta, double d) {
    const Eigen::Index n = beta.rows();
    LMatrix top(2 * n, n);
    top.topRows(n) = detail::exp_of(2.0L * kImagL * static_cast<long double>(d) * beta);
    top.bottomRows(n) = LMatrix::Zero(n, n);
    return detail::exp_of(-static_cast<long double>(d) * A_cross) * top;
}

// F~(l) (I - P^x) in extended precision; the product is the only place the
// exponentially large factors cancel down to the moderate result.
LMatrix resolvent_row(const FundamentalSolution& FS, double le, const NumericalPolicy& pol) {
    const Eigen::Index n = FS.km.n();
    const LMatrix P = detail::p_cross_long(FS, le, pol);
    return detail::f_tilde_long(FS, le) * (LMatrix::Identity(2 * n, 2 * n) - P);
}

}  // namespace

CMatrix recover_v_closed(const KernelModel& KM, const FundamentalSolution& FS, double l,
                         const NumericalPolicy& pol) {
    if (!(l >= 0.0)) throw std::invalid_argument("recover_v_closed: l must be nonnegative");
    const double le = nudged_endpoint(KM.delays, l, pol);
    const LMatrix row = resolvent_row(FS, le, pol);
    const Eigen::Index N = KM.delays.active_groups(le);

    LMatrix sum = LMatrix::Zero(2 * KM.n(), KM.p());
    for (Eigen::Index m = 1; m <= N; ++m) {
        const detail::LongSegment& seg = FS.core->segments[FS.slot_by_index(m)];
        const double d_lo = KM.delays.distinct_delay(m);
        const double d_hi = m == N ? le : KM.delays.distinct_delay(m + 1);
        sum += kSqrt2L * seg.U_start_inv_Xi *
               (sum_factor(seg.A_cross, FS.core->beta, d_lo) -
                sum_factor(seg.A_cross, FS.core->beta, d_hi)) *
               masked_nu_r(KM, m);
    }
    return k_of_x(KM.W, le) + detail::narrow(row * sum);
}

CMatrix recover_v_quadrature(const KernelModel& KM, const FundamentalSolution& FS, double l,
                             const NumericalPolicy& pol) {
    if (!(l >= 0.0)) throw std::invalid_argument("recover_v_quadrature: l must be nonnegative");
    const double le = nudged_endpoint(KM.delays, l, pol);
    const LMatrix row = resolvent_row(FS, le, pol);

    std::vector<double> cuts{0.0};
    for (Eigen::Index j = 1; j <= KM.delays.count(); ++j) {
        const double d = KM.delays.distinct_delay(j);
        if (d > 0.0 && d < le) cuts.push_back(d);
    }
    cuts.push_back(le);

    CMatrix acc = CMatrix::Zero(KM.p(), KM.p());
    const double panel_tol = pol.quad_recover_tol / static_cast<double>(cuts.size() - 1);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        acc += integrate(
            [&](double t) -> CMatrix {
                return detail::narrow(row * detail::g_tilde_long(FS, t)) *
                       k_of_x_limit(KM.W, t, Side::Right);
            },
            cuts[i], cuts[i + 1], panel_tol, pol.quad_rel_floor);
    }
    return k_of_x(KM.W, le) + acc;
}

PotentialGrid recover_profile(const WeylData& W, const std::vector<double>& xs, const ProfileOptions& opts,
                              const NumericalPolicy& pol) {
    if (xs.empty()) throw std::invalid_argument("recover_profile: empty grid");
    if (!std::is_sorted(xs.begin(), xs.end()))
        throw std::invalid_argument("recover_profile: grid must be increasing");

    const KernelModel KM = build_kernel_model(W, pol);
    PotentialGrid grid;
    grid.xs = xs;
    grid.p = W.p();
    grid.quadrature_enabled = opts.with_quadrature;

    const auto build_to = [&](double l) {
        const double margin = 2.0 * pol.breakpoint_nudge * (1.0 + l) + 1e-12;
        return build_U(KM, l + margin, pol);
    };

    FundamentalSolution shared;
    if (!opts.independent_rebuild) shared = build_to(xs.back());

    const CMatrix zero = CMatrix::Zero(W.p(), W.p());
    for (double l : xs) {
        try {
            FundamentalSolution local;
            if (opts.independent_rebuild) local = build_to(l);
            const FundamentalSolution& FS = opts.independent_rebuild ? local : shared;
            CMatrix vc = recover_v_closed(KM, FS, l, pol);
            grid.v_closed.push_back(vc);
            if (opts.with_quadrature) {
                CMatrix vq = recover_v_quadrature(KM, FS, l, pol);
                grid.v_quad.push_back(vq);
                grid.residuals.push_back((vc - vq).norm());
            } else {
                grid.v_quad.push_back(zero);
                grid.residuals.push_back(0.0);
            }
            grid.flags.emplace_back();
        } catch (const Error& err) {
            grid.v_closed.push_back(zero);
            grid.v_quad.push_back(zero);
            grid.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            grid.flags.emplace_back(err.what());
        }
    }
    return grid;
}

}  // namespace dirac_isp
