#pragma once

#include <algorithm>
#include <cmath>
#include <utility>

#include "dirac_isp/types.hpp"

namespace dirac_isp {

// Adaptive Gauss-Kronrod 7/15 for matrix-valued integrands. Integrands here
// are piecewise analytic; callers split panels at the known breakpoints and
// the rule never samples panel endpoints, so one-sided kernel evaluation
// stays unambiguous.
namespace quad {

// QUADPACK dqk15 abscissae/weights on [-1, 1].
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
std::pair<CMatrix, double> gk15(F&& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    CMatrix fc = f(center);
    CMatrix resk = kWgk[7] * fc;
    CMatrix resg = kWg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        CMatrix lo = f(center - half * kXgk[j]);
        CMatrix hi = f(center + half * kXgk[j]);
        resk += kWgk[j] * (lo + hi);
        if (j % 2 == 1) resg += kWg[j / 2] * (lo + hi);
    }
    resk *= half;
    resg *= half;
    return {resk, (resk - resg).norm()};
}

template <class F>
void integrate_rec(F& f, double a, double b, double abs_tol, double rel_floor, int depth, CMatrix& acc) {
    auto [value, err] = gk15(f, a, b);
    if (depth <= 0 || err <= std::max(abs_tol, rel_floor * value.norm())) {
        acc += value;
        return;
    }
    const double mid = 0.5 * (a + b);
    integrate_rec(f, a, mid, 0.5 * abs_tol, rel_floor, depth - 1, acc);
    integrate_rec(f, mid, b, 0.5 * abs_tol, rel_floor, depth - 1, acc);
}

}  // namespace quad

/// Adaptive integral of a matrix-valued function over [a, b], absolute
/// tolerance abs_tol with a relative noise floor for large integrands.
template <class F>
CMatrix integrate(F&& f, double a, double b, double abs_tol, double rel_floor = 1e-14, int max_depth = 40) {
    CMatrix shape = f(0.5 * (a + b));
    CMatrix acc = CMatrix::Zero(shape.rows(), shape.cols());
    if (b > a) quad::integrate_rec(f, a, b, abs_tol, rel_floor, max_depth, acc);
    return acc;
}

}  // namespace dirac_isp
