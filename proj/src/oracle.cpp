#include "dirac_isp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dirac_isp {

namespace {

struct PanelGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::vector<Side> sides;
};

// Panel-wise uniform nodes between consecutive breakpoints; global spacing
// close to l / N. With duplicate_breakpoints each interior breakpoint gets
// one node per adjacent panel.
PanelGrid make_panel_grid(const DelayStructure& delays, double l, int N, bool duplicate_breakpoints) {
    std::vector<double> cuts{0.0};
    for (Eigen::Index j = 1; j <= delays.count(); ++j) {
        const double d = delays.distinct_delay(j);
        if (d > 0.0 && d < l) cuts.push_back(d);
    }
    cuts.push_back(l);

    PanelGrid grid;
    for (std::size_t q = 0; q + 1 < cuts.size(); ++q) {
        const double a = cuts[q];
        const double b = cuts[q + 1];
        const int nq = std::max<int>(1, static_cast<int>(std::llround(N * (b - a) / l)));
        const double h = (b - a) / nq;
        for (int j = 0; j <= nq; ++j) {
            if (j == 0 && q > 0 && !duplicate_breakpoints) {
                grid.weights.back() += 0.5 * h;  // merge shared node
                continue;
            }
            grid.nodes.push_back(j == nq ? b : a + j * h);
            grid.weights.push_back(j == 0 || j == nq ? 0.5 * h : h);
            grid.sides.push_back(j == nq ? Side::Left : Side::Right);
        }
    }
    return grid;
}

// K(x_i, x_j) for all node pairs with the exponentials cached per node.
std::vector<CMatrix> kernel_blocks(const KernelModel& KM, const PanelGrid& grid, bool deep_verify,
                                   const NumericalPolicy& pol) {
    const std::size_t M = grid.nodes.size();
    const Eigen::Index p = KM.p();
    std::vector<CMatrix> blocks(M * M, CMatrix::Zero(p, p));

    if (deep_verify) {
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                CMatrix K = kernel_K_direct(KM.W, grid.nodes[i], grid.nodes[j], pol);
                blocks[i * M + j] = K;
                blocks[j * M + i] = K.adjoint();
            }
        return blocks;
    }

    std::vector<CMatrix> exp_pos(M), exp_neg(M);
    for (std::size_t i = 0; i < M; ++i) {
        exp_pos[i] = mat_exp(2.0 * kImag * grid.nodes[i] * KM.W.beta);
        exp_neg[i] = mat_exp(-2.0 * kImag * grid.nodes[i] * KM.W.beta);
    }
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            // x_i >= x_j here, so the m-rule applies to x_j
            const Eigen::Index m = KM.delays.active_groups(grid.nodes[j]);
            const CMatrix& Z = KM.Z[static_cast<std::size_t>(m)];
            const CMatrix& Zt = KM.Zt[static_cast<std::size_t>(m)];
            CMatrix K = 2.0 * KM.W.theta1.adjoint() * exp_pos[i] *
                        (Z * exp_pos[j].adjoint() - exp_neg[j] * Zt) * KM.W.theta1;
            blocks[i * M + j] = K;
            blocks[j * M + i] = K.adjoint();
        }
    return blocks;
}

CMatrix interp_potential(const std::vector<double>& xs, const std::vector<CMatrix>& vals, double x) {
    if (x <= xs.front()) return vals.front();
    if (x >= xs.back()) return vals.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - xs.begin());
    const double t = (x - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
    return (1.0 - t) * vals[hi - 1] + t * vals[hi];
}

}  // namespace

NystromOperator build_nystrom(const KernelModel& KM, double l, int N, bool deep_verify,
                              const NumericalPolicy& pol) {
    if (!(l > 0.0)) throw std::invalid_argument("build_nystrom: l must be positive");
    if (N < 16) throw std::invalid_argument("build_nystrom: N must be at least 16");

    PanelGrid grid = make_panel_grid(KM.delays, l, N, /*duplicate_breakpoints=*/true);
    const auto blocks = kernel_blocks(KM, grid, deep_verify, pol);
    const std::size_t M = grid.nodes.size();
    const Eigen::Index p = KM.p();

    NystromOperator NO;
    NO.l = l;
    NO.N = N;
    NO.nodes = grid.nodes;
    NO.weights = grid.weights;
    NO.sides = grid.sides;
    NO.p = p;
    NO.S = CMatrix::Identity(p * M, p * M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            NO.S.block(i * p, j * p, p, p) +=
                std::sqrt(grid.weights[i] * grid.weights[j]) * blocks[i * M + j];
    return NO;
}

double min_eigenvalue(const NystromOperator& NO) {
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (NO.S + NO.S.adjoint()),
                                                  Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("min_eigenvalue: eigensolver failed");
    return solver.eigenvalues().minCoeff();
}

double hermiticity_residual(const NystromOperator& NO) { return (NO.S - NO.S.adjoint()).norm(); }

CMatrix oracle_v(const KernelModel& KM, const NystromOperator& NO) {
    const Eigen::Index p = NO.p;
    const Eigen::Index M = NO.size();
    CMatrix rhs(p * M, p);
    for (Eigen::Index i = 0; i < M; ++i)
        rhs.block(i * p, 0, p, p) =
            std::sqrt(NO.weights[static_cast<std::size_t>(i)]) *
            k_of_x_limit(KM.W, NO.nodes[static_cast<std::size_t>(i)], NO.sides[static_cast<std::size_t>(i)]);
    CMatrix scaled = NO.S.partialPivLu().solve(rhs);
    return scaled.block((M - 1) * p, 0, p, p) / std::sqrt(NO.weights.back());
}

double nystrom_resolvent_error(const NystromOperator& NO, const ResolventModel& RM) {
    const Eigen::Index p = NO.p;
    const Eigen::Index M = NO.size();
    const Eigen::Index n = RM.fs.km.n();
    const CMatrix id = CMatrix::Identity(2 * n, 2 * n);

    CMatrix resolvent = NO.S.partialPivLu().solve(CMatrix::Identity(p * M, p * M));
    resolvent -= CMatrix::Identity(p * M, p * M);

    std::vector<CMatrix> row_above(M), row_below(M), cols(M);
    for (Eigen::Index i = 0; i < M; ++i) {
        const double x = NO.nodes[static_cast<std::size_t>(i)];
        const CMatrix Ft = f_tilde(RM.fs, x);
        row_above[i] = Ft * (id - RM.P_cross);
        row_below[i] = -Ft * RM.P_cross;
        cols[i] = g_tilde(RM.fs, x);
    }

    double err = 0.0;
    for (Eigen::Index i = 0; i < M; ++i)
        for (Eigen::Index j = 0; j < M; ++j) {
            const double xi = NO.nodes[static_cast<std::size_t>(i)];
            const double xj = NO.nodes[static_cast<std::size_t>(j)];
            const CMatrix exact = (xi >= xj ? row_above[i] : row_below[i]) * cols[j];
            const double scale =
                std::sqrt(NO.weights[static_cast<std::size_t>(i)] * NO.weights[static_cast<std::size_t>(j)]);
            err = std::max(err, (resolvent.block(i * p, j * p, p, p) / scale - exact).norm());
        }
    return err;
}

ForwardSolution forward_solve(const std::vector<double>& v_xs, const std::vector<CMatrix>& v_vals,
                              Complex lambda, double l, int steps) {
    if (v_xs.empty() || v_xs.size() != v_vals.size())
        throw std::invalid_argument("forward_solve: potential grid empty or mismatched");
    if (!(l > 0.0) || l > v_xs.back() + 1e-12)
        throw std::invalid_argument("forward_solve: l outside the sampled range");
    const Eigen::Index p = v_vals.front().rows();

    double vmax = 0.0;
    for (const CMatrix& v : v_vals) vmax = std::max(vmax, v.norm());
    const double coef_norm = std::abs(lambda) + vmax + 1.0;
    if (static_cast<double>(v_xs.size() - 1) < 8.0 * coef_norm * l)
        throw std::invalid_argument("forward_solve: potential sampled too coarsely for this lambda");
    if (steps <= 0) steps = std::max({2000, static_cast<int>(std::ceil(100.0 * coef_norm * l))});
    const double h_target = l / steps;

    const auto rhs = [&](double x, const CMatrix& u) -> CMatrix {
        const CMatrix v = interp_potential(v_xs, v_vals, x);
        CMatrix m = CMatrix::Zero(2 * p, 2 * p);
        m.topLeftCorner(p, p) = kImag * lambda * CMatrix::Identity(p, p);
        m.bottomRightCorner(p, p) = -kImag * lambda * CMatrix::Identity(p, p);
        m.topRightCorner(p, p) = v;        // j V: [[0, v], [-v*, 0]]
        m.bottomLeftCorner(p, p) -= v.adjoint();
        return m * u;
    };

    ForwardSolution out;
    CMatrix u = CMatrix::Identity(2 * p, 2 * p);
    double x = 0.0;
    out.xs.push_back(0.0);
    out.u.push_back(u);

    std::vector<double> targets;
    for (double t : v_xs)
        if (t > 0.0 && t < l) targets.push_back(t);
    targets.push_back(l);

    for (double target : targets) {
        const int nsub = std::max(1, static_cast<int>(std::ceil((target - x) / h_target)));
        const double h = (target - x) / nsub;
        for (int s = 0; s < nsub; ++s) {
            const CMatrix k1 = rhs(x, u);
            const CMatrix k2 = rhs(x + 0.5 * h, u + 0.5 * h * k1);
            const CMatrix k3 = rhs(x + 0.5 * h, u + 0.5 * h * k2);
            const CMatrix k4 = rhs(x + h, u + h * k3);
            u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            x += h;
        }
        x = target;
        out.xs.push_back(x);
        out.u.push_back(u);
        if (!u.allFinite()) throw NumericalError("forward_solve: integration overflow");
    }
    return out;
}

WeylCheckReport weyl_check(const WeylData& W, const PotentialGrid& grid,
                           const std::vector<Complex>& lambdas, double l, double bound_factor,
                           const NumericalPolicy& pol) {
    WeylCheckReport report;
    report.bound_factor = bound_factor;
    const double M = halfplane_bound(W);
    const Eigen::Index p = W.p();

    for (Complex lambda : lambdas) {
        WeylCheckEntry entry;
        entry.lambda = lambda;
        entry.margin_ok = lambda.imag() < -M - 1.0;
        if (entry.margin_ok) {
            CMatrix stack(2 * p, p);
            stack.topRows(p) = eval_phi(W, lambda, pol);
            stack.bottomRows(p) = CMatrix::Identity(p, p);
            const ForwardSolution fs = forward_solve(grid.xs, grid.v_closed, lambda, l);
            for (std::size_t i = 0; i < fs.xs.size(); ++i) {
                const double g = (std::exp(kImag * fs.xs[i] * lambda) * (fs.u[i] * stack)).norm();
                if (i == 0) entry.g0 = g;
                entry.gmax = std::max(entry.gmax, g);
            }
            entry.ratio = entry.gmax / entry.g0;
            entry.pass = entry.gmax <= bound_factor * entry.g0;
        }
        report.entries.push_back(entry);
    }

    // Stronger bound below the first delay: there u is free, so the check
    // reduces to boundedness of [e^{2 i x lambda} phi(lambda); I] directly.
    const double d1 = W.delays.front();
    report.delay_applicable = d1 > 0.0;
    if (report.delay_applicable) {
        const double root_p = std::sqrt(static_cast<double>(p));
        for (int j = 0; j < 3; ++j) {
            const Complex probe(0.0, -(M + 1.0 + std::pow(10.0, j)));
            const CMatrix phi = eval_phi(W, probe, pol);
            for (int i = 0; i <= 32; ++i) {
                const double x = d1 * i / 32.0;
                CMatrix stack(2 * p, p);
                stack.topRows(p) = std::exp(2.0 * kImag * x * probe) * phi;
                stack.bottomRows(p) = CMatrix::Identity(p, p);
                report.delay_ratio = std::max(report.delay_ratio, stack.norm() / root_p);
            }
        }
        report.delay_pass = report.delay_ratio <= bound_factor;
    }

    report.pass = report.delay_pass &&
                  std::all_of(report.entries.begin(), report.entries.end(),
                              [](const WeylCheckEntry& e) { return e.pass; });
    return report;
}

double operator_identity_residual(const KernelModel& KM, double l, int N) {
    if (!(l > 0.0)) throw std::invalid_argument("operator_identity_residual: l must be positive");
    PanelGrid grid = make_panel_grid(KM.delays, l, N, /*duplicate_breakpoints=*/false);
    const std::size_t M = grid.nodes.size();
    const Eigen::Index p = KM.p();
    const auto blocks = kernel_blocks(KM, grid, false, default_policy());

    CMatrix S = CMatrix::Identity(p * M, p * M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            S.block(i * p, j * p, p, p) += grid.weights[j] * blocks[i * M + j];

    // A and A* as cumulative / tail trapezoid rules; their difference equals
    // the full-interval rule exactly, which makes the psi = 0 case exact.
    CMatrix A = CMatrix::Zero(p * M, p * M);
    CMatrix Astar = CMatrix::Zero(p * M, p * M);
    const CMatrix ip = CMatrix::Identity(p, p);
    for (std::size_t i = 0; i < M; ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            const double w = 0.5 * (grid.nodes[j + 1] - grid.nodes[j]) +
                             (j > 0 ? 0.5 * (grid.nodes[j] - grid.nodes[j - 1]) : 0.0);
            A.block(i * p, j * p, p, p) = kImag * w * ip;
        }
        if (i > 0) A.block(i * p, i * p, p, p) = kImag * 0.5 * (grid.nodes[i] - grid.nodes[i - 1]) * ip;
        for (std::size_t j = i + 1; j < M; ++j) {
            const double w = 0.5 * (grid.nodes[j] - grid.nodes[j - 1]) +
                             (j + 1 < M ? 0.5 * (grid.nodes[j + 1] - grid.nodes[j]) : 0.0);
            Astar.block(i * p, j * p, p, p) = -kImag * w * ip;
        }
        if (i + 1 < M)
            Astar.block(i * p, i * p, p, p) = -kImag * 0.5 * (grid.nodes[i + 1] - grid.nodes[i]) * ip;
    }

    std::vector<CMatrix> s_vals(M);
    for (std::size_t i = 0; i < M; ++i) s_vals[i] = s_of_x(KM.W, grid.nodes[i]);
    CMatrix rhs(p * M, p * M);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            rhs.block(i * p, j * p, p, p) =
                kImag * grid.weights[j] * (ip + s_vals[i] * s_vals[j].adjoint());

    return (A * S - S * Astar - rhs).norm() / S.norm();
}

double witness_decay_rate(const WeylData& W) {
    double min_im = std::numeric_limits<double>::infinity();
    for (const Complex& mu : spectrum(W.beta)) min_im = std::min(min_im, mu.imag());
    return 2.0 * std::max(0.0, -2.0 * min_im) + 1.0;
}

}  // namespace dirac_isp
