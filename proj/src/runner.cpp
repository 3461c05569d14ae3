#include "dirac_isp/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "dirac_isp/oracle.hpp"

namespace dirac_isp {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

struct Tolerances {
    double two_path = 1e-7;
    double delay_vanishing = 1e-9;
    double roundtrip = 1e-6;
    double oracle_endpoint = 0.0;  // resolved against N and l_max below
    double positivity_deficit = 1e-2;
    double forward_bound_factor = 10.0;
};

Tolerances resolve_tolerances(const ProblemConfig& cfg, int nystrom_n) {
    Tolerances tol;
    // criterion constant 5e-4 is pinned at N = 400, l = 1; scale by h^2 and
    // interval length for other runs
    tol.oracle_endpoint =
        5e-4 * (400.0 / nystrom_n) * (400.0 / nystrom_n) * std::max(1.0, cfg.grid.l_max * cfg.grid.l_max);
    if (const char* env = std::getenv("DIRAC_ISP_TOL")) {
        try {
            tol.two_path = std::stod(env);
        } catch (const std::exception&) {
            throw ConfigError("DIRAC_ISP_TOL is not a number: " + std::string(env));
        }
    }
    const auto pick = [&](const char* name, double& slot) {
        auto it = cfg.tolerances.find(name);
        if (it != cfg.tolerances.end()) slot = it->second;
    };
    pick("two_path", tol.two_path);
    pick("delay_vanishing", tol.delay_vanishing);
    pick("roundtrip", tol.roundtrip);
    pick("oracle_endpoint", tol.oracle_endpoint);
    pick("positivity_deficit", tol.positivity_deficit);
    pick("forward_bound_factor", tol.forward_bound_factor);
    return tol;
}

void write_potential_csv(const std::filesystem::path& path, const PotentialGrid& grid) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << "x";
    for (Eigen::Index i = 1; i <= grid.p; ++i)
        for (Eigen::Index j = 1; j <= grid.p; ++j)
            out << ", Re v_" << i << j << ", Im v_" << i << j;
    out << "\n";
    char buf[32];
    const auto num = [&](double value) {
        std::snprintf(buf, sizeof(buf), "%.17g", value);
        return std::string(buf);
    };
    for (std::size_t row = 0; row < grid.xs.size(); ++row) {
        out << num(grid.xs[row]);
        for (Eigen::Index i = 0; i < grid.p; ++i)
            for (Eigen::Index j = 0; j < grid.p; ++j) {
                const Complex v = grid.v_closed[row](i, j);
                out << ", " << num(v.real()) << ", " << num(v.imag());
            }
        out << "\n";
    }
}

json lambda_json(Complex z) { return json::array({z.real(), z.imag()}); }

bool check_selected(const RunOptions& opts, const std::string& name, bool config_enabled) {
    if (opts.only_checks.empty()) return config_enabled;
    return std::find(opts.only_checks.begin(), opts.only_checks.end(), name) != opts.only_checks.end();
}

}  // namespace

int run(const ProblemConfig& cfg, const RunOptions& opts) {
    const auto t_total = Clock::now();
    const NumericalPolicy& pol = default_policy();

    WeylData W = to_weyl(cfg);
    DelayStructure delays = validate(W, pol);
    const int nystrom_n = opts.nystrom_n_override.value_or(cfg.checks.nystrom.N);
    const Tolerances tol = resolve_tolerances(cfg, nystrom_n);

    json report;
    report["n"] = cfg.n;
    report["p"] = cfg.p;
    report["grid"] = {{"l_max", cfg.grid.l_max}, {"points", cfg.grid.points}};
    report["halfplane_bound_M"] = halfplane_bound(W);
    report["witness_c"] = witness_decay_rate(W);
    if (opts.seed) report["seed"] = *opts.seed;
    report["tolerances"] = {{"two_path", tol.two_path},
                            {"delay_vanishing", tol.delay_vanishing},
                            {"roundtrip", tol.roundtrip},
                            {"oracle_endpoint", tol.oracle_endpoint},
                            {"positivity_deficit", tol.positivity_deficit},
                            {"forward_bound_factor", tol.forward_bound_factor}};

    bool all_pass = true;
    bool numerical_failure = false;

    // profile with both recovery routes
    const auto t_profile = Clock::now();
    std::vector<double> xs(static_cast<std::size_t>(cfg.grid.points));
    for (std::size_t i = 0; i < xs.size(); ++i)
        xs[i] = cfg.grid.l_max * static_cast<double>(i) / (xs.size() - 1);
    PotentialGrid grid = recover_profile(W, xs, {}, pol);
    const double profile_ms = ms_since(t_profile);

    std::filesystem::create_directories(opts.out_dir);
    write_potential_csv(opts.out_dir / "potential.csv", grid);

    json flagged = json::array();
    for (std::size_t i = 0; i < grid.xs.size(); ++i)
        if (!grid.flags[i].empty()) flagged.push_back({{"x", grid.xs[i]}, {"error", grid.flags[i]}});
    if (!flagged.empty()) {
        numerical_failure = true;
        all_pass = false;
    }
    report["flagged_points"] = flagged;

    const auto t_checks = Clock::now();

    {  // two-path agreement over the grid (always on)
        double max_residual = 0.0;
        for (std::size_t i = 0; i < grid.xs.size(); ++i)
            if (grid.flags[i].empty()) max_residual = std::max(max_residual, grid.residuals[i]);
        const bool pass = flagged.empty() && max_residual <= tol.two_path;
        all_pass = all_pass && pass;
        report["checks"]["two_path"] = {{"enabled", true},
                                        {"max_residual", max_residual},
                                        {"tolerance", tol.two_path},
                                        {"pass", pass}};
    }

    {  // potential vanishes below the first delay (when there is one)
        const double d1 = W.delays.front();
        json entry = {{"applicable", d1 > 0.0}};
        if (d1 > 0.0) {
            double max_norm = 0.0;
            for (std::size_t i = 0; i < grid.xs.size(); ++i)
                if (grid.xs[i] < d1 && grid.flags[i].empty())
                    max_norm = std::max(max_norm, grid.v_closed[i].norm());
            const bool pass = max_norm <= tol.delay_vanishing;
            all_pass = all_pass && pass;
            entry["max_norm"] = max_norm;
            entry["tolerance"] = tol.delay_vanishing;
            entry["pass"] = pass;
        }
        report["checks"]["delay_vanishing"] = entry;
    }

    KernelModel KM = build_kernel_model(W, pol);

    if (check_selected(opts, "nystrom", cfg.checks.nystrom.enabled)) {
        try {
            NystromOperator NO = build_nystrom(KM, cfg.grid.l_max, nystrom_n, false, pol);
            const double min_eig = min_eigenvalue(NO);
            const double herm = hermiticity_residual(NO);
            const CMatrix v_oracle = oracle_v(KM, NO);

            FundamentalSolution FS = build_U(KM, cfg.grid.l_max * (1.0 + 1e-9) + 1e-9, pol);
            const CMatrix v_closed = recover_v_closed(KM, FS, cfg.grid.l_max, pol);
            const double endpoint_diff = (v_oracle - v_closed).norm();

            const bool positivity = min_eig >= 1.0 - tol.positivity_deficit;
            const bool pass = positivity && herm <= 1e-12 && endpoint_diff <= tol.oracle_endpoint;
            all_pass = all_pass && pass;
            report["checks"]["nystrom"] = {{"enabled", true},
                                           {"N", nystrom_n},
                                           {"min_eigenvalue", min_eig},
                                           {"positivity_pass", positivity},
                                           {"hermiticity_residual", herm},
                                           {"oracle_endpoint_diff", endpoint_diff},
                                           {"tolerance", tol.oracle_endpoint},
                                           {"pass", pass}};
        } catch (const NumericalError& err) {
            numerical_failure = true;
            all_pass = false;
            report["checks"]["nystrom"] = {{"enabled", true}, {"error", err.what()}, {"pass", false}};
        }
    } else {
        report["checks"]["nystrom"] = {{"enabled", false}};
    }

    if (check_selected(opts, "forward", cfg.checks.forward.enabled)) {
        try {
            // dense sampling: interpolation error feeds the growing mode at
            // rate e^{2 |Im lambda| x}, so the bound needs a fine grid, and
            // the jump of v at each delay must sit between an epsilon-pair
            // of nodes or its smear drowns the bound
            const int fwd_points = std::max(1001, static_cast<int>(2000.0 * cfg.grid.l_max) + 1);
            std::vector<double> fwd_xs(static_cast<std::size_t>(fwd_points));
            for (std::size_t i = 0; i < fwd_xs.size(); ++i)
                fwd_xs[i] = cfg.grid.l_max * static_cast<double>(i) / (fwd_xs.size() - 1);
            for (double d : W.delays) {
                if (d <= 0.0 || d >= cfg.grid.l_max) continue;
                const double eps = pol.breakpoint_nudge * (1.0 + d);
                fwd_xs.push_back(d - eps);
                fwd_xs.push_back(d + eps);
            }
            std::sort(fwd_xs.begin(), fwd_xs.end());
            ProfileOptions closed_only;
            closed_only.with_quadrature = false;
            PotentialGrid dense = recover_profile(W, fwd_xs, closed_only, pol);

            WeylCheckReport wc = weyl_check(W, dense, cfg.checks.forward.lambdas, cfg.grid.l_max,
                                            tol.forward_bound_factor, pol);
            all_pass = all_pass && wc.pass;
            json entries = json::array();
            for (const WeylCheckEntry& e : wc.entries)
                entries.push_back({{"lambda", lambda_json(e.lambda)},
                                   {"g0", e.g0},
                                   {"gmax", e.gmax},
                                   {"ratio", e.ratio},
                                   {"margin_ok", e.margin_ok},
                                   {"pass", e.pass}});
            report["checks"]["forward"] = {{"enabled", true},
                                           {"bound_factor", wc.bound_factor},
                                           {"entries", entries},
                                           {"delay_check",
                                            {{"applicable", wc.delay_applicable},
                                             {"ratio", wc.delay_ratio},
                                             {"pass", wc.delay_pass}}},
                                           {"pass", wc.pass}};
        } catch (const NumericalError& err) {
            numerical_failure = true;
            all_pass = false;
            report["checks"]["forward"] = {{"enabled", true}, {"error", err.what()}, {"pass", false}};
        }
    } else {
        report["checks"]["forward"] = {{"enabled", false}};
    }

    if (check_selected(opts, "identity", cfg.checks.identity.enabled)) {
        json residuals = json::array();
        bool monotone = true;
        double prev = std::numeric_limits<double>::infinity();
        for (int N : cfg.checks.identity.Ns) {
            const double r = operator_identity_residual(KM, cfg.grid.l_max, N);
            residuals.push_back({{"N", N}, {"residual", r}});
            monotone = monotone && r < prev;
            prev = r;
        }
        all_pass = all_pass && monotone;
        report["checks"]["identity"] = {
            {"enabled", true}, {"residuals", residuals}, {"monotone_decreasing", monotone}, {"pass", monotone}};
    } else {
        report["checks"]["identity"] = {{"enabled", false}};
    }

    if (check_selected(opts, "roundtrip", cfg.checks.roundtrip.enabled)) {
        const bool delays_zero = std::all_of(W.delays.begin(), W.delays.end(), [](double d) { return d == 0.0; });
        const CMatrix v23_lhs = W.beta - W.beta.adjoint();
        const CMatrix v23_rhs =
            kImag * (W.theta1 * W.theta1.adjoint() - W.theta2 * W.theta2.adjoint());
        const bool identity_ok = (v23_lhs - v23_rhs).norm() <= 1e-10 * (1.0 + v23_rhs.norm());
        const bool applicable = delays_zero && identity_ok;
        json entry = {{"enabled", true}, {"applicable", applicable}};
        if (applicable) {
            PseudoExpParams P;
            P.alpha = W.beta + kImag * W.theta2 * W.theta2.adjoint();
            P.theta1 = W.theta1;
            P.theta2 = W.theta2;
            const auto expected = pe_potential_grid(P, grid.xs, pol);
            double scale = 1.0;
            for (const CMatrix& v : expected) scale = std::max(scale, v.norm());
            double max_diff = 0.0;
            for (std::size_t i = 0; i < grid.xs.size(); ++i)
                if (grid.flags[i].empty())
                    max_diff = std::max(max_diff, (grid.v_closed[i] - expected[i]).norm());
            const bool pass = max_diff <= tol.roundtrip * scale;
            all_pass = all_pass && pass;
            entry["max_diff"] = max_diff;
            entry["scale"] = scale;
            entry["tolerance"] = tol.roundtrip;
            entry["pass"] = pass;
        }
        report["checks"]["roundtrip"] = entry;
    } else {
        report["checks"]["roundtrip"] = {{"enabled", false}};
    }

    report["timings_ms"] = {{"profile", profile_ms},
                            {"checks", ms_since(t_checks)},
                            {"total", ms_since(t_total)}};
    report["pass"] = all_pass;

    std::ofstream out(opts.out_dir / "report.json");
    if (!out) throw ConfigError("cannot write " + (opts.out_dir / "report.json").string());
    out << report.dump(2) << "\n";

    if (opts.verbose) std::cout << report.dump(2) << "\n";
    if (numerical_failure) return 3;
    return all_pass ? 0 : 1;
}

}  // namespace dirac_isp
