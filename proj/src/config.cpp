#include "dirac_isp/config.hpp"

#include <fstream>
#include <random>

#include <json.hpp>

namespace dirac_isp {

namespace {

using nlohmann::json;

Complex parse_complex(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError("config field '" + where + "': complex entries must be [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

CMatrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& where) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw ConfigError("config field '" + where + "': expected " + std::to_string(rows) + " rows");
    CMatrix A(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError("config field '" + where + "' row " + std::to_string(i) + ": expected " +
                              std::to_string(cols) + " columns");
        for (Eigen::Index k = 0; k < cols; ++k)
            A(i, k) = parse_complex(row[static_cast<std::size_t>(k)],
                                    where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return A;
}

json dump_matrix(const CMatrix& A) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < A.cols(); ++k)
            row.push_back(json::array({A(i, k).real(), A(i, k).imag()}));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& err) {
        throw ConfigError("config parse error in " + path.string() + ": " + err.what());
    }

    try {
        ProblemConfig cfg;
        cfg.n = j.at("n").get<Eigen::Index>();
        cfg.p = j.at("p").get<Eigen::Index>();
        if (cfg.n < 1 || cfg.p < 1) throw ConfigError("config fields 'n', 'p' must be positive");
        cfg.beta = parse_matrix(j.at("beta"), cfg.n, cfg.n, "beta");
        cfg.theta1 = parse_matrix(j.at("theta1"), cfg.n, cfg.p, "theta1");
        cfg.theta2 = parse_matrix(j.at("theta2"), cfg.n, cfg.p, "theta2");
        cfg.R = parse_matrix(j.at("R"), cfg.p, cfg.p, "R");
        cfg.D = j.at("D").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(cfg.D.size()) != cfg.p)
            throw ConfigError("config field 'D': expected " + std::to_string(cfg.p) + " entries");

        const json& grid = j.at("grid");
        cfg.grid.l_max = grid.at("l_max").get<double>();
        cfg.grid.points = grid.at("points").get<int>();
        if (!(cfg.grid.l_max > 0.0)) throw ConfigError("config field 'grid.l_max' must be positive");
        if (cfg.grid.points < 2) throw ConfigError("config field 'grid.points' must be at least 2");

        if (j.contains("checks")) {
            const json& checks = j.at("checks");
            if (checks.contains("nystrom")) {
                cfg.checks.nystrom.enabled = checks.at("nystrom").value("enabled", true);
                cfg.checks.nystrom.N = checks.at("nystrom").value("N", 200);
            }
            if (checks.contains("forward")) {
                cfg.checks.forward.enabled = checks.at("forward").value("enabled", true);
                if (checks.at("forward").contains("lambda")) {
                    cfg.checks.forward.lambdas.clear();
                    for (const json& entry : checks.at("forward").at("lambda"))
                        cfg.checks.forward.lambdas.push_back(parse_complex(entry, "checks.forward.lambda"));
                }
            }
            if (checks.contains("identity")) {
                cfg.checks.identity.enabled = checks.at("identity").value("enabled", false);
                if (checks.at("identity").contains("N"))
                    cfg.checks.identity.Ns = checks.at("identity").at("N").get<std::vector<int>>();
            }
            if (checks.contains("roundtrip"))
                cfg.checks.roundtrip.enabled = checks.at("roundtrip").value("enabled", true);
        }
        if (j.contains("tolerances"))
            cfg.tolerances = j.at("tolerances").get<std::map<std::string, double>>();
        if (j.contains("generator")) {
            cfg.generator_kind = j.at("generator").value("kind", "");
            if (j.at("generator").contains("seed"))
                cfg.generator_seed = j.at("generator").at("seed").get<std::uint64_t>();
        }
        return cfg;
    } catch (const json::exception& err) {
        throw ConfigError("config error in " + path.string() + ": " + err.what());
    }
}

void save_config(const ProblemConfig& cfg, const std::filesystem::path& path) {
    json j;
    j["n"] = cfg.n;
    j["p"] = cfg.p;
    j["beta"] = dump_matrix(cfg.beta);
    j["theta1"] = dump_matrix(cfg.theta1);
    j["theta2"] = dump_matrix(cfg.theta2);
    j["R"] = dump_matrix(cfg.R);
    j["D"] = cfg.D;
    j["grid"] = {{"l_max", cfg.grid.l_max}, {"points", cfg.grid.points}};
    json lambdas = json::array();
    for (Complex lambda : cfg.checks.forward.lambdas)
        lambdas.push_back(json::array({lambda.real(), lambda.imag()}));
    j["checks"] = {
        {"nystrom", {{"enabled", cfg.checks.nystrom.enabled}, {"N", cfg.checks.nystrom.N}}},
        {"forward", {{"enabled", cfg.checks.forward.enabled}, {"lambda", lambdas}}},
        {"identity", {{"enabled", cfg.checks.identity.enabled}, {"N", cfg.checks.identity.Ns}}},
        {"roundtrip", {{"enabled", cfg.checks.roundtrip.enabled}}},
    };
    if (!cfg.tolerances.empty()) j["tolerances"] = cfg.tolerances;
    if (!cfg.generator_kind.empty()) {
        j["generator"]["kind"] = cfg.generator_kind;
        if (cfg.generator_seed) j["generator"]["seed"] = *cfg.generator_seed;
    }

    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file " + path.string());
    out << j.dump(2) << "\n";
}

WeylData to_weyl(const ProblemConfig& cfg) {
    WeylData W;
    W.beta = cfg.beta;
    W.theta1 = cfg.theta1;
    W.theta2 = cfg.theta2;
    W.delays = cfg.D;
    W.R = cfg.R;
    return W;
}

PseudoExpParams random_admissible_pe(Eigen::Index n, Eigen::Index p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-0.6, 0.6);
    const auto draw = [&](Eigen::Index rows, Eigen::Index cols) {
        CMatrix A(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index k = 0; k < cols; ++k) A(i, k) = Complex(dist(rng), dist(rng));
        return A;
    };

    for (int attempt = 0; attempt < 256; ++attempt) {
        PseudoExpParams P;
        P.theta1 = draw(n, p);
        P.theta2 = draw(n, p);
        const CMatrix G = draw(n, n);
        P.alpha = 0.5 * (G + G.adjoint()) +
                  Complex(0.0, 0.5) * (P.theta1 * P.theta1.adjoint() + P.theta2 * P.theta2.adjoint());
        try {
            pe_to_weyl(P);
            return P;
        } catch (const SpectraOverlap&) {
            // resample
        }
    }
    throw NumericalError("random_admissible_pe: no admissible draw after 256 attempts");
}

ProblemConfig generate_example(const std::string& kind, Eigen::Index n, Eigen::Index p,
                               std::uint64_t seed) {
    ProblemConfig cfg;
    if (kind == "scalar" || kind == "delayed") {
        cfg.n = 1;
        cfg.p = 1;
        cfg.beta = CMatrix::Constant(1, 1, Complex(0.0, 1.5));
        cfg.theta1 = CMatrix::Constant(1, 1, 2.0);
        cfg.theta2 = CMatrix::Constant(1, 1, 1.0);
        cfg.R = CMatrix::Identity(1, 1);
        cfg.D = {kind == "delayed" ? 0.5 : 0.0};
        cfg.checks.identity.enabled = true;
        cfg.checks.roundtrip.enabled = kind == "scalar";  // delay factor leaves the PE class
        cfg.generator_kind = kind;
        return cfg;
    }
    if (kind == "random-pe") {
        PseudoExpParams P = random_admissible_pe(n, p, seed);
        WeylData W = pe_to_weyl(P);
        cfg.n = n;
        cfg.p = p;
        cfg.beta = W.beta;
        cfg.theta1 = W.theta1;
        cfg.theta2 = W.theta2;
        cfg.R = W.R;
        cfg.D = W.delays;
        cfg.generator_kind = kind;
        cfg.generator_seed = seed;
        return cfg;
    }
    throw ConfigError("generate_example: unknown kind '" + kind + "' (expected scalar, delayed, random-pe)");
}

}  // namespace dirac_isp
