#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dirac_isp/weyl.hpp"

namespace dirac_isp {

struct NystromCheckConfig {
    bool enabled = true;
    int N = 200;
};

struct ForwardCheckConfig {
    bool enabled = true;
    std::vector<Complex> lambdas{Complex(0.0, -3.0), Complex(1.0, -4.0)};
};

struct IdentityCheckConfig {
    bool enabled = false;
    std::vector<int> Ns{50, 100, 200, 400};
};

struct RoundtripCheckConfig {
    bool enabled = true;
};

struct CheckSet {
    NystromCheckConfig nystrom;
    ForwardCheckConfig forward;
    IdentityCheckConfig identity;
    RoundtripCheckConfig roundtrip;
};

struct GridConfig {
    double l_max = 2.0;
    int points = 50;
};

/// A problem description as read from a config file: the Weyl data, the
/// recovery grid, which verifications to run, and optional tolerance
/// overrides keyed by check name.
struct ProblemConfig {
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    CMatrix beta;
    CMatrix theta1;
    CMatrix theta2;
    CMatrix R;
    std::vector<double> D;
    GridConfig grid;
    CheckSet checks;
    std::map<std::string, double> tolerances;
    std::string generator_kind;
    std::optional<std::uint64_t> generator_seed;
};

/// Parses a JSON config; complex entries are [re, im] pairs. Throws
/// ConfigError with field diagnostics.
ProblemConfig load_config(const std::filesystem::path& path);
void save_config(const ProblemConfig& cfg, const std::filesystem::path& path);

WeylData to_weyl(const ProblemConfig& cfg);

/// Admissible pseudo-exponential parameters from the documented recipe:
/// theta entries of modulus below one, Hermitian H, alpha = H + (i/2)
/// (theta1 theta1* + theta2 theta2*); draws violating the Sylvester
/// condition on beta are rejected.
PseudoExpParams random_admissible_pe(Eigen::Index n, Eigen::Index p, std::uint64_t seed);

/// Ready-to-run configs: "scalar" (the worked 1x1 example), "delayed"
/// (same with D = 0.5), "random-pe" (seeded admissible draw).
ProblemConfig generate_example(const std::string& kind, Eigen::Index n = 2, Eigen::Index p = 1,
                               std::uint64_t seed = 1);

}  // namespace dirac_isp
