#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dirac_isp/config.hpp"

namespace dirac_isp {

struct RunOptions {
    std::filesystem::path out_dir = ".";
    std::vector<std::string> only_checks;  // when nonempty, run exactly these
    std::optional<int> nystrom_n_override;
    std::optional<std::uint64_t> seed;  // recorded in the report
    bool verbose = false;
};

/// Executes the batch pipeline: validate, recover the profile on the grid,
/// write potential.csv and report.json under out_dir. Returns the process
/// exit code: 0 when every enabled check passed, 3 when a numerical failure
/// was flagged (validation failures throw before any artifact is written).
int run(const ProblemConfig& cfg, const RunOptions& opts);

}  // namespace dirac_isp
