#pragma once

#include <string>
#include <vector>

#include "sigma2/cli.hpp"

namespace sigma2::cli {

inline const std::vector<std::string> kSuites = {"symfun", "concavity", "perturb",
                                                 "geometry", "solver", "audit"};

/// Runs one suite (or "all"), writing its CSV tables into out_dir and
/// appending the written file names to `outputs`.
std::vector<Check> run_suite(const std::string& suite, const RunConfig& cfg,
                             std::vector<std::string>& outputs);

} // namespace sigma2::cli
