#pragma once

// Command-line pipelines: verify, solve, audit, bench.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sigma2::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
    std::string command;
    std::string json_path;
    std::string out_dir = ".";
    std::uint64_t seed = 0;
    std::string suite = "all";
    std::optional<int> n;
    int samples = 1000;
    std::string phi_path;
    double A = 13.0;
    double eps = 0.08;
};

/// One named property check of a verification suite.
struct Check {
    std::string suite;
    std::string name;
    bool passed;
    double worst;      // worst observed value of the checked quantity
    double threshold;  // the bound it was compared against
};

/// Run the pipeline; writes artifacts and manifest.json under cfg.out_dir.
int dispatch(const RunConfig& cfg);

/// Parse argv, then dispatch. Usage errors print help and return kExitUsage.
int main(int argc, char** argv);

} // namespace sigma2::cli
