// cli_runner.hpp — command dispatch shared by the CLI binary and tests
#pragma once

#include <string>
#include <vector>

namespace kerrsim::cli {

struct RunConfig {
    std::string command;       // derive, sweep-rsb, sweep-bsb, regime-map, phase-map, fit, validate
    std::string config_path;
    std::string out_dir = ".";
    int workers = 0;           // 0 = KERRSIM_WORKERS env or hardware concurrency
    unsigned long long seed = 0;
    std::vector<std::pair<std::string, std::string>> overrides;
};

// Exit status: 0 success, 2 config error, 3 numerical failure.
// Errors are reported as machine-readable JSON on stderr.
int run(const RunConfig& config);

} // namespace kerrsim::cli
