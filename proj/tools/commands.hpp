#pragma once

#include "config.hpp"

namespace wsturm::cli {

/// Exit statuses of the batch front end.
enum ExitStatus : int {
    exit_ok = 0,
    exit_admissibility = 1,
    exit_solver = 2,
    exit_config = 3,
};

/// Executes the configured command and writes the output CSVs. Throws
/// wsturm errors; the caller maps them to exit statuses.
int execute(const RunConfig& config);

} // namespace wsturm::cli
