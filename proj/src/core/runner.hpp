#pragma once
#include <string>

#include "core/config.hpp"
#include "core/report.hpp"

namespace stochham {

struct RunResult {
    bool pass = false;
    json report;             // contents of the written report/metadata JSON
    std::string report_path; // where it was written
};

// Command drivers. Each creates the output directory, runs the work (replica
// loops on a fixed-size worker pool when `threads` != 1), writes the
// documented artifacts, and returns the report with its pass flag. Domain
// aborts discard the replica; more than 0.1% discards fails the run.
RunResult run_simulate(const RunConfig& rc, int threads);
RunResult run_verify_clt(const RunConfig& rc, int threads);
RunResult run_levy_check(const RunConfig& rc);
RunResult run_period_table(const RunConfig& rc);

RunResult run_command(Command cmd, const RunConfig& rc, int threads);

} // namespace stochham
