#pragma once

// Pipeline orchestration and report emission.

#include "hgraph/config.hpp"

#include <iosfwd>
#include <string>

namespace hgraph {

enum ExitCode : int { kExitOk = 0, kExitInvalid = 2, kExitTaskFailed = 3 };

/// Executes config.tasks in order, writing reports into config.output_dir.
/// Diagnostics go to `log`. Returns one of the exit codes above.
int run(const RunConfig& config, std::ostream& log);

/// Extends values given on the config's grid from the nodes of a mask file.
/// `mask_path` holds one 0/1 entry per node; `values_path` is a CSV whose last
/// column is the value, one row per node in grid order (an optional header is
/// skipped). L = 0 uses the measured constant on E.
int run_extend_files(const RunConfig& config, const std::string& mask_path, const std::string& values_path, double L,
                     std::ostream& log);

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

}  // namespace hgraph
