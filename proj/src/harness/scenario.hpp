#pragma once

#include <string>
#include <vector>

#include "harness/config.hpp"

namespace dualdec::harness {

/// Outcome of one scenario execution: the files written (in emission order),
/// a human-readable status line, and the process exit code (nonzero when an
/// emitted metric exceeds its certified envelope).
struct ScenarioResult {
  int exit_code = 0;
  std::vector<std::string> files;
  std::string message;
};

/// Executes a configured scenario end to end: builds the preset problem,
/// runs the selected algorithm for every sweep value (in parallel), measures
/// each run against the reference solution, checks every metric against its
/// envelope, and emits per-run trace/metrics/bounds CSVs plus one summary
/// JSON and one SVG plot.
ScenarioResult run_scenario(const RunConfig& cfg);

}  // namespace dualdec::harness
