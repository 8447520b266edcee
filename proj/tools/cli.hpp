#ifndef SAFEFILTER_TOOLS_CLI_HPP_
#define SAFEFILTER_TOOLS_CLI_HPP_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "safefilter/io.hpp"
#include "safefilter/sim.hpp"

namespace safefilter::cli {

enum ExitCode : int { kOk = 0, kSafetyFailure = 1, kUsage = 2 };

struct RunReport
{
  std::string name;
  std::string hash;
  ScenarioSpec spec;
  TrajectoryLog log;
  Metrics metrics;
  std::filesystem::path csv;
  std::filesystem::path svg;
};

struct RunOptions
{
  std::optional<ControllerKind> controller;
  std::vector<std::string> overrides;
  std::optional<double> dt;
  std::optional<unsigned long long> seed;
};

/// Loads a scenario and applies controller, --set, --dt and --seed in that order.
ScenarioSpec prepare(const std::filesystem::path & scenario, const RunOptions & opts);

/// Runs one spec and computes its metrics. No files are written.
RunReport execute(const ScenarioSpec & spec);

/// Runs every spec on at most `workers` threads; results keep input order.
std::vector<RunReport> execute_all(const std::vector<ScenarioSpec> & specs, unsigned workers = 0);

/// One-line metrics summary.
std::string summary(const RunReport & r);

/// Default output directory: $SAFEFILTER_OUT if set, else "out".
std::filesystem::path default_out_dir();

/// Entry point shared by the executable and the tests.
int main(int argc, const char * const * argv, std::ostream & out, std::ostream & err);

}  // namespace safefilter::cli

#endif  // SAFEFILTER_TOOLS_CLI_HPP_
