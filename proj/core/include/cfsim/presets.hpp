#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cfsim/config.hpp"

namespace cfsim {

// One qualitative claim checked by a figure preset.
struct ClaimResult {
  std::string name;
  bool passed = false;
  std::string detail;  // the numbers behind the verdict
};

struct FigureOutcome {
  std::string figure;
  std::string scale;
  std::vector<std::string> files;   // everything written, manifest last
  std::vector<ClaimResult> claims;
  bool all_passed = false;
};

// Raised when a full-scale preset exceeds the runtime budget and
// `force` is not set.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Options for reproduce_figure.
struct FigureOptions {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the preset master seed
  bool force = false;                 // run full scale even over budget
  double budget_seconds = 300.0;      // crude-estimate refusal threshold
  int threads = 1;
};

// Deterministic rough cost estimate (seconds on one core) used for the
// budget refusal; depends only on the config.
double estimated_runtime_seconds(const RunConfig& config);

// Runs a named figure preset ("fig2".."fig5") at "desk" or "full" scale
// and writes plot-ready data plus manifest.json recording pass/fail for
// each qualitative claim.  Desk scale shrinks the scenario to
// L=20, K=40, M=32, tau_p=10 with 10 layouts; full scale runs the
// reference scenario and is refused via BudgetError when the estimated
// runtime exceeds the budget, unless forced.
//   fig2  per-UE SE CDFs for 6 scheme/CSI combinations, plus a cluster
//         size sweep
//   fig3  angular spread sweep (SP degradation with wider spread)
//   fig4  UE count sweep
//   fig5  pilot dimension sweep (overhead/estimation tradeoff)
FigureOutcome reproduce_figure(const std::string& name, const std::string& scale,
                               const FigureOptions& options = {});

// The exact configurations a preset runs, in run order (fig2 has two
// parts: the CDF snapshot and the cluster-size sweep).  Exposed for
// tests and inspection.
std::vector<RunConfig> figure_configs(const std::string& name, const std::string& scale);

}  // namespace cfsim
