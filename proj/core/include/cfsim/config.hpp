#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "cfsim/engine.hpp"
#include "cfsim/estimation.hpp"
#include "cfsim/params.hpp"
#include "cfsim/receivers.hpp"

namespace cfsim {

// Raised for unknown keys, type mismatches and invariant violations;
// the message names the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A fully described experiment: scenario constants plus what to run and
// where to put the results.
struct RunConfig {
  SystemParams params;
  std::vector<ReceiverScheme> schemes = {{Detector::GZF, Combiner::Optimal}};
  std::vector<CsiMode> csi_modes = {CsiMode::IDEAL};
  SweepAxis sweep_axis = SweepAxis::None;
  std::vector<double> sweep_values;  // ignored for SweepAxis::None
  std::string output_dir = "out";
  std::vector<std::string> output_formats = {"csv", "json"};
  int threads = 1;

  bool operator==(const RunConfig&) const = default;

  std::vector<SchemeCsi> combos() const;
};

// All defaults (reference scenario, GZF + ideal CSI, no sweep).
RunConfig default_config();

// Parses a JSON config and applies "dotted.key=value" overrides on top.
// Empty text means "all defaults".  Unknown key, wrong type or any
// invariant violation throws ConfigError naming the key.  List-valued
// overrides take comma-separated values.
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});

// Canonical JSON serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

// Reads the file and delegates to parse_config.  Missing file throws
// ConfigError.
RunConfig load_config(const std::string& path,
                      const std::vector<std::string>& overrides = {});

}  // namespace cfsim
