#pragma once

#include <string>
#include <vector>

#include "cfsim/config.hpp"
#include "cfsim/engine.hpp"

namespace cfsim {

// Raised when the output location cannot be written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CdfPoint {
  double value = 0.0;       // sorted non-decreasing across a CDF
  double percentile = 0.0;  // empirical, in (0, 1]
  int ue_id = 0;            // UE index the sample came from
};

// Empirical CDF of the pooled per-UE samples of one sweep point:
// samples sorted ascending (ties broken by UE id, then sample order),
// percentile (i+1)/n.
std::vector<CdfPoint> empirical_cdf(const PointRecord& point);

// Creates the directory (if needed) and verifies it is writable by
// round-tripping a probe file.  Throws IoError on failure.  Called
// before any computation starts.
void preflight_output_dir(const std::string& dir);

// Fixed-format decimal representation used in all tabular output
// ("%.12g"), so identical runs emit identical bytes.
std::string format_number(double x);

// Writes the sweep into `dir`:
//   summary.json          metadata (config echo, seed, version) and
//                         per-point aggregate records
//   cdf_<point>_<scheme>_<csi>.csv
//                         one file per sweep point and combo with the
//                         columns  ue_id, scheme, csi_mode, sweep_axis,
//                         sweep_value, se_bps_hz, percentile
// Formats: "json" controls the summary, "csv" the CDF tables.  Output
// contains no timestamps; reruns of the same config are byte-identical.
// Returns the paths written.
std::vector<std::string> emit_results(const SweepResult& sweep, const RunConfig& config,
                                      const std::string& dir);

}  // namespace cfsim
