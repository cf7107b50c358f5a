#include "cfsim/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cfsim {

namespace {

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) {
    throw std::invalid_argument(std::string(field) + ": " + why);
  }
}

}  // namespace

void validate(const SystemParams& p) {
  require(std::isfinite(p.area_side) && p.area_side > 0.0, "area_side", "must be > 0");
  require(p.num_rrh >= 1, "num_rrh", "must be >= 1");
  require(p.num_ue >= 1, "num_ue", "must be >= 1");
  require(p.antennas_per_rrh >= 1, "antennas_per_rrh", "must be >= 1");
  require(p.pilot_dim >= 1, "pilot_dim", "must be >= 1");
  require(p.coherence_block >= 1, "coherence_block", "must be >= 1");
  require(p.pilot_dim <= p.coherence_block, "pilot_dim",
          "must be <= coherence_block (" + std::to_string(p.coherence_block) + ")");
  require(std::isfinite(p.angular_spread) && p.angular_spread > 0.0 &&
              p.angular_spread <= 2.0 * std::numbers::pi,
          "angular_spread", "must lie in (0, 2*pi]");
  require(std::isfinite(p.qos_threshold) && p.qos_threshold >= 0.0, "qos_threshold",
          "must be >= 0");
  require(p.max_cluster_size >= 1, "max_cluster_size", "must be >= 1");
  require(std::isfinite(p.snr) && p.snr >= 0.0, "snr",
          "must be >= 0 (0 selects calibration)");
  require(p.num_layouts >= 1, "num_layouts", "must be >= 1");
  require(p.num_fading_draws >= 1, "num_fading_draws", "must be >= 1");
  require(!p.shadowing, "shadowing", "not implemented; must be false");
  require(std::isfinite(p.pilot_noise_scale) && p.pilot_noise_scale >= 0.0,
          "pilot_noise_scale", "must be >= 0");
}

}  // namespace cfsim
