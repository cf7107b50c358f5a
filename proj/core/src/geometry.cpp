#include "cfsim/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cfsim {

namespace {

// Wraps |x1 - x2| to the shorter way around the circle of length side.
double wrap_abs(double x1, double x2, double side) {
  const double d = std::abs(x1 - x2);
  return std::min(d, side - d);
}

// Signed shortest-wrap displacement from x1 to x2 in (-side/2, side/2].
double wrap_delta(double x1, double x2, double side) {
  double d = x2 - x1;
  if (d > side / 2.0) d -= side;
  if (d <= -side / 2.0) d += side;
  return d;
}

}  // namespace

double torus_distance(const Position& p, const Position& q, double side) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(q.x) ||
      !std::isfinite(q.y) || !std::isfinite(side) || side <= 0.0) {
    throw std::invalid_argument("torus_distance: non-finite input");
  }
  const double dx = wrap_abs(p.x, q.x, side);
  const double dy = wrap_abs(p.y, q.y, side);
  return std::hypot(dx, dy);
}

double torus_direction(const Position& from, const Position& to, double side,
                       bool* degenerate) {
  const double dx = wrap_delta(from.x, to.x, side);
  const double dy = wrap_delta(from.y, to.y, side);
  if (degenerate != nullptr) {
    *degenerate = (dx == 0.0 && dy == 0.0);
  }
  if (dx == 0.0 && dy == 0.0) {
    return 0.0;
  }
  double angle = std::atan2(dy, dx);
  if (angle < 0.0) {
    angle += 2.0 * std::numbers::pi;
  }
  // atan2(-0.0, positive) style corner cases can still round to 2*pi.
  if (angle >= 2.0 * std::numbers::pi) {
    angle = 0.0;
  }
  return angle;
}

double pathloss_db(double d_meters) {
  return -30.5 - 36.7 * std::log10(d_meters);
}

double lsfc(double d_meters) {
  const double d = std::max(d_meters, kMinPathlossDistance);
  return std::pow(10.0, pathloss_db(d) / 10.0);
}

double calibrate_snr(const SystemParams& params) {
  const double area = params.area_side * params.area_side;
  const double d_l = 2.0 * std::sqrt(area / (std::numbers::pi * params.num_rrh));
  return 1.0 / (params.antennas_per_rrh * lsfc(3.0 * d_l));
}

double resolved_snr(const SystemParams& params) {
  return params.snr > 0.0 ? params.snr : calibrate_snr(params);
}

Layout generate_layout(const SystemParams& params, std::uint64_t layout_key) {
  RngStream rrh_stream(derive_stream(layout_key, {stream_tag::kRrhPositions}));
  RngStream ue_stream(derive_stream(layout_key, {stream_tag::kUePositions}));

  Layout layout;
  layout.rrh_positions.reserve(static_cast<std::size_t>(params.num_rrh));
  for (int l = 0; l < params.num_rrh; ++l) {
    const double x = rrh_stream.uniform() * params.area_side;
    const double y = rrh_stream.uniform() * params.area_side;
    layout.rrh_positions.push_back({x, y});
  }
  layout.ue_positions.reserve(static_cast<std::size_t>(params.num_ue));
  for (int k = 0; k < params.num_ue; ++k) {
    const double x = ue_stream.uniform() * params.area_side;
    const double y = ue_stream.uniform() * params.area_side;
    layout.ue_positions.push_back({x, y});
  }
  return layout;
}

LsfcMatrix compute_lsfc_matrix(const Layout& layout, const SystemParams& params) {
  const int num_rrh = static_cast<int>(layout.rrh_positions.size());
  const int num_ue = static_cast<int>(layout.ue_positions.size());
  LsfcMatrix m;
  m.beta.resize(num_rrh, num_ue);
  for (int l = 0; l < num_rrh; ++l) {
    for (int k = 0; k < num_ue; ++k) {
      const double d =
          torus_distance(layout.rrh_positions[static_cast<std::size_t>(l)],
                         layout.ue_positions[static_cast<std::size_t>(k)], params.area_side);
      m.beta(l, k) = lsfc(d);
    }
  }
  return m;
}

}  // namespace cfsim
