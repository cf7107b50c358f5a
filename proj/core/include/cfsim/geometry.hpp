#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/params.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

// RRH and UE placements on the square torus [0, side)^2.
struct Layout {
  std::vector<Position> rrh_positions;  // L entries
  std::vector<Position> ue_positions;   // K entries
};

// L x K matrix of large-scale fading coefficients (linear scale).
struct LsfcMatrix {
  Eigen::MatrixXd beta;
};

// Shortest wrapped Euclidean distance on the torus.  Symmetric, at most
// side/sqrt(2).  Throws std::invalid_argument on non-finite input.
double torus_distance(const Position& p, const Position& q, double side);

// Angle in [0, 2pi) of the shortest-wrap displacement from `from` to
// `to`.  Coincident points (after wrapping) are a degenerate case: the
// function returns 0 and sets *degenerate when a flag is supplied.
double torus_direction(const Position& from, const Position& to, double side,
                       bool* degenerate = nullptr);

// Distances below this are clamped before evaluating the pathloss so
// that co-located nodes keep a finite gain.
inline constexpr double kMinPathlossDistance = 10.0;

// Urban-microcell NLOS pathloss fit, PL_dB(d) = -30.5 - 36.7*log10(d/1m),
// evaluated at the given distance without clamping.
double pathloss_db(double d_meters);

// Large-scale fading coefficient beta = 10^(PL_dB(max(d, d_min))/10).
// Monotone non-increasing in d; strictly positive and finite.
double lsfc(double d_meters);

// SNR such that beta(3*d_L) * M * SNR = 1 with d_L = 2*sqrt(A/(pi*L)):
// a UE at three nominal RRH radii gets unit average received SNR over
// the M antennas.
double calibrate_snr(const SystemParams& params);

// params.snr if positive, otherwise calibrate_snr(params).
double resolved_snr(const SystemParams& params);

// L + K positions i.i.d. uniform on [0, side)^2.  RRH and UE coordinates
// come from separate streams derived from `layout_key`, so changing K
// leaves the RRH placement untouched and extends the UE list by a prefix
// property (the first min(K1, K2) UEs agree).
Layout generate_layout(const SystemParams& params, std::uint64_t layout_key);

// beta[l][k] = lsfc(torus_distance(rrh_l, ue_k)).
LsfcMatrix compute_lsfc_matrix(const Layout& layout, const SystemParams& params);

}  // namespace cfsim
