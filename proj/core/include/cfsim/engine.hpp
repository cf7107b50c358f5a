#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/estimation.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/receivers.hpp"

namespace cfsim {

// Exact uplink SINR of UE k for a given receiver and true channels:
//   |v^H h_k|^2 / (1/snr + sum over transmitting j != k of |v^H h_j|^2).
// Outage UEs transmit nothing and are excluded from the interference
// sum.  Returns 0 for a degenerate receiver.
double exact_sinr(const GlobalReceiver& v, const ChannelState& channel,
                  const AssociationGraph& graph, double snr, int k);

// Sample mean of log2(1 + sinr) (or natural log when nats = true).
double ergodic_rate(const std::vector<double>& sinr_samples, bool nats = false);

// Pilot-overhead-scaled rate: (1 - tau_p/T) * rate.
double spectral_efficiency(double rate, int tau_p, int coherence_block);

// Outcome of all fading draws on one layout for one scheme/CSI pair.
struct TrialResult {
  Eigen::MatrixXd sinr;      // K x num_fading_draws (0 for outage/degenerate)
  Eigen::VectorXd rate;      // K, per-UE ergodic rate
  Eigen::VectorXd se;        // K, per-UE spectral efficiency
  std::vector<char> outage;  // K, 1 for UEs in outage (their rows are 0)
  double sum_se = 0.0;       // sum of se over all UEs
  int outage_count = 0;
};

// One (scheme, CSI) pair to evaluate.
struct SchemeCsi {
  ReceiverScheme scheme;
  CsiMode csi = CsiMode::IDEAL;
};

// Runs every fading draw of layout `layout_index` once and evaluates all
// requested scheme/CSI pairs on the shared draws: geometry, association
// and channels are computed once, estimates once per CSI mode.  Results
// are index-aligned with `combos`.  Throws std::runtime_error if any
// aggregate turns out non-finite.
std::vector<TrialResult> run_layout_combos(const SystemParams& params,
                                           const std::vector<SchemeCsi>& combos,
                                           int layout_index);

// Same, but on a caller-supplied layout instead of a generated one
// (fixed-geometry studies and tests).
std::vector<TrialResult> run_layout_combos_on(const Layout& layout,
                                              const SystemParams& params,
                                              const std::vector<SchemeCsi>& combos,
                                              int layout_index);

// Single-combination convenience wrapper around run_layout_combos.
TrialResult run_layout(const SystemParams& params, ReceiverScheme scheme,
                       CsiMode csi, int layout_index);

// Swept scenario parameter.  None runs the scenario as-is (single point).
enum class SweepAxis { None, TauP, Q, Delta, K };

const char* sweep_axis_name(SweepAxis axis);  // "none"|"tau_p"|"q"|"delta"|"k"
SweepAxis sweep_axis_from_name(const std::string& s);

// Returns a copy of `params` with the axis set to `value` (counts are
// rounded from the double).  Throws std::invalid_argument if the value
// is invalid for the axis (e.g. tau_p > T).
SystemParams apply_axis(const SystemParams& params, SweepAxis axis, double value);

// Aggregate of one sweep point for one scheme/CSI pair.
struct PointRecord {
  double axis_value = 0.0;
  ReceiverScheme scheme;
  CsiMode csi = CsiMode::IDEAL;
  double mean_sum_se = 0.0;    // mean over layouts of per-layout sum SE
  std::vector<double> ue_se;   // pooled per-UE SE, layout-major
  std::vector<int> ue_id;      // UE index of each pooled sample
  long outage_total = 0;
  int num_layouts = 0;
  int num_ue = 0;
  int num_fading_draws = 0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::None;
  std::vector<double> values;
  std::vector<PointRecord> points;  // value-major, then combo order

  const PointRecord& point(int value_index, int combo_index, int num_combos) const {
    return points[static_cast<std::size_t>(value_index) * num_combos + combo_index];
  }
};

// For each axis value, runs params.num_layouts independent layouts
// (work split across `threads`; 0 picks the hardware count) and
// aggregates every scheme/CSI pair.  Layout seeds depend only on the
// master seed and the layout index, so sweep points are paired sample
// by sample.  Validates all axis values before running anything.
SweepResult run_sweep(const SystemParams& params, SweepAxis axis,
                      const std::vector<double>& values,
                      const std::vector<SchemeCsi>& combos, int threads = 1);

}  // namespace cfsim
