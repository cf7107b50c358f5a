#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfsim/association.hpp"
#include "cfsim/estimation.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"

namespace cfsim {

enum class Detector { GZF, LocalMRC, LocalLMMSE };
enum class Combiner { EGC, Optimal };

// A receive-processing variant.  The combiner applies to the local
// detectors only; GZF is a cluster-global design and ignores it.
struct ReceiverScheme {
  Detector detector = Detector::GZF;
  Combiner combiner = Combiner::Optimal;

  bool operator==(const ReceiverScheme&) const = default;
};

// Canonical names: "gzf", "mrc_egc", "mrc_opt", "lmmse_egc", "lmmse_opt".
std::string scheme_name(ReceiverScheme scheme);
ReceiverScheme scheme_from_name(const std::string& s);  // throws std::invalid_argument
const std::vector<ReceiverScheme>& all_schemes();

// Numerical rank: count of singular values above tol_rel times the
// largest (values sorted descending; all-zero spectrum has rank 0).
int rank_truncation(const Eigen::VectorXd& singular_values, double tol_rel = 1e-10);

// Relative threshold below which the projected desired channel counts
// as degenerate (desired channel inside the interference span).
inline constexpr double kGzfDegenerateTol = 1e-10;

// Cluster-global zero-forcing vector for the UE at view.k_col: project
// its channel onto the orthogonal complement of the span of the other
// view columns (numerical rank via tol_rel) and normalize.  Returns the
// |C_k|*M stacked vector; sets *degenerate instead of normalizing when
// ||P h|| <= kGzfDegenerateTol * ||h||.
Eigen::VectorXcd gzf_receiver(const ClusterView& view, double tol_rel = 1e-10,
                              bool* degenerate = nullptr);

// Equivalent per-component variance of noise plus unknown interference
// at RRH l: sigma^2 = 1 + snr * sum of beta_{l,j} over transmitting UEs
// j not served by l.
double unknown_interference_variance(const LsfcMatrix& lsfc, const AssociationGraph& graph,
                                     int l, double snr);

// Local matched filter: v = h_hat.
Eigen::VectorXcd mrc_local(const Eigen::VectorXcd& h_hat);

// Local LMMSE: v = (sigma^2 I + snr * sum_j h_j h_j^H)^{-1} h_k, with
// the sum over the channels in `served_estimates` and k_index selecting
// the desired one.  Solved via Cholesky; always well-posed for
// sigma^2 > 0.
Eigen::VectorXcd lmmse_local(const std::vector<Eigen::VectorXcd>& served_estimates,
                             double sigma_sq, double snr, int k_index);

// Everything the cluster-level combining step needs for UE k.
struct CombinerState {
  std::vector<int> rrhs;         // C_k, ascending
  std::vector<int> interferers;  // U(C_k) \ {k}, ascending
  Eigen::VectorXcd a;            // |C_k|; a(l) = v_{l,k}^H h_hat_{l,k}
  Eigen::MatrixXcd G;            // |C_k| x |interferers|; zero where no edge
  Eigen::VectorXd d;             // |C_k|; sigma_l^2 * ||v_{l,k}||^2
  Eigen::MatrixXcd gamma;        // diag(d) + snr * G G^H
  Eigen::VectorXd sigma_sq;      // |C_k|; per-RRH sigma_l^2
  Eigen::VectorXd v_norm_sq;     // |C_k|; ||v_{l,k}||^2
};

// Builds the combining statistics from the local vectors (aligned with
// C_k ascending) and the per-edge CSI.
CombinerState combiner_state(const std::vector<Eigen::VectorXcd>& local_v,
                             const EstimateSet& estimates, const AssociationGraph& graph,
                             const LsfcMatrix& lsfc, double snr, int k);

// All-ones weights.
Eigen::VectorXcd egc_weights(int cluster_size);

// w = gamma^{-1} a, the maximizer of the nominal SINR.  Rows with zero
// local-vector norm are dropped from the solve and get weight 0.
Eigen::VectorXcd optimal_weights(const CombinerState& state);

// Nominal cluster SINR snr * |w^H a|^2 / (w^H gamma w).
double nominal_sinr(const Eigen::VectorXcd& w, const CombinerState& state, double snr);

// Block-sparse global receive vector: unit-norm |C_k|*M stack over the
// cluster RRHs, zero elsewhere.
struct GlobalReceiver {
  std::vector<int> rrhs;     // C_k, ascending
  Eigen::VectorXcd blocks;   // |C_k|*M stacked
  bool ok = false;           // false: degenerate; draw scores rate 0
};

// Stacks w(l) * v_l over the cluster and normalizes.  All-zero stacks
// are degenerate.
GlobalReceiver assemble_global(const std::vector<Eigen::VectorXcd>& local_v,
                               const Eigen::VectorXcd& w, const std::vector<int>& cluster);

// Dense LM x 1 expansion (test/diagnostic aid).
Eigen::VectorXcd to_dense(const GlobalReceiver& v, int L, int M);

// Per-UE receivers for one fading draw.  Outage UEs get ok = false.
struct ReceiverBank {
  std::vector<GlobalReceiver> v;  // K entries
};

ReceiverBank compute_receiver_bank(ReceiverScheme scheme, const EstimateSet& estimates,
                                   const AssociationGraph& graph, const LsfcMatrix& lsfc,
                                   const SystemParams& params, double snr);

}  // namespace cfsim
