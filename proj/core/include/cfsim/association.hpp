#pragma once

#include <vector>

#include <Eigen/Dense>

#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// Bipartite serving graph between RRHs and UEs: clusters C_k, served
// sets U_l, per-UE pilot indices and leaders.  A UE that finds no RRH
// with both a free pilot and an adequate LSFC is in outage (empty
// cluster, no pilot, no leader).
struct AssociationGraph {
  std::vector<int> leader;                // K; RRH index, -1 if outage
  std::vector<int> pilot;                 // K; pilot index, -1 if outage
  std::vector<std::vector<int>> cluster;  // K; C_k, RRH indices ascending
  std::vector<std::vector<int>> served;   // L; U_l, UE indices ascending
  std::vector<char> outage;               // K; 1 if in outage
  std::vector<int> ue_order;              // processing permutation used

  bool is_outage(int k) const { return outage[static_cast<std::size_t>(k)] != 0; }
  int num_outage() const;
};

// QoS floor on the LSFC: an edge (l, k) is admissible iff
// beta_{l,k} >= eta / (M * SNR).
double qos_beta_floor(const SystemParams& params, double snr);

// Greedy leader election.  UEs are processed in a random permutation
// drawn from `stream`; each UE picks the admissible RRH with the largest
// LSFC among those with a free pilot, and takes the globally least-used
// pilot among those free at that RRH (ties toward the lower index).
// Clusters are initialized to {leader}.
AssociationGraph elect_leaders(const LsfcMatrix& lsfc, const SystemParams& params,
                               double snr, RngStream& stream);

// Cluster formation on top of elected leaders.  Enrollment proceeds in
// rounds: per round, every UE (visited in the same permutation as the
// election) claims its next RRH by decreasing LSFC for which (i) its
// pilot is unused at the RRH, (ii) the edge passes the QoS floor, and
// (iii) |C_k| < Q.  The round-robin keeps contended pilot slots evenly
// shared among co-pilot UEs.  LSFC ties break toward the lower RRH
// index.
void form_clusters(AssociationGraph& graph, const LsfcMatrix& lsfc,
                   const SystemParams& params, double snr);

// elect_leaders followed by form_clusters.
AssociationGraph form_association(const LsfcMatrix& lsfc, const SystemParams& params,
                                  double snr, RngStream& stream);

// Per-edge M x 1 vectors laid out as the serving graph: entry [l][i]
// belongs to edge (l, graph.served[l][i]).  Used both for channel
// estimates and for ideal per-edge CSI.
using EdgeVectors = std::vector<std::vector<Eigen::VectorXcd>>;

// Cluster-local view of the (estimated or ideal) partial CSI for UE k:
// row blocks are the RRHs of C_k, columns the UEs of U(C_k) = union of
// U_l over l in C_k, with zero blocks where (l, j) is not an edge.
struct ClusterView {
  Eigen::MatrixXcd Hbar;      // |C_k|*M x |U(C_k)|
  std::vector<int> rrhs;      // C_k, ascending (row-block order)
  std::vector<int> ues;       // U(C_k), ascending (column order)
  int k_col = -1;             // column of UE k
};

// Throws std::invalid_argument for an outage UE.
ClusterView partial_csi_view(const AssociationGraph& graph, const EdgeVectors& h,
                             int k, int M);

// Validates every structural invariant of the graph (bipartite
// consistency, |C_k| <= Q, |U_l| <= tau_p, per-RRH pilot uniqueness,
// QoS floor on every edge, leader membership, outage consistency).
// Throws std::logic_error describing the first violation.
void check_graph_invariants(const AssociationGraph& graph, const LsfcMatrix& lsfc,
                            const SystemParams& params, double snr);

}  // namespace cfsim
