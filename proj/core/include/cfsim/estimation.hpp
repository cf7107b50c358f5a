#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/params.hpp"
#include "cfsim/rng.hpp"

namespace cfsim {

// How the receivers learn the partial CSI.
//  IDEAL: exact per-edge channels.
//  PM:    pilot-matching estimates (correlation against the UE's pilot).
//  SP:    PM followed by projection onto the edge's known subspace.
enum class CsiMode { IDEAL, PM, SP };

const char* csi_mode_name(CsiMode mode);          // "ideal" | "pm" | "sp"
CsiMode csi_mode_from_name(const std::string& s);  // throws std::invalid_argument

// tau_p x tau_p pilot book with column t = sqrt(tau_p * snr) * e_t:
// orthogonal pilots of total energy tau_p * snr each.
Eigen::MatrixXcd pilot_book(int tau_p, double snr);

// Noiseless pilot observation at RRH l: sum over all non-outage UEs i of
// h_{l,i} * phi_{t(i)}^H.  Every transmitting UE contributes, served or
// not; outage UEs transmit nothing.
Eigen::MatrixXcd pilot_field_mean(const ChannelState& channel,
                                  const AssociationGraph& graph,
                                  const Eigen::MatrixXcd& book, int l);

// pilot_field_mean plus i.i.d. CN(0, 1) noise scaled by noise_scale.
Eigen::MatrixXcd received_pilot_field(const ChannelState& channel,
                                      const AssociationGraph& graph,
                                      const Eigen::MatrixXcd& book, int l,
                                      RngStream& noise_stream, double noise_scale = 1.0);

// Pilot-matching estimate from the received field: h_hat = Y*phi_t/(tau_p*snr)
// = h + sum of co-pilot channels + noise with per-component variance
// 1/(tau_p*snr).
Eigen::VectorXcd pm_estimate(const Eigen::MatrixXcd& Y, const Eigen::VectorXcd& phi_t,
                             double snr, int tau_p);

// Subspace projection of a PM estimate: F * (F^H * h_pm).  Idempotent,
// non-expansive, output in span(F).
Eigen::VectorXcd sp_estimate(const Eigen::VectorXcd& h_pm, const Eigen::MatrixXcd& basis);

// Covariance of the co-pilot contamination that survives the subspace
// projection at edge (l, k):
//   sum over i sharing k's pilot of (beta_{l,i}*M/|S_{l,i}|) *
//     F_k (F_k^H F_i)(F_i^H F_k) F_k^H.
// Hermitian PSD; exactly zero when all co-pilot supports are disjoint
// from S_{l,k}.
Eigen::MatrixXcd contamination_covariance(const AssociationGraph& graph,
                                          const LsfcMatrix& lsfc,
                                          const SubspaceInfo& subspace, int l, int k);

// Per-edge CSI as seen by the receivers.
struct EstimateSet {
  CsiMode mode = CsiMode::IDEAL;
  EdgeVectors h_hat;  // aligned with graph.served
};

// Exact per-edge copies of the true channels.
EstimateSet make_ideal_estimates(const ChannelState& channel, const AssociationGraph& graph);

// Runs the pilot phase and estimates every edge of the graph.  The
// pilot noise at RRH l comes from a stream derived from `pilot_key` and
// l, so PM and SP runs over the same trial share the identical pilot
// realization.  IDEAL ignores `pilot_key`.
EstimateSet estimate_edges(CsiMode mode, const ChannelState& channel,
                           const AssociationGraph& graph, const SystemParams& params,
                           double snr, std::uint64_t pilot_key);

}  // namespace cfsim
