#include "cfsim/estimation.hpp"

#include <stdexcept>

namespace cfsim {

const char* csi_mode_name(CsiMode mode) {
  switch (mode) {
    case CsiMode::IDEAL: return "ideal";
    case CsiMode::PM: return "pm";
    case CsiMode::SP: return "sp";
  }
  return "?";
}

CsiMode csi_mode_from_name(const std::string& s) {
  if (s == "ideal") return CsiMode::IDEAL;
  if (s == "pm") return CsiMode::PM;
  if (s == "sp") return CsiMode::SP;
  throw std::invalid_argument("unknown CSI mode: " + s);
}

Eigen::MatrixXcd pilot_book(int tau_p, double snr) {
  return std::sqrt(tau_p * snr) *
         Eigen::MatrixXcd::Identity(tau_p, tau_p);
}

Eigen::MatrixXcd pilot_field_mean(const ChannelState& channel,
                                  const AssociationGraph& graph,
                                  const Eigen::MatrixXcd& book, int l) {
  const int M = channel.subspace->M;
  const int K = channel.subspace->K;
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(M, book.cols());
  for (int i = 0; i < K; ++i) {
    if (graph.is_outage(i)) continue;  // outage UEs transmit nothing
    const int t = graph.pilot[static_cast<std::size_t>(i)];
    y += channel.block(l, i) * book.col(t).adjoint();
  }
  return y;
}

Eigen::MatrixXcd received_pilot_field(const ChannelState& channel,
                                      const AssociationGraph& graph,
                                      const Eigen::MatrixXcd& book, int l,
                                      RngStream& noise_stream, double noise_scale) {
  Eigen::MatrixXcd y = pilot_field_mean(channel, graph, book, l);
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index r = 0; r < y.rows(); ++r) {
      y(r, c) += noise_scale * noise_stream.cnormal();
    }
  }
  return y;
}

Eigen::VectorXcd pm_estimate(const Eigen::MatrixXcd& Y, const Eigen::VectorXcd& phi_t,
                             double snr, int tau_p) {
  return Y * phi_t / (tau_p * snr);
}

Eigen::VectorXcd sp_estimate(const Eigen::VectorXcd& h_pm, const Eigen::MatrixXcd& basis) {
  return basis * (basis.adjoint() * h_pm);
}

Eigen::MatrixXcd contamination_covariance(const AssociationGraph& graph,
                                          const LsfcMatrix& lsfc,
                                          const SubspaceInfo& subspace, int l, int k) {
  const int M = subspace.M;
  const int K = subspace.K;
  const Eigen::MatrixXcd& f_k = subspace.basis(l, k);
  Eigen::MatrixXcd cov = Eigen::MatrixXcd::Zero(M, M);
  for (int i = 0; i < K; ++i) {
    if (i == k || graph.is_outage(i)) continue;
    if (graph.pilot[static_cast<std::size_t>(i)] != graph.pilot[static_cast<std::size_t>(k)]) {
      continue;
    }
    const Eigen::MatrixXcd& f_i = subspace.basis(l, i);
    const Eigen::MatrixXcd cross = f_k.adjoint() * f_i;  // |S_k| x |S_i|
    const double weight = lsfc.beta(l, i) * M / static_cast<double>(f_i.cols());
    cov += weight * (f_k * (cross * cross.adjoint()) * f_k.adjoint());
  }
  return cov;
}

EstimateSet make_ideal_estimates(const ChannelState& channel, const AssociationGraph& graph) {
  EstimateSet set;
  set.mode = CsiMode::IDEAL;
  set.h_hat.resize(graph.served.size());
  for (std::size_t l = 0; l < graph.served.size(); ++l) {
    set.h_hat[l].reserve(graph.served[l].size());
    for (int k : graph.served[l]) {
      set.h_hat[l].push_back(channel.block(static_cast<int>(l), k));
    }
  }
  return set;
}

EstimateSet estimate_edges(CsiMode mode, const ChannelState& channel,
                           const AssociationGraph& graph, const SystemParams& params,
                           double snr, std::uint64_t pilot_key) {
  if (mode == CsiMode::IDEAL) {
    return make_ideal_estimates(channel, graph);
  }
  const int L = channel.subspace->L;
  const Eigen::MatrixXcd book = pilot_book(params.pilot_dim, snr);

  EstimateSet set;
  set.mode = mode;
  set.h_hat.resize(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    RngStream noise(derive_stream(pilot_key, {static_cast<std::uint64_t>(l)}));
    const Eigen::MatrixXcd y =
        received_pilot_field(channel, graph, book, l, noise, params.pilot_noise_scale);
    auto& edges = set.h_hat[static_cast<std::size_t>(l)];
    edges.reserve(graph.served[static_cast<std::size_t>(l)].size());
    for (int k : graph.served[static_cast<std::size_t>(l)]) {
      const int t = graph.pilot[static_cast<std::size_t>(k)];
      Eigen::VectorXcd h_pm = pm_estimate(y, book.col(t), snr, params.pilot_dim);
      if (mode == CsiMode::SP) {
        edges.push_back(sp_estimate(h_pm, channel.subspace->basis(l, k)));
      } else {
        edges.push_back(std::move(h_pm));
      }
    }
  }
  return set;
}

}  // namespace cfsim
