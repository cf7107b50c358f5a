#include "cfsim/receivers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Householder>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace cfsim {

namespace {

// Index of UE k inside the sorted served set of RRH l; -1 if absent.
int edge_index(const AssociationGraph& graph, int l, int k) {
  const auto& served = graph.served[static_cast<std::size_t>(l)];
  const auto it = std::lower_bound(served.begin(), served.end(), k);
  if (it == served.end() || *it != k) return -1;
  return static_cast<int>(it - served.begin());
}

// Orthonormal basis of the numerical column span of A.  Tall matrices go
// through a thin QR first so the SVD runs on a cols x cols triangle; the
// singular values and the span are those of A itself.
Eigen::MatrixXcd column_span_basis(const Eigen::MatrixXcd& a, double tol_rel) {
  if (a.cols() == 0) return Eigen::MatrixXcd(a.rows(), 0);
  if (a.rows() >= a.cols()) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd thin_q = Eigen::MatrixXcd::Identity(a.rows(), a.cols());
    thin_q = qr.householderQ() * thin_q;
    const Eigen::MatrixXcd r =
        qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(r, Eigen::ComputeThinU);
    const int rank = rank_truncation(svd.singularValues(), tol_rel);
    return thin_q * svd.matrixU().leftCols(rank);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU);
  const int rank = rank_truncation(svd.singularValues(), tol_rel);
  return svd.matrixU().leftCols(rank);
}

}  // namespace

std::string scheme_name(ReceiverScheme scheme) {
  switch (scheme.detector) {
    case Detector::GZF:
      return "gzf";
    case Detector::LocalMRC:
      return scheme.combiner == Combiner::EGC ? "mrc_egc" : "mrc_opt";
    case Detector::LocalLMMSE:
      return scheme.combiner == Combiner::EGC ? "lmmse_egc" : "lmmse_opt";
  }
  return "?";
}

ReceiverScheme scheme_from_name(const std::string& s) {
  if (s == "gzf") return {Detector::GZF, Combiner::Optimal};
  if (s == "mrc_egc") return {Detector::LocalMRC, Combiner::EGC};
  if (s == "mrc_opt") return {Detector::LocalMRC, Combiner::Optimal};
  if (s == "lmmse_egc") return {Detector::LocalLMMSE, Combiner::EGC};
  if (s == "lmmse_opt") return {Detector::LocalLMMSE, Combiner::Optimal};
  throw std::invalid_argument("unknown scheme: " + s);
}

const std::vector<ReceiverScheme>& all_schemes() {
  static const std::vector<ReceiverScheme> schemes = {
      {Detector::GZF, Combiner::Optimal},
      {Detector::LocalMRC, Combiner::EGC},
      {Detector::LocalMRC, Combiner::Optimal},
      {Detector::LocalLMMSE, Combiner::EGC},
      {Detector::LocalLMMSE, Combiner::Optimal},
  };
  return schemes;
}

int rank_truncation(const Eigen::VectorXd& singular_values, double tol_rel) {
  if (singular_values.size() == 0) return 0;
  const double max = singular_values(0);
  if (!(max > 0.0)) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < singular_values.size(); ++i) {
    if (singular_values(i) > tol_rel * max) ++rank;
  }
  return rank;
}

Eigen::VectorXcd gzf_receiver(const ClusterView& view, double tol_rel, bool* degenerate) {
  if (degenerate != nullptr) *degenerate = false;
  const Eigen::Index n = view.Hbar.cols();
  const Eigen::VectorXcd h = view.Hbar.col(view.k_col);

  Eigen::MatrixXcd interference(view.Hbar.rows(), n - 1);
  interference.leftCols(view.k_col) = view.Hbar.leftCols(view.k_col);
  interference.rightCols(n - 1 - view.k_col) = view.Hbar.rightCols(n - 1 - view.k_col);

  Eigen::VectorXcd p = h;
  if (interference.cols() > 0) {
    const Eigen::MatrixXcd basis = column_span_basis(interference, tol_rel);
    // Two projection passes keep the residual orthogonal to the span
    // even when h is nearly inside it.
    p -= basis * (basis.adjoint() * p);
    p -= basis * (basis.adjoint() * p);
  }

  const double h_norm = h.norm();
  const double p_norm = p.norm();
  if (!(p_norm > kGzfDegenerateTol * h_norm) || h_norm == 0.0) {
    if (degenerate != nullptr) *degenerate = true;
    return Eigen::VectorXcd::Zero(view.Hbar.rows());
  }
  return p / p_norm;
}

double unknown_interference_variance(const LsfcMatrix& lsfc, const AssociationGraph& graph,
                                     int l, double snr) {
  const int num_ue = static_cast<int>(lsfc.beta.cols());
  const auto& served = graph.served[static_cast<std::size_t>(l)];
  double sum = 0.0;
  for (int j = 0; j < num_ue; ++j) {
    if (graph.is_outage(j)) continue;
    if (std::binary_search(served.begin(), served.end(), j)) continue;
    sum += lsfc.beta(l, j);
  }
  return 1.0 + snr * sum;
}

Eigen::VectorXcd mrc_local(const Eigen::VectorXcd& h_hat) { return h_hat; }

Eigen::VectorXcd lmmse_local(const std::vector<Eigen::VectorXcd>& served_estimates,
                             double sigma_sq, double snr, int k_index) {
  if (served_estimates.empty()) {
    throw std::invalid_argument("lmmse_local: empty served set");
  }
  const Eigen::Index m = served_estimates.front().size();
  Eigen::MatrixXcd a = sigma_sq * Eigen::MatrixXcd::Identity(m, m);
  for (const auto& h : served_estimates) {
    a.selfadjointView<Eigen::Lower>().rankUpdate(h, snr);
  }
  return Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower>(a).solve(
      served_estimates[static_cast<std::size_t>(k_index)]);
}

CombinerState combiner_state(const std::vector<Eigen::VectorXcd>& local_v,
                             const EstimateSet& estimates, const AssociationGraph& graph,
                             const LsfcMatrix& lsfc, double snr, int k) {
  CombinerState state;
  state.rrhs = graph.cluster[static_cast<std::size_t>(k)];
  const int c = static_cast<int>(state.rrhs.size());
  if (static_cast<int>(local_v.size()) != c) {
    throw std::invalid_argument("combiner_state: local vectors misaligned with cluster");
  }

  for (int l : state.rrhs) {
    for (int j : graph.served[static_cast<std::size_t>(l)]) {
      if (j != k) state.interferers.push_back(j);
    }
  }
  std::sort(state.interferers.begin(), state.interferers.end());
  state.interferers.erase(std::unique(state.interferers.begin(), state.interferers.end()),
                          state.interferers.end());

  state.a.resize(c);
  state.G = Eigen::MatrixXcd::Zero(c, static_cast<Eigen::Index>(state.interferers.size()));
  state.d.resize(c);
  state.sigma_sq.resize(c);
  state.v_norm_sq.resize(c);

  for (int r = 0; r < c; ++r) {
    const int l = state.rrhs[static_cast<std::size_t>(r)];
    const auto& v = local_v[static_cast<std::size_t>(r)];
    const auto& edges = estimates.h_hat[static_cast<std::size_t>(l)];

    state.a(r) = v.dot(edges[static_cast<std::size_t>(edge_index(graph, l, k))]);
    for (std::size_t i = 0; i < graph.served[static_cast<std::size_t>(l)].size(); ++i) {
      const int j = graph.served[static_cast<std::size_t>(l)][i];
      if (j == k) continue;
      const auto col = std::lower_bound(state.interferers.begin(), state.interferers.end(), j);
      state.G(r, static_cast<Eigen::Index>(col - state.interferers.begin())) =
          v.dot(edges[i]);
    }
    state.sigma_sq(r) = unknown_interference_variance(lsfc, graph, l, snr);
    state.v_norm_sq(r) = v.squaredNorm();
    state.d(r) = state.sigma_sq(r) * state.v_norm_sq(r);
  }

  state.gamma = state.d.asDiagonal().toDenseMatrix().cast<std::complex<double>>() +
                snr * (state.G * state.G.adjoint());
  return state;
}

Eigen::VectorXcd egc_weights(int cluster_size) {
  return Eigen::VectorXcd::Ones(cluster_size);
}

Eigen::VectorXcd optimal_weights(const CombinerState& state) {
  const Eigen::Index c = state.a.size();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index r = 0; r < c; ++r) {
    if (state.v_norm_sq(r) > 0.0) keep.push_back(r);
  }
  Eigen::VectorXcd w = Eigen::VectorXcd::Zero(c);
  if (keep.empty()) return w;

  Eigen::MatrixXcd gamma(static_cast<Eigen::Index>(keep.size()),
                         static_cast<Eigen::Index>(keep.size()));
  Eigen::VectorXcd a(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    a(static_cast<Eigen::Index>(i)) = state.a(keep[i]);
    for (std::size_t j = 0; j < keep.size(); ++j) {
      gamma(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          state.gamma(keep[i], keep[j]);
    }
  }
  const Eigen::VectorXcd w_kept = Eigen::LLT<Eigen::MatrixXcd>(gamma).solve(a);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    w(keep[i]) = w_kept(static_cast<Eigen::Index>(i));
  }
  return w;
}

double nominal_sinr(const Eigen::VectorXcd& w, const CombinerState& state, double snr) {
  const std::complex<double> signal = w.dot(state.a);  // w^H a
  const double denom = std::real(w.dot(state.gamma * w));
  if (!(denom > 0.0)) return 0.0;
  return snr * std::norm(signal) / denom;
}

GlobalReceiver assemble_global(const std::vector<Eigen::VectorXcd>& local_v,
                               const Eigen::VectorXcd& w, const std::vector<int>& cluster) {
  GlobalReceiver out;
  out.rrhs = cluster;
  if (local_v.empty() || static_cast<Eigen::Index>(local_v.size()) != w.size()) {
    throw std::invalid_argument("assemble_global: weight/vector mismatch");
  }
  const Eigen::Index m = local_v.front().size();
  out.blocks.resize(static_cast<Eigen::Index>(local_v.size()) * m);
  for (std::size_t r = 0; r < local_v.size(); ++r) {
    out.blocks.segment(static_cast<Eigen::Index>(r) * m, m) =
        w(static_cast<Eigen::Index>(r)) * local_v[r];
  }
  const double norm = out.blocks.norm();
  if (norm > 0.0 && std::isfinite(norm)) {
    out.blocks /= norm;
    out.ok = true;
  } else {
    out.blocks.setZero();
    out.ok = false;
  }
  return out;
}

Eigen::VectorXcd to_dense(const GlobalReceiver& v, int L, int M) {
  Eigen::VectorXcd dense = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(L) * M);
  for (std::size_t r = 0; r < v.rrhs.size(); ++r) {
    dense.segment(static_cast<Eigen::Index>(v.rrhs[r]) * M, M) =
        v.blocks.segment(static_cast<Eigen::Index>(r) * M, M);
  }
  return dense;
}

ReceiverBank compute_receiver_bank(ReceiverScheme scheme, const EstimateSet& estimates,
                                   const AssociationGraph& graph, const LsfcMatrix& lsfc,
                                   const SystemParams& params, double snr) {
  const int num_rrh = static_cast<int>(graph.served.size());
  const int num_ue = static_cast<int>(graph.cluster.size());
  ReceiverBank bank;
  bank.v.resize(static_cast<std::size_t>(num_ue));

  if (scheme.detector == Detector::GZF) {
    for (int k = 0; k < num_ue; ++k) {
      if (graph.is_outage(k)) continue;
      const ClusterView view =
          partial_csi_view(graph, estimates.h_hat, k, params.antennas_per_rrh);
      bool degenerate = false;
      Eigen::VectorXcd v = gzf_receiver(view, 1e-10, &degenerate);
      auto& slot = bank.v[static_cast<std::size_t>(k)];
      slot.rrhs = view.rrhs;
      slot.blocks = std::move(v);
      slot.ok = !degenerate;
    }
    return bank;
  }

  // Local detectors: one pass per RRH computes every v_{l,k} it serves
  // (the LMMSE system matrix is shared across the served UEs), then a
  // per-UE pass combines across the cluster.
  EdgeVectors local_v(static_cast<std::size_t>(num_rrh));
  for (int l = 0; l < num_rrh; ++l) {
    const auto& edges = estimates.h_hat[static_cast<std::size_t>(l)];
    auto& out = local_v[static_cast<std::size_t>(l)];
    out.reserve(edges.size());
    if (scheme.detector == Detector::LocalMRC) {
      for (const auto& h : edges) out.push_back(mrc_local(h));
      continue;
    }
    if (edges.empty()) continue;
    const double sigma_sq = unknown_interference_variance(lsfc, graph, l, snr);
    const Eigen::Index m = edges.front().size();
    Eigen::MatrixXcd a = sigma_sq * Eigen::MatrixXcd::Identity(m, m);
    for (const auto& h : edges) {
      a.selfadjointView<Eigen::Lower>().rankUpdate(h, snr);
    }
    Eigen::LLT<Eigen::MatrixXcd, Eigen::Lower> llt(a);
    for (const auto& h : edges) out.push_back(llt.solve(h));
  }

  for (int k = 0; k < num_ue; ++k) {
    if (graph.is_outage(k)) continue;
    const auto& cluster = graph.cluster[static_cast<std::size_t>(k)];
    std::vector<Eigen::VectorXcd> cluster_v;
    cluster_v.reserve(cluster.size());
    for (int l : cluster) {
      cluster_v.push_back(local_v[static_cast<std::size_t>(l)]
                                 [static_cast<std::size_t>(edge_index(graph, l, k))]);
    }
    const CombinerState state = combiner_state(cluster_v, estimates, graph, lsfc, snr, k);
    const Eigen::VectorXcd w = scheme.combiner == Combiner::EGC
                                   ? egc_weights(static_cast<int>(cluster.size()))
                                   : optimal_weights(state);
    bank.v[static_cast<std::size_t>(k)] = assemble_global(cluster_v, w, cluster);
  }
  return bank;
}

}  // namespace cfsim
