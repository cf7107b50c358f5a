#include "cfsim/association.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cfsim {

namespace {

// Pilot occupancy per RRH, indexed [l][t].
using PilotTable = std::vector<std::vector<char>>;

bool pilot_free(const PilotTable& used, int l, int t) {
  return used[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] == 0;
}

void mark_pilot(PilotTable& used, int l, int t) {
  used[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)] = 1;
}

// RRH indices sorted by decreasing beta for UE k; ties toward the lower
// RRH index (stable sort on a descending key).
std::vector<int> rrhs_by_beta(const Eigen::MatrixXd& beta, int k) {
  std::vector<int> order(static_cast<std::size_t>(beta.rows()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return beta(a, k) > beta(b, k); });
  return order;
}

PilotTable rebuild_pilot_table(const AssociationGraph& graph, int num_rrh, int tau_p) {
  PilotTable used(static_cast<std::size_t>(num_rrh),
                  std::vector<char>(static_cast<std::size_t>(tau_p), 0));
  for (std::size_t k = 0; k < graph.cluster.size(); ++k) {
    if (graph.outage[k]) continue;
    for (int l : graph.cluster[k]) {
      mark_pilot(used, l, graph.pilot[k]);
    }
  }
  return used;
}

}  // namespace

int AssociationGraph::num_outage() const {
  int n = 0;
  for (char o : outage) n += (o != 0);
  return n;
}

double qos_beta_floor(const SystemParams& params, double snr) {
  return params.qos_threshold / (params.antennas_per_rrh * snr);
}

AssociationGraph elect_leaders(const LsfcMatrix& lsfc, const SystemParams& params,
                               double snr, RngStream& stream) {
  const int num_rrh = static_cast<int>(lsfc.beta.rows());
  const int num_ue = static_cast<int>(lsfc.beta.cols());
  const double floor = qos_beta_floor(params, snr);

  AssociationGraph graph;
  graph.leader.assign(static_cast<std::size_t>(num_ue), -1);
  graph.pilot.assign(static_cast<std::size_t>(num_ue), -1);
  graph.cluster.resize(static_cast<std::size_t>(num_ue));
  graph.served.resize(static_cast<std::size_t>(num_rrh));
  graph.outage.assign(static_cast<std::size_t>(num_ue), 1);
  graph.ue_order = stream.permutation(num_ue);

  PilotTable used(static_cast<std::size_t>(num_rrh),
                  std::vector<char>(static_cast<std::size_t>(params.pilot_dim), 0));
  std::vector<int> pilot_load(static_cast<std::size_t>(params.pilot_dim), 0);

  for (int k : graph.ue_order) {
    // Best admissible RRH that still has a free pilot; ties on beta go
    // to the lower RRH index.
    int best = -1;
    for (int l = 0; l < num_rrh; ++l) {
      if (lsfc.beta(l, k) < floor) continue;
      bool has_free = false;
      for (int t = 0; t < params.pilot_dim && !has_free; ++t) {
        has_free = pilot_free(used, l, t);
      }
      if (!has_free) continue;
      if (best < 0 || lsfc.beta(l, k) > lsfc.beta(best, k)) {
        best = l;
      }
    }
    if (best < 0) continue;  // outage: no admissible RRH with a free pilot

    // Least-used pilot (globally) among those free at the leader, ties
    // toward the lower index.  Balancing keeps the co-pilot groups near
    // K/tau_p; always draining the lowest index instead would funnel
    // most UEs onto a handful of pilots and choke cluster formation
    // system-wide.
    int pilot = -1;
    for (int t = 0; t < params.pilot_dim; ++t) {
      if (!pilot_free(used, best, t)) continue;
      if (pilot < 0 || pilot_load[static_cast<std::size_t>(t)] <
                           pilot_load[static_cast<std::size_t>(pilot)]) {
        pilot = t;
      }
    }
    pilot_load[static_cast<std::size_t>(pilot)]++;
    mark_pilot(used, best, pilot);
    graph.leader[static_cast<std::size_t>(k)] = best;
    graph.pilot[static_cast<std::size_t>(k)] = pilot;
    graph.outage[static_cast<std::size_t>(k)] = 0;
    graph.cluster[static_cast<std::size_t>(k)].push_back(best);
    graph.served[static_cast<std::size_t>(best)].push_back(k);
  }
  return graph;
}

void form_clusters(AssociationGraph& graph, const LsfcMatrix& lsfc,
                   const SystemParams& params, double snr) {
  const int num_rrh = static_cast<int>(lsfc.beta.rows());
  const int num_ue = static_cast<int>(lsfc.beta.cols());
  if (static_cast<int>(graph.cluster.size()) != num_ue ||
      static_cast<int>(graph.served.size()) != num_rrh ||
      static_cast<int>(graph.ue_order.size()) != num_ue) {
    throw std::logic_error("form_clusters: inconsistent partial graph");
  }
  const double floor = qos_beta_floor(params, snr);
  PilotTable used = rebuild_pilot_table(graph, num_rrh, params.pilot_dim);

  // Round-robin enrollment: UEs take turns (in the leader-election
  // order), each claiming its next-best RRH by decreasing beta per
  // round.  This spreads contended pilot slots evenly across the UEs
  // sharing a pilot instead of letting the first UE lock up to Q RRHs
  // before anyone else picks.  Pilot occupancy only ever grows, so a
  // persistent cursor per UE never needs to revisit a rejected RRH.
  std::vector<std::vector<int>> pref(static_cast<std::size_t>(num_ue));
  std::vector<std::size_t> cursor(static_cast<std::size_t>(num_ue), 0);
  for (int k = 0; k < num_ue; ++k) {
    if (!graph.is_outage(k)) pref[static_cast<std::size_t>(k)] = rrhs_by_beta(lsfc.beta, k);
  }

  bool enrolled = true;
  while (enrolled) {
    enrolled = false;
    for (int k : graph.ue_order) {
      if (graph.is_outage(k)) continue;
      auto& cluster = graph.cluster[static_cast<std::size_t>(k)];
      if (static_cast<int>(cluster.size()) >= params.max_cluster_size) continue;
      const int pilot = graph.pilot[static_cast<std::size_t>(k)];
      const auto& list = pref[static_cast<std::size_t>(k)];
      auto& pos = cursor[static_cast<std::size_t>(k)];
      while (pos < list.size()) {
        const int l = list[pos];
        ++pos;
        if (lsfc.beta(l, k) < floor) {
          pos = list.size();  // the list is beta-descending; nothing further qualifies
          break;
        }
        if (l == graph.leader[static_cast<std::size_t>(k)]) continue;
        if (!pilot_free(used, l, pilot)) continue;
        mark_pilot(used, l, pilot);
        cluster.push_back(l);
        graph.served[static_cast<std::size_t>(l)].push_back(k);
        enrolled = true;
        break;  // one enrollment per UE per round
      }
    }
  }

  for (auto& cluster : graph.cluster) std::sort(cluster.begin(), cluster.end());
  for (auto& served : graph.served) std::sort(served.begin(), served.end());
}

AssociationGraph form_association(const LsfcMatrix& lsfc, const SystemParams& params,
                                  double snr, RngStream& stream) {
  AssociationGraph graph = elect_leaders(lsfc, params, snr, stream);
  form_clusters(graph, lsfc, params, snr);
  return graph;
}

ClusterView partial_csi_view(const AssociationGraph& graph, const EdgeVectors& h,
                             int k, int M) {
  if (graph.is_outage(k)) {
    throw std::invalid_argument("partial_csi_view: UE " + std::to_string(k) +
                                " is in outage");
  }
  ClusterView view;
  view.rrhs = graph.cluster[static_cast<std::size_t>(k)];

  // U(C_k): union of the served sets over the cluster, ascending.
  for (int l : view.rrhs) {
    view.ues.insert(view.ues.end(), graph.served[static_cast<std::size_t>(l)].begin(),
                    graph.served[static_cast<std::size_t>(l)].end());
  }
  std::sort(view.ues.begin(), view.ues.end());
  view.ues.erase(std::unique(view.ues.begin(), view.ues.end()), view.ues.end());

  const auto rows = static_cast<Eigen::Index>(view.rrhs.size()) * M;
  view.Hbar = Eigen::MatrixXcd::Zero(rows, static_cast<Eigen::Index>(view.ues.size()));
  for (std::size_t r = 0; r < view.rrhs.size(); ++r) {
    const int l = view.rrhs[r];
    const auto& served = graph.served[static_cast<std::size_t>(l)];
    for (std::size_t i = 0; i < served.size(); ++i) {
      const int j = served[i];
      const auto col = std::lower_bound(view.ues.begin(), view.ues.end(), j);
      view.Hbar.block(static_cast<Eigen::Index>(r) * M,
                      static_cast<Eigen::Index>(col - view.ues.begin()), M, 1) =
          h[static_cast<std::size_t>(l)][i];
    }
  }

  const auto k_it = std::lower_bound(view.ues.begin(), view.ues.end(), k);
  view.k_col = static_cast<int>(k_it - view.ues.begin());
  return view;
}

void check_graph_invariants(const AssociationGraph& graph, const LsfcMatrix& lsfc,
                            const SystemParams& params, double snr) {
  const int num_rrh = static_cast<int>(lsfc.beta.rows());
  const int num_ue = static_cast<int>(lsfc.beta.cols());
  const double floor = qos_beta_floor(params, snr);
  const auto fail = [](const std::string& what) { throw std::logic_error(what); };

  if (static_cast<int>(graph.cluster.size()) != num_ue ||
      static_cast<int>(graph.served.size()) != num_rrh) {
    fail("graph dimensions do not match the LSFC matrix");
  }
  for (int k = 0; k < num_ue; ++k) {
    const auto& cluster = graph.cluster[static_cast<std::size_t>(k)];
    if (graph.is_outage(k)) {
      if (!cluster.empty() || graph.leader[static_cast<std::size_t>(k)] != -1 ||
          graph.pilot[static_cast<std::size_t>(k)] != -1) {
        fail("outage UE " + std::to_string(k) + " has residual assignment");
      }
      continue;
    }
    if (cluster.empty()) fail("non-outage UE " + std::to_string(k) + " has empty cluster");
    if (static_cast<int>(cluster.size()) > params.max_cluster_size) {
      fail("cluster of UE " + std::to_string(k) + " exceeds Q");
    }
    if (graph.pilot[static_cast<std::size_t>(k)] < 0 ||
        graph.pilot[static_cast<std::size_t>(k)] >= params.pilot_dim) {
      fail("pilot of UE " + std::to_string(k) + " out of range");
    }
    if (!std::binary_search(cluster.begin(), cluster.end(),
                            graph.leader[static_cast<std::size_t>(k)])) {
      fail("leader of UE " + std::to_string(k) + " not in its cluster");
    }
    for (int l : cluster) {
      if (lsfc.beta(l, k) < floor) {
        fail("edge (" + std::to_string(l) + ", " + std::to_string(k) +
             ") violates the QoS floor");
      }
      const auto& served = graph.served[static_cast<std::size_t>(l)];
      if (!std::binary_search(served.begin(), served.end(), k)) {
        fail("edge (" + std::to_string(l) + ", " + std::to_string(k) +
             ") missing from the served set");
      }
    }
  }
  for (int l = 0; l < num_rrh; ++l) {
    const auto& served = graph.served[static_cast<std::size_t>(l)];
    if (static_cast<int>(served.size()) > params.pilot_dim) {
      fail("served set of RRH " + std::to_string(l) + " exceeds tau_p");
    }
    std::vector<char> pilot_seen(static_cast<std::size_t>(params.pilot_dim), 0);
    for (int k : served) {
      const auto& cluster = graph.cluster[static_cast<std::size_t>(k)];
      if (!std::binary_search(cluster.begin(), cluster.end(), l)) {
        fail("served entry (" + std::to_string(l) + ", " + std::to_string(k) +
             ") missing from the cluster");
      }
      const int t = graph.pilot[static_cast<std::size_t>(k)];
      if (pilot_seen[static_cast<std::size_t>(t)]) {
        fail("pilot collision at RRH " + std::to_string(l));
      }
      pilot_seen[static_cast<std::size_t>(t)] = 1;
    }
  }
}

}  // namespace cfsim
