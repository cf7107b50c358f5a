#include "cfsim/engine.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace cfsim {

double exact_sinr(const GlobalReceiver& v, const ChannelState& channel,
                  const AssociationGraph& graph, double snr, int k) {
  if (!v.ok) return 0.0;
  const int M = channel.subspace->M;
  const int K = channel.subspace->K;

  // v is zero outside its cluster blocks, so v^H H reduces to the
  // cluster rows of H.
  Eigen::RowVectorXcd gains = Eigen::RowVectorXcd::Zero(K);
  for (std::size_t r = 0; r < v.rrhs.size(); ++r) {
    gains += v.blocks.segment(static_cast<Eigen::Index>(r) * M, M).adjoint() *
             channel.H.middleRows(static_cast<Eigen::Index>(v.rrhs[r]) * M, M);
  }

  double interference = 0.0;
  for (int j = 0; j < K; ++j) {
    if (j == k || graph.is_outage(j)) continue;
    interference += std::norm(gains(j));
  }
  return std::norm(gains(k)) / (1.0 / snr + interference);
}

double ergodic_rate(const std::vector<double>& sinr_samples, bool nats) {
  if (sinr_samples.empty()) {
    throw std::invalid_argument("ergodic_rate: need at least one sample");
  }
  double sum = 0.0;
  for (double s : sinr_samples) {
    sum += std::log1p(s);
  }
  const double mean_nats = sum / static_cast<double>(sinr_samples.size());
  return nats ? mean_nats : mean_nats / std::numbers::ln2;
}

double spectral_efficiency(double rate, int tau_p, int coherence_block) {
  if (tau_p > coherence_block) {
    throw std::invalid_argument("spectral_efficiency: tau_p > coherence block");
  }
  return (1.0 - static_cast<double>(tau_p) / coherence_block) * rate;
}

namespace {

std::uint64_t layout_stream_key(const SystemParams& params, int layout_index) {
  return derive_stream(params.master_seed, {static_cast<std::uint64_t>(layout_index)});
}

}  // namespace

std::vector<TrialResult> run_layout_combos_on(const Layout& layout,
                                              const SystemParams& params,
                                              const std::vector<SchemeCsi>& combos,
                                              int layout_index) {
  validate(params);
  const double snr = resolved_snr(params);
  const int num_ue = static_cast<int>(layout.ue_positions.size());
  const int draws = params.num_fading_draws;
  const std::uint64_t layout_key = layout_stream_key(params, layout_index);

  const LsfcMatrix lsfc = compute_lsfc_matrix(layout, params);
  RngStream assoc_stream(derive_stream(layout_key, {stream_tag::kAssociation}));
  const AssociationGraph graph = form_association(lsfc, params, snr, assoc_stream);
  const auto subspace =
      std::make_shared<const SubspaceInfo>(build_subspace_info(layout, params));

  // Distinct CSI modes in first-appearance order, so each estimate set
  // is computed once per draw and shared by all schemes using it.
  std::vector<CsiMode> modes;
  for (const SchemeCsi& combo : combos) {
    bool seen = false;
    for (CsiMode m : modes) seen = seen || (m == combo.csi);
    if (!seen) modes.push_back(combo.csi);
  }

  std::vector<TrialResult> results(combos.size());
  for (auto& r : results) {
    r.sinr = Eigen::MatrixXd::Zero(num_ue, draws);
    r.outage = graph.outage;
    r.outage_count = graph.num_outage();
  }

  for (int draw = 0; draw < draws; ++draw) {
    const ChannelState channel = assemble_channel_state(
        subspace, lsfc,
        derive_stream(layout_key, {stream_tag::kFading, static_cast<std::uint64_t>(draw)}));
    const std::uint64_t pilot_key =
        derive_stream(layout_key, {stream_tag::kPilotNoise, static_cast<std::uint64_t>(draw)});

    for (CsiMode mode : modes) {
      const EstimateSet estimates =
          estimate_edges(mode, channel, graph, params, snr, pilot_key);
      for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        if (combos[ci].csi != mode) continue;
        const ReceiverBank bank =
            compute_receiver_bank(combos[ci].scheme, estimates, graph, lsfc, params, snr);
        for (int k = 0; k < num_ue; ++k) {
          if (graph.is_outage(k)) continue;
          results[ci].sinr(k, draw) =
              exact_sinr(bank.v[static_cast<std::size_t>(k)], channel, graph, snr, k);
        }
      }
    }
  }

  for (auto& r : results) {
    r.rate = Eigen::VectorXd::Zero(num_ue);
    r.se = Eigen::VectorXd::Zero(num_ue);
    r.sum_se = 0.0;
    for (int k = 0; k < num_ue; ++k) {
      if (graph.is_outage(k)) continue;
      std::vector<double> samples(r.sinr.row(k).begin(), r.sinr.row(k).end());
      r.rate(k) = ergodic_rate(samples, params.rate_in_nats);
      r.se(k) = spectral_efficiency(r.rate(k), params.pilot_dim, params.coherence_block);
      r.sum_se += r.se(k);
    }
    if (!r.se.allFinite() || !std::isfinite(r.sum_se)) {
      throw std::runtime_error("run_layout: non-finite aggregate");
    }
  }
  return results;
}

std::vector<TrialResult> run_layout_combos(const SystemParams& params,
                                           const std::vector<SchemeCsi>& combos,
                                           int layout_index) {
  validate(params);
  const Layout layout = generate_layout(params, layout_stream_key(params, layout_index));
  return run_layout_combos_on(layout, params, combos, layout_index);
}

TrialResult run_layout(const SystemParams& params, ReceiverScheme scheme, CsiMode csi,
                       int layout_index) {
  return run_layout_combos(params, {{scheme, csi}}, layout_index).front();
}

const char* sweep_axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::None: return "none";
    case SweepAxis::TauP: return "tau_p";
    case SweepAxis::Q: return "q";
    case SweepAxis::Delta: return "delta";
    case SweepAxis::K: return "k";
  }
  return "?";
}

SweepAxis sweep_axis_from_name(const std::string& s) {
  if (s == "none") return SweepAxis::None;
  if (s == "tau_p") return SweepAxis::TauP;
  if (s == "q") return SweepAxis::Q;
  if (s == "delta") return SweepAxis::Delta;
  if (s == "k") return SweepAxis::K;
  throw std::invalid_argument("unknown sweep axis: " + s);
}

SystemParams apply_axis(const SystemParams& params, SweepAxis axis, double value) {
  SystemParams p = params;
  const auto as_count = [&](const char* what) {
    const double rounded = std::nearbyint(value);
    if (!std::isfinite(value) || std::abs(value - rounded) > 1e-9 || rounded < 1.0) {
      throw std::invalid_argument(std::string(what) + ": invalid sweep value");
    }
    return static_cast<int>(rounded);
  };
  switch (axis) {
    case SweepAxis::None:
      break;
    case SweepAxis::TauP:
      p.pilot_dim = as_count("tau_p");
      break;
    case SweepAxis::Q:
      p.max_cluster_size = as_count("q");
      break;
    case SweepAxis::Delta:
      p.angular_spread = value;
      break;
    case SweepAxis::K:
      p.num_ue = as_count("k");
      break;
  }
  validate(p);
  return p;
}

SweepResult run_sweep(const SystemParams& params, SweepAxis axis,
                      const std::vector<double>& values,
                      const std::vector<SchemeCsi>& combos, int threads) {
  if (combos.empty()) {
    throw std::invalid_argument("run_sweep: no scheme/CSI combinations");
  }
  std::vector<double> effective_values = values;
  if (axis == SweepAxis::None) {
    if (values.size() > 1) {
      throw std::invalid_argument("run_sweep: axis 'none' takes a single point");
    }
    effective_values.assign(1, 0.0);
  } else if (values.empty()) {
    throw std::invalid_argument("run_sweep: no sweep values");
  }

  // Validate every point before running anything.
  std::vector<SystemParams> point_params;
  point_params.reserve(effective_values.size());
  for (double v : effective_values) {
    point_params.push_back(apply_axis(params, axis, v));
  }

  int workers = threads;
  if (workers <= 0) {
    workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
  }

  SweepResult sweep;
  sweep.axis = axis;
  sweep.values = effective_values;
  for (std::size_t vi = 0; vi < point_params.size(); ++vi) {
    const SystemParams& p = point_params[vi];
    std::vector<std::vector<TrialResult>> per_layout(
        static_cast<std::size_t>(p.num_layouts));

    if (workers == 1 || p.num_layouts == 1) {
      for (int i = 0; i < p.num_layouts; ++i) {
        per_layout[static_cast<std::size_t>(i)] = run_layout_combos(p, combos, i);
      }
    } else {
      std::atomic<int> next{0};
      std::exception_ptr error;
      std::mutex error_mutex;
      const int n = std::min(workers, p.num_layouts);
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(n));
      for (int w = 0; w < n; ++w) {
        pool.emplace_back([&]() {
          for (int i = next.fetch_add(1); i < p.num_layouts; i = next.fetch_add(1)) {
            try {
              per_layout[static_cast<std::size_t>(i)] = run_layout_combos(p, combos, i);
            } catch (...) {
              std::lock_guard<std::mutex> lock(error_mutex);
              if (!error) error = std::current_exception();
              return;
            }
          }
        });
      }
      for (auto& t : pool) t.join();
      if (error) std::rethrow_exception(error);
    }

    // Aggregation order is fixed by (layout index, UE index), so the
    // result is independent of how the work was scheduled.
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
      PointRecord rec;
      rec.axis_value = effective_values[vi];
      rec.scheme = combos[ci].scheme;
      rec.csi = combos[ci].csi;
      rec.num_layouts = p.num_layouts;
      rec.num_ue = p.num_ue;
      rec.num_fading_draws = p.num_fading_draws;
      double sum = 0.0;
      for (int i = 0; i < p.num_layouts; ++i) {
        const TrialResult& t = per_layout[static_cast<std::size_t>(i)][ci];
        sum += t.sum_se;
        rec.outage_total += t.outage_count;
        for (int k = 0; k < p.num_ue; ++k) {
          // Outage UEs are reported through the counter, not pooled as
          // rate samples.
          if (t.outage[static_cast<std::size_t>(k)]) continue;
          rec.ue_se.push_back(t.se(k));
          rec.ue_id.push_back(k);
        }
      }
      rec.mean_sum_se = sum / p.num_layouts;
      if (!std::isfinite(rec.mean_sum_se)) {
        throw std::runtime_error("run_sweep: non-finite aggregate");
      }
      sweep.points.push_back(std::move(rec));
    }
  }
  return sweep;
}

}  // namespace cfsim
