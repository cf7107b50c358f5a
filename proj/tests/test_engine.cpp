#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/engine.hpp"
#include "cfsim/estimation.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/receivers.hpp"
#include "cfsim/rng.hpp"

using namespace cfsim;

namespace {

SystemParams small_params() {
  SystemParams p;
  p.num_rrh = 3;
  p.num_ue = 5;
  p.antennas_per_rrh = 4;
  p.pilot_dim = 2;
  p.coherence_block = 50;
  p.max_cluster_size = 2;
  p.num_layouts = 2;
  p.num_fading_draws = 3;
  return p;  // snr = 0: auto-calibrated, so the QoS floor stays sane
}

struct PipelineState {
  SystemParams params;
  double snr = 0.0;
  Layout layout;
  LsfcMatrix lsfc_mat;
  std::shared_ptr<const SubspaceInfo> info;
  ChannelState channel;
  AssociationGraph graph;
  EstimateSet ideal;
};

PipelineState make_pipeline(const SystemParams& p, std::uint64_t seed) {
  PipelineState st;
  st.params = p;
  st.snr = resolved_snr(p);
  st.layout = generate_layout(p, seed);
  st.lsfc_mat = compute_lsfc_matrix(st.layout, p);
  st.info = std::make_shared<const SubspaceInfo>(build_subspace_info(st.layout, p));
  st.channel = assemble_channel_state(st.info, st.lsfc_mat, seed + 1);
  RngStream assoc(seed + 2);
  st.graph = form_association(st.lsfc_mat, p, st.snr, assoc);
  st.ideal = make_ideal_estimates(st.channel, st.graph);
  return st;
}

}  // namespace

TEST_CASE("exact SINR matches a dense full-matrix evaluation") {
  const PipelineState st = make_pipeline(small_params(), 901);
  const ReceiverBank bank = compute_receiver_bank({Detector::LocalMRC, Combiner::Optimal},
                                                  st.ideal, st.graph, st.lsfc_mat,
                                                  st.params, st.snr);
  const int L = st.params.num_rrh, M = st.params.antennas_per_rrh;
  for (int k = 0; k < st.params.num_ue; ++k) {
    const auto kz = static_cast<std::size_t>(k);
    if (st.graph.is_outage(k)) {
      CHECK(exact_sinr(bank.v[kz], st.channel, st.graph, st.snr, k) == 0.0);
      continue;
    }
    const Eigen::VectorXcd dense = to_dense(bank.v[kz], L, M);
    double interference = 0.0;
    for (int j = 0; j < st.params.num_ue; ++j) {
      if (j == k || st.graph.is_outage(j)) continue;
      interference += std::norm(dense.dot(st.channel.H.col(j)));
    }
    const double expect =
        std::norm(dense.dot(st.channel.H.col(k))) / (1.0 / st.snr + interference);
    const double got = exact_sinr(bank.v[kz], st.channel, st.graph, st.snr, k);
    REQUIRE(got == doctest::Approx(expect).epsilon(1e-12));
    REQUIRE(got >= 0.0);
  }

  GlobalReceiver degenerate;
  degenerate.ok = false;
  CHECK(exact_sinr(degenerate, st.channel, st.graph, st.snr, 0) == 0.0);
}

TEST_CASE("outage UEs are excluded from the interference sum") {
  PipelineState st = make_pipeline(small_params(), 902);
  // Find a served pair (k kept, j silenced).
  int k = -1, j = -1;
  for (int i = 0; i < st.params.num_ue; ++i) {
    if (st.graph.is_outage(i)) continue;
    if (k < 0) {
      k = i;
    } else if (j < 0) {
      j = i;
    }
  }
  REQUIRE(k >= 0);
  REQUIRE(j >= 0);

  const ReceiverBank bank = compute_receiver_bank({Detector::LocalMRC, Combiner::EGC},
                                                  st.ideal, st.graph, st.lsfc_mat,
                                                  st.params, st.snr);
  const auto kz = static_cast<std::size_t>(k);
  const double before = exact_sinr(bank.v[kz], st.channel, st.graph, st.snr, k);

  AssociationGraph muted = st.graph;
  muted.outage[static_cast<std::size_t>(j)] = 1;
  const double after = exact_sinr(bank.v[kz], st.channel, muted, st.snr, k);

  // Silencing an interferer can only help, and the result must equal a
  // dense evaluation that skips the muted UE.
  CHECK(after >= before);
  const Eigen::VectorXcd dense = to_dense(bank.v[kz], st.params.num_rrh,
                                          st.params.antennas_per_rrh);
  double interference = 0.0;
  for (int i = 0; i < st.params.num_ue; ++i) {
    if (i == k || muted.is_outage(i)) continue;
    interference += std::norm(dense.dot(st.channel.H.col(i)));
  }
  const double expect =
      std::norm(dense.dot(st.channel.H.col(k))) / (1.0 / st.snr + interference);
  CHECK(after == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("rates and spectral efficiency") {
  CHECK(ergodic_rate({1.0, 3.0}) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(ergodic_rate({1.0, 3.0}, true) ==
        doctest::Approx(1.0397207708399179).epsilon(1e-14));
  CHECK(ergodic_rate({0.0}) == 0.0);
  CHECK_THROWS_AS(ergodic_rate({}), std::invalid_argument);

  CHECK(spectral_efficiency(2.0, 20, 200) == doctest::Approx(1.8).epsilon(1e-14));
  CHECK(spectral_efficiency(2.0, 200, 200) == 0.0);
  CHECK_THROWS_AS(spectral_efficiency(1.0, 21, 20), std::invalid_argument);
}

TEST_CASE("nominal SINR agrees with the exact SINR when nothing is unknown") {
  // Two RRHs serving both UEs: no out-of-cluster interference, ideal
  // CSI, so the combining-stage model and the true SINR coincide.
  SystemParams p;
  p.num_rrh = 2;
  p.num_ue = 2;
  p.antennas_per_rrh = 4;
  p.pilot_dim = 2;
  p.qos_threshold = 0.0;
  p.max_cluster_size = 2;
  p.snr = 1.7;
  const PipelineState st = make_pipeline(p, 903);
  REQUIRE(st.graph.num_outage() == 0);
  for (int k = 0; k < 2; ++k) {
    REQUIRE(st.graph.cluster[static_cast<std::size_t>(k)].size() == 2);
  }

  for (const bool lmmse : {false, true}) {
    for (int k = 0; k < 2; ++k) {
      std::vector<Eigen::VectorXcd> local_v;
      for (int l : st.graph.cluster[static_cast<std::size_t>(k)]) {
        const auto lz = static_cast<std::size_t>(l);
        const int idx = (st.graph.served[lz][0] == k) ? 0 : 1;
        if (lmmse) {
          local_v.push_back(lmmse_local(st.ideal.h_hat[lz], 1.0, st.snr, idx));
        } else {
          local_v.push_back(mrc_local(st.ideal.h_hat[lz][static_cast<std::size_t>(idx)]));
        }
      }
      const CombinerState comb =
          combiner_state(local_v, st.ideal, st.graph, st.lsfc_mat, st.snr, k);
      REQUIRE(comb.sigma_sq(0) == 1.0);
      REQUIRE(comb.sigma_sq(1) == 1.0);
      const Eigen::VectorXcd w = optimal_weights(comb);
      const double nominal = nominal_sinr(w, comb, st.snr);
      const GlobalReceiver v =
          assemble_global(local_v, w, st.graph.cluster[static_cast<std::size_t>(k)]);
      REQUIRE(v.ok);
      const double exact = exact_sinr(v, st.channel, st.graph, st.snr, k);
      REQUIRE(exact == doctest::Approx(nominal).epsilon(1e-10));
    }
  }
}

TEST_CASE("layout runs: shapes, aggregates and determinism") {
  const SystemParams p = small_params();
  const std::vector<SchemeCsi> combos = {
      {{Detector::LocalMRC, Combiner::Optimal}, CsiMode::IDEAL},
      {{Detector::GZF, Combiner::Optimal}, CsiMode::SP},
  };
  const std::vector<TrialResult> res = run_layout_combos(p, combos, 0);
  REQUIRE(res.size() == 2);
  for (const TrialResult& t : res) {
    REQUIRE(t.sinr.rows() == p.num_ue);
    REQUIRE(t.sinr.cols() == p.num_fading_draws);
    REQUIRE(t.rate.size() == p.num_ue);
    REQUIRE(t.se.size() == p.num_ue);
    CHECK(t.sinr.minCoeff() >= 0.0);

    double sum = 0.0;
    const double overhead =
        1.0 - static_cast<double>(p.pilot_dim) / p.coherence_block;
    for (int k = 0; k < p.num_ue; ++k) {
      if (t.outage[static_cast<std::size_t>(k)]) {
        CHECK(t.rate(k) == 0.0);
        CHECK(t.sinr.row(k).norm() == 0.0);
      }
      CHECK(t.se(k) == doctest::Approx(overhead * t.rate(k)).epsilon(1e-13));
      // Rates are the mean of log2(1 + sinr) across draws.
      double rate = 0.0;
      for (int d = 0; d < p.num_fading_draws; ++d) rate += std::log1p(t.sinr(k, d));
      rate /= p.num_fading_draws * std::numbers::ln2;
      CHECK(t.rate(k) == doctest::Approx(rate).epsilon(1e-12));
      sum += t.se(k);
    }
    CHECK(t.sum_se == doctest::Approx(sum).epsilon(1e-12));
  }

  // Bitwise reproducibility.
  const std::vector<TrialResult> res2 = run_layout_combos(p, combos, 0);
  CHECK((res[0].sinr - res2[0].sinr).norm() == 0.0);
  CHECK((res[1].sinr - res2[1].sinr).norm() == 0.0);

  // Combo order does not change any combo's result.
  const std::vector<SchemeCsi> swapped = {combos[1], combos[0]};
  const std::vector<TrialResult> res3 = run_layout_combos(p, swapped, 0);
  CHECK((res[0].sinr - res3[1].sinr).norm() == 0.0);
  CHECK((res[1].sinr - res3[0].sinr).norm() == 0.0);

  // A different layout index gives different draws.
  const std::vector<TrialResult> res4 = run_layout_combos(p, combos, 1);
  CHECK((res[0].sinr - res4[0].sinr).norm() > 0.0);

  // The convenience wrapper and the explicit-layout variant agree.
  const TrialResult single = run_layout(p, combos[0].scheme, combos[0].csi, 0);
  CHECK((single.sinr - res[0].sinr).norm() == 0.0);
  const Layout layout = generate_layout(p, derive_stream(p.master_seed, {0}));
  const std::vector<TrialResult> on = run_layout_combos_on(layout, p, combos, 0);
  CHECK((on[0].sinr - res[0].sinr).norm() == 0.0);
}

TEST_CASE("sweep axis application") {
  const SystemParams p = small_params();

  SystemParams t = apply_axis(p, SweepAxis::TauP, 4.0);
  CHECK(t.pilot_dim == 4);
  // Counts must be integral; a fractional sweep value is a config error.
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::TauP, 3.6), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::TauP, 1e6), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::TauP, 0.0), std::invalid_argument);

  t = apply_axis(p, SweepAxis::Q, 7.0);
  CHECK(t.max_cluster_size == 7);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::Q, -1.0), std::invalid_argument);

  t = apply_axis(p, SweepAxis::Delta, 1.5);
  CHECK(t.angular_spread == 1.5);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::Delta, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::Delta, 7.0), std::invalid_argument);

  t = apply_axis(p, SweepAxis::K, 9.0);
  CHECK(t.num_ue == 9);
  CHECK_THROWS_AS(apply_axis(p, SweepAxis::K, 0.0), std::invalid_argument);

  t = apply_axis(p, SweepAxis::None, 123.0);  // value ignored
  CHECK(t == p);

  CHECK(sweep_axis_from_name("tau_p") == SweepAxis::TauP);
  CHECK(sweep_axis_from_name("none") == SweepAxis::None);
  CHECK(sweep_axis_name(SweepAxis::Delta) == std::string("delta"));
  CHECK(sweep_axis_name(SweepAxis::K) == std::string("k"));
  CHECK_THROWS_AS(sweep_axis_from_name("qq"), std::invalid_argument);
}

TEST_CASE("sweeps aggregate deterministically across thread counts") {
  const SystemParams p = small_params();
  const std::vector<SchemeCsi> combos = {
      {{Detector::LocalMRC, Combiner::Optimal}, CsiMode::IDEAL},
      {{Detector::LocalLMMSE, Combiner::Optimal}, CsiMode::PM},
  };
  const std::vector<double> values = {1, 2};
  const SweepResult one = run_sweep(p, SweepAxis::Q, values, combos, 1);
  const SweepResult four = run_sweep(p, SweepAxis::Q, values, combos, 4);

  REQUIRE(one.points.size() == 4);  // 2 values x 2 combos
  REQUIRE(one.values == values);
  REQUIRE(one.axis == SweepAxis::Q);
  for (std::size_t i = 0; i < one.points.size(); ++i) {
    const PointRecord& a = one.points[i];
    const PointRecord& b = four.points[i];
    REQUIRE(a.mean_sum_se == b.mean_sum_se);  // bitwise, not approximate
    REQUIRE(a.ue_se == b.ue_se);
    REQUIRE(a.ue_id == b.ue_id);
    REQUIRE(a.outage_total == b.outage_total);
    CHECK(a.num_layouts == p.num_layouts);
    CHECK(a.num_ue == p.num_ue);
    CHECK(a.scheme == combos[i % 2].scheme);
    CHECK(a.csi == combos[i % 2].csi);
    CHECK(a.axis_value == values[i / 2]);
    CHECK(&one.point(static_cast<int>(i / 2), static_cast<int>(i % 2), 2) == &one.points[i]);
  }

  // The pooled samples reproduce the mean sum SE (outage UEs
  // contribute zero on both sides).
  for (const PointRecord& rec : one.points) {
    double total = 0.0;
    for (double se : rec.ue_se) total += se;
    CHECK(rec.mean_sum_se == doctest::Approx(total / p.num_layouts).epsilon(1e-12));
  }

  // A single unswept point reports axis value 0.
  const SweepResult none = run_sweep(p, SweepAxis::None, {}, combos, 1);
  REQUIRE(none.points.size() == 2);
  CHECK(none.points[0].axis_value == 0.0);

  // Invalid values are rejected before any work happens.
  CHECK_THROWS_AS(run_sweep(p, SweepAxis::TauP, {5, 1e9}, combos, 1),
                  std::invalid_argument);
}

TEST_CASE("layout identity is preserved across a K sweep") {
  // Sweeping K re-runs the same placements with more UEs: the pooled
  // samples of the shared UE prefix must be bit-identical.
  SystemParams p = small_params();
  p.qos_threshold = 0.0;  // keep every UE in service for the comparison
  const std::vector<SchemeCsi> combos = {
      {{Detector::LocalMRC, Combiner::EGC}, CsiMode::IDEAL}};
  const SweepResult sweep = run_sweep(p, SweepAxis::K, {3, 5}, combos, 1);
  REQUIRE(sweep.points.size() == 2);
  const PointRecord& small = sweep.points[0];
  const PointRecord& big = sweep.points[1];
  REQUIRE(small.num_ue == 3);
  REQUIRE(big.num_ue == 5);
  // Same RRH placement and same UE positions for the shared prefix; the
  // rates still differ because the two extra UEs interfere.  What must
  // agree exactly is the layout-derived association randomness: check
  // it indirectly through the generated layouts.
  const Layout a = generate_layout(apply_axis(p, SweepAxis::K, 3),
                                   derive_stream(p.master_seed, {0}));
  const Layout b = generate_layout(apply_axis(p, SweepAxis::K, 5),
                                   derive_stream(p.master_seed, {0}));
  REQUIRE(a.rrh_positions.size() == b.rrh_positions.size());
  for (std::size_t l = 0; l < a.rrh_positions.size(); ++l) {
    CHECK(a.rrh_positions[l].x == b.rrh_positions[l].x);
    CHECK(a.rrh_positions[l].y == b.rrh_positions[l].y);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(a.ue_positions[k].x == b.ue_positions[k].x);
  }
}
