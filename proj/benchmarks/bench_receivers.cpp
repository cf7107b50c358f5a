// Microbenchmarks for receiver-bank construction (per draw, per
// scheme) and the exact-SINR evaluation that follows it.

#include <benchmark/benchmark.h>

#include <memory>
#include <string>

#include "cfsim/association.hpp"
#include "cfsim/channel.hpp"
#include "cfsim/engine.hpp"
#include "cfsim/estimation.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"
#include "cfsim/receivers.hpp"
#include "cfsim/rng.hpp"

namespace {

// One frozen draw shared by every benchmark in this file.
struct DrawFixture {
  cfsim::SystemParams params;
  double snr = 0.0;
  cfsim::LsfcMatrix lsfc;
  cfsim::AssociationGraph graph;
  cfsim::ChannelState channel;
  cfsim::EstimateSet estimates;
};

const DrawFixture& fixture() {
  static const DrawFixture f = [] {
    DrawFixture d;
    d.params.num_rrh = 10;
    d.params.num_ue = 20;
    d.params.antennas_per_rrh = 32;
    d.params.pilot_dim = 5;
    d.snr = cfsim::resolved_snr(d.params);
    const cfsim::Layout layout = cfsim::generate_layout(d.params, 1);
    d.lsfc = cfsim::compute_lsfc_matrix(layout, d.params);
    const auto info = std::make_shared<const cfsim::SubspaceInfo>(
        cfsim::build_subspace_info(layout, d.params));
    d.channel = cfsim::assemble_channel_state(info, d.lsfc, 2);
    cfsim::RngStream assoc(3);
    d.graph = cfsim::form_association(d.lsfc, d.params, d.snr, assoc);
    d.estimates = cfsim::make_ideal_estimates(d.channel, d.graph);
    return d;
  }();
  return f;
}

void BM_ComputeReceiverBank(benchmark::State& state, const std::string& scheme) {
  const DrawFixture& f = fixture();
  const cfsim::ReceiverScheme s = cfsim::scheme_from_name(scheme);
  for (auto _ : state) {
    cfsim::ReceiverBank bank =
        cfsim::compute_receiver_bank(s, f.estimates, f.graph, f.lsfc, f.params, f.snr);
    benchmark::DoNotOptimize(bank.v.data());
  }
  state.SetItemsProcessed(state.iterations() * f.params.num_ue);
}
BENCHMARK_CAPTURE(BM_ComputeReceiverBank, gzf, "gzf")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ComputeReceiverBank, mrc_egc, "mrc_egc")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ComputeReceiverBank, mrc_opt, "mrc_opt")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ComputeReceiverBank, lmmse_egc, "lmmse_egc")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ComputeReceiverBank, lmmse_opt, "lmmse_opt")->Unit(benchmark::kMillisecond);

void BM_ExactSinrAllUes(benchmark::State& state) {
  const DrawFixture& f = fixture();
  const cfsim::ReceiverBank bank = cfsim::compute_receiver_bank(
      cfsim::scheme_from_name("lmmse_opt"), f.estimates, f.graph, f.lsfc, f.params, f.snr);
  for (auto _ : state) {
    double acc = 0.0;
    for (int k = 0; k < f.params.num_ue; ++k) {
      acc += cfsim::exact_sinr(bank.v[static_cast<std::size_t>(k)], f.channel, f.graph,
                               f.snr, k);
    }
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * f.params.num_ue);
}
BENCHMARK(BM_ExactSinrAllUes)->Unit(benchmark::kMillisecond);

}  // namespace
