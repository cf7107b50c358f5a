// Microbenchmarks for the channel pipeline: angular-subspace
// precomputation (once per layout) and fading realization (once per
// draw, the inner-loop cost of every Monte Carlo run).

#include <benchmark/benchmark.h>

#include <memory>

#include "cfsim/channel.hpp"
#include "cfsim/geometry.hpp"
#include "cfsim/params.hpp"

namespace {

cfsim::SystemParams scenario(int antennas) {
  cfsim::SystemParams p;
  p.num_rrh = 20;
  p.num_ue = 40;
  p.antennas_per_rrh = antennas;
  p.pilot_dim = 10;
  return p;
}

void BM_BuildSubspaceInfo(benchmark::State& state) {
  const cfsim::SystemParams p = scenario(static_cast<int>(state.range(0)));
  const cfsim::Layout layout = cfsim::generate_layout(p, 1);
  for (auto _ : state) {
    cfsim::SubspaceInfo info = cfsim::build_subspace_info(layout, p);
    benchmark::DoNotOptimize(info.supports.data());
  }
  state.SetItemsProcessed(state.iterations() * p.num_rrh * p.num_ue);
}
BENCHMARK(BM_BuildSubspaceInfo)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_AssembleChannelState(benchmark::State& state) {
  const cfsim::SystemParams p = scenario(static_cast<int>(state.range(0)));
  const cfsim::Layout layout = cfsim::generate_layout(p, 1);
  const cfsim::LsfcMatrix lsfc = cfsim::compute_lsfc_matrix(layout, p);
  const auto info =
      std::make_shared<const cfsim::SubspaceInfo>(cfsim::build_subspace_info(layout, p));
  std::uint64_t key = 0;
  for (auto _ : state) {
    cfsim::ChannelState ch = cfsim::assemble_channel_state(info, lsfc, ++key);
    benchmark::DoNotOptimize(ch.H.data());
  }
  state.SetItemsProcessed(state.iterations() * p.num_rrh * p.num_ue);
}
BENCHMARK(BM_AssembleChannelState)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
