// End-to-end benchmark: one full layout evaluation (geometry,
// association, all fading draws, receiver banks, SINRs, rates) as the
// sweep engine executes it.

#include <benchmark/benchmark.h>

#include <vector>

#include "cfsim/engine.hpp"
#include "cfsim/params.hpp"
#include "cfsim/receivers.hpp"

namespace {

cfsim::SystemParams layout_scenario() {
  cfsim::SystemParams p;
  p.num_rrh = 10;
  p.num_ue = 20;
  p.antennas_per_rrh = 16;
  p.pilot_dim = 5;
  p.num_fading_draws = 5;
  return p;
}

void BM_RunLayoutSingleCombo(benchmark::State& state) {
  const cfsim::SystemParams p = layout_scenario();
  const std::vector<cfsim::SchemeCsi> combos = {
      {cfsim::scheme_from_name("lmmse_opt"), cfsim::CsiMode::IDEAL}};
  int layout_index = 0;
  for (auto _ : state) {
    auto results = cfsim::run_layout_combos(p, combos, layout_index++);
    benchmark::DoNotOptimize(results.front().sum_se);
  }
  state.SetItemsProcessed(state.iterations() * p.num_fading_draws);
}
BENCHMARK(BM_RunLayoutSingleCombo)->Unit(benchmark::kMillisecond);

// Shared-draw evaluation of every scheme under ideal and subspace CSI,
// as one sweep point schedules it.  Compares against ten separate
// single-combo runs when read next to the benchmark above.
void BM_RunLayoutAllCombos(benchmark::State& state) {
  const cfsim::SystemParams p = layout_scenario();
  std::vector<cfsim::SchemeCsi> combos;
  for (const auto& s : cfsim::all_schemes()) {
    combos.push_back({s, cfsim::CsiMode::IDEAL});
    combos.push_back({s, cfsim::CsiMode::SP});
  }
  int layout_index = 0;
  for (auto _ : state) {
    auto results = cfsim::run_layout_combos(p, combos, layout_index++);
    benchmark::DoNotOptimize(results.front().sum_se);
  }
  state.SetItemsProcessed(state.iterations() * p.num_fading_draws * combos.size());
}
BENCHMARK(BM_RunLayoutAllCombos)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
