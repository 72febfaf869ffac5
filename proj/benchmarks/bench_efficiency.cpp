#include <benchmark/benchmark.h>

#include "rae/eff.hpp"

namespace {

void BM_ce_profile_ratio_fpa(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  rae::Mechanism mech = rae::winner_pays_bid(rae::AllocationRule::highest_bids_win(
      rae::Environment::single_item(n), rae::TieBreakPolicy::identity(n)));
  rae::BidProfile bids(n);
  for (int i = 0; i < n; ++i) bids[i] = (i + 1) / (n + 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::ce_profile_ratio(mech, bids).ratio);
  }
}
BENCHMARK(BM_ce_profile_ratio_fpa)->Arg(3)->Arg(6)->Arg(10);

void BM_individual_efficiency(benchmark::State& state) {
  rae::BiddingOutcome outcome =
      rae::BiddingOutcome::single(1.0, 0.0, rae::InterimRule::er_shape());
  rae::ZGrid grid;
  grid.points = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rae::individual_efficiency(outcome, grid).eta);
  }
}
BENCHMARK(BM_individual_efficiency)->Arg(256)->Arg(4096);

}  // namespace
