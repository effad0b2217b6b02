#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "narmine/analysis.hpp"
#include "narmine/miner.hpp"
#include "narmine/random.hpp"

namespace {

// Skewed item rates, roughly like object tags: a few common, a long tail.
nm::TransactionSet corpus(std::size_t rows, std::size_t items, std::uint64_t seed) {
  nm::SplitMix64 rng(seed);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < items; ++i) names.push_back("item" + std::to_string(i));
  std::vector<nm::Transaction> ts;
  for (std::size_t t = 0; t < rows; ++t) {
    std::vector<nm::CategoryId> chosen;
    for (std::size_t i = 0; i < items; ++i)
      if (rng.uniform() < 0.02 + 0.4 * std::pow(0.93, static_cast<double>(i)))
        chosen.push_back(static_cast<nm::CategoryId>(i));
    ts.emplace_back("t" + std::to_string(t), std::move(chosen));
  }
  return nm::TransactionSet(nm::CategoryVocabulary(std::move(names)), std::move(ts));
}

void BM_SupportCount(benchmark::State& state) {
  const auto ts = corpus(static_cast<std::size_t>(state.range(0)), 64, 1);
  const nm::ItemBitmaps bitmaps(ts);
  const std::vector<nm::CategoryId> items{0, 1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(bitmaps.count(items));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SupportCount)->Arg(1000)->Arg(100000);

void BM_NaiveSupportCount(benchmark::State& state) {
  const auto ts = corpus(static_cast<std::size_t>(state.range(0)), 64, 1);
  const std::vector<nm::CategoryId> items{0, 1, 2};
  for (auto _ : state) benchmark::DoNotOptimize(nm::support_count(items, ts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NaiveSupportCount)->Arg(1000)->Arg(100000);

void BM_Apriori(benchmark::State& state) {
  const auto ts = corpus(static_cast<std::size_t>(state.range(0)), 64, 2);
  nm::MiningParams p;
  p.minSupport = 0.01;
  p.maxItemsetLen = 4;
  p.workers = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(nm::frequent_itemsets(ts, p));
}
BENCHMARK(BM_Apriori)->Args({1000, 1})->Args({20000, 1})->Args({20000, 4})->Unit(benchmark::kMillisecond);

void BM_RuleGeneration(benchmark::State& state) {
  const auto ts = corpus(1000, 64, 3);
  nm::MiningParams p;
  p.minSupport = 0.01;
  p.maxItemsetLen = 4;
  const auto frequent = nm::frequent_itemsets(ts, p);
  for (auto _ : state) benchmark::DoNotOptimize(nm::rank_rules(nm::generate_rules(frequent, ts, p)));
}
BENCHMARK(BM_RuleGeneration)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
