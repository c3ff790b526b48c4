#include <benchmark/benchmark.h>

#include "relik/reference.hpp"
#include "relik/reliability.hpp"
#include "relik/synthetic.hpp"
#include "relik/trainer.hpp"

using namespace relik;

namespace {

struct Fixture {
  KnowledgeGraph kg = synthetic_countries({});
  EmbeddingStore store = [this] {
    TrainConfig cfg;
    cfg.epochs = 20;
    return train(kg, ScorerKind::TransE_L1, cfg);
  }();
  EmbeddingScorer scorer{store, ScorerKind::TransE_L1};
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Estimator estimator_arg(std::int64_t i) {
  return i == 0 ? Estimator::Exact : i == 1 ? Estimator::LowerBound : Estimator::Scaled;
}

void BM_Serial(benchmark::State& state) {
  const auto& f = fixture();
  const Estimator e = estimator_arg(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        reference::relik_batch_serial(f.kg, f.scorer, f.kg.facts(), e, SampleConfig::with_fraction(0.1)));
  }
  state.SetItemsProcessed(state.iterations() * f.kg.num_facts());
}

void BM_Parallel(benchmark::State& state) {
  const auto& f = fixture();
  const Estimator e = estimator_arg(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        relik_batch(f.kg, f.scorer, f.kg.facts(), e, SampleConfig::with_fraction(0.1), threads));
  }
  state.SetItemsProcessed(state.iterations() * f.kg.num_facts());
}

void BM_ScoreBatch(benchmark::State& state) {
  const auto& f = fixture();
  std::vector<double> out(f.kg.num_facts());
  for (auto _ : state) {
    if (state.range(0) == 0) {
      benchmark::DoNotOptimize(reference::score_batch_serial(f.scorer, f.kg.facts()));
    } else {
      f.scorer.score_batch(f.kg.facts(), out);
      benchmark::DoNotOptimize(out.data());
    }
  }
  state.SetItemsProcessed(state.iterations() * f.kg.num_facts());
}

}  // namespace

// 0: exact, 1: lower bound, 2: scaled
BENCHMARK(BM_Serial)->Arg(0)->Arg(2)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Args({0, 1})->Args({0, 4})->Args({2, 1})->Args({2, 4})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScoreBatch)->Arg(0)->Arg(1);

BENCHMARK_MAIN();
