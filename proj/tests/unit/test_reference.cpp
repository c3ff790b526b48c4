#include <gtest/gtest.h>

#include <random>

#include "relik/reference.hpp"
#include "support/oracles.hpp"

using namespace relik;

TEST(SerialReference, AgreesWithParallelKernels) {
  std::mt19937_64 g(41);
  for (int i = 0; i < 30; ++i) {
    const auto raw = oracle::random_kg(g, 25, 3);
    const auto kg = oracle::to_graph(raw);
    const ScorerKind kind = kAllScorers[i % 6];
    const auto store = oracle::to_store(oracle::random_embedding(g, raw, kind, 3));
    const EmbeddingScorer s(store, kind);
    const auto cfg = SampleConfig::with_fraction(0.25, g());
    for (Estimator e : {Estimator::Exact, Estimator::LowerBound, Estimator::Scaled}) {
      const auto serial = reference::relik_batch_serial(kg, s, kg.facts(), e, cfg);
      const auto parallel = relik_batch(kg, s, kg.facts(), e, cfg, 3);
      ASSERT_EQ(serial.size(), parallel.size());
      for (std::size_t j = 0; j < serial.size(); ++j) {
        EXPECT_EQ(serial[j].value, parallel[j].value);
        EXPECT_EQ(serial[j].head_rank, parallel[j].head_rank);
        EXPECT_EQ(serial[j].tail_rank, parallel[j].tail_rank);
      }
    }
  }
}
