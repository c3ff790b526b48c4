#include <gtest/gtest.h>

#include <cmath>

#include "relik/reliability.hpp"
#include "relik/trainer.hpp"

using namespace relik;

namespace {

KnowledgeGraph chain() { return KnowledgeGraph::parse("a\tr\tb\nb\tr\tc\nc\tr\td\nd\tr\te\ne\tr\tf\n"); }

TrainConfig small(std::size_t epochs) {
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = epochs;
  cfg.seed = 3;
  return cfg;
}

}  // namespace

TEST(Trainer, ZeroEpochsIsTheInitialization) {
  const auto kg = chain();
  const auto res = train_with_history(kg, ScorerKind::DistMult, small(0));
  EXPECT_TRUE(res.epoch_loss.empty());
  const double bound = 6.0 / std::sqrt(8.0);
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
    for (double v : res.store.entity(EntityId{e})) {
      EXPECT_LE(std::abs(v), bound);
    }
  }
}

TEST(Trainer, Deterministic) {
  const auto kg = chain();
  for (auto kind : {ScorerKind::TransE_L1, ScorerKind::TransE_L2, ScorerKind::DistMult}) {
    const auto a = train_with_history(kg, kind, small(20));
    const auto b = train_with_history(kg, kind, small(20));
    EXPECT_TRUE(a.store == b.store);
    EXPECT_EQ(a.epoch_loss, b.epoch_loss);
  }
}

TEST(Trainer, LossDecreases) {
  const auto kg = chain();
  for (auto kind : {ScorerKind::TransE_L1, ScorerKind::TransE_L2, ScorerKind::DistMult}) {
    auto cfg = small(200);
    cfg.learning_rate = 0.05;
    const auto res = train_with_history(kg, kind, cfg);
    ASSERT_EQ(res.epoch_loss.size(), 200u);
    double head = 0.0, tail = 0.0;
    for (std::size_t i = 0; i < 20; ++i) {
      head += res.epoch_loss[i];
      tail += res.epoch_loss[180 + i];
    }
    EXPECT_LT(tail, head) << to_string(kind);
  }
}

TEST(Trainer, TrainedTransEBeatsItsInitialization) {
  const auto kg = chain();
  auto cfg = small(200);
  cfg.learning_rate = 0.05;
  const auto before = train(kg, ScorerKind::TransE_L1, small(0));
  const auto after = train(kg, ScorerKind::TransE_L1, cfg);
  const auto rb = relik_batch(kg, EmbeddingScorer(before, ScorerKind::TransE_L1), kg.facts(),
                              Estimator::Exact);
  const auto ra = relik_batch(kg, EmbeddingScorer(after, ScorerKind::TransE_L1), kg.facts(),
                              Estimator::Exact);
  EXPECT_GT(relik_set(ra), relik_set(rb));
}

TEST(Trainer, TransEEntitiesHaveUnitNorm) {
  const auto kg = chain();
  const auto store = train(kg, ScorerKind::TransE_L2, small(5));
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) {
    double sq = 0.0;
    for (double v : store.entity(EntityId{e})) sq += v * v;
    EXPECT_NEAR(sq, 1.0, 1e-12);
  }
}

TEST(Trainer, Errors) {
  const auto kg = chain();
  EXPECT_THROW(train(kg, ScorerKind::RotatE, small(1)), ConfigError);
  EXPECT_FALSE(is_trainable(ScorerKind::ComplEx));
  EXPECT_TRUE(is_trainable(ScorerKind::DistMult));
  auto cfg = small(1);
  cfg.dim = 0;
  EXPECT_THROW(train(kg, ScorerKind::DistMult, cfg), ConfigError);
  cfg = small(1);
  cfg.learning_rate = -1;
  EXPECT_THROW(train(kg, ScorerKind::DistMult, cfg), ConfigError);
  KnowledgeGraphBuilder b;
  b.add_entity("x");
  b.add_relation("r");
  EXPECT_THROW(train(b.build(), ScorerKind::DistMult, small(1)), DomainError);
}

TEST(Trainer, DivergenceIsReported) {
  const auto kg = chain();
  auto cfg = small(50);
  cfg.learning_rate = 1e200;
  EXPECT_THROW(train(kg, ScorerKind::DistMult, cfg), DivergenceError);
}
