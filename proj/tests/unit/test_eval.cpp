#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "relik/eval.hpp"
#include "support/oracles.hpp"

using namespace relik;

namespace {

// Scores facts 1 and everything else 0.
class FactScorer final : public ScoreFunction {
 public:
  explicit FactScorer(const KnowledgeGraph& kg) : kg_(&kg) {}
  double score(const Triple& t) const override { return kg_->contains(t) ? 1.0 : 0.0; }

 private:
  const KnowledgeGraph* kg_;
};

// Facts 1, the listed triples -1, everything else 0.
class PenaltyScorer final : public ScoreFunction {
 public:
  PenaltyScorer(const KnowledgeGraph& kg, std::vector<Triple> low) : kg_(&kg), low_(std::move(low)) {}
  double score(const Triple& t) const override {
    if (kg_->contains(t)) return 1.0;
    return std::find(low_.begin(), low_.end(), t) != low_.end() ? -1.0 : 0.0;
  }

 private:
  const KnowledgeGraph* kg_;
  std::vector<Triple> low_;
};

double brute_rr(const oracle::RawKg& kg, const oracle::RawEmbedding& emb, ScorerKind kind,
                const oracle::RawTriple& x, PredictionTarget target) {
  const double sx = oracle::score(kind, emb, x);
  std::size_t rank = 1;
  const std::size_t n = target == PredictionTarget::Tail ? kg.num_entities : kg.num_relations;
  for (std::uint32_t c = 0; c < n; ++c) {
    oracle::RawTriple y = x;
    (target == PredictionTarget::Tail ? y[2] : y[1]) = c;
    if (y == x || kg.has(y)) continue;
    rank += oracle::score(kind, emb, y) > sx;
  }
  return 1.0 / static_cast<double>(rank);
}

}  // namespace

TEST(Mrr, MatchesBruteForce) {
  std::mt19937_64 g(61);
  for (int i = 0; i < 60; ++i) {
    const auto raw = oracle::random_kg(g, 15, 4);
    const auto kg = oracle::to_graph(raw);
    const ScorerKind kind = kAllScorers[i % 6];
    const auto emb = oracle::random_embedding(g, raw, kind, 3);
    const auto store = oracle::to_store(emb);
    const EmbeddingScorer s(store, kind);
    for (auto target : {PredictionTarget::Tail, PredictionTarget::Relation}) {
      double sum = 0.0;
      for (const auto& f : raw.facts) {
        const double want = brute_rr(raw, emb, kind, f, target);
        EXPECT_NEAR(reciprocal_rank(kg, s, oracle::to_triple(f), target), want, 1e-12);
        sum += want;
      }
      EXPECT_NEAR(mrr(kg, s, kg.facts(), target), sum / raw.facts.size(), 1e-12);
    }
  }
}

TEST(Mrr, PerfectScorerAndErrors) {
  const auto kg = KnowledgeGraph::parse("a\tr\tb\nb\tr\tc\nc\ts\ta\n");
  const FactScorer s(kg);
  EXPECT_EQ(mrr(kg, s, kg.facts(), PredictionTarget::Tail), 1.0);
  EXPECT_EQ(mrr(kg, s, kg.facts(), PredictionTarget::Relation), 1.0);
  EXPECT_THROW(mrr(kg, s, {}, PredictionTarget::Tail), DomainError);
  const std::vector<Triple> bad{{EntityId{0}, RelationId{1}, EntityId{0}}};
  EXPECT_THROW(mrr(kg, s, bad, PredictionTarget::Tail), DomainError);
}

TEST(Threshold, MatchesBruteForce) {
  std::mt19937_64 g(62);
  for (int i = 0; i < 200; ++i) {
    std::vector<LabeledScore> items;
    const int n = 1 + static_cast<int>(g() % 12);
    for (int j = 0; j < n; ++j) items.push_back({static_cast<double>(g() % 6), g() % 2 == 0});
    const auto fit = fit_threshold(items);
    EXPECT_EQ(fit.accuracy, accuracy_at(items, fit.threshold));
    std::vector<double> scores;
    for (const auto& it : items) scores.push_back(it.score);
    std::sort(scores.begin(), scores.end());
    scores.erase(std::unique(scores.begin(), scores.end()), scores.end());
    std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
    for (std::size_t j = 0; j + 1 < scores.size(); ++j) {
      candidates.push_back(scores[j] + (scores[j + 1] - scores[j]) / 2);
    }
    candidates.push_back(std::numeric_limits<double>::infinity());
    double best = 0.0;
    for (double th : candidates) best = std::max(best, accuracy_at(items, th));
    EXPECT_EQ(fit.accuracy, best);
    for (double th : candidates) {
      if (th < fit.threshold) EXPECT_LT(accuracy_at(items, th), best);
    }
  }
}

TEST(Threshold, Edges) {
  const std::vector<LabeledScore> all_pos{{1, true}, {2, true}};
  EXPECT_EQ(fit_threshold(all_pos).threshold, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(fit_threshold(all_pos).accuracy, 1.0);
  const std::vector<LabeledScore> split{{0, false}, {1, false}, {3, true}};
  EXPECT_EQ(fit_threshold(split).threshold, 2.0);
  EXPECT_THROW(fit_threshold({}), DomainError);
}

TEST(Classification, PerfectScorerAndCorruptions) {
  std::mt19937_64 g(63);
  const auto kg = oracle::to_graph(oracle::random_kg(g, 20, 2));
  const FactScorer s(kg);
  EXPECT_EQ(classification_accuracy(kg, s, kg.facts(), 5), 1.0);
  EXPECT_EQ(classification_accuracy(kg, s, kg.facts(), 5, 0.5), 1.0);
  EXPECT_THROW(classification_accuracy(kg, s, kg.facts(), 5, 1.0), ConfigError);

  Rng rng(7);
  const auto negs = corrupt_negatives(kg, kg.facts(), rng);
  ASSERT_EQ(negs.size(), kg.num_facts());
  for (std::size_t i = 0; i < negs.size(); ++i) {
    EXPECT_FALSE(kg.contains(negs[i]));
    const auto& p = kg.facts()[i];
    EXPECT_EQ(negs[i].relation, p.relation);
    EXPECT_TRUE(negs[i].head == p.head || negs[i].tail == p.tail);
  }
}

TEST(Classification, SaturatedGraphFailsToSample) {
  // Every triple over {a} x {r} x {a} is a fact.
  const auto kg = KnowledgeGraph::parse("a\tr\ta\n");
  Rng rng(1);
  EXPECT_THROW(corrupt_negatives(kg, kg.facts(), rng), SamplingError);
}

TEST(Histogram, CountsEveryScore) {
  const std::vector<double> pos{0.0, 0.5, 1.0, 1.0}, neg{0.2, 0.9};
  const auto h = score_histogram(pos, neg, 4);
  ASSERT_EQ(h.rows.size(), 4u);
  EXPECT_EQ(h.columns, (std::vector<std::string>{"bin_low", "bin_high", "positive", "negative"}));
  double np = 0, nn = 0;
  for (const auto& row : h.rows) {
    np += std::get<double>(row[2]);
    nn += std::get<double>(row[3]);
  }
  EXPECT_EQ(np, 4.0);
  EXPECT_EQ(nn, 2.0);
  EXPECT_EQ(std::get<double>(h.rows[0][0]), 0.0);
  EXPECT_EQ(std::get<double>(h.rows[3][1]), 1.0);
  EXPECT_EQ(std::get<double>(h.rows[3][2]), 2.0);  // max lands in the last bin
  EXPECT_TRUE(score_histogram({}, {}, 3).rows.empty());
  EXPECT_THROW(score_histogram(pos, neg, 0), ConfigError);
}

TEST(ApproxStudy, FullFractionHasZeroError) {
  std::mt19937_64 g(64);
  const auto raw = oracle::random_kg(g, 20, 3);
  const auto kg = oracle::to_graph(raw);
  const auto store = oracle::to_store(oracle::random_embedding(g, raw, ScorerKind::TransE_L2, 3));
  const EmbeddingScorer s(store, ScorerKind::TransE_L2);
  ApproxStudyConfig cfg;
  cfg.fractions = {0.2, 1.0};
  cfg.timing = false;
  const auto study = approximation_study(kg, s, kg.facts(), cfg);
  ASSERT_EQ(study.rows.size(), 2u);
  EXPECT_EQ(study.rows[1].mse_apx, 0.0);
  EXPECT_EQ(study.rows[1].mse_lb, 0.0);
  EXPECT_EQ(study.rows[0].seconds, 0.0);
  EXPECT_GE(study.rows[0].mse_lb, 0.0);
  const auto rep = to_report(study, cfg);
  EXPECT_EQ(rep.columns, (std::vector<std::string>{"fraction", "seconds", "mse_apx", "mse_lb"}));
  cfg.fractions = {0.0};
  EXPECT_THROW(approximation_study(kg, s, kg.facts(), cfg), ConfigError);
}

TEST(Margin, PerfectScorerSeparates) {
  const auto kg = KnowledgeGraph::parse("a\tr\tb\nb\tr\tc\nc\tr\td\nd\tr\te\n");
  const std::vector<Triple> neg{{EntityId{0}, RelationId{0}, EntityId{2}},
                                {EntityId{1}, RelationId{0}, EntityId{4}}};
  const PenaltyScorer s(kg, neg);
  const auto m = margin_report(kg, s, kg.facts(), neg, {}, Estimator::Exact, 2);
  EXPECT_EQ(m.mean_relik_pos, 1.0);
  EXPECT_EQ(m.mean_rr_pos, 1.0);
  EXPECT_LT(m.mean_relik_neg, m.mean_relik_pos);
  EXPECT_LT(m.mean_rr_neg, m.mean_rr_pos);
  EXPECT_THROW(margin_report(kg, s, neg, neg, {}), DomainError);
  EXPECT_THROW(margin_report(kg, s, kg.facts(), kg.facts(), {}), DomainError);
  EXPECT_THROW(margin_report(kg, s, {}, neg, {}), DomainError);
}

TEST(Correlation, SelfCheckIsPerfect) {
  std::mt19937_64 g(65);
  const auto raw = oracle::random_kg(g, 40, 2);
  const auto kg = oracle::to_graph(raw);
  const auto store = oracle::to_store(oracle::random_embedding(g, raw, ScorerKind::DistMult, 3));
  const EmbeddingScorer s(store, ScorerKind::DistMult);
  CorrelationConfig cfg;
  cfg.task = CorrelationTask::SelfCheck;
  cfg.subgraphs = 12;
  cfg.nodes = 6;
  const auto study = subgraph_correlation(kg, s, cfg);
  ASSERT_TRUE(study.correlation.has_value());
  EXPECT_NEAR(study.correlation->r, 1.0, 1e-9);
  EXPECT_EQ(study.points.size() + study.skipped, 12u);
  cfg.threads = 3;
  const auto again = subgraph_correlation(kg, s, cfg);
  ASSERT_EQ(again.points.size(), study.points.size());
  for (std::size_t i = 0; i < study.points.size(); ++i) {
    EXPECT_EQ(again.points[i].relik, study.points[i].relik);
  }
  cfg.subgraphs = 2;
  EXPECT_THROW(subgraph_correlation(kg, s, cfg), ConfigError);
}
