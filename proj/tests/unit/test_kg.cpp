#include <gtest/gtest.h>

#include <map>
#include <random>
#include <set>

#include "relik/kg.hpp"
#include "support/oracles.hpp"

using namespace relik;

namespace {

KnowledgeGraph micro() { return KnowledgeGraph::parse("A\tr\tB\nB\tr\tC\nA\ts\tC\n"); }

}  // namespace

TEST(KgParse, InternsInFirstSeenOrder) {
  const auto kg = micro();
  EXPECT_EQ(kg.num_entities(), 3u);
  EXPECT_EQ(kg.num_relations(), 2u);
  EXPECT_EQ(kg.num_facts(), 3u);
  EXPECT_EQ(kg.entities().label(0), "A");
  EXPECT_EQ(kg.entities().label(2), "C");
  EXPECT_EQ(kg.relation("s")->index, 1u);
  EXPECT_FALSE(kg.entity("Z").has_value());
}

TEST(KgParse, SkipsCommentsBomAndCrlf) {
  const auto kg = KnowledgeGraph::parse("\xEF\xBB\xBF# header\r\nA\tr\tB\r\n\r\n# more\nB\tr\tA");
  EXPECT_EQ(kg.num_facts(), 2u);
  EXPECT_EQ(kg.entities().label(0), "A");
}

TEST(KgParse, DeduplicatesFacts) {
  const auto kg = KnowledgeGraph::parse("A\tr\tB\nA\tr\tB\nB\tr\tA\n");
  EXPECT_EQ(kg.num_facts(), 2u);
}

TEST(KgParse, WrongFieldCountNamesLine) {
  try {
    KnowledgeGraph::parse("A\tr\tB\nA\tr\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(KgParse, EmptyFieldIsRejected) {
  EXPECT_THROW(KnowledgeGraph::parse("A\t\tB\n"), ParseError);
  EXPECT_THROW(KnowledgeGraph::parse("A\tr\tB\tC\n"), ParseError);
}

TEST(KgBuilder, SharedVocabularyAcrossDocuments) {
  KnowledgeGraphBuilder b;
  const auto train = b.add_document("A\tr\tB\n");
  b.add_document("B\tr\tC\n");
  const auto first = b.build(train);
  const auto all = b.build();
  EXPECT_EQ(first.num_entities(), 3u);
  EXPECT_EQ(first.num_facts(), 1u);
  EXPECT_EQ(all.num_facts(), 2u);
}

TEST(KgBuilder, DeclaredEntitiesJoinTheVocabulary) {
  KnowledgeGraphBuilder b;
  b.add("A", "r", "B");
  b.add_entity("C");
  const auto kg = b.build();
  EXPECT_EQ(kg.num_entities(), 3u);
  EXPECT_EQ(kg.degree(*kg.entity("C")), 0u);
}

TEST(KgMembership, ContainsAndRangeChecks) {
  const auto kg = micro();
  EXPECT_TRUE(kg.contains({EntityId{0}, RelationId{0}, EntityId{1}}));
  EXPECT_FALSE(kg.contains({EntityId{1}, RelationId{0}, EntityId{0}}));
  EXPECT_THROW(kg.contains({EntityId{9}, RelationId{0}, EntityId{0}}), DomainError);
  EXPECT_THROW(kg.contains({EntityId{0}, RelationId{5}, EntityId{0}}), DomainError);
}

TEST(KgNeighborhood, SizesCountSelfLoopsAsNegatives) {
  // M1: E={A,B,C}, R={r}, F={(A,r,B)}.
  KnowledgeGraphBuilder b;
  b.add("A", "r", "B");
  b.add_entity("C");
  const auto kg = b.build();
  const EntityId a{0}, bb{1};
  EXPECT_EQ(kg.negative_neighborhood_size(a, Side::Head), 2u);
  EXPECT_EQ(kg.negative_neighborhood_size(bb, Side::Tail), 2u);
  const auto heads = kg.enumerate_negatives(a, Side::Head);
  ASSERT_EQ(heads.size(), 2u);
  EXPECT_EQ(heads[0], (Triple{a, RelationId{0}, a}));
  EXPECT_EQ(heads[1], (Triple{a, RelationId{0}, EntityId{2}}));
  const auto tails = kg.enumerate_negatives(bb, Side::Tail);
  EXPECT_EQ(tails[0], (Triple{bb, RelationId{0}, bb}));
  EXPECT_EQ(tails[1], (Triple{EntityId{2}, RelationId{0}, bb}));
}

TEST(KgNeighborhood, EnumerationMatchesBruteForce) {
  std::mt19937_64 g(11);
  for (int i = 0; i < 50; ++i) {
    const auto raw = oracle::random_kg(g, 12, 3);
    const auto kg = oracle::to_graph(raw);
    for (std::uint32_t e = 0; e < raw.num_entities; ++e) {
      std::set<Triple> want_h, want_t;
      for (std::uint32_t r = 0; r < raw.num_relations; ++r) {
        for (std::uint32_t o = 0; o < raw.num_entities; ++o) {
          if (!raw.has({e, r, o})) want_h.insert(oracle::to_triple({e, r, o}));
          if (!raw.has({o, r, e})) want_t.insert(oracle::to_triple({o, r, e}));
        }
      }
      const auto h = kg.enumerate_negatives(EntityId{e}, Side::Head);
      const auto t = kg.enumerate_negatives(EntityId{e}, Side::Tail);
      EXPECT_EQ(std::set<Triple>(h.begin(), h.end()), want_h);
      EXPECT_EQ(std::set<Triple>(t.begin(), t.end()), want_t);
      EXPECT_EQ(kg.negative_neighborhood_size(EntityId{e}, Side::Head), want_h.size());
      EXPECT_EQ(kg.negative_neighborhood_size(EntityId{e}, Side::Tail), want_t.size());
    }
  }
}

TEST(KgSampling, DistinctNegativesOfTheRightSide) {
  std::mt19937_64 g(12);
  for (int i = 0; i < 100; ++i) {
    const auto raw = oracle::random_kg(g, 20, 3);
    const auto kg = oracle::to_graph(raw);
    const EntityId anchor{static_cast<std::uint32_t>(g() % raw.num_entities)};
    const Side side = g() % 2 ? Side::Head : Side::Tail;
    const auto size = kg.negative_neighborhood_size(anchor, side);
    const auto k = 1 + g() % size;
    Rng rng(g());
    const auto s = kg.sample_negatives(anchor, side, k, rng);
    ASSERT_EQ(s.size(), k);
    EXPECT_EQ(std::set<Triple>(s.begin(), s.end()).size(), k);
    for (const auto& t : s) {
      EXPECT_FALSE(kg.contains(t));
      EXPECT_EQ(side == Side::Head ? t.head : t.tail, anchor);
    }
  }
}

TEST(KgSampling, OversizedRequestThrows) {
  const auto kg = micro();
  Rng rng(1);
  EXPECT_THROW(kg.sample_negatives(EntityId{0}, Side::Head, 100, rng), DomainError);
}

TEST(KgSampling, SameSeedSameSample) {
  const auto kg = micro();
  Rng a(7), b(7);
  EXPECT_EQ(kg.sample_negatives(EntityId{0}, Side::Head, 2, a),
            kg.sample_negatives(EntityId{0}, Side::Head, 2, b));
}

// Chi-square goodness of fit for uniformity over the neighborhood, on both
// the rejection path (small k) and the enumeration path (large k).
TEST(KgSampling, UniformOverTheNeighborhood) {
  std::string doc;
  for (int i = 0; i < 4; ++i) doc += "e0\tr\te" + std::to_string(i + 1) + "\n";
  for (int i = 5; i < 20; ++i) doc += "e" + std::to_string(i) + "\tr\te0\n";
  const auto kg = KnowledgeGraph::parse(doc);
  const EntityId anchor{0};
  const auto size = kg.negative_neighborhood_size(anchor, Side::Head);
  for (std::uint64_t k : {std::uint64_t{2}, size - 2}) {
    std::map<Triple, int> counts;
    constexpr int kTrials = 20000;
    Rng rng(99);
    for (int i = 0; i < kTrials; ++i) {
      for (const auto& t : kg.sample_negatives(anchor, Side::Head, k, rng)) ++counts[t];
    }
    ASSERT_EQ(counts.size(), size);
    const double expected = static_cast<double>(kTrials) * k / size;
    double chi2 = 0.0;
    for (const auto& [t, c] : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 15 degrees of freedom; the 0.999 quantile is 37.7.
    EXPECT_LT(chi2, 37.7) << "k=" << k;
  }
}

TEST(KgSampling, CandidateIndexRoundTrips) {
  const auto kg = micro();
  for (Side side : {Side::Head, Side::Tail}) {
    for (std::uint64_t i = 0; i < kg.candidate_space(); ++i) {
      EXPECT_EQ(kg.candidate_index(kg.candidate(EntityId{1}, side, i), side), i);
    }
  }
}

TEST(KgAdjacency, OutAndInFacts) {
  const auto kg = micro();
  EXPECT_EQ(kg.out_facts(EntityId{0}).size(), 2u);
  EXPECT_EQ(kg.in_facts(EntityId{2}).size(), 2u);
  EXPECT_EQ(kg.degree(EntityId{1}), 2u);
  EXPECT_EQ(kg.head_count(EntityId{0}), 2u);
  EXPECT_EQ(kg.tail_count(EntityId{0}), 0u);
}

TEST(KgText, TsvRoundTrip) {
  const auto kg = micro();
  const auto again = KnowledgeGraph::parse(to_tsv(kg));
  EXPECT_EQ(to_tsv(again), to_tsv(kg));
  EXPECT_EQ(again.num_facts(), kg.num_facts());
}
