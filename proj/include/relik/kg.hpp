#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "relik/errors.hpp"
#include "relik/random.hpp"

namespace relik {

struct EntityId {
  std::uint32_t index = 0;
  friend auto operator<=>(EntityId, EntityId) = default;
};

struct RelationId {
  std::uint32_t index = 0;
  friend auto operator<=>(RelationId, RelationId) = default;
};

struct Triple {
  EntityId head;
  RelationId relation;
  EntityId tail;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

/// Which endpoint of a triple anchors a negative neighborhood.
enum class Side : std::uint8_t { Head, Tail };

/// Label interning in first-occurrence order.
class Vocabulary {
 public:
  std::uint32_t intern(std::string_view label);
  std::optional<std::uint32_t> find(std::string_view label) const;
  const std::string& label(std::uint32_t index) const { return labels_.at(index); }
  std::size_t size() const noexcept { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

class KnowledgeGraph;

/// Incremental loader sharing one pair of vocabularies across several
/// documents (e.g. train/valid/test splits).
class KnowledgeGraphBuilder {
 public:
  /// Parses one tab-separated triple document and returns its triples in
  /// file order (duplicates included). Throws ParseError.
  std::vector<Triple> add_document(std::string_view text);

  Triple add(std::string_view head, std::string_view relation, std::string_view tail);

  /// Declares an entity or relation that may appear in no fact.
  EntityId add_entity(std::string_view label) { return EntityId{entities_.intern(label)}; }
  RelationId add_relation(std::string_view label) { return RelationId{relations_.intern(label)}; }

  /// Graph over the shared vocabularies with the given fact list.
  KnowledgeGraph build(std::span<const Triple> facts) const;
  /// Graph over every triple added so far.
  KnowledgeGraph build() const;

  const Vocabulary& entities() const noexcept { return entities_; }
  const Vocabulary& relations() const noexcept { return relations_; }

 private:
  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> all_;
};

/// Immutable in-memory knowledge graph. Facts are deduplicated and kept in
/// first-occurrence order; membership is an O(1) hash probe.
///
/// Candidate indices: for an anchor on either side, the |R|*|E| candidate
/// triples are numbered relation-major, `index = r * |E| + e`, where `e` is
/// the free endpoint. Self-referential candidates are included.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  KnowledgeGraph(Vocabulary entities, Vocabulary relations, std::span<const Triple> facts);

  /// Parses a single triple document. Throws ParseError.
  static KnowledgeGraph parse(std::string_view text);

  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_relations() const noexcept { return relations_.size(); }
  std::size_t num_facts() const noexcept { return facts_.size(); }
  std::uint64_t candidate_space() const noexcept {
    return static_cast<std::uint64_t>(num_entities()) * num_relations();
  }

  const Vocabulary& entities() const noexcept { return entities_; }
  const Vocabulary& relations() const noexcept { return relations_; }
  std::span<const Triple> facts() const noexcept { return facts_; }

  std::optional<EntityId> entity(std::string_view label) const;
  std::optional<RelationId> relation(std::string_view label) const;

  /// True iff the triple is a fact. Throws DomainError on out-of-range ids.
  bool contains(const Triple& triple) const;

  std::uint64_t head_count(EntityId e) const;
  std::uint64_t tail_count(EntityId e) const;
  std::uint64_t positive_count(EntityId anchor, Side side) const {
    return side == Side::Head ? head_count(anchor) : tail_count(anchor);
  }

  /// |N-(anchor)| = |R|*|E| - (facts with that anchor on that side).
  std::uint64_t negative_neighborhood_size(EntityId anchor, Side side) const;

  /// Every negative of the neighborhood, relation-major then entity order.
  std::vector<Triple> enumerate_negatives(EntityId anchor, Side side) const;

  /// Calls fn(triple) for each negative in enumeration order.
  template <class Fn>
  void for_each_negative(EntityId anchor, Side side, Fn&& fn) const;

  /// k distinct negatives drawn uniformly without replacement. Rejection
  /// sampling over the candidate index space; falls back to enumeration and
  /// a partial shuffle when k exceeds half the neighborhood or positives
  /// occupy more than half of the candidate space. Throws DomainError when
  /// k exceeds the neighborhood size.
  std::vector<Triple> sample_negatives(EntityId anchor, Side side, std::uint64_t k,
                                       Rng& rng) const;

  Triple candidate(EntityId anchor, Side side, std::uint64_t index) const;
  std::uint64_t candidate_index(const Triple& triple, Side side) const;

  /// Indices into facts() of the facts with `e` as head (out) or tail (in).
  std::span<const std::uint32_t> out_facts(EntityId e) const;
  std::span<const std::uint32_t> in_facts(EntityId e) const;
  std::size_t degree(EntityId e) const { return out_facts(e).size() + in_facts(e).size(); }

  /// Dense key (h*|R| + r)*|E| + t; stable for a given graph.
  std::uint64_t key(const Triple& t) const noexcept {
    return (static_cast<std::uint64_t>(t.head.index) * num_relations() + t.relation.index) *
               num_entities() +
           t.tail.index;
  }

  void check(EntityId e) const;
  void check(RelationId r) const;
  void check(const Triple& t) const;

  std::string format(const Triple& t) const;

 private:
  bool is_fact_unchecked(const Triple& t) const { return fact_keys_.count(key(t)) != 0; }
  std::vector<char> positive_mask(EntityId anchor, Side side) const;

  Vocabulary entities_;
  Vocabulary relations_;
  std::vector<Triple> facts_;
  std::unordered_set<std::uint64_t> fact_keys_;
  // CSR adjacency: fact indices grouped by head and by tail.
  std::vector<std::uint32_t> out_offsets_, out_index_;
  std::vector<std::uint32_t> in_offsets_, in_index_;
};

template <class Fn>
void KnowledgeGraph::for_each_negative(EntityId anchor, Side side, Fn&& fn) const {
  check(anchor);
  const std::vector<char> positive = positive_mask(anchor, side);
  const std::uint64_t space = candidate_space();
  for (std::uint64_t i = 0; i < space; ++i) {
    if (!positive[i]) fn(candidate(anchor, side, i));
  }
}

/// Tab-separated document of the facts, one per line in fact order.
std::string to_tsv(const KnowledgeGraph& kg);

}  // namespace relik
