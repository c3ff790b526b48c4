#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relik/kg.hpp"

namespace relik {

enum class Field { Real, Complex };

enum class ScorerKind { TransE_L1, TransE_L2, DistMult, RotatE, PairRE, ComplEx };

inline constexpr ScorerKind kAllScorers[] = {ScorerKind::TransE_L1, ScorerKind::TransE_L2,
                                             ScorerKind::DistMult,  ScorerKind::RotatE,
                                             ScorerKind::PairRE,    ScorerKind::ComplEx};

/// Command-line spelling: transe-l1, transe-l2, distmult, rotate, pairre, complex.
std::string_view to_string(ScorerKind kind);
std::optional<ScorerKind> parse_scorer_kind(std::string_view name);
std::string_view to_string(Field field);

/// Field a scorer operates in.
Field required_field(ScorerKind kind);

/// One labeled row of an embedding file, before alignment to a graph.
struct EmbeddingRow {
  enum class Tag { Entity, Relation, RelationTail };
  Tag tag;
  std::string label;
  std::vector<double> values;
  std::size_t line = 0;
};

/// Parsed embedding file (format v1):
///
///   #relik-embeddings v=1 dim=<D> field=<real|complex> orientation=<+1|-1>
///   E<TAB>label<TAB>x_1 ... x_W
///   R<TAB>label<TAB>...
///   RT<TAB>label<TAB>...
///
/// W = D for real stores and 2D for complex ones (real block, then imaginary).
struct EmbeddingFile {
  std::size_t dim = 0;
  Field field = Field::Real;
  int orientation = 1;
  std::vector<EmbeddingRow> rows;
};

/// Throws ParseError / SchemaError with the offending line.
EmbeddingFile parse_embeddings(std::string_view text);

/// Dense per-entity and per-relation vectors indexed by graph ids. Complex
/// vectors are stored as `dim` real parts followed by `dim` imaginary parts.
class EmbeddingStore {
 public:
  EmbeddingStore(std::size_t dim, Field field, std::size_t num_entities,
                 std::size_t num_relations, bool has_relation_tail, int orientation = 1);

  /// Aligns a parsed file to the graph vocabularies. Every entity and
  /// relation of the graph must have a vector; extra labels are ignored.
  static EmbeddingStore bind(const EmbeddingFile& file, const KnowledgeGraph& kg);

  std::size_t dim() const noexcept { return dim_; }
  Field field() const noexcept { return field_; }
  int orientation() const noexcept { return orientation_; }
  /// Doubles per vector.
  std::size_t width() const noexcept { return field_ == Field::Complex ? 2 * dim_ : dim_; }
  std::size_t num_entities() const noexcept { return num_entities_; }
  std::size_t num_relations() const noexcept { return num_relations_; }
  bool has_relation_tail() const noexcept { return !relation_tail_.empty(); }

  std::span<const double> entity(EntityId e) const { return row(entity_, e.index); }
  std::span<const double> relation(RelationId r) const { return row(relation_, r.index); }
  std::span<const double> relation_tail(RelationId r) const { return row(relation_tail_, r.index); }
  std::span<double> entity(EntityId e) { return row(entity_, e.index); }
  std::span<double> relation(RelationId r) { return row(relation_, r.index); }
  std::span<double> relation_tail(RelationId r) { return row(relation_tail_, r.index); }

  /// Serializes in format v1 using the graph's labels (17 significant digits).
  std::string to_text(const KnowledgeGraph& kg) const;

  friend bool operator==(const EmbeddingStore&, const EmbeddingStore&) = default;

 private:
  std::span<const double> row(const std::vector<double>& v, std::size_t i) const {
    return std::span<const double>(v).subspan(i * width(), width());
  }
  std::span<double> row(std::vector<double>& v, std::size_t i) {
    return std::span<double>(v).subspan(i * width(), width());
  }

  std::size_t dim_;
  Field field_;
  int orientation_;
  std::size_t num_entities_;
  std::size_t num_relations_;
  std::vector<double> entity_;
  std::vector<double> relation_;
  std::vector<double> relation_tail_;
};

/// Black-box triple plausibility, higher is better.
class ScoreFunction {
 public:
  virtual ~ScoreFunction() = default;
  virtual double score(const Triple& triple) const = 0;
  /// out[i] = score(triples[i]). Must agree bit-for-bit with score().
  virtual void score_batch(std::span<const Triple> triples, std::span<double> out) const;
};

/// Closed-form embedding scores. Orientation of the store (+1 for every
/// bundled scorer) is applied as a final multiplication.
///
///   TransE_Lp  -|| h + r - t ||_p
///   DistMult   sum_i h_i r_i t_i
///   RotatE     -|| h o r - t ||_2            (complex Hadamard product)
///   PairRE     -|| h o r_head - t o r_tail ||_2
///   ComplEx    Re( sum_i r_i h_i conj(t_i) )
class EmbeddingScorer final : public ScoreFunction {
 public:
  /// Throws ConfigError when the store cannot back this scorer.
  EmbeddingScorer(const EmbeddingStore& store, ScorerKind kind);

  double score(const Triple& triple) const override;
  /// OpenMP-partitioned for large batches; order-preserving.
  void score_batch(std::span<const Triple> triples, std::span<double> out) const override;

  ScorerKind kind() const noexcept { return kind_; }
  const EmbeddingStore& store() const noexcept { return *store_; }

 private:
  const EmbeddingStore* store_;
  ScorerKind kind_;
};

/// Composes a function with another scorer's output.
class TransformedScorer final : public ScoreFunction {
 public:
  TransformedScorer(const ScoreFunction& base, std::function<double(double)> transform)
      : base_(&base), transform_(std::move(transform)) {}

  double score(const Triple& triple) const override { return transform_(base_->score(triple)); }

 private:
  const ScoreFunction* base_;
  std::function<double(double)> transform_;
};

std::vector<double> score_batch(const ScoreFunction& scorer, std::span<const Triple> triples);

}  // namespace relik
