#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "relik/embed.hpp"
#include "relik/graphops.hpp"
#include "relik/kg.hpp"
#include "relik/reliability.hpp"
#include "relik/report.hpp"
#include "relik/stats.hpp"

namespace relik {

// ---------------------------------------------------------------------------
// Ranking metrics
// ---------------------------------------------------------------------------

enum class PredictionTarget { Tail, Relation };

/// Filtered reciprocal rank of x's true tail (or relation). Competing
/// candidates that are facts of `filter` are skipped; ties do not raise the
/// rank. x itself need not be a fact.
double reciprocal_rank(const KnowledgeGraph& filter, const ScoreFunction& scorer, const Triple& x,
                       PredictionTarget target);

/// Mean filtered reciprocal rank over `eval` (each a fact of `filter`).
/// Throws DomainError on an empty list.
double mrr(const KnowledgeGraph& filter, const ScoreFunction& scorer, std::span<const Triple> eval,
           PredictionTarget target);

// ---------------------------------------------------------------------------
// Triple classification
// ---------------------------------------------------------------------------

/// One corrupted negative per positive: head or tail (fair coin) replaced by
/// a uniform entity, resampled until the result is not a fact. Throws
/// SamplingError after 10^4 failed attempts for one positive.
std::vector<Triple> corrupt_negatives(const KnowledgeGraph& kg, std::span<const Triple> positives,
                                      Rng& rng);

struct LabeledScore {
  double score;
  bool positive;
};

struct ThresholdFit {
  double threshold;  // predict positive iff score > threshold
  double accuracy;
};

/// Accuracy-maximizing threshold among -inf, midpoints of consecutive
/// distinct scores, and +inf. The lowest such threshold wins ties.
ThresholdFit fit_threshold(std::span<const LabeledScore> items);

double accuracy_at(std::span<const LabeledScore> items, double threshold);

/// Best single-threshold accuracy on positives plus their corrupted
/// negatives. With holdout_fraction > 0 the labeled set is shuffled, the
/// threshold fitted on the first (1 - holdout) share and scored on the rest.
double classification_accuracy(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                               std::span<const Triple> eval, std::uint64_t seed,
                               double holdout_fraction = 0.0);

// ---------------------------------------------------------------------------
// Experiment harnesses
// ---------------------------------------------------------------------------

struct ApproxStudyRow {
  double fraction = 0.0;
  double seconds = 0.0;  // per pass over all triples, averaged over repetitions
  double mse_apx = 0.0;
  double mse_lb = 0.0;
  double se_apx = 0.0;  // standard error of the MSE
  double se_lb = 0.0;
};

struct ApproxStudy {
  double exact_seconds = 0.0;  // per pass, averaged over repetitions
  std::vector<double> exact;  // per triple
  std::vector<ApproxStudyRow> rows;
};

struct ApproxStudyConfig {
  std::vector<double> fractions{0.05, 0.10, 0.20, 0.40, 0.80};
  std::size_t repetitions = 3;
  std::uint64_t seed = kDefaultSeed;
  bool timing = true;
  int threads = 0;
};

/// MSE of both estimators against exact reliability, per fraction, over
/// triples x repetitions. Repetition r of fraction i samples with seed
/// derive_seed(seed, r, i).
ApproxStudy approximation_study(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                std::span<const Triple> triples, const ApproxStudyConfig& cfg);

/// Columns: fraction, seconds, mse_apx, mse_lb.
EvalReport to_report(const ApproxStudy& study, const ApproxStudyConfig& cfg);

enum class CorrelationTask { TailMrr, RelationMrr, Classification, SelfCheck };

std::string_view to_string(CorrelationTask task);
std::optional<CorrelationTask> parse_correlation_task(std::string_view name);

struct CorrelationConfig {
  CorrelationTask task = CorrelationTask::RelationMrr;
  std::size_t subgraphs = 100;
  std::size_t nodes = 60;
  double restart = 0.2;
  double holdout = 0.0;  // classification only: share of labels held out from the threshold fit
  SampleConfig sample{};  // sample.seed is the global seed
  int threads = 0;
};

struct CorrelationPoint {
  std::size_t index = 0;
  EntityId start{};
  std::size_t nodes = 0;
  std::size_t triples = 0;
  double relik = 0.0;
  double metric = 0.0;
};

struct CorrelationStudy {
  std::vector<CorrelationPoint> points;
  std::size_t skipped = 0;  // subgraphs with no induced triple
  std::optional<PearsonResult> correlation;  // empty when degenerate
};

/// For each RWR subgraph: scaled-estimator reliability of its induced
/// triples against the task metric on the same triples.
CorrelationStudy subgraph_correlation(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                      const CorrelationConfig& cfg);

EvalReport to_report(const CorrelationStudy& study, const CorrelationConfig& cfg);

struct MarginReport {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double mean_relik_pos = 0.0;
  double mean_relik_neg = 0.0;
  /// Baseline: mean of filtered tail and relation reciprocal ranks.
  double mean_rr_pos = 0.0;
  double mean_rr_neg = 0.0;
};

/// Mean reliability of positive (facts) and negative (non-facts) answers.
/// Negatives are ranked with the same formulas, as if they were queries.
/// Throws DomainError if a positive is not a fact, a negative is a fact, or
/// the lists overlap.
MarginReport margin_report(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                           std::span<const Triple> positives, std::span<const Triple> negatives,
                           const SampleConfig& cfg, Estimator estimator = Estimator::Scaled,
                           int threads = 0);

EvalReport to_report(const MarginReport& margin, Estimator estimator);

/// Histogram of positive vs negative scores over `bins` equal-width bins
/// spanning the observed range. Columns: bin_low, bin_high, positive, negative.
EvalReport score_histogram(std::span<const double> positive_scores,
                           std::span<const double> negative_scores, std::size_t bins);

}  // namespace relik
