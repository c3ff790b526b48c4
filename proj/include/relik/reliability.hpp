#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "relik/embed.hpp"
#include "relik/kg.hpp"
#include "relik/random.hpp"

namespace relik {

enum class Estimator { Exact, LowerBound, Scaled };

std::string_view to_string(Estimator e);

/// Reliability of one triple.
///
/// For Exact, ranks are full-neighborhood ranks and sample sizes are 0. For
/// the estimators, ranks are the in-sample ranks and the sample sizes record
/// how many negatives were drawn on each side.
struct ReliKResult {
  double value = 0.0;
  std::uint64_t head_rank = 1;
  std::uint64_t tail_rank = 1;
  std::uint64_t head_neg_size = 0;
  std::uint64_t tail_neg_size = 0;
  Estimator estimator = Estimator::Exact;
  std::uint64_t head_sample_size = 0;
  std::uint64_t tail_sample_size = 0;
  /// Requested sample size was clamped into [1, |N-|] on some side.
  bool clamped = false;

  std::uint64_t sample_size() const noexcept { return std::max(head_sample_size, tail_sample_size); }
};

/// Per-side sample size: either a fraction of the neighborhood (rounded to
/// nearest) or an absolute k; always clamped to [1, |N-|].
struct SampleConfig {
  double fraction = 0.10;
  std::uint64_t absolute_k = 0;  // takes precedence when non-zero
  std::uint64_t seed = kDefaultSeed;

  static SampleConfig with_fraction(double fraction, std::uint64_t seed = kDefaultSeed) {
    return SampleConfig{fraction, 0, seed};
  }
  static SampleConfig with_k(std::uint64_t k, std::uint64_t seed = kDefaultSeed) {
    return SampleConfig{1.0, k, seed};
  }
};

/// Sample size for a neighborhood of the given size. Throws ConfigError for
/// an invalid fraction or an empty neighborhood.
std::uint64_t sample_size_for(const SampleConfig& cfg, std::uint64_t neighborhood,
                              bool* clamped = nullptr);

/// 1 + number of negatives on `side` scoring strictly above x. x must be a fact.
std::uint64_t rank_against_negatives(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                     const Triple& x, Side side);

/// Exact reliability: mean of reciprocal head and tail ranks.
ReliKResult relik_exact(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x);

/// In-sample ranks for one triple; the raw material of both estimators.
struct SampleRanks {
  std::uint64_t head_rank = 1;
  std::uint64_t tail_rank = 1;
  std::uint64_t head_sample = 0;
  std::uint64_t tail_sample = 0;
  std::uint64_t head_neg = 0;
  std::uint64_t tail_neg = 0;
  bool clamped = false;
};

/// Draws S_H and S_T (stream seeds derived from cfg.seed, the triple key and
/// the side) and counts strictly-higher scores in each.
SampleRanks sample_ranks(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                         const SampleConfig& cfg);

/// In-sample ranks from caller-supplied samples. Each sample must be a set of
/// negatives from the matching side's neighborhood.
SampleRanks ranks_from_samples(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                               const Triple& x, std::span<const Triple> head_sample,
                               std::span<const Triple> tail_sample);

/// Lower bound:  1 / (rank^S + |N-| - |S|)      per side, averaged.
/// Scaled:       1 / (rank^S * |N-| / |S|)       per side, averaged.
/// The scaled denominator stays in floating point.
ReliKResult estimate(const SampleRanks& ranks, Estimator estimator);

ReliKResult relik_sampled(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                          const SampleConfig& cfg, Estimator estimator);

/// Exact or sampled, for triples that need not be facts. A non-fact query is
/// part of its own neighborhoods but never outranks itself.
ReliKResult relik_candidate(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                            const Triple& x, Estimator estimator, const SampleConfig& cfg);

/// Mean of the values, summed in input order. Throws DomainError when empty.
double relik_set(std::span<const ReliKResult> results);

/// Reliability of every triple, OpenMP-parallel over triples. Results are in
/// input order and independent of the thread count. threads <= 0 uses the
/// OpenMP default.
std::vector<ReliKResult> relik_batch(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                     std::span<const Triple> triples, Estimator estimator,
                                     const SampleConfig& cfg = {}, int threads = 0);

/// Lower-bound and scaled values from one shared sample per triple.
struct EstimatePair {
  double lower_bound;
  double scaled;
};
std::vector<EstimatePair> estimate_batch(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                         std::span<const Triple> triples, const SampleConfig& cfg,
                                         int threads = 0);

}  // namespace relik
