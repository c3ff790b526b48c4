#include "relik/reliability.hpp"

#include <algorithm>
#include <cmath>

#include "parallel.hpp"

namespace relik {

std::string_view to_string(Estimator e) {
  switch (e) {
    case Estimator::Exact: return "exact";
    case Estimator::LowerBound: return "lower_bound";
    case Estimator::Scaled: return "scaled";
  }
  return "?";
}

namespace {

double mean_reciprocal(double head_denominator, double tail_denominator) {
  return 0.5 * (1.0 / head_denominator + 1.0 / tail_denominator);
}

void require_fact(const KnowledgeGraph& kg, const Triple& x) {
  if (!kg.contains(x)) {
    throw DomainError("reliability is defined for facts only; " + kg.format(x) + " is not in F");
  }
}

std::uint64_t count_above(const ScoreFunction& scorer, std::span<const Triple> sample,
                          double query_score, std::vector<double>& buffer) {
  buffer.resize(sample.size());
  scorer.score_batch(sample, buffer);
  std::uint64_t above = 0;
  for (double s : buffer) above += s > query_score ? 1 : 0;
  return above;
}

std::uint64_t exact_rank(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                         double query_score, Side side) {
  const EntityId anchor = side == Side::Head ? x.head : x.tail;
  std::vector<Triple> negatives = kg.enumerate_negatives(anchor, side);
  std::vector<double> buffer;
  return 1 + count_above(scorer, negatives, query_score, buffer);
}

ReliKResult exact_unchecked(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                            const Triple& x) {
  const double s = scorer.score(x);
  ReliKResult r;
  r.estimator = Estimator::Exact;
  r.head_rank = exact_rank(kg, scorer, x, s, Side::Head);
  r.tail_rank = exact_rank(kg, scorer, x, s, Side::Tail);
  r.head_neg_size = kg.negative_neighborhood_size(x.head, Side::Head);
  r.tail_neg_size = kg.negative_neighborhood_size(x.tail, Side::Tail);
  r.value = mean_reciprocal(static_cast<double>(r.head_rank), static_cast<double>(r.tail_rank));
  return r;
}

SampleRanks sample_ranks_unchecked(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                   const Triple& x, const SampleConfig& cfg) {
  SampleRanks out;
  out.head_neg = kg.negative_neighborhood_size(x.head, Side::Head);
  out.tail_neg = kg.negative_neighborhood_size(x.tail, Side::Tail);
  bool clamped_h = false, clamped_t = false;
  out.head_sample = sample_size_for(cfg, out.head_neg, &clamped_h);
  out.tail_sample = sample_size_for(cfg, out.tail_neg, &clamped_t);
  out.clamped = clamped_h || clamped_t;

  const std::uint64_t key = kg.key(x);
  Rng head_rng(derive_seed(cfg.seed, key, 0));
  Rng tail_rng(derive_seed(cfg.seed, key, 1));
  const auto s_h = kg.sample_negatives(x.head, Side::Head, out.head_sample, head_rng);
  const auto s_t = kg.sample_negatives(x.tail, Side::Tail, out.tail_sample, tail_rng);

  const double s = scorer.score(x);
  std::vector<double> buffer;
  out.head_rank = 1 + count_above(scorer, s_h, s, buffer);
  out.tail_rank = 1 + count_above(scorer, s_t, s, buffer);
  return out;
}

}  // namespace

std::uint64_t sample_size_for(const SampleConfig& cfg, std::uint64_t neighborhood, bool* clamped) {
  std::uint64_t k = 0;
  if (cfg.absolute_k > 0) {
    k = cfg.absolute_k;
  } else {
    if (!(cfg.fraction > 0.0 && cfg.fraction <= 1.0)) {
      throw ConfigError("sample fraction must lie in (0, 1], got " + std::to_string(cfg.fraction));
    }
    k = static_cast<std::uint64_t>(std::llround(cfg.fraction * static_cast<double>(neighborhood)));
  }
  const std::uint64_t requested = k;
  k = std::min(std::max<std::uint64_t>(k, 1), neighborhood);
  if (clamped) *clamped = k != requested;
  if (k == 0) {
    throw ConfigError("negative neighborhood is empty; no sample can be drawn");
  }
  return k;
}

std::uint64_t rank_against_negatives(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                     const Triple& x, Side side) {
  require_fact(kg, x);
  return exact_rank(kg, scorer, x, scorer.score(x), side);
}

ReliKResult relik_exact(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x) {
  require_fact(kg, x);
  return exact_unchecked(kg, scorer, x);
}

SampleRanks sample_ranks(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                         const SampleConfig& cfg) {
  require_fact(kg, x);
  return sample_ranks_unchecked(kg, scorer, x, cfg);
}

SampleRanks ranks_from_samples(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                               const Triple& x, std::span<const Triple> head_sample,
                               std::span<const Triple> tail_sample) {
  require_fact(kg, x);
  auto validate = [&](std::span<const Triple> sample, Side side) {
    std::vector<Triple> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DomainError("sample contains duplicate triples");
    }
    for (const Triple& t : sample) {
      const bool anchored = side == Side::Head ? t.head == x.head : t.tail == x.tail;
      if (!anchored || kg.contains(t)) {
        throw DomainError(kg.format(t) + " is not in the negative neighborhood");
      }
    }
    if (sample.empty()) throw ConfigError("empty sample");
  };
  validate(head_sample, Side::Head);
  validate(tail_sample, Side::Tail);

  SampleRanks out;
  out.head_neg = kg.negative_neighborhood_size(x.head, Side::Head);
  out.tail_neg = kg.negative_neighborhood_size(x.tail, Side::Tail);
  out.head_sample = head_sample.size();
  out.tail_sample = tail_sample.size();
  const double s = scorer.score(x);
  std::vector<double> buffer;
  out.head_rank = 1 + count_above(scorer, head_sample, s, buffer);
  out.tail_rank = 1 + count_above(scorer, tail_sample, s, buffer);
  return out;
}

ReliKResult estimate(const SampleRanks& ranks, Estimator estimator) {
  ReliKResult r;
  r.estimator = estimator;
  r.head_rank = ranks.head_rank;
  r.tail_rank = ranks.tail_rank;
  r.head_neg_size = ranks.head_neg;
  r.tail_neg_size = ranks.tail_neg;
  r.head_sample_size = ranks.head_sample;
  r.tail_sample_size = ranks.tail_sample;
  r.clamped = ranks.clamped;
  switch (estimator) {
    case Estimator::LowerBound:
      r.value = mean_reciprocal(
          static_cast<double>(ranks.head_rank + ranks.head_neg - ranks.head_sample),
          static_cast<double>(ranks.tail_rank + ranks.tail_neg - ranks.tail_sample));
      break;
    case Estimator::Scaled:
      r.value = mean_reciprocal(
          static_cast<double>(ranks.head_rank) * static_cast<double>(ranks.head_neg) /
              static_cast<double>(ranks.head_sample),
          static_cast<double>(ranks.tail_rank) * static_cast<double>(ranks.tail_neg) /
              static_cast<double>(ranks.tail_sample));
      break;
    case Estimator::Exact:
      throw ConfigError("estimate() needs a sampling estimator");
  }
  return r;
}

ReliKResult relik_sampled(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                          const SampleConfig& cfg, Estimator estimator) {
  if (estimator == Estimator::Exact) return relik_exact(kg, scorer, x);
  return estimate(sample_ranks(kg, scorer, x, cfg), estimator);
}

ReliKResult relik_candidate(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                            const Triple& x, Estimator estimator, const SampleConfig& cfg) {
  kg.check(x);
  if (estimator == Estimator::Exact) return exact_unchecked(kg, scorer, x);
  return estimate(sample_ranks_unchecked(kg, scorer, x, cfg), estimator);
}

double relik_set(std::span<const ReliKResult> results) {
  if (results.empty()) throw DomainError("reliability of an empty triple set is undefined");
  double sum = 0.0;
  for (const auto& r : results) sum += r.value;
  return sum / static_cast<double>(results.size());
}

std::vector<ReliKResult> relik_batch(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                     std::span<const Triple> triples, Estimator estimator,
                                     const SampleConfig& cfg, int threads) {
  for (const Triple& x : triples) require_fact(kg, x);
  std::vector<ReliKResult> out(triples.size());
  detail::parallel_for(triples.size(), threads, [&](std::size_t i) {
    out[i] = estimator == Estimator::Exact
                 ? exact_unchecked(kg, scorer, triples[i])
                 : estimate(sample_ranks_unchecked(kg, scorer, triples[i], cfg), estimator);
  });
  return out;
}

std::vector<EstimatePair> estimate_batch(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                         std::span<const Triple> triples, const SampleConfig& cfg,
                                         int threads) {
  for (const Triple& x : triples) require_fact(kg, x);
  std::vector<EstimatePair> out(triples.size());
  detail::parallel_for(triples.size(), threads, [&](std::size_t i) {
    const SampleRanks ranks = sample_ranks_unchecked(kg, scorer, triples[i], cfg);
    out[i] = {estimate(ranks, Estimator::LowerBound).value,
              estimate(ranks, Estimator::Scaled).value};
  });
  return out;
}

}  // namespace relik
