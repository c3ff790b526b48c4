#include "relik/reference.hpp"

namespace relik::reference {

namespace {

std::uint64_t scan_rank(const KnowledgeGraph& kg, const ScoreFunction& scorer, const Triple& x,
                        double query_score, Side side) {
  const EntityId anchor = side == Side::Head ? x.head : x.tail;
  std::uint64_t rank = 1;
  for (std::uint64_t i = 0; i < kg.candidate_space(); ++i) {
    const Triple c = kg.candidate(anchor, side, i);
    if (kg.contains(c)) continue;
    if (scorer.score(c) > query_score) ++rank;
  }
  return rank;
}

std::uint64_t sample_rank(const ScoreFunction& scorer, const std::vector<Triple>& sample,
                          double query_score) {
  std::uint64_t rank = 1;
  for (const Triple& c : sample) {
    if (scorer.score(c) > query_score) ++rank;
  }
  return rank;
}

}  // namespace

std::vector<ReliKResult> relik_batch_serial(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                            std::span<const Triple> triples, Estimator estimator,
                                            const SampleConfig& cfg) {
  std::vector<ReliKResult> out;
  out.reserve(triples.size());
  for (const Triple& x : triples) {
    if (!kg.contains(x)) throw DomainError(kg.format(x) + " is not in F");
    const double s = scorer.score(x);
    if (estimator == Estimator::Exact) {
      ReliKResult r;
      r.head_rank = scan_rank(kg, scorer, x, s, Side::Head);
      r.tail_rank = scan_rank(kg, scorer, x, s, Side::Tail);
      r.head_neg_size = kg.negative_neighborhood_size(x.head, Side::Head);
      r.tail_neg_size = kg.negative_neighborhood_size(x.tail, Side::Tail);
      r.value = 0.5 * (1.0 / static_cast<double>(r.head_rank) +
                       1.0 / static_cast<double>(r.tail_rank));
      out.push_back(r);
      continue;
    }
    SampleRanks ranks;
    ranks.head_neg = kg.negative_neighborhood_size(x.head, Side::Head);
    ranks.tail_neg = kg.negative_neighborhood_size(x.tail, Side::Tail);
    bool ch = false, ct = false;
    ranks.head_sample = sample_size_for(cfg, ranks.head_neg, &ch);
    ranks.tail_sample = sample_size_for(cfg, ranks.tail_neg, &ct);
    ranks.clamped = ch || ct;
    Rng head_rng(derive_seed(cfg.seed, kg.key(x), 0));
    Rng tail_rng(derive_seed(cfg.seed, kg.key(x), 1));
    ranks.head_rank =
        sample_rank(scorer, kg.sample_negatives(x.head, Side::Head, ranks.head_sample, head_rng), s);
    ranks.tail_rank =
        sample_rank(scorer, kg.sample_negatives(x.tail, Side::Tail, ranks.tail_sample, tail_rng), s);
    out.push_back(estimate(ranks, estimator));
  }
  return out;
}

std::vector<double> score_batch_serial(const ScoreFunction& scorer,
                                       std::span<const Triple> triples) {
  std::vector<double> out;
  out.reserve(triples.size());
  for (const Triple& t : triples) out.push_back(scorer.score(t));
  return out;
}

}  // namespace relik::reference
