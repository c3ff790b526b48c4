#include "relik/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>

#include "parallel.hpp"

namespace relik {

double reciprocal_rank(const KnowledgeGraph& filter, const ScoreFunction& scorer, const Triple& x,
                       PredictionTarget target) {
  filter.check(x);
  const double s = scorer.score(x);
  std::vector<Triple> candidates;
  if (target == PredictionTarget::Tail) {
    candidates.reserve(filter.num_entities());
    for (std::uint32_t e = 0; e < filter.num_entities(); ++e) {
      const Triple c{x.head, x.relation, EntityId{e}};
      if (c.tail != x.tail && !filter.contains(c)) candidates.push_back(c);
    }
  } else {
    candidates.reserve(filter.num_relations());
    for (std::uint32_t r = 0; r < filter.num_relations(); ++r) {
      const Triple c{x.head, RelationId{r}, x.tail};
      if (c.relation != x.relation && !filter.contains(c)) candidates.push_back(c);
    }
  }
  std::vector<double> scores(candidates.size());
  scorer.score_batch(candidates, scores);
  std::uint64_t rank = 1;
  for (double c : scores) rank += c > s ? 1 : 0;
  return 1.0 / static_cast<double>(rank);
}

double mrr(const KnowledgeGraph& filter, const ScoreFunction& scorer, std::span<const Triple> eval,
           PredictionTarget target) {
  if (eval.empty()) throw DomainError("MRR of an empty evaluation set is undefined");
  for (const Triple& x : eval) {
    if (!filter.contains(x)) throw DomainError(filter.format(x) + " is not a fact");
  }
  double sum = 0.0;
  for (const Triple& x : eval) sum += reciprocal_rank(filter, scorer, x, target);
  return sum / static_cast<double>(eval.size());
}

std::vector<Triple> corrupt_negatives(const KnowledgeGraph& kg, std::span<const Triple> positives,
                                      Rng& rng) {
  constexpr int kMaxAttempts = 10000;
  std::vector<Triple> out;
  out.reserve(positives.size());
  for (const Triple& x : positives) {
    bool found = false;
    for (int attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
      Triple c = x;
      const EntityId e{static_cast<std::uint32_t>(uniform_below(rng, kg.num_entities()))};
      if (coin_flip(rng)) {
        c.head = e;
      } else {
        c.tail = e;
      }
      if (!kg.contains(c)) {
        out.push_back(c);
        found = true;
      }
    }
    if (!found) {
      throw SamplingError("no filtered negative found for " + kg.format(x) + " after " +
                          std::to_string(kMaxAttempts) + " attempts");
    }
  }
  return out;
}

ThresholdFit fit_threshold(std::span<const LabeledScore> items) {
  if (items.empty()) throw DomainError("cannot fit a threshold on an empty set");
  std::vector<LabeledScore> sorted(items.begin(), items.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const LabeledScore& a, const LabeledScore& b) { return a.score < b.score; });
  const double n = static_cast<double>(sorted.size());
  std::size_t correct = 0;
  for (const auto& it : sorted) correct += it.positive ? 1 : 0;
  ThresholdFit best{-std::numeric_limits<double>::infinity(), static_cast<double>(correct) / n};
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j].score == sorted[i].score) {
      if (sorted[j].positive) {
        --correct;
      } else {
        ++correct;
      }
      ++j;
    }
    const double accuracy = static_cast<double>(correct) / n;
    if (accuracy > best.accuracy) {
      const double lo = sorted[i].score;
      best.threshold = j < sorted.size() ? lo + (sorted[j].score - lo) / 2
                                         : std::numeric_limits<double>::infinity();
      best.accuracy = accuracy;
    }
    i = j;
  }
  return best;
}

double accuracy_at(std::span<const LabeledScore> items, double threshold) {
  if (items.empty()) throw DomainError("accuracy of an empty set is undefined");
  std::size_t correct = 0;
  for (const auto& it : items) correct += ((it.score > threshold) == it.positive) ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

double classification_accuracy(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                               std::span<const Triple> eval, std::uint64_t seed,
                               double holdout_fraction) {
  if (eval.empty()) throw DomainError("classification of an empty evaluation set is undefined");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("holdout fraction must lie in [0, 1)");
  }
  for (const Triple& x : eval) {
    if (!kg.contains(x)) throw DomainError(kg.format(x) + " is not a fact");
  }
  Rng rng(seed);
  const std::vector<Triple> negatives = corrupt_negatives(kg, eval, rng);
  std::vector<LabeledScore> items;
  items.reserve(2 * eval.size());
  for (const Triple& x : eval) items.push_back({scorer.score(x), true});
  for (const Triple& x : negatives) items.push_back({scorer.score(x), false});
  if (holdout_fraction == 0.0) return fit_threshold(items).accuracy;

  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
  const auto held = static_cast<std::size_t>(std::llround(holdout_fraction * items.size()));
  const std::size_t fit_count = items.size() - std::clamp<std::size_t>(held, 1, items.size() - 1);
  const std::span<const LabeledScore> all(items);
  return accuracy_at(all.subspan(fit_count), fit_threshold(all.first(fit_count)).threshold);
}

ApproxStudy approximation_study(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                std::span<const Triple> triples, const ApproxStudyConfig& cfg) {
  if (triples.empty()) throw DomainError("approximation study needs at least one triple");
  if (cfg.repetitions == 0) throw ConfigError("repetitions must be positive");
  for (double f : cfg.fractions) {
    if (!(f > 0.0 && f <= 1.0)) throw ConfigError("fractions must lie in (0, 1]");
  }
  using Clock = std::chrono::steady_clock;
  auto seconds_since = [](Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  };

  ApproxStudy study;
  std::vector<ReliKResult> exact;
  double exact_elapsed = 0.0;
  for (std::size_t rep = 0; rep < (cfg.timing ? cfg.repetitions : 1); ++rep) {
    const auto t0 = Clock::now();
    exact = relik_batch(kg, scorer, triples, Estimator::Exact, {}, cfg.threads);
    exact_elapsed += seconds_since(t0);
  }
  study.exact_seconds = cfg.timing ? exact_elapsed / static_cast<double>(cfg.repetitions) : 0.0;
  study.exact.reserve(exact.size());
  for (const auto& r : exact) study.exact.push_back(r.value);

  for (std::size_t fi = 0; fi < cfg.fractions.size(); ++fi) {
    ApproxStudyRow row;
    row.fraction = cfg.fractions[fi];
    std::vector<double> err_apx, err_lb;
    err_apx.reserve(triples.size() * cfg.repetitions);
    err_lb.reserve(triples.size() * cfg.repetitions);
    double elapsed = 0.0;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const SampleConfig sc = SampleConfig::with_fraction(cfg.fractions[fi],
                                                          derive_seed(cfg.seed, rep, fi));
      const auto t1 = Clock::now();
      const auto est = estimate_batch(kg, scorer, triples, sc, cfg.threads);
      elapsed += seconds_since(t1);
      for (std::size_t i = 0; i < est.size(); ++i) {
        const double da = est[i].scaled - study.exact[i];
        const double dl = est[i].lower_bound - study.exact[i];
        err_apx.push_back(da * da);
        err_lb.push_back(dl * dl);
      }
    }
    auto mean_and_se = [](const std::vector<double>& v, double& mean, double& se) {
      double sum = 0.0;
      for (double x : v) sum += x;
      mean = sum / static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      se = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1) /
                                    static_cast<double>(v.size()))
                        : 0.0;
    };
    mean_and_se(err_apx, row.mse_apx, row.se_apx);
    mean_and_se(err_lb, row.mse_lb, row.se_lb);
    row.seconds = cfg.timing ? elapsed / static_cast<double>(cfg.repetitions) : 0.0;
    study.rows.push_back(row);
  }
  return study;
}

EvalReport to_report(const ApproxStudy& study, const ApproxStudyConfig& cfg) {
  EvalReport report;
  report.kind = "approximation_study";
  report.config["fractions"] = cfg.fractions;
  report.config["repetitions"] = cfg.repetitions;
  report.config["seed"] = cfg.seed;
  report.config["timing"] = cfg.timing;
  report.summary["triples"] = study.exact.size();
  report.summary["exact_seconds"] = study.exact_seconds;
  report.columns = {"fraction", "seconds", "mse_apx", "mse_lb"};
  for (const auto& r : study.rows) report.rows.push_back({r.fraction, r.seconds, r.mse_apx, r.mse_lb});
  return report;
}

std::string_view to_string(CorrelationTask task) {
  switch (task) {
    case CorrelationTask::TailMrr: return "tail_mrr";
    case CorrelationTask::RelationMrr: return "relation_mrr";
    case CorrelationTask::Classification: return "classification";
    case CorrelationTask::SelfCheck: return "self_check";
  }
  return "?";
}

std::optional<CorrelationTask> parse_correlation_task(std::string_view name) {
  for (auto t : {CorrelationTask::TailMrr, CorrelationTask::RelationMrr,
                 CorrelationTask::Classification, CorrelationTask::SelfCheck}) {
    if (to_string(t) == name) return t;
  }
  return std::nullopt;
}

CorrelationStudy subgraph_correlation(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                      const CorrelationConfig& cfg) {
  if (cfg.subgraphs < 3) throw ConfigError("correlation needs at least 3 subgraphs");
  const std::uint64_t seed = cfg.sample.seed;
  std::vector<std::optional<CorrelationPoint>> slots(cfg.subgraphs);
  detail::parallel_for(cfg.subgraphs, cfg.threads, [&](std::size_t idx) {
    const SubgraphSample sub = rwr_subgraph(kg, cfg.nodes, cfg.restart, derive_seed(seed, idx, 1));
    if (sub.triples.empty()) return;
    CorrelationPoint p;
    p.index = idx;
    p.start = sub.start;
    p.nodes = sub.nodes.size();
    p.triples = sub.triples.size();
    const auto results = relik_batch(kg, scorer, sub.triples, Estimator::Scaled, cfg.sample, 1);
    p.relik = relik_set(results);
    switch (cfg.task) {
      case CorrelationTask::TailMrr:
        p.metric = mrr(kg, scorer, sub.triples, PredictionTarget::Tail);
        break;
      case CorrelationTask::RelationMrr:
        p.metric = mrr(kg, scorer, sub.triples, PredictionTarget::Relation);
        break;
      case CorrelationTask::Classification:
        p.metric = classification_accuracy(kg, scorer, sub.triples, derive_seed(seed, idx, 2),
                                           cfg.holdout);
        break;
      case CorrelationTask::SelfCheck:
        p.metric = p.relik;
        break;
    }
    slots[idx] = p;
  });

  CorrelationStudy study;
  std::vector<std::pair<double, double>> pairs;
  for (const auto& s : slots) {
    if (!s) {
      ++study.skipped;
      continue;
    }
    study.points.push_back(*s);
    pairs.emplace_back(s->relik, s->metric);
  }
  try {
    study.correlation = pearson(pairs);
  } catch (const DomainError&) {
    study.correlation.reset();
  }
  return study;
}

EvalReport to_report(const CorrelationStudy& study, const CorrelationConfig& cfg) {
  EvalReport report;
  report.kind = "subgraph_correlation";
  report.config["task"] = std::string(to_string(cfg.task));
  report.config["subgraphs"] = cfg.subgraphs;
  report.config["nodes"] = cfg.nodes;
  report.config["restart"] = cfg.restart;
  if (cfg.task == CorrelationTask::Classification) report.config["holdout"] = cfg.holdout;
  report.config["fraction"] = cfg.sample.fraction;
  report.config["seed"] = cfg.sample.seed;
  report.config["estimator"] = "scaled";
  report.summary["points"] = study.points.size();
  report.summary["skipped"] = study.skipped;
  if (study.correlation) {
    report.summary["pearson_r"] = study.correlation->r;
    report.summary["p_value"] = study.correlation->p;
  } else {
    report.summary["pearson_r"] = nullptr;
    report.summary["p_value"] = nullptr;
  }
  report.columns = {"subgraph", "start", "nodes", "triples", "relik", "metric"};
  for (const auto& p : study.points) {
    report.rows.push_back({static_cast<double>(p.index), static_cast<double>(p.start.index),
                           static_cast<double>(p.nodes), static_cast<double>(p.triples), p.relik,
                           p.metric});
  }
  return report;
}

MarginReport margin_report(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                           std::span<const Triple> positives, std::span<const Triple> negatives,
                           const SampleConfig& cfg, Estimator estimator, int threads) {
  if (positives.empty() || negatives.empty()) {
    throw DomainError("margin report needs positives and negatives");
  }
  std::set<Triple> pos_set(positives.begin(), positives.end());
  for (const Triple& x : positives) {
    if (!kg.contains(x)) throw DomainError("positive " + kg.format(x) + " is not a fact");
  }
  for (const Triple& x : negatives) {
    if (pos_set.count(x)) throw DomainError(kg.format(x) + " is listed as positive and negative");
    if (kg.contains(x)) throw DomainError("negative " + kg.format(x) + " is a fact");
  }

  auto mean_over = [&](std::span<const Triple> xs, double& relik_mean, double& rr_mean) {
    std::vector<double> relik(xs.size()), rr(xs.size());
    detail::parallel_for(xs.size(), threads, [&](std::size_t i) {
      relik[i] = relik_candidate(kg, scorer, xs[i], estimator, cfg).value;
      rr[i] = 0.5 * (reciprocal_rank(kg, scorer, xs[i], PredictionTarget::Tail) +
                     reciprocal_rank(kg, scorer, xs[i], PredictionTarget::Relation));
    });
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      a += relik[i];
      b += rr[i];
    }
    relik_mean = a / static_cast<double>(xs.size());
    rr_mean = b / static_cast<double>(xs.size());
  };

  MarginReport out;
  out.positives = positives.size();
  out.negatives = negatives.size();
  mean_over(positives, out.mean_relik_pos, out.mean_rr_pos);
  mean_over(negatives, out.mean_relik_neg, out.mean_rr_neg);
  return out;
}

EvalReport to_report(const MarginReport& m, Estimator estimator) {
  EvalReport report;
  report.kind = "margin";
  report.config["estimator"] = std::string(to_string(estimator));
  report.config["rr_baseline"] = "mean of filtered tail and relation reciprocal ranks";
  report.summary["positives"] = m.positives;
  report.summary["negatives"] = m.negatives;
  report.summary["mean_relik_pos"] = m.mean_relik_pos;
  report.summary["mean_relik_neg"] = m.mean_relik_neg;
  report.summary["mean_rr_pos"] = m.mean_rr_pos;
  report.summary["mean_rr_neg"] = m.mean_rr_neg;
  report.columns = {"measure", "positive", "negative"};
  report.rows.push_back({std::string("relik"), m.mean_relik_pos, m.mean_relik_neg});
  report.rows.push_back({std::string("rr"), m.mean_rr_pos, m.mean_rr_neg});
  return report;
}

EvalReport score_histogram(std::span<const double> positive_scores,
                           std::span<const double> negative_scores, std::size_t bins) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  EvalReport report;
  report.kind = "score_histogram";
  report.config["bins"] = bins;
  report.columns = {"bin_low", "bin_high", "positive", "negative"};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (auto scores : {positive_scores, negative_scores}) {
    for (double s : scores) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
  }
  report.summary["positives"] = positive_scores.size();
  report.summary["negatives"] = negative_scores.size();
  if (!std::isfinite(lo)) return report;
  if (hi == lo) hi = lo + 1.0;
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> pos(bins, 0.0), neg(bins, 0.0);
  auto bucket = [&](double s) {
    const auto b = static_cast<std::size_t>((s - lo) / width);
    return std::min(b, bins - 1);
  };
  for (double s : positive_scores) pos[bucket(s)] += 1.0;
  for (double s : negative_scores) neg[bucket(s)] += 1.0;
  for (std::size_t b = 0; b < bins; ++b) {
    report.rows.push_back({lo + width * static_cast<double>(b),
                           b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1), pos[b],
                           neg[b]});
  }
  return report;
}

}  // namespace relik
