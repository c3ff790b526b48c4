#include "relik/trainer.hpp"

#include <cmath>
#include <string>

namespace relik {

bool is_trainable(ScorerKind kind) {
  return kind == ScorerKind::TransE_L1 || kind == ScorerKind::TransE_L2 ||
         kind == ScorerKind::DistMult;
}

namespace {

void validate(const KnowledgeGraph& kg, ScorerKind kind, const TrainConfig& cfg) {
  if (!is_trainable(kind)) {
    throw ConfigError("scorer " + std::string(to_string(kind)) +
                      " is not trainable here; import its embeddings instead");
  }
  if (cfg.dim == 0) throw ConfigError("dim must be positive");
  if (!(cfg.learning_rate > 0.0 && std::isfinite(cfg.learning_rate))) {
    throw ConfigError("learning rate must be positive");
  }
  if (!(cfg.margin > 0.0 && std::isfinite(cfg.margin))) throw ConfigError("margin must be positive");
  if (cfg.negatives_per_positive == 0) {
    throw ConfigError("negatives per positive must be positive");
  }
  if (kg.num_facts() == 0) throw DomainError("cannot train on a graph without facts");
}

Triple corrupt(const KnowledgeGraph& kg, const Triple& x, Rng& rng) {
  constexpr int kMaxAttempts = 10000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Triple c = x;
    const EntityId e{static_cast<std::uint32_t>(uniform_below(rng, kg.num_entities()))};
    if (coin_flip(rng)) {
      c.head = e;
    } else {
      c.tail = e;
    }
    if (!kg.contains(c)) return c;
  }
  throw SamplingError("no filtered corruption found for " + kg.format(x));
}

class Sgd {
 public:
  Sgd(EmbeddingStore& store, ScorerKind kind)
      : store_(store), kind_(kind), d_(store.dim()) {}

  double score(const Triple& x) const {
    const auto h = store_.entity(x.head);
    const auto r = store_.relation(x.relation);
    const auto t = store_.entity(x.tail);
    double acc = 0.0;
    switch (kind_) {
      case ScorerKind::TransE_L1:
        for (std::size_t i = 0; i < d_; ++i) acc += std::abs(h[i] + r[i] - t[i]);
        return -acc;
      case ScorerKind::TransE_L2:
        for (std::size_t i = 0; i < d_; ++i) {
          const double v = h[i] + r[i] - t[i];
          acc += v * v;
        }
        return -std::sqrt(acc);
      default:
        for (std::size_t i = 0; i < d_; ++i) acc += h[i] * r[i] * t[i];
        return acc;
    }
  }

  /// Adds sign * ds/dtheta of x into the gradient buffers.
  void accumulate(const Triple& x, double sign) {
    const auto h = store_.entity(x.head);
    const auto r = store_.relation(x.relation);
    const auto t = store_.entity(x.tail);
    switch (kind_) {
      case ScorerKind::TransE_L1:
        for (std::size_t i = 0; i < d_; ++i) {
          const double v = h[i] + r[i] - t[i];
          const double g = v > 0.0 ? -1.0 : (v < 0.0 ? 1.0 : 0.0);
          add(x, i, sign * g, sign * g, -sign * g);
        }
        break;
      case ScorerKind::TransE_L2: {
        double norm = 0.0;
        for (std::size_t i = 0; i < d_; ++i) {
          const double v = h[i] + r[i] - t[i];
          norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) break;
        for (std::size_t i = 0; i < d_; ++i) {
          const double g = -(h[i] + r[i] - t[i]) / norm;
          add(x, i, sign * g, sign * g, -sign * g);
        }
        break;
      }
      default:
        for (std::size_t i = 0; i < d_; ++i) {
          add(x, i, sign * r[i] * t[i], sign * h[i] * t[i], sign * h[i] * r[i]);
        }
        break;
    }
  }

  void begin() { touched_.clear(); }

  /// Buffers hold -dL/dtheta, so theta += lr * buffer is a descent step.
  void step(double lr) {
    for (const auto& t : touched_) {
      auto v = t.kind == Touch::Entity ? store_.entity(EntityId{t.id})
                                       : store_.relation(RelationId{t.id});
      for (std::size_t i = 0; i < d_; ++i) v[i] += lr * t.grad[i];
    }
  }

 private:
  struct Touch {
    enum Kind { Entity, Relation } kind;
    std::uint32_t id;
    std::vector<double> grad;
  };

  void add(const Triple& x, std::size_t i, double dh, double dr, double dt) {
    slot(Touch::Entity, x.head.index)[i] += dh;
    slot(Touch::Relation, x.relation.index)[i] += dr;
    slot(Touch::Entity, x.tail.index)[i] += dt;
  }

  std::vector<double>& slot(Touch::Kind kind, std::uint32_t id) {
    for (auto& t : touched_) {
      if (t.kind == kind && t.id == id) return t.grad;
    }
    touched_.push_back({kind, id, std::vector<double>(d_, 0.0)});
    return touched_.back().grad;
  }

  EmbeddingStore& store_;
  ScorerKind kind_;
  std::size_t d_;
  std::vector<Touch> touched_;
};

void normalize_entities(EmbeddingStore& store) {
  for (std::uint32_t e = 0; e < store.num_entities(); ++e) {
    auto v = store.entity(EntityId{e});
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0) {
      for (double& x : v) x /= norm;
    }
  }
}

}  // namespace

TrainResult train_with_history(const KnowledgeGraph& kg, ScorerKind kind, const TrainConfig& cfg) {
  validate(kg, kind, cfg);
  Rng rng(cfg.seed);
  TrainResult result{EmbeddingStore(cfg.dim, Field::Real, kg.num_entities(), kg.num_relations(),
                                    false),
                     {}};
  EmbeddingStore& store = result.store;
  const double bound = 6.0 / std::sqrt(static_cast<double>(cfg.dim));
  auto init = [&](std::span<double> v) {
    for (double& x : v) x = -bound + 2.0 * bound * uniform01(rng);
  };
  for (std::uint32_t e = 0; e < kg.num_entities(); ++e) init(store.entity(EntityId{e}));
  for (std::uint32_t r = 0; r < kg.num_relations(); ++r) init(store.relation(RelationId{r}));

  const bool transe = kind != ScorerKind::DistMult;
  Sgd sgd(store, kind);
  std::vector<std::uint32_t> order(kg.num_facts());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_below(rng, i)]);
    }
    double loss = 0.0;
    for (std::uint32_t f : order) {
      const Triple& pos = kg.facts()[f];
      for (std::size_t n = 0; n < cfg.negatives_per_positive; ++n) {
        const Triple neg = corrupt(kg, pos, rng);
        const double l = cfg.margin - sgd.score(pos) + sgd.score(neg);
        if (!std::isfinite(l)) {
          throw DivergenceError("training loss became non-finite in epoch " +
                                    std::to_string(epoch),
                                epoch);
        }
        if (l <= 0.0) continue;
        loss += l;
        sgd.begin();
        sgd.accumulate(pos, 1.0);
        sgd.accumulate(neg, -1.0);
        sgd.step(cfg.learning_rate);
      }
    }
    loss /= static_cast<double>(order.size() * cfg.negatives_per_positive);
    if (!std::isfinite(loss)) {
      throw DivergenceError("training loss became non-finite in epoch " + std::to_string(epoch),
                            epoch);
    }
    result.epoch_loss.push_back(loss);
    if (transe) normalize_entities(store);
  }
  return result;
}

EmbeddingStore train(const KnowledgeGraph& kg, ScorerKind kind, const TrainConfig& cfg) {
  return train_with_history(kg, kind, cfg).store;
}

}  // namespace relik
