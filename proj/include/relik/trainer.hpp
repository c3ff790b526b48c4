#pragma once

#include <cstdint>
#include <vector>

#include "relik/embed.hpp"
#include "relik/kg.hpp"
#include "relik/random.hpp"

namespace relik {

struct TrainConfig {
  std::size_t dim = 50;
  std::size_t epochs = 100;
  double learning_rate = 0.01;
  double margin = 1.0;
  std::size_t negatives_per_positive = 1;
  std::uint64_t seed = kDefaultSeed;
};

struct TrainResult {
  EmbeddingStore store;
  std::vector<double> epoch_loss;  // mean hinge loss per (positive, negative) pair
};

/// Margin-ranking SGD for TransE_L1, TransE_L2 and DistMult.
///
/// Vectors start uniform in [-6/sqrt(d), 6/sqrt(d)] (entities first, then
/// relations, in id order). Each epoch visits the facts in a seeded shuffle;
/// for every fact it draws filtered head-or-tail corruptions and takes one
/// step on max(0, margin - s(pos) + s(neg)) per negative. TransE entity
/// vectors are rescaled to unit L2 norm after every epoch.
///
/// Throws ConfigError for an unsupported scorer or invalid config,
/// DomainError for a graph without facts and DivergenceError when the loss
/// becomes non-finite.
TrainResult train_with_history(const KnowledgeGraph& kg, ScorerKind kind, const TrainConfig& cfg);

EmbeddingStore train(const KnowledgeGraph& kg, ScorerKind kind, const TrainConfig& cfg);

bool is_trainable(ScorerKind kind);

}  // namespace relik
