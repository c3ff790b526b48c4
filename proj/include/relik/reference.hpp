#pragma once

#include <span>
#include <vector>

#include "relik/reliability.hpp"

/// Serial reference paths kept for parity tests and the benchmark. They walk
/// the candidate index space one triple at a time with scalar scoring and no
/// batching, so they share nothing with the parallel kernels except the
/// negative sampler (which must be shared for sampled results to agree).
namespace relik::reference {

std::vector<ReliKResult> relik_batch_serial(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                            std::span<const Triple> triples, Estimator estimator,
                                            const SampleConfig& cfg = {});

std::vector<double> score_batch_serial(const ScoreFunction& scorer,
                                       std::span<const Triple> triples);

}  // namespace relik::reference
