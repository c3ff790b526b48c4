#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "relik/kg.hpp"
#include "relik/random.hpp"

namespace relik {

/// Node set plus the facts induced on it.
struct SubgraphSample {
  std::vector<EntityId> nodes;  // ascending id
  std::vector<Triple> triples;  // in fact order
  EntityId start{};
  std::uint64_t seed = 0;
};

struct WeightedTriple {
  Triple triple;
  double weight = 0.0;
};

/// Raised when a walk exhausts its step budget; carries what was collected.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& message, SubgraphSample partial)
      : Error("truncation", message), partial_(std::move(partial)) {}
  const SubgraphSample& partial() const noexcept { return partial_; }

 private:
  SubgraphSample partial_;
};

/// Facts of the graph with both endpoints in `nodes` (which must be sorted).
std::vector<Triple> induced_triples(const KnowledgeGraph& kg, std::span<const EntityId> nodes);

/// Random walk with restart over the undirected fact graph.
///
/// The start node is uniform over entities with at least one incident fact.
/// Each step first restarts to the start node with probability
/// `restart_prob`, otherwise follows a uniformly chosen incident fact to its
/// other endpoint. Stops once min(target_nodes, component size) distinct
/// nodes have been visited (the start counts). Budget: 10^6 * target_nodes
/// steps. The triple set is the induced closure over the visited nodes.
SubgraphSample rwr_subgraph(const KnowledgeGraph& kg, std::size_t target_nodes,
                            double restart_prob, std::uint64_t seed);

struct DenseSubgraph {
  std::vector<EntityId> nodes;  // ascending id
  double density = 0.0;         // induced weight / node count
};

/// Charikar's greedy peeling on the weighted multigraph given by `weights`:
/// repeatedly removes the node of minimum weighted degree (smallest id on
/// ties) and returns the densest prefix, preferring the larger set on equal
/// density. Parallel edges add up; a self-loop adds its weight once.
/// All-zero weights yield the single node of largest edge count, density 0.
DenseSubgraph densest_subgraph(const KnowledgeGraph& kg, std::span<const WeightedTriple> weights);

struct PeelStep {
  SubgraphSample part;  // nodes and removed edges of this iteration
  std::vector<double> weights;  // weights of part.triples, same order
  double density = 0.0;
  std::size_t cumulative_nodes = 0;    // |union of nodes so far|
  std::size_t cumulative_triples = 0;  // triples emitted so far
};

/// Repeatedly extracts the densest subgraph and deletes its induced edges
/// until none remain. Once only zero-weight edges are left they are emitted
/// together as a final step with density 0.
std::vector<PeelStep> peel_decomposition(const KnowledgeGraph& kg,
                                         std::span<const WeightedTriple> weights);

}  // namespace relik
