#include "relik/graphops.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace relik {

std::vector<Triple> induced_triples(const KnowledgeGraph& kg, std::span<const EntityId> nodes) {
  std::vector<char> in(kg.num_entities(), 0);
  for (EntityId e : nodes) in[e.index] = 1;
  std::vector<std::uint32_t> fact_ids;
  for (EntityId e : nodes) {
    for (std::uint32_t f : kg.out_facts(e)) {
      if (in[kg.facts()[f].tail.index]) fact_ids.push_back(f);
    }
  }
  std::sort(fact_ids.begin(), fact_ids.end());
  std::vector<Triple> out;
  out.reserve(fact_ids.size());
  for (std::uint32_t f : fact_ids) out.push_back(kg.facts()[f]);
  return out;
}

namespace {

EntityId other_end(const Triple& t, EntityId from) { return t.head == from ? t.tail : t.head; }

std::size_t component_size(const KnowledgeGraph& kg, EntityId start, std::size_t cap) {
  std::vector<char> seen(kg.num_entities(), 0);
  std::vector<EntityId> frontier{start};
  seen[start.index] = 1;
  std::size_t count = 1;
  while (!frontier.empty() && count < cap) {
    const EntityId v = frontier.back();
    frontier.pop_back();
    for (auto incident : {kg.out_facts(v), kg.in_facts(v)}) {
      for (std::uint32_t f : incident) {
        const EntityId u = other_end(kg.facts()[f], v);
        if (!seen[u.index]) {
          seen[u.index] = 1;
          ++count;
          frontier.push_back(u);
        }
      }
    }
  }
  return count;
}

SubgraphSample finish(const KnowledgeGraph& kg, std::vector<EntityId> nodes, EntityId start,
                      std::uint64_t seed) {
  std::sort(nodes.begin(), nodes.end());
  SubgraphSample s;
  s.triples = induced_triples(kg, nodes);
  s.nodes = std::move(nodes);
  s.start = start;
  s.seed = seed;
  return s;
}

}  // namespace

SubgraphSample rwr_subgraph(const KnowledgeGraph& kg, std::size_t target_nodes,
                            double restart_prob, std::uint64_t seed) {
  if (target_nodes == 0) throw ConfigError("target node count must be at least 1");
  if (!(restart_prob >= 0.0 && restart_prob < 1.0)) {
    throw ConfigError("restart probability must lie in [0, 1)");
  }
  if (kg.num_facts() == 0) throw DomainError("random walk needs at least one fact");

  std::vector<EntityId> eligible;
  for (std::uint32_t i = 0; i < kg.num_entities(); ++i) {
    if (kg.degree(EntityId{i}) > 0) eligible.push_back(EntityId{i});
  }
  Rng rng(seed);
  const EntityId start = eligible[uniform_below(rng, eligible.size())];
  const std::size_t goal = component_size(kg, start, target_nodes);

  std::vector<char> visited(kg.num_entities(), 0);
  std::vector<EntityId> nodes{start};
  visited[start.index] = 1;
  const std::uint64_t budget = 1'000'000ULL * target_nodes;
  std::uint64_t steps = 0;
  EntityId current = start;
  while (nodes.size() < goal) {
    if (++steps > budget) {
      throw TruncationError("random walk exhausted its step budget after visiting " +
                                std::to_string(nodes.size()) + " nodes",
                            finish(kg, nodes, start, seed));
    }
    if (uniform01(rng) < restart_prob) {
      current = start;
      continue;
    }
    const auto out = kg.out_facts(current);
    const auto in = kg.in_facts(current);
    const std::uint64_t pick = uniform_below(rng, out.size() + in.size());
    const std::uint32_t f = pick < out.size() ? out[pick] : in[pick - out.size()];
    current = other_end(kg.facts()[f], current);
    if (!visited[current.index]) {
      visited[current.index] = 1;
      nodes.push_back(current);
    }
  }
  return finish(kg, std::move(nodes), start, seed);
}

namespace {

struct LocalEdge {
  std::uint32_t u, v;
  double w;
};

struct PeelOutcome {
  std::vector<std::uint32_t> kept;  // local node ids
  double density;
};

// Greedy peeling over local node ids 0..n-1 (ordered like entity ids).
PeelOutcome peel_once(std::size_t n, const std::vector<LocalEdge>& edges) {
  std::vector<std::vector<std::uint32_t>> incident(n);
  std::vector<double> degree(n, 0.0);
  std::vector<std::size_t> edge_count(n, 0);
  double total = 0.0;
  for (std::uint32_t i = 0; i < edges.size(); ++i) {
    const auto& e = edges[i];
    incident[e.u].push_back(i);
    degree[e.u] += e.w;
    ++edge_count[e.u];
    if (e.v != e.u) {
      incident[e.v].push_back(i);
      degree[e.v] += e.w;
      ++edge_count[e.v];
    }
    total += e.w;
  }

  if (total == 0.0) {
    std::uint32_t best = 0;
    for (std::uint32_t i = 1; i < n; ++i) {
      if (edge_count[i] > edge_count[best]) best = i;
    }
    return {{best}, 0.0};
  }

  std::set<std::pair<double, std::uint32_t>> queue;
  for (std::uint32_t i = 0; i < n; ++i) queue.emplace(degree[i], i);
  std::vector<char> edge_gone(edges.size(), 0), node_gone(n, 0);
  std::vector<std::uint32_t> order;
  order.reserve(n);

  double best_density = total / static_cast<double>(n);
  std::size_t best_removed = 0;
  std::size_t remaining = n;
  while (!queue.empty()) {
    const std::uint32_t v = queue.begin()->second;
    queue.erase(queue.begin());
    node_gone[v] = 1;
    order.push_back(v);
    --remaining;
    for (std::uint32_t i : incident[v]) {
      if (edge_gone[i]) continue;
      edge_gone[i] = 1;
      const auto& e = edges[i];
      total -= e.w;
      const std::uint32_t u = e.u == v ? e.v : e.u;
      if (u != v && !node_gone[u]) {
        queue.erase({degree[u], u});
        degree[u] -= e.w;
        queue.emplace(degree[u], u);
      }
    }
    if (remaining == 0) break;
    const double density = std::max(total, 0.0) / static_cast<double>(remaining);
    if (density > best_density) {
      best_density = density;
      best_removed = order.size();
    }
  }

  std::vector<char> dropped(n, 0);
  for (std::size_t i = 0; i < best_removed; ++i) dropped[order[i]] = 1;
  PeelOutcome out{{}, best_density};
  for (std::uint32_t i = 0; i < n; ++i) {
    if (!dropped[i]) out.kept.push_back(i);
  }
  return out;
}

void validate(const KnowledgeGraph& kg, std::span<const WeightedTriple> weights) {
  for (const auto& w : weights) {
    if (!kg.contains(w.triple)) throw DomainError(kg.format(w.triple) + " is not a fact");
    if (!std::isfinite(w.weight) || w.weight < 0.0) {
      throw DomainError("edge weights must be finite and non-negative");
    }
  }
}

// Runs peel_once over the subset `active` of `weights`; returns entity ids.
DenseSubgraph densest_over(std::span<const WeightedTriple> weights,
                           const std::vector<std::size_t>& active) {
  std::vector<std::uint32_t> ids;
  ids.reserve(active.size() * 2);
  for (std::size_t i : active) {
    ids.push_back(weights[i].triple.head.index);
    ids.push_back(weights[i].triple.tail.index);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto local = [&](EntityId e) {
    return static_cast<std::uint32_t>(std::lower_bound(ids.begin(), ids.end(), e.index) - ids.begin());
  };
  std::vector<LocalEdge> edges;
  edges.reserve(active.size());
  for (std::size_t i : active) {
    edges.push_back({local(weights[i].triple.head), local(weights[i].triple.tail), weights[i].weight});
  }
  const PeelOutcome p = peel_once(ids.size(), edges);
  DenseSubgraph out;
  out.density = p.density;
  for (std::uint32_t i : p.kept) out.nodes.push_back(EntityId{ids[i]});
  return out;
}

}  // namespace

DenseSubgraph densest_subgraph(const KnowledgeGraph& kg, std::span<const WeightedTriple> weights) {
  if (weights.empty()) throw DomainError("densest subgraph needs at least one weighted edge");
  validate(kg, weights);
  std::vector<std::size_t> all(weights.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return densest_over(weights, all);
}

std::vector<PeelStep> peel_decomposition(const KnowledgeGraph& kg,
                                         std::span<const WeightedTriple> weights) {
  validate(kg, weights);
  std::vector<std::size_t> remaining(weights.size());
  for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;

  std::vector<PeelStep> steps;
  std::vector<char> covered(kg.num_entities(), 0);
  std::size_t covered_count = 0;
  std::size_t emitted = 0;
  while (!remaining.empty()) {
    bool any_positive = false;
    for (std::size_t i : remaining) any_positive |= weights[i].weight > 0.0;

    PeelStep step;
    std::vector<std::size_t> rest;
    if (any_positive) {
      const DenseSubgraph dense = densest_over(weights, remaining);
      step.density = dense.density;
      step.part.nodes = dense.nodes;
      std::vector<char> in(kg.num_entities(), 0);
      for (EntityId e : dense.nodes) in[e.index] = 1;
      for (std::size_t i : remaining) {
        const Triple& t = weights[i].triple;
        if (in[t.head.index] && in[t.tail.index]) {
          step.part.triples.push_back(t);
          step.weights.push_back(weights[i].weight);
        } else {
          rest.push_back(i);
        }
      }
    } else {
      for (std::size_t i : remaining) {
        const Triple& t = weights[i].triple;
        step.part.triples.push_back(t);
        step.weights.push_back(weights[i].weight);
        step.part.nodes.push_back(t.head);
        step.part.nodes.push_back(t.tail);
      }
      std::sort(step.part.nodes.begin(), step.part.nodes.end());
      step.part.nodes.erase(std::unique(step.part.nodes.begin(), step.part.nodes.end()),
                            step.part.nodes.end());
    }
    for (EntityId e : step.part.nodes) {
      if (!covered[e.index]) {
        covered[e.index] = 1;
        ++covered_count;
      }
    }
    if (!step.part.nodes.empty()) step.part.start = step.part.nodes.front();
    emitted += step.part.triples.size();
    step.cumulative_nodes = covered_count;
    step.cumulative_triples = emitted;
    steps.push_back(std::move(step));
    remaining = std::move(rest);
  }
  return steps;
}

}  // namespace relik
