#pragma once

#include <cstdint>

#include "relik/kg.hpp"
#include "relik/random.hpp"

namespace relik {

/// Geography-shaped graph: regions contain subregions contain countries,
/// with `locatedIn` edges country->subregion, country->region and
/// subregion->region, and symmetric `neighborOf` edges between countries.
/// Each subregion's countries form a chain of neighbors; extra neighbor
/// pairs are drawn within a region, mostly within a subregion. The defaults
/// give 271 entities, 2 relations and 1199 facts.
struct CountriesConfig {
  std::size_t regions = 5;
  std::size_t subregions = 23;
  std::size_t countries = 243;
  std::size_t extra_neighbor_pairs = 125;
  std::uint64_t seed = kDefaultSeed;
};

KnowledgeGraph synthetic_countries(const CountriesConfig& cfg = {});

}  // namespace relik
