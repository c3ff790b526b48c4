#include "relik/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace relik {

namespace {

std::string name(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%03zu", prefix, i);
  return buf;
}

}  // namespace

KnowledgeGraph synthetic_countries(const CountriesConfig& cfg) {
  if (cfg.regions == 0 || cfg.subregions < cfg.regions || cfg.countries < cfg.subregions) {
    throw ConfigError("need 0 < regions <= subregions <= countries");
  }
  Rng rng(cfg.seed);
  KnowledgeGraphBuilder b;
  const std::string located = "locatedIn";
  const std::string neighbor = "neighborOf";

  // Round-robin keeps every group non-empty.
  std::vector<std::size_t> region_of_sub(cfg.subregions);
  for (std::size_t s = 0; s < cfg.subregions; ++s) region_of_sub[s] = s % cfg.regions;
  std::vector<std::size_t> sub_of_country(cfg.countries);
  for (std::size_t c = 0; c < cfg.countries; ++c) {
    sub_of_country[c] = c < cfg.subregions ? c : uniform_below(rng, cfg.subregions);
  }

  for (std::size_t s = 0; s < cfg.subregions; ++s) {
    b.add(name("subregion", s), located, name("region", region_of_sub[s]));
  }
  std::vector<std::vector<std::size_t>> members(cfg.subregions);
  for (std::size_t c = 0; c < cfg.countries; ++c) {
    const std::size_t s = sub_of_country[c];
    members[s].push_back(c);
    b.add(name("country", c), located, name("subregion", s));
    b.add(name("country", c), located, name("region", region_of_sub[s]));
  }

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  auto link = [&](std::size_t a, std::size_t c) {
    if (a == c) return false;
    return pairs.insert({std::min(a, c), std::max(a, c)}).second;
  };
  for (const auto& m : members) {
    for (std::size_t i = 1; i < m.size(); ++i) link(m[i - 1], m[i]);
  }

  std::vector<std::vector<std::size_t>> region_members(cfg.regions);
  for (std::size_t c = 0; c < cfg.countries; ++c) {
    region_members[region_of_sub[sub_of_country[c]]].push_back(c);
  }
  std::size_t added = 0;
  for (std::size_t attempt = 0; added < cfg.extra_neighbor_pairs && attempt < 1000000; ++attempt) {
    const std::size_t a = uniform_below(rng, cfg.countries);
    const auto& pool = uniform01(rng) < 0.7 ? members[sub_of_country[a]]
                                            : region_members[region_of_sub[sub_of_country[a]]];
    const std::size_t c = pool[uniform_below(rng, pool.size())];
    if (link(a, c)) ++added;
  }
  for (const auto& [a, c] : pairs) {
    b.add(name("country", a), neighbor, name("country", c));
    b.add(name("country", c), neighbor, name("country", a));
  }
  return b.build();
}

}  // namespace relik
