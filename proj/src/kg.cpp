#include "relik/kg.hpp"

#include <algorithm>
#include <numeric>

namespace relik {

std::uint32_t Vocabulary::intern(std::string_view label) {
  std::string key(label);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(labels_.size());
  labels_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<std::uint32_t> Vocabulary::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Triple> KnowledgeGraphBuilder::add_document(std::string_view text) {
  std::vector<Triple> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  if (text.substr(0, 3) == "\xEF\xBB\xBF") pos = 3;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;

    std::string_view fields[3];
    std::size_t count = 0;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      const std::string_view field =
          line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      if (count == 3) {
        throw ParseError("expected 3 tab-separated fields, found more", line_no, start + 1);
      }
      if (field.empty()) {
        throw ParseError("empty field " + std::to_string(count + 1), line_no, start + 1);
      }
      fields[count++] = field;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (count != 3) {
      throw ParseError("expected 3 tab-separated fields, found " + std::to_string(count), line_no,
                       line.size() + 1);
    }
    out.push_back(add(fields[0], fields[1], fields[2]));
  }
  return out;
}

Triple KnowledgeGraphBuilder::add(std::string_view head, std::string_view relation,
                                  std::string_view tail) {
  Triple t;
  t.head = EntityId{entities_.intern(head)};
  t.relation = RelationId{relations_.intern(relation)};
  t.tail = EntityId{entities_.intern(tail)};
  all_.push_back(t);
  return t;
}

KnowledgeGraph KnowledgeGraphBuilder::build(std::span<const Triple> facts) const {
  return KnowledgeGraph(entities_, relations_, facts);
}

KnowledgeGraph KnowledgeGraphBuilder::build() const { return build(all_); }

namespace {

void build_csr(std::size_t n, const std::vector<Triple>& facts, bool by_head,
               std::vector<std::uint32_t>& offsets, std::vector<std::uint32_t>& index) {
  offsets.assign(n + 1, 0);
  for (const Triple& t : facts) ++offsets[(by_head ? t.head : t.tail).index + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  index.assign(facts.size(), 0);
  std::vector<std::uint32_t> cursor(offsets.begin(), offsets.end() - 1);
  for (std::uint32_t i = 0; i < facts.size(); ++i) {
    const Triple& t = facts[i];
    index[cursor[(by_head ? t.head : t.tail).index]++] = i;
  }
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(Vocabulary entities, Vocabulary relations,
                               std::span<const Triple> facts)
    : entities_(std::move(entities)), relations_(std::move(relations)) {
  facts_.reserve(facts.size());
  fact_keys_.reserve(facts.size() * 2);
  for (const Triple& t : facts) {
    check(t);
    if (fact_keys_.insert(key(t)).second) facts_.push_back(t);
  }
  build_csr(num_entities(), facts_, true, out_offsets_, out_index_);
  build_csr(num_entities(), facts_, false, in_offsets_, in_index_);
}

KnowledgeGraph KnowledgeGraph::parse(std::string_view text) {
  KnowledgeGraphBuilder builder;
  builder.add_document(text);
  return builder.build();
}

std::optional<EntityId> KnowledgeGraph::entity(std::string_view label) const {
  if (auto i = entities_.find(label)) return EntityId{*i};
  return std::nullopt;
}

std::optional<RelationId> KnowledgeGraph::relation(std::string_view label) const {
  if (auto i = relations_.find(label)) return RelationId{*i};
  return std::nullopt;
}

void KnowledgeGraph::check(EntityId e) const {
  if (e.index >= num_entities()) {
    throw DomainError("entity id " + std::to_string(e.index) + " out of range (|E| = " +
                      std::to_string(num_entities()) + ")");
  }
}

void KnowledgeGraph::check(RelationId r) const {
  if (r.index >= num_relations()) {
    throw DomainError("relation id " + std::to_string(r.index) + " out of range (|R| = " +
                      std::to_string(num_relations()) + ")");
  }
}

void KnowledgeGraph::check(const Triple& t) const {
  check(t.head);
  check(t.relation);
  check(t.tail);
}

bool KnowledgeGraph::contains(const Triple& triple) const {
  check(triple);
  return is_fact_unchecked(triple);
}

std::uint64_t KnowledgeGraph::head_count(EntityId e) const { return out_facts(e).size(); }

std::uint64_t KnowledgeGraph::tail_count(EntityId e) const { return in_facts(e).size(); }

std::uint64_t KnowledgeGraph::negative_neighborhood_size(EntityId anchor, Side side) const {
  check(anchor);
  return candidate_space() - positive_count(anchor, side);
}

std::span<const std::uint32_t> KnowledgeGraph::out_facts(EntityId e) const {
  check(e);
  return std::span<const std::uint32_t>(out_index_).subspan(
      out_offsets_[e.index], out_offsets_[e.index + 1] - out_offsets_[e.index]);
}

std::span<const std::uint32_t> KnowledgeGraph::in_facts(EntityId e) const {
  check(e);
  return std::span<const std::uint32_t>(in_index_).subspan(
      in_offsets_[e.index], in_offsets_[e.index + 1] - in_offsets_[e.index]);
}

Triple KnowledgeGraph::candidate(EntityId anchor, Side side, std::uint64_t index) const {
  const auto n = static_cast<std::uint64_t>(num_entities());
  const RelationId r{static_cast<std::uint32_t>(index / n)};
  const EntityId other{static_cast<std::uint32_t>(index % n)};
  return side == Side::Head ? Triple{anchor, r, other} : Triple{other, r, anchor};
}

std::uint64_t KnowledgeGraph::candidate_index(const Triple& triple, Side side) const {
  const EntityId other = side == Side::Head ? triple.tail : triple.head;
  return static_cast<std::uint64_t>(triple.relation.index) * num_entities() + other.index;
}

std::vector<char> KnowledgeGraph::positive_mask(EntityId anchor, Side side) const {
  std::vector<char> mask(candidate_space(), 0);
  const auto incident = side == Side::Head ? out_facts(anchor) : in_facts(anchor);
  for (std::uint32_t f : incident) mask[candidate_index(facts_[f], side)] = 1;
  return mask;
}

std::vector<Triple> KnowledgeGraph::enumerate_negatives(EntityId anchor, Side side) const {
  std::vector<Triple> out;
  out.reserve(negative_neighborhood_size(anchor, side));
  for_each_negative(anchor, side, [&](const Triple& t) { out.push_back(t); });
  return out;
}

std::vector<Triple> KnowledgeGraph::sample_negatives(EntityId anchor, Side side, std::uint64_t k,
                                                     Rng& rng) const {
  const std::uint64_t size = negative_neighborhood_size(anchor, side);
  if (k > size) {
    throw DomainError("sample size " + std::to_string(k) + " exceeds negative neighborhood size " +
                      std::to_string(size));
  }
  if (k == 0) return {};

  const std::uint64_t space = candidate_space();
  if (2 * k > size || 2 * size < space) {
    std::vector<Triple> all = enumerate_negatives(anchor, side);
    for (std::uint64_t i = 0; i < k; ++i) {
      const std::uint64_t j = i + uniform_below(rng, all.size() - i);
      std::swap(all[i], all[j]);
    }
    all.resize(k);
    return all;
  }

  std::vector<Triple> out;
  out.reserve(k);
  // Open-addressing set of drawn indices; slots hold index + 1, 0 is empty.
  std::size_t slots = 16;
  while (slots < 4 * k) slots *= 2;
  std::vector<std::uint64_t> seen(slots, 0);
  auto insert = [&](std::uint64_t index) {
    std::size_t i = static_cast<std::size_t>((index * 0x9E3779B97F4A7C15ULL) >> 20) & (slots - 1);
    while (seen[i] != 0) {
      if (seen[i] == index + 1) return false;
      i = (i + 1) & (slots - 1);
    }
    seen[i] = index + 1;
    return true;
  };
  while (out.size() < k) {
    const std::uint64_t index = uniform_below(rng, space);
    const Triple t = candidate(anchor, side, index);
    if (is_fact_unchecked(t)) continue;
    if (insert(index)) out.push_back(t);
  }
  return out;
}

std::string KnowledgeGraph::format(const Triple& t) const {
  return "(" + entities_.label(t.head.index) + ", " + relations_.label(t.relation.index) + ", " +
         entities_.label(t.tail.index) + ")";
}

std::string to_tsv(const KnowledgeGraph& kg) {
  std::string out;
  for (const Triple& t : kg.facts()) {
    out += kg.entities().label(t.head.index);
    out += '\t';
    out += kg.relations().label(t.relation.index);
    out += '\t';
    out += kg.entities().label(t.tail.index);
    out += '\n';
  }
  return out;
}

}  // namespace relik
