#include "relik/embed.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>

namespace relik {

std::string_view to_string(ScorerKind kind) {
  switch (kind) {
    case ScorerKind::TransE_L1: return "transe-l1";
    case ScorerKind::TransE_L2: return "transe-l2";
    case ScorerKind::DistMult: return "distmult";
    case ScorerKind::RotatE: return "rotate";
    case ScorerKind::PairRE: return "pairre";
    case ScorerKind::ComplEx: return "complex";
  }
  return "?";
}

std::optional<ScorerKind> parse_scorer_kind(std::string_view name) {
  for (ScorerKind k : kAllScorers) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

std::string_view to_string(Field field) { return field == Field::Real ? "real" : "complex"; }

Field required_field(ScorerKind kind) {
  return kind == ScorerKind::RotatE || kind == ScorerKind::ComplEx ? Field::Complex : Field::Real;
}

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) return out;
    start = at + 1;
  }
}

double parse_number(std::string_view token, std::size_t line) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("invalid number '" + std::string(token) + "'", line);
  }
  if (!std::isfinite(value)) {
    throw ParseError("non-finite value '" + std::string(token) + "'", line);
  }
  return value;
}

void parse_header(std::string_view line, EmbeddingFile& file) {
  const auto parts = split(line, ' ');
  if (parts.empty() || parts[0] != "#relik-embeddings") {
    throw ParseError("missing '#relik-embeddings' header", 1, 1);
  }
  std::map<std::string_view, std::string_view> kv;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i].empty()) continue;
    const auto eq = parts[i].find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("malformed header token '" + std::string(parts[i]) + "'", 1);
    }
    kv[parts[i].substr(0, eq)] = parts[i].substr(eq + 1);
  }
  if (kv["v"] != "1") throw ParseError("unsupported embedding format version", 1);
  const std::string_view dim = kv["dim"];
  std::size_t d = 0;
  const auto [ptr, ec] = std::from_chars(dim.data(), dim.data() + dim.size(), d);
  if (ec != std::errc() || ptr != dim.data() + dim.size() || d == 0) {
    throw ParseError("header dim must be a positive integer", 1);
  }
  file.dim = d;
  const std::string_view field = kv["field"];
  if (field == "real") {
    file.field = Field::Real;
  } else if (field == "complex") {
    file.field = Field::Complex;
  } else {
    throw ParseError("header field must be real or complex", 1);
  }
  const std::string_view orientation = kv["orientation"];
  if (orientation == "+1" || orientation == "1") {
    file.orientation = 1;
  } else if (orientation == "-1") {
    file.orientation = -1;
  } else {
    throw ParseError("header orientation must be +1 or -1", 1);
  }
}

}  // namespace

EmbeddingFile parse_embeddings(std::string_view text) {
  EmbeddingFile file;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    ++line_no;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!have_header) {
      parse_header(line, file);
      have_header = true;
      continue;
    }
    if (line.empty() || line.front() == '#') continue;

    const auto fields = split(line, '\t');
    EmbeddingRow row;
    row.line = line_no;
    if (fields[0] == "E") {
      row.tag = EmbeddingRow::Tag::Entity;
    } else if (fields[0] == "R") {
      row.tag = EmbeddingRow::Tag::Relation;
    } else if (fields[0] == "RT") {
      row.tag = EmbeddingRow::Tag::RelationTail;
      if (file.field != Field::Real) {
        throw SchemaError("RT rows are only valid in real-field stores", line_no);
      }
    } else {
      throw SchemaError("unknown row tag '" + std::string(fields[0]) + "'", line_no);
    }
    if (fields.size() < 2 || fields[1].empty()) throw ParseError("missing label", line_no);
    row.label = std::string(fields[1]);
    const std::size_t width = file.field == Field::Complex ? 2 * file.dim : file.dim;
    if (fields.size() - 2 != width) {
      throw SchemaError("row '" + row.label + "' has " + std::to_string(fields.size() - 2) +
                            " values, expected " + std::to_string(width),
                        line_no);
    }
    row.values.reserve(width);
    for (std::size_t i = 2; i < fields.size(); ++i) row.values.push_back(parse_number(fields[i], line_no));
    file.rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError("empty embedding file", 1);
  return file;
}

EmbeddingStore::EmbeddingStore(std::size_t dim, Field field, std::size_t num_entities,
                               std::size_t num_relations, bool has_relation_tail, int orientation)
    : dim_(dim),
      field_(field),
      orientation_(orientation),
      num_entities_(num_entities),
      num_relations_(num_relations) {
  if (dim == 0) throw ConfigError("embedding dimension must be positive");
  if (orientation != 1 && orientation != -1) throw ConfigError("orientation must be +1 or -1");
  if (has_relation_tail && field == Field::Complex) {
    throw ConfigError("relation-tail vectors require a real-field store");
  }
  entity_.assign(num_entities * width(), 0.0);
  relation_.assign(num_relations * width(), 0.0);
  if (has_relation_tail) relation_tail_.assign(num_relations * width(), 0.0);
}

EmbeddingStore EmbeddingStore::bind(const EmbeddingFile& file, const KnowledgeGraph& kg) {
  bool any_tail = false;
  for (const auto& row : file.rows) any_tail |= row.tag == EmbeddingRow::Tag::RelationTail;
  EmbeddingStore store(file.dim, file.field, kg.num_entities(), kg.num_relations(), any_tail,
                       file.orientation);

  std::vector<char> seen_e(kg.num_entities(), 0), seen_r(kg.num_relations(), 0),
      seen_rt(kg.num_relations(), 0);
  for (const auto& row : file.rows) {
    std::span<double> dst;
    char* seen = nullptr;
    if (row.tag == EmbeddingRow::Tag::Entity) {
      const auto id = kg.entity(row.label);
      if (!id) continue;
      dst = store.entity(*id);
      seen = &seen_e[id->index];
    } else {
      const auto id = kg.relation(row.label);
      if (!id) continue;
      const bool tail = row.tag == EmbeddingRow::Tag::RelationTail;
      dst = tail ? store.relation_tail(*id) : store.relation(*id);
      seen = tail ? &seen_rt[id->index] : &seen_r[id->index];
    }
    if (*seen) throw SchemaError("duplicate vector for '" + row.label + "'", row.line);
    *seen = 1;
    std::copy(row.values.begin(), row.values.end(), dst.begin());
  }
  for (std::size_t i = 0; i < seen_e.size(); ++i) {
    if (!seen_e[i]) throw SchemaError("missing entity vector for '" + kg.entities().label(i) + "'");
  }
  for (std::size_t i = 0; i < seen_r.size(); ++i) {
    if (!seen_r[i]) {
      throw SchemaError("missing relation vector for '" + kg.relations().label(i) + "'");
    }
    if (any_tail && !seen_rt[i]) {
      throw SchemaError("missing relation-tail vector for '" + kg.relations().label(i) + "'");
    }
  }
  return store;
}

std::string EmbeddingStore::to_text(const KnowledgeGraph& kg) const {
  std::string out = "#relik-embeddings v=1 dim=" + std::to_string(dim_) +
                    " field=" + std::string(to_string(field_)) +
                    " orientation=" + (orientation_ > 0 ? "+1" : "-1") + "\n";
  char buf[32];
  auto emit = [&](const char* tag, const std::string& label, std::span<const double> v) {
    out += tag;
    out += '\t';
    out += label;
    for (double x : v) {
      std::snprintf(buf, sizeof buf, "\t%.17g", x);
      out += buf;
    }
    out += '\n';
  };
  for (std::uint32_t i = 0; i < num_entities_; ++i) emit("E", kg.entities().label(i), entity(EntityId{i}));
  for (std::uint32_t i = 0; i < num_relations_; ++i) emit("R", kg.relations().label(i), relation(RelationId{i}));
  if (has_relation_tail()) {
    for (std::uint32_t i = 0; i < num_relations_; ++i) {
      emit("RT", kg.relations().label(i), relation_tail(RelationId{i}));
    }
  }
  return out;
}

void ScoreFunction::score_batch(std::span<const Triple> triples, std::span<double> out) const {
  for (std::size_t i = 0; i < triples.size(); ++i) out[i] = score(triples[i]);
}

std::vector<double> score_batch(const ScoreFunction& scorer, std::span<const Triple> triples) {
  std::vector<double> out(triples.size());
  scorer.score_batch(triples, out);
  return out;
}

namespace {

// Scalar kernels. The batch path calls exactly these, so batch and scalar
// results are bit-identical.

double transe_l1(const double* h, const double* r, const double* t, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) acc += std::fabs(h[i] + r[i] - t[i]);
  return -acc;
}

double transe_l2(const double* h, const double* r, const double* t, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double x = h[i] + r[i] - t[i];
    acc += x * x;
  }
  return -std::sqrt(acc);
}

double distmult(const double* h, const double* r, const double* t, std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) acc += h[i] * r[i] * t[i];
  return acc;
}

double rotate(const double* h, const double* r, const double* t, std::size_t d) {
  const double* hi = h + d;
  const double* ri = r + d;
  const double* ti = t + d;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double re = h[i] * r[i] - hi[i] * ri[i] - t[i];
    const double im = h[i] * ri[i] + hi[i] * r[i] - ti[i];
    acc += re * re + im * im;
  }
  return -std::sqrt(acc);
}

double pairre(const double* h, const double* rh, const double* rt, const double* t,
              std::size_t d) {
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double x = h[i] * rh[i] - t[i] * rt[i];
    acc += x * x;
  }
  return -std::sqrt(acc);
}

double complex_trilinear(const double* h, const double* r, const double* t, std::size_t d) {
  const double* hi = h + d;
  const double* ri = r + d;
  const double* ti = t + d;
  double acc = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    const double re = r[i] * h[i] - ri[i] * hi[i];
    const double im = r[i] * hi[i] + ri[i] * h[i];
    acc += re * t[i] + im * ti[i];
  }
  return acc;
}

}  // namespace

EmbeddingScorer::EmbeddingScorer(const EmbeddingStore& store, ScorerKind kind)
    : store_(&store), kind_(kind) {
  if (store.field() != required_field(kind)) {
    throw ConfigError(std::string(to_string(kind)) + " requires a " +
                      std::string(to_string(required_field(kind))) + "-field store, got " +
                      std::string(to_string(store.field())));
  }
  if (kind == ScorerKind::PairRE && !store.has_relation_tail()) {
    throw ConfigError("pairre requires relation-tail (RT) vectors");
  }
}

double EmbeddingScorer::score(const Triple& x) const {
  const EmbeddingStore& s = *store_;
  const double* h = s.entity(x.head).data();
  const double* r = s.relation(x.relation).data();
  const double* t = s.entity(x.tail).data();
  const std::size_t d = s.dim();
  double value = 0.0;
  switch (kind_) {
    case ScorerKind::TransE_L1: value = transe_l1(h, r, t, d); break;
    case ScorerKind::TransE_L2: value = transe_l2(h, r, t, d); break;
    case ScorerKind::DistMult: value = distmult(h, r, t, d); break;
    case ScorerKind::RotatE: value = rotate(h, r, t, d); break;
    case ScorerKind::PairRE: value = pairre(h, r, s.relation_tail(x.relation).data(), t, d); break;
    case ScorerKind::ComplEx: value = complex_trilinear(h, r, t, d); break;
  }
  return s.orientation() * value;
}

void EmbeddingScorer::score_batch(std::span<const Triple> triples, std::span<double> out) const {
  const auto n = static_cast<std::ptrdiff_t>(triples.size());
#pragma omp parallel for schedule(static) if (n >= 8192)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = score(triples[i]);
}

}  // namespace relik
