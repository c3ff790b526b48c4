#include "cli.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "parallel.hpp"
#include "relik/embed.hpp"
#include "relik/eval.hpp"
#include "relik/graphops.hpp"
#include "relik/kg.hpp"
#include "relik/reliability.hpp"
#include "relik/report.hpp"
#include "relik/synthetic.hpp"
#include "relik/trainer.hpp"

namespace relik::cli {

namespace {

struct Common {
  std::vector<std::string> triples;
  std::string entities;
  std::string negatives_from = "all";
  std::string embeddings;
  std::string scorer;
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::string format = "json";
};

struct Sampling {
  std::string mode = "apx";
  double fraction = 0.10;
  std::uint64_t k = 0;
  double max_exact_cost = 1e6;
};

struct Context {
  Common common;
  InputLog inputs;
  std::ostream* out = nullptr;
  std::string command;
  std::vector<std::string> argv;
  CLI::App* sub = nullptr;
};

std::string at_line(const std::string& path, std::size_t line, std::size_t column = 0) {
  std::string loc = path;
  if (line > 0) loc += ":" + std::to_string(line);
  if (column > 0) loc += ":" + std::to_string(column);
  return loc;
}

// ---------------------------------------------------------------------------
// Loading
// ---------------------------------------------------------------------------

struct Graph {
  KnowledgeGraphBuilder builder;
  KnowledgeGraph kg;
};

Graph load_graph(Context& ctx) {
  if (ctx.common.triples.empty()) throw LocatedError("usage", "--triples", "no triples file given");
  Graph g;
  std::vector<std::vector<Triple>> docs;
  for (const auto& path : ctx.common.triples) {
    const std::string text = ctx.inputs.read(path);
    try {
      docs.push_back(g.builder.add_document(text));
    } catch (const ParseError& e) {
      throw LocatedError("parse", at_line(path, e.line(), e.column()), e.what());
    }
  }
  if (!ctx.common.entities.empty()) {
    const std::string text = ctx.inputs.read(ctx.common.entities);
    std::size_t line_no = 0, pos = 0;
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) end = text.size();
      std::string line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      if (line.find('\t') != std::string::npos) {
        throw LocatedError("parse", at_line(ctx.common.entities, line_no),
                           "entity lines hold a single label");
      }
      g.builder.add_entity(line);
    }
  }
  g.kg = ctx.common.negatives_from == "first" ? g.builder.build(docs.front()) : g.builder.build();
  return g;
}

/// Triples of a query file, resolved against the graph's vocabularies.
std::vector<Triple> load_queries(Context& ctx, const KnowledgeGraph& kg, const std::string& path) {
  const std::string text = ctx.inputs.read(path);
  KnowledgeGraphBuilder local;
  std::vector<Triple> raw;
  try {
    raw = local.add_document(text);
  } catch (const ParseError& e) {
    throw LocatedError("parse", at_line(path, e.line(), e.column()), e.what());
  }
  std::vector<Triple> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string& h = local.entities().label(raw[i].head.index);
    const std::string& r = local.relations().label(raw[i].relation.index);
    const std::string& t = local.entities().label(raw[i].tail.index);
    const auto he = kg.entity(h);
    const auto re = kg.relation(r);
    const auto te = kg.entity(t);
    if (!he || !re || !te) {
      throw LocatedError("domain", path,
                         "query " + std::to_string(i + 1) + " (" + h + ", " + r + ", " + t +
                             ") uses a label missing from the graph");
    }
    out.push_back({*he, *re, *te});
  }
  if (out.empty()) throw LocatedError("domain", path, "query file holds no triples");
  return out;
}

struct Model {
  std::optional<EmbeddingStore> store;
  std::unique_ptr<EmbeddingScorer> scorer;
};

ScorerKind scorer_kind(const std::string& name) {
  const auto kind = parse_scorer_kind(name);
  if (!kind) throw LocatedError("usage", "--scorer", "unknown scorer '" + name + "'");
  return *kind;
}

Model load_model(Context& ctx, const KnowledgeGraph& kg) {
  const std::string& path = ctx.common.embeddings;
  if (path.empty()) throw LocatedError("usage", "--embeddings", "no embeddings file given");
  if (ctx.common.scorer.empty()) throw LocatedError("usage", "--scorer", "no scorer given");
  const ScorerKind kind = scorer_kind(ctx.common.scorer);
  const std::string text = ctx.inputs.read(path);
  Model m;
  try {
    m.store.emplace(EmbeddingStore::bind(parse_embeddings(text), kg));
  } catch (const ParseError& e) {
    throw LocatedError("parse", at_line(path, e.line(), e.column()), e.what());
  } catch (const SchemaError& e) {
    throw LocatedError("schema", at_line(path, e.line()), e.what());
  }
  try {
    m.scorer = std::make_unique<EmbeddingScorer>(*m.store, kind);
  } catch (const ConfigError& e) {
    throw LocatedError("config", path, e.what());
  }
  return m;
}

Estimator parse_mode(const std::string& mode) {
  if (mode == "exact") return Estimator::Exact;
  if (mode == "lb") return Estimator::LowerBound;
  if (mode == "apx") return Estimator::Scaled;
  throw LocatedError("usage", "--mode", "mode must be exact, lb or apx");
}

SampleConfig sample_config(const Sampling& s, std::uint64_t seed) {
  SampleConfig cfg;
  cfg.fraction = s.fraction;
  cfg.absolute_k = s.k;
  cfg.seed = seed;
  sample_size_for(cfg, 1);  // validates the fraction early
  return cfg;
}

void guard_exact_cost(const KnowledgeGraph& kg, const Sampling& s) {
  const double cost = static_cast<double>(kg.candidate_space());
  if (cost > s.max_exact_cost) {
    throw LocatedError("config", "--max-exact-cost",
                       "exact reliability over |E|*|R| = " + format_number(cost) +
                           " candidates per side exceeds the limit " +
                           format_number(s.max_exact_cost) +
                           "; sample with --mode apx or raise --max-exact-cost");
  }
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

Json option_value(const CLI::Option* opt) {
  const auto& results = opt->results();
  const bool multi = opt->get_expected_max() > 1 ||
                     opt->get_multi_option_policy() == CLI::MultiOptionPolicy::TakeAll;
  if (opt->count() == 0) {
    if (multi) return Json::array();
    return opt->get_default_str();
  }
  if (multi) return Json(results);
  return results.back();
}

Json resolved_params(const CLI::App* sub) {
  std::map<std::string, Json> sorted;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->get_lnames().empty()) continue;
    const std::string& name = opt->get_lnames().front();
    if (name == "help" || name == "threads") continue;
    sorted[name] = option_value(opt);
  }
  Json params = Json::object();
  for (auto& [k, v] : sorted) params[k] = std::move(v);
  return params;
}

void emit(Context& ctx, const EvalReport& report) {
  if (ctx.common.format == "csv") {
    *ctx.out << to_csv(report);
    return;
  }
  const Json manifest = make_manifest(ctx.command, ctx.argv, resolved_params(ctx.sub),
                                      ctx.common.seed, ctx.inputs.files());
  *ctx.out << to_json(report, manifest);
}

std::vector<Cell> triple_cells(const KnowledgeGraph& kg, const Triple& t) {
  return {kg.entities().label(t.head.index), kg.relations().label(t.relation.index),
          kg.entities().label(t.tail.index)};
}

void add_result_rows(EvalReport& report, const KnowledgeGraph& kg, std::span<const Triple> xs,
                     std::span<const ReliKResult> results) {
  report.columns = {"head",     "relation", "tail",        "value",      "head_rank",
                    "tail_rank", "head_neg", "tail_neg", "head_sample", "tail_sample"};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    auto row = triple_cells(kg, xs[i]);
    const auto& r = results[i];
    for (double v : {r.value, static_cast<double>(r.head_rank), static_cast<double>(r.tail_rank),
                     static_cast<double>(r.head_neg_size), static_cast<double>(r.tail_neg_size),
                     static_cast<double>(r.head_sample_size),
                     static_cast<double>(r.tail_sample_size)}) {
      row.emplace_back(v);
    }
    report.rows.push_back(std::move(row));
  }
}

std::vector<ReliKResult> reliability_of(const KnowledgeGraph& kg, const ScoreFunction& scorer,
                                        std::span<const Triple> xs, Estimator estimator,
                                        const Sampling& s, std::uint64_t seed, int threads,
                                        const std::string& where) {
  if (estimator == Estimator::Exact) guard_exact_cost(kg, s);
  for (const Triple& x : xs) {
    if (!kg.contains(x)) {
      throw LocatedError("domain", where, kg.format(x) + " is not a fact of the graph");
    }
  }
  return relik_batch(kg, scorer, xs, estimator, sample_config(s, seed), threads);
}

// ---------------------------------------------------------------------------
// Option groups
// ---------------------------------------------------------------------------

void add_graph_options(CLI::App* sub, Common& c) {
  sub->add_option("--triples", c.triples, "Triples file (TSV); repeat to add splits")
      ->required()
      ->take_all();
  sub->add_option("--entities", c.entities,
                  "Extra entity labels, one per line, for entities in no fact");
  sub->add_option("--negatives-from", c.negatives_from,
                  "Facts that define the negative space: all files or only the first")
      ->check(CLI::IsMember({"all", "first"}));
}

void add_model_options(CLI::App* sub, Common& c) {
  sub->add_option("--embeddings", c.embeddings, "Embedding file (v1 format)")->required();
  sub->add_option("--scorer", c.scorer,
                  "transe-l1, transe-l2, distmult, rotate, pairre or complex")
      ->required();
}

void add_run_options(CLI::App* sub, Common& c) {
  sub->add_option("--seed", c.seed, "Global seed");
  sub->add_option("--threads", c.threads, "Worker threads (0: OpenMP default)")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_sampling_options(CLI::App* sub, Sampling& s) {
  sub->add_option("--mode", s.mode, "exact, lb (lower bound) or apx (scaled)")
      ->check(CLI::IsMember({"exact", "lb", "apx"}));
  sub->add_option("--fraction", s.fraction, "Sample size as a share of each neighborhood");
  sub->add_option("--k", s.k, "Absolute sample size per side (overrides --fraction)");
  sub->add_option("--max-exact-cost", s.max_exact_cost,
                  "Largest |E|*|R| for which exact reliability is computed");
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

void run_score(Context& ctx, const Sampling& s, const std::string& queries) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  const std::vector<Triple> xs = queries.empty()
                                     ? std::vector<Triple>(g.kg.facts().begin(), g.kg.facts().end())
                                     : load_queries(ctx, g.kg, queries);
  const Estimator est = parse_mode(s.mode);
  const auto results = reliability_of(g.kg, *m.scorer, xs, est, s, ctx.common.seed,
                                      ctx.common.threads, queries.empty() ? "--triples" : queries);
  EvalReport report;
  report.kind = "relik_scores";
  report.config["estimator"] = std::string(to_string(est));
  report.summary["triples"] = xs.size();
  report.summary["mean_value"] = relik_set(results);
  add_result_rows(report, g.kg, xs, results);
  emit(ctx, report);
}

void run_score_set(Context& ctx, const Sampling& s, const std::string& queries, std::size_t nodes,
                   double restart) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  const Estimator est = parse_mode(s.mode);
  EvalReport report;
  report.kind = "relik_set";
  report.config["estimator"] = std::string(to_string(est));
  std::vector<Triple> xs;
  if (!queries.empty()) {
    xs = load_queries(ctx, g.kg, queries);
    report.config["source"] = "queries";
  } else {
    const SubgraphSample sub = rwr_subgraph(g.kg, nodes, restart, ctx.common.seed);
    xs = sub.triples;
    report.config["source"] = "random_walk";
    report.summary["start"] = g.kg.entities().label(sub.start.index);
    report.summary["nodes"] = sub.nodes.size();
    if (xs.empty()) throw SamplingError("the sampled subgraph induces no triple");
  }
  const auto results = reliability_of(g.kg, *m.scorer, xs, est, s, ctx.common.seed,
                                      ctx.common.threads, queries.empty() ? "--triples" : queries);
  report.summary["triples"] = xs.size();
  report.summary["relik"] = relik_set(results);
  add_result_rows(report, g.kg, xs, results);
  emit(ctx, report);
}

void run_study_approx(Context& ctx, const Sampling& s, const std::vector<double>& fractions,
                      std::size_t reps, bool timing, const std::string& queries) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  guard_exact_cost(g.kg, s);
  const std::vector<Triple> xs = queries.empty()
                                     ? std::vector<Triple>(g.kg.facts().begin(), g.kg.facts().end())
                                     : load_queries(ctx, g.kg, queries);
  for (const Triple& x : xs) {
    if (!g.kg.contains(x)) throw LocatedError("domain", queries, g.kg.format(x) + " is not a fact");
  }
  ApproxStudyConfig cfg;
  cfg.fractions = fractions;
  cfg.repetitions = reps;
  cfg.seed = ctx.common.seed;
  cfg.timing = timing;
  cfg.threads = ctx.common.threads;
  const ApproxStudy study = approximation_study(g.kg, *m.scorer, xs, cfg);
  emit(ctx, to_report(study, cfg));
}

void run_correlate(Context& ctx, const Sampling& s, const std::string& task, std::size_t subgraphs,
                   std::size_t size, double restart, double holdout) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  CorrelationConfig cfg;
  const auto t = parse_correlation_task(task);
  if (!t) throw LocatedError("usage", "--task", "unknown task '" + task + "'");
  cfg.task = *t;
  cfg.subgraphs = subgraphs;
  cfg.nodes = size;
  cfg.restart = restart;
  cfg.holdout = holdout;
  cfg.sample = sample_config(s, ctx.common.seed);
  cfg.threads = ctx.common.threads;
  emit(ctx, to_report(subgraph_correlation(g.kg, *m.scorer, cfg), cfg));
}

std::vector<WeightedTriple> edge_weights(Context& ctx, const KnowledgeGraph& kg,
                                         const ScoreFunction& scorer, const Sampling& s,
                                         const std::string& weight) {
  std::vector<WeightedTriple> out;
  out.reserve(kg.num_facts());
  if (weight == "relik") {
    const auto results = reliability_of(kg, scorer, kg.facts(), parse_mode(s.mode), s,
                                        ctx.common.seed, ctx.common.threads, "--triples");
    for (std::size_t i = 0; i < results.size(); ++i) out.push_back({kg.facts()[i], results[i].value});
  } else {
    std::vector<double> rr(kg.num_facts());
    detail::parallel_for(kg.num_facts(), ctx.common.threads, [&](std::size_t i) {
      const Triple& x = kg.facts()[i];
      rr[i] = 0.5 * (reciprocal_rank(kg, scorer, x, PredictionTarget::Tail) +
                     reciprocal_rank(kg, scorer, x, PredictionTarget::Relation));
    });
    for (std::size_t i = 0; i < rr.size(); ++i) out.push_back({kg.facts()[i], rr[i]});
  }
  return out;
}

void run_densest(Context& ctx, const Sampling& s, const std::string& weight) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  const auto weights = edge_weights(ctx, g.kg, *m.scorer, s, weight);
  const DenseSubgraph dense = densest_subgraph(g.kg, weights);
  const auto induced = induced_triples(g.kg, dense.nodes);
  EvalReport report;
  report.kind = "densest_subgraph";
  report.config["weight"] = weight;
  report.config["estimator"] = weight == "relik" ? std::string(to_string(parse_mode(s.mode)))
                                                 : std::string("none");
  report.summary["density"] = dense.density;
  report.summary["nodes"] = dense.nodes.size();
  report.summary["triples"] = induced.size();
  report.columns = {"entity"};
  for (EntityId e : dense.nodes) report.rows.push_back({g.kg.entities().label(e.index)});
  emit(ctx, report);
}

void run_peel(Context& ctx, const Sampling& s, const std::string& weight) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  const auto weights = edge_weights(ctx, g.kg, *m.scorer, s, weight);
  const auto steps = peel_decomposition(g.kg, weights);
  EvalReport report;
  report.kind = "peel_decomposition";
  report.config["weight"] = weight;
  report.config["estimator"] = weight == "relik" ? std::string(to_string(parse_mode(s.mode)))
                                                 : std::string("none");
  report.summary["steps"] = steps.size();
  report.columns = {"step",        "nodes",           "triples",           "density",
                    "mean_weight", "cumulative_nodes", "cumulative_triples"};
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& st = steps[i];
    double sum = 0.0;
    for (double w : st.weights) sum += w;
    const double mean = st.weights.empty() ? 0.0 : sum / static_cast<double>(st.weights.size());
    report.rows.push_back({static_cast<double>(i), static_cast<double>(st.part.nodes.size()),
                           static_cast<double>(st.part.triples.size()), st.density, mean,
                           static_cast<double>(st.cumulative_nodes),
                           static_cast<double>(st.cumulative_triples)});
  }
  emit(ctx, report);
}

void run_margin(Context& ctx, const Sampling& s, std::size_t count, const std::string& pos_path,
                const std::string& neg_path) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  const Estimator est = parse_mode(s.mode);
  if (est == Estimator::Exact) guard_exact_cost(g.kg, s);
  if (pos_path.empty() != neg_path.empty()) {
    throw LocatedError("usage", pos_path.empty() ? "--positives" : "--negatives",
                       "--positives and --negatives go together");
  }
  std::vector<Triple> pos, neg;
  if (!pos_path.empty()) {
    pos = load_queries(ctx, g.kg, pos_path);
    neg = load_queries(ctx, g.kg, neg_path);
  } else {
    if (count == 0) throw LocatedError("usage", "--count", "count must be positive");
    Rng rng(derive_seed(ctx.common.seed, 0, 4));
    std::vector<Triple> facts(g.kg.facts().begin(), g.kg.facts().end());
    const std::size_t n = std::min(count, facts.size());
    for (std::size_t i = 0; i < n; ++i) {
      std::swap(facts[i], facts[i + uniform_below(rng, facts.size() - i)]);
    }
    pos.assign(facts.begin(), facts.begin() + static_cast<std::ptrdiff_t>(n));
    neg = corrupt_negatives(g.kg, pos, rng);
  }
  const MarginReport mr =
      margin_report(g.kg, *m.scorer, pos, neg, sample_config(s, ctx.common.seed), est,
                    ctx.common.threads);
  emit(ctx, to_report(mr, est));
}

void run_histogram(Context& ctx, std::size_t bins) {
  const Graph g = load_graph(ctx);
  const Model m = load_model(ctx, g.kg);
  Rng rng(derive_seed(ctx.common.seed, 0, 5));
  const auto negatives = corrupt_negatives(g.kg, g.kg.facts(), rng);
  std::vector<double> pos(g.kg.num_facts()), neg(negatives.size());
  m.scorer->score_batch(g.kg.facts(), pos);
  m.scorer->score_batch(negatives, neg);
  emit(ctx, score_histogram(pos, neg, bins));
}

void run_train(Context& ctx, const TrainConfig& base, const std::string& output) {
  const Graph g = load_graph(ctx);
  if (ctx.common.scorer.empty()) throw LocatedError("usage", "--scorer", "no scorer given");
  const ScorerKind kind = scorer_kind(ctx.common.scorer);
  TrainConfig cfg = base;
  cfg.seed = ctx.common.seed;
  const TrainResult result = train_with_history(g.kg, kind, cfg);
  const std::string text = result.store.to_text(g.kg);
  write_file(output, text);
  EvalReport report;
  report.kind = "train";
  report.config["scorer"] = std::string(to_string(kind));
  report.config["dim"] = cfg.dim;
  report.config["epochs"] = cfg.epochs;
  report.config["learning_rate"] = cfg.learning_rate;
  report.config["margin"] = cfg.margin;
  report.config["negatives_per_positive"] = cfg.negatives_per_positive;
  report.summary["output"] = output;
  report.summary["output_fnv1a64"] = hex64(fnv1a64(text));
  report.summary["final_loss"] =
      result.epoch_loss.empty() ? Json(nullptr) : Json(result.epoch_loss.back());
  report.columns = {"epoch", "loss"};
  for (std::size_t i = 0; i < result.epoch_loss.size(); ++i) {
    report.rows.push_back({static_cast<double>(i + 1), result.epoch_loss[i]});
  }
  emit(ctx, report);
}

void run_synth(Context& ctx, const CountriesConfig& base, const std::string& output) {
  CountriesConfig cfg = base;
  cfg.seed = ctx.common.seed;
  const KnowledgeGraph kg = synthetic_countries(cfg);
  const std::string text = to_tsv(kg);
  write_file(output, text);
  EvalReport report;
  report.kind = "synthetic_countries";
  report.summary["entities"] = kg.num_entities();
  report.summary["relations"] = kg.num_relations();
  report.summary["facts"] = kg.num_facts();
  report.summary["output"] = output;
  report.summary["output_fnv1a64"] = hex64(fnv1a64(text));
  emit(ctx, report);
}

void run_validate(Context& ctx) {
  EvalReport report;
  report.kind = "validate";
  report.columns = {"path", "kind", "records"};
  const Graph g = load_graph(ctx);
  // load_graph parsed every document; count records per file for the report.
  for (const auto& path : ctx.common.triples) {
    KnowledgeGraphBuilder b;
    report.rows.push_back({path, std::string("triples"),
                           static_cast<double>(b.add_document(read_file(path)).size())});
  }
  report.summary["entities"] = g.kg.num_entities();
  report.summary["relations"] = g.kg.num_relations();
  report.summary["facts"] = g.kg.num_facts();
  if (!ctx.common.embeddings.empty()) {
    if (ctx.common.scorer.empty()) {
      const std::string text = ctx.inputs.read(ctx.common.embeddings);
      try {
        const EmbeddingFile file = parse_embeddings(text);
        (void)EmbeddingStore::bind(file, g.kg);
        report.rows.push_back({ctx.common.embeddings, std::string("embeddings"),
                               static_cast<double>(file.rows.size())});
      } catch (const ParseError& e) {
        throw LocatedError("parse", at_line(ctx.common.embeddings, e.line(), e.column()), e.what());
      } catch (const SchemaError& e) {
        throw LocatedError("schema", at_line(ctx.common.embeddings, e.line()), e.what());
      }
    } else {
      const Model m = load_model(ctx, g.kg);
      report.rows.push_back({ctx.common.embeddings, std::string("embeddings"),
                             static_cast<double>(m.store->num_entities() +
                                                 m.store->num_relations())});
    }
  }
  report.summary["valid"] = true;
  emit(ctx, report);
}

int exit_code_for(const std::string& kind) {
  static const char* const validation[] = {"usage", "parse", "schema", "config", "domain", "io"};
  for (const char* k : validation) {
    if (kind == k) return 1;
  }
  return 2;
}

void report_error(std::ostream& err, const std::string& kind, const std::string& location,
                  const std::string& message) {
  Json e = Json::object();
  e["error"] = kind;
  e["location"] = location;
  e["message"] = message;
  err << e.dump() << "\n";
}

std::vector<std::string> without_threads(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--threads") {
      ++i;
      continue;
    }
    if (args[i].rfind("--threads=", 0) == 0) continue;
    out.push_back(args[i]);
  }
  return out;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth);

int run_replay(const std::string& path, int threads, std::ostream& out, std::ostream& err,
               int depth) {
  if (depth > 0) throw LocatedError("usage", path, "a replayed manifest cannot itself replay");
  const std::string text = read_file(path);
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw LocatedError("parse", path, e.what());
  }
  const Json& m = doc.contains("manifest") ? doc["manifest"] : doc;
  if (!m.is_object() || !m.contains("command") || !m.contains("argv") ||
      !m["argv"].is_array() || !m.contains("inputs")) {
    throw LocatedError("schema", path, "not a manifest or an artifact embedding one");
  }
  if (m.value("version", "") != kToolVersion) {
    throw LocatedError("schema", path, "manifest was written by another tool version");
  }
  for (const auto& f : m["inputs"]) {
    const std::string input = f.at("path").get<std::string>();
    const std::string digest = hex64(fnv1a64(read_file(input)));
    if (digest != f.at("fnv1a64").get<std::string>()) {
      throw LocatedError("domain", input, "input changed since the manifest was written");
    }
  }
  std::vector<std::string> argv{m["command"].get<std::string>()};
  for (const auto& a : m["argv"]) argv.push_back(a.get<std::string>());
  if (threads > 0) {
    argv.push_back("--threads");
    argv.push_back(std::to_string(threads));
  }
  return dispatch(argv, out, err, depth + 1);
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
             int depth) {
  CLI::App app{"Reliability of knowledge-graph embeddings", "relik"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  app.set_version_flag("--version", kToolVersion);

  Context ctx;
  ctx.out = &out;
  Common& c = ctx.common;
  Sampling s;
  std::string queries, task = "relation_mrr", weight = "relik", output, positives, negatives,
                       replay_path;
  std::size_t nodes = 60, subgraphs = 100, size = 60, reps = 3, bins = 20, count = 50;
  double restart = 0.2;
  double holdout = 0.0;
  bool timing = false;
  std::vector<double> fractions{0.05, 0.10, 0.20, 0.40, 0.80};
  TrainConfig train_cfg;
  CountriesConfig synth_cfg;

  auto scoring = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_graph_options(sub, c);
    add_model_options(sub, c);
    add_run_options(sub, c);
    return sub;
  };

  CLI::App* score = scoring("score", "Reliability of each query triple");
  add_sampling_options(score, s);
  score->add_option("--queries", queries, "Triples to score (default: every fact)");

  CLI::App* score_set = scoring("score-set", "Mean reliability of a triple set or walk subgraph");
  add_sampling_options(score_set, s);
  score_set->add_option("--queries", queries, "Triple set (default: a random-walk subgraph)");
  score_set->add_option("--nodes", nodes, "Walk subgraph size")->check(CLI::PositiveNumber);
  score_set->add_option("--restart", restart, "Walk restart probability")
      ->check(CLI::Range(0.0, 0.999999));

  CLI::App* study = scoring("study-approx", "Estimator error against exact reliability");
  study->add_option("--fractions", fractions, "Sample fractions")->delimiter(',');
  study->add_option("--reps", reps, "Repetitions per fraction")->check(CLI::PositiveNumber);
  study->add_flag("--timing", timing, "Record wall-clock seconds (not reproducible)");
  study->add_option("--queries", queries, "Triples to study (default: every fact)");
  study->add_option("--max-exact-cost", s.max_exact_cost,
                    "Largest |E|*|R| for which exact reliability is computed");

  CLI::App* correlate = scoring("correlate", "Subgraph reliability against a task metric");
  correlate->add_option("--task", task, "tail_mrr, relation_mrr, classification or self_check")
      ->check(CLI::IsMember({"tail_mrr", "relation_mrr", "classification", "self_check"}));
  correlate->add_option("--subgraphs", subgraphs, "Number of walk subgraphs")
      ->check(CLI::PositiveNumber);
  correlate->add_option("--size", size, "Nodes per subgraph")->check(CLI::PositiveNumber);
  correlate->add_option("--restart", restart, "Walk restart probability")
      ->check(CLI::Range(0.0, 0.999999));
  correlate->add_option("--holdout", holdout, "Classification: share of labels scored, not fitted")
      ->check(CLI::Range(0.0, 0.999999));
  correlate->add_option("--fraction", s.fraction, "Sample size as a share of each neighborhood");
  correlate->add_option("--k", s.k, "Absolute sample size per side");

  CLI::App* densest = scoring("densest", "Densest subgraph under reliability or RR weights");
  add_sampling_options(densest, s);
  densest->add_option("--weight", weight, "relik or rr")->check(CLI::IsMember({"relik", "rr"}));

  CLI::App* peel = scoring("peel", "Repeated densest-subgraph decomposition");
  add_sampling_options(peel, s);
  peel->add_option("--weight", weight, "relik or rr")->check(CLI::IsMember({"relik", "rr"}));

  CLI::App* margin = scoring("margin", "Reliability of positive versus negative answers");
  add_sampling_options(margin, s);
  margin->add_option("--count", count, "Sampled positives (one corruption each)");
  margin->add_option("--positives", positives, "Positive triples file");
  margin->add_option("--negatives", negatives, "Negative triples file");

  CLI::App* histogram = scoring("histogram", "Scores of facts versus corrupted triples");
  histogram->add_option("--bins", bins, "Number of bins")->check(CLI::PositiveNumber);

  CLI::App* train = app.add_subcommand("train", "Train TransE or DistMult embeddings");
  add_graph_options(train, c);
  train->add_option("--scorer", c.scorer, "transe-l1, transe-l2 or distmult")->required();
  add_run_options(train, c);
  train->add_option("--dim", train_cfg.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  train->add_option("--epochs", train_cfg.epochs, "Epochs");
  train->add_option("--lr", train_cfg.learning_rate, "Learning rate");
  train->add_option("--margin", train_cfg.margin, "Hinge margin");
  train->add_option("--negatives", train_cfg.negatives_per_positive, "Negatives per fact");
  train->add_option("--output", output, "Embedding file to write")->required();

  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic geography graph");
  add_run_options(synth, c);
  synth->add_option("--regions", synth_cfg.regions, "Regions");
  synth->add_option("--subregions", synth_cfg.subregions, "Subregions");
  synth->add_option("--countries", synth_cfg.countries, "Countries");
  synth->add_option("--extra-pairs", synth_cfg.extra_neighbor_pairs, "Extra neighbor pairs");
  synth->add_option("--output", output, "Triples file to write")->required();

  CLI::App* validate = app.add_subcommand("validate", "Check input files");
  add_graph_options(validate, c);
  validate->add_option("--embeddings", c.embeddings, "Embedding file to check");
  validate->add_option("--scorer", c.scorer, "Scorer the embeddings must support");
  add_run_options(validate, c);

  CLI::App* replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  replay->add_option("manifest", replay_path, "Manifest or artifact JSON")->required();
  replay->add_option("--threads", c.threads, "Worker threads")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    report_error(err, "usage", args.empty() ? "argv" : args.front(), e.what());
    return 1;
  }

  ctx.sub = app.get_subcommands().front();
  ctx.command = ctx.sub->get_name();
  ctx.argv = without_threads(std::vector<std::string>(args.begin() + 1, args.end()));

  if (ctx.sub == replay) return run_replay(replay_path, c.threads, out, err, depth);
  if (ctx.sub == score) run_score(ctx, s, queries);
  if (ctx.sub == score_set) run_score_set(ctx, s, queries, nodes, restart);
  if (ctx.sub == study) run_study_approx(ctx, s, fractions, reps, timing, queries);
  if (ctx.sub == correlate) run_correlate(ctx, s, task, subgraphs, size, restart, holdout);
  if (ctx.sub == densest) run_densest(ctx, s, weight);
  if (ctx.sub == peel) run_peel(ctx, s, weight);
  if (ctx.sub == margin) run_margin(ctx, s, count, positives, negatives);
  if (ctx.sub == histogram) run_histogram(ctx, bins);
  if (ctx.sub == train) run_train(ctx, train_cfg, output);
  if (ctx.sub == synth) run_synth(ctx, synth_cfg, output);
  if (ctx.sub == validate) run_validate(ctx);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return dispatch(args, out, err, 0);
  } catch (const LocatedError& e) {
    report_error(err, e.kind(), e.location(), e.what());
    return exit_code_for(e.kind());
  } catch (const ParseError& e) {
    report_error(err, e.kind(), at_line("", e.line(), e.column()), e.what());
    return 1;
  } catch (const Error& e) {
    report_error(err, e.kind(), "", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    report_error(err, "runtime", "", e.what());
    return 2;
  }
}

}  // namespace relik::cli
