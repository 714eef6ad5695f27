#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "cutforge/cmaes.hpp"
#include "cutforge/features.hpp"
#include "cutforge/graph.hpp"
#include "cutforge/gw.hpp"
#include "cutforge/latent.hpp"
#include "cutforge/parallel.hpp"
#include "cutforge/rng.hpp"
#include "cutforge/rqaoa.hpp"

namespace cutforge {

enum class Direction { kGwOverRqaoa, kRqaoaOverGw };

inline std::string direction_name(Direction d) {
  return d == Direction::kGwOverRqaoa ? "gw-over-rqaoa" : "rqaoa-over-gw";
}

inline Direction parse_direction(const std::string& s) {
  if (s == "gw-over-rqaoa") return Direction::kGwOverRqaoa;
  if (s == "rqaoa-over-gw") return Direction::kRqaoaOverGw;
  throw std::invalid_argument("direction must be gw-over-rqaoa or rqaoa-over-gw");
}

struct EvolutionConfig {
  int n = 20;
  int n_c = 10;
  Direction direction = Direction::kGwOverRqaoa;
  int runs_per_algorithm = 100;
  int population_size = 64;
  std::int64_t max_evals_per_restart = 2000;
  int max_restarts = 10;
  std::uint64_t seed = 0;
  std::string out_dir;  // empty keeps the archive in memory only
};

inline void validate_evolution_config(const EvolutionConfig& cfg) {
  if (cfg.n < 2) throw std::invalid_argument("config: n must be >= 2");
  if (cfg.n_c < 1 || cfg.n_c > cfg.n) throw std::invalid_argument("config: need 1 <= n_c <= n");
  if (cfg.runs_per_algorithm < 1) throw std::invalid_argument("config: runs_per_algorithm must be >= 1");
  if (cfg.population_size < 4) throw std::invalid_argument("config: population_size must be >= 4");
  if (cfg.max_evals_per_restart < 0) throw std::invalid_argument("config: negative eval budget");
  if (cfg.max_restarts < 0) throw std::invalid_argument("config: negative restart budget");
}

// Named parameter sets: the two paper scales and a small smoke scale.
inline EvolutionConfig preset_config(const std::string& name) {
  EvolutionConfig cfg;
  if (name == "paper-20") {
    cfg.n = 20;
    cfg.n_c = 10;
  } else if (name == "paper-100") {
    cfg.n = 100;
    cfg.n_c = 20;
  } else if (name == "desk") {
    cfg.n = 12;
    cfg.n_c = 6;
    cfg.population_size = 16;
    cfg.max_evals_per_restart = 500;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return cfg;
}

struct Provenance {
  std::uint64_t seed = 0;
  int restart_index = 0;
  std::int64_t eval_index = 0;
};

struct InstanceRecord {
  Graph graph;
  double median_rqaoa = 0.0;
  double median_gw = 0.0;
  double ratio = 0.0;  // configured-direction quotient
  std::vector<double> rqaoa_values;
  std::vector<double> gw_values;
  FeatureVector features;
  Provenance provenance;
  std::optional<int> label;
};

namespace detail {

struct AlgorithmRuns {
  std::vector<double> rqaoa_values;
  std::vector<double> gw_values;
  SdpSolution sdp;
};

// RQAOA is deterministic unless a tie-break ever consults the rng, so the
// first run tells whether the remaining runs can be copied instead of solved.
inline std::vector<double> rqaoa_runs(const Graph& g, int n_c, int runs, std::uint64_t seed) {
  RqaoaEngine engine(n_c);
  std::vector<double> values(static_cast<std::size_t>(runs));
  values[0] = engine.solve(g, derive_seed(seed, "rqaoa", 0)).value;
  if (!engine.last_solve_used_rng()) {
    std::fill(values.begin() + 1, values.end(), values[0]);
    return values;
  }
  for (int i = 1; i < runs; ++i)
    values[static_cast<std::size_t>(i)] =
        engine.solve(g, derive_seed(seed, "rqaoa", static_cast<std::uint64_t>(i))).value;
  return values;
}

inline AlgorithmRuns run_algorithms(const Graph& g, const EvolutionConfig& cfg) {
  AlgorithmRuns out;
  out.rqaoa_values = rqaoa_runs(g, cfg.n_c, cfg.runs_per_algorithm, cfg.seed);
  out.sdp = solve_sdp(g);
  out.gw_values = gw_round(g, out.sdp, cfg.runs_per_algorithm, derive_seed(cfg.seed, "gw")).samples;
  return out;
}

inline double direction_ratio(Direction d, double median_rqaoa, double median_gw) {
  return d == Direction::kGwOverRqaoa ? median_gw / median_rqaoa : median_rqaoa / median_gw;
}

// Everything fitness learns about one decoded graph, cached by serialization
// so re-proposed graphs and feature extraction reuse the work.
struct FitnessOutcome {
  bool valid = false;
  double fitness = -1.0;
  double median_rqaoa = 0.0;
  double median_gw = 0.0;
  std::vector<double> rqaoa_values;
  std::vector<double> gw_values;
  SdpSolution sdp;
  bool has_features = false;
  FeatureVector features;
};

inline FitnessOutcome fitness_outcome(const Graph& g, const EvolutionConfig& cfg) {
  FitnessOutcome out;
  if (g.edge_count() == 0) return out;
  std::vector<double> rq = rqaoa_runs(g, cfg.n_c, cfg.runs_per_algorithm, cfg.seed);
  SdpSolution sdp;
  try {
    sdp = solve_sdp(g);
  } catch (const SolverError&) {
    return out;  // penalty keeps the search alive
  }
  const GwResult gw = gw_round(g, sdp, cfg.runs_per_algorithm, derive_seed(cfg.seed, "gw"));
  const double median_rqaoa = median_of(rq);
  const double median_gw = gw.median;
  const double denom = cfg.direction == Direction::kGwOverRqaoa ? median_rqaoa : median_gw;
  if (denom == 0.0) return out;
  out.valid = true;
  out.median_rqaoa = median_rqaoa;
  out.median_gw = median_gw;
  out.rqaoa_values = std::move(rq);
  out.gw_values = gw.samples;
  out.sdp = std::move(sdp);
  out.fitness = direction_ratio(cfg.direction, median_rqaoa, median_gw);
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace detail

// Performance-ratio fitness of one latent point: decode, run both
// algorithms under seeds derived from cfg.seed alone, return the configured
// median quotient. Degenerate points collapse to the -1 penalty.
inline double fitness(const LatentPoint& p, const EvolutionConfig& cfg) {
  validate_evolution_config(cfg);
  const Graph g = decode_latent(p, cfg.n);
  return detail::fitness_outcome(g, cfg).fitness;
}

struct EvolveOutcome {
  std::vector<InstanceRecord> archive;  // ratio-descending, eval order on ties
  CmaResult cma;
};

namespace detail {

inline std::string instance_id(std::int64_t eval_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "inst_%05lld", static_cast<long long>(eval_index));
  return buf;
}

inline nlohmann::ordered_json features_json(const FeatureVector& f) {
  nlohmann::ordered_json j;
  const auto vals = feature_values(f);
  for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
    j[std::string(kFeatureNames[i])] = format_feature(vals[i]);
  return j;
}

inline nlohmann::ordered_json instance_json(const InstanceRecord& r, Direction direction) {
  nlohmann::ordered_json j;
  j["id"] = instance_id(r.provenance.eval_index);
  j["n"] = r.graph.node_count();
  j["m"] = r.graph.edge_count();
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const Edge& e : r.graph.edges()) edges.push_back({e.u, e.v, e.w});
  j["edges"] = std::move(edges);
  j["direction"] = direction_name(direction);
  j["median_rqaoa"] = r.median_rqaoa;
  j["median_gw"] = r.median_gw;
  j["ratio"] = r.ratio;
  j["rqaoa_values"] = r.rqaoa_values;
  j["gw_values"] = r.gw_values;
  j["provenance"] = {{"seed", r.provenance.seed},
                     {"restart", r.provenance.restart_index},
                     {"eval", r.provenance.eval_index}};
  if (r.label)
    j["label"] = *r.label;
  else
    j["label"] = nullptr;
  j["features"] = features_json(r.features);
  j["feature_flags"] = {{"mis_exact", r.features.graph.mis_exact},
                        {"chromatic_exact", r.features.graph.chromatic_exact},
                        {"edgeless", r.features.graph.edgeless}};
  return j;
}

inline nlohmann::ordered_json config_json(const EvolutionConfig& cfg) {
  nlohmann::ordered_json j;
  j["nodes"] = cfg.n;
  j["nc"] = cfg.n_c;
  j["direction"] = direction_name(cfg.direction);
  j["runs"] = cfg.runs_per_algorithm;
  j["popsize"] = cfg.population_size;
  j["budget"] = cfg.max_evals_per_restart;
  j["restarts"] = cfg.max_restarts;
  j["seed"] = cfg.seed;
  return j;
}

inline nlohmann::ordered_json manifest_json(const EvolutionConfig& cfg,
                                            const std::vector<InstanceRecord>& archive) {
  nlohmann::ordered_json j;
  j["config"] = config_json(cfg);
  j["count"] = archive.size();
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const InstanceRecord& r : archive) {
    const std::string id = instance_id(r.provenance.eval_index);
    nlohmann::ordered_json e;
    e["id"] = id;
    e["file"] = "instances/" + id + ".json";
    e["graph_file"] = "instances/" + id + ".txt";
    e["ratio"] = r.ratio;
    e["median_rqaoa"] = r.median_rqaoa;
    e["median_gw"] = r.median_gw;
    e["restart"] = r.provenance.restart_index;
    e["eval"] = r.provenance.eval_index;
    if (r.label)
      e["label"] = *r.label;
    else
      e["label"] = nullptr;
    list.push_back(std::move(e));
  }
  j["instances"] = std::move(list);
  return j;
}

inline nlohmann::ordered_json history_json(const CmaResult& cma) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json gens = nlohmann::ordered_json::array();
  for (const CmaGenerationStat& h : cma.history)
    gens.push_back({{"best_fitness", -h.best},
                    {"median_fitness", -h.median},
                    {"sigma", h.sigma},
                    {"evals", h.evals}});
  j["generations"] = std::move(gens);
  j["best_fitness"] = cma.history.empty() ? nlohmann::ordered_json(nullptr)
                                          : nlohmann::ordered_json(-cma.best_value);
  j["evals"] = cma.evals;
  j["restarts_used"] = cma.restarts_used;
  return j;
}

}  // namespace detail

inline FeatureRow to_feature_row(const InstanceRecord& r) {
  FeatureRow row;
  row.instance_id = detail::instance_id(r.provenance.eval_index);
  row.n = r.graph.node_count();
  row.ratio = r.ratio;
  row.label = r.label.value_or(0);
  row.features = r.features;
  return row;
}

inline std::vector<FeatureRow> to_feature_rows(const std::vector<InstanceRecord>& archive) {
  std::vector<FeatureRow> rows;
  rows.reserve(archive.size());
  for (const InstanceRecord& r : archive) rows.push_back(to_feature_row(r));
  return rows;
}

// Binary labels: 0 when RQAOA's median strictly beats GW's, 1 otherwise.
inline void apply_binary_labels(std::vector<InstanceRecord>& archive) {
  for (InstanceRecord& r : archive) r.label = r.median_rqaoa > r.median_gw ? 0 : 1;
}

// Threshold labels always judge GW/RQAOA: label 1 when the quotient is at or
// below the threshold (RQAOA ahead by the demanded margin), else 0.
inline void apply_threshold_labels(std::vector<InstanceRecord>& archive, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw std::invalid_argument("label threshold must lie in (0, 1]");
  for (InstanceRecord& r : archive)
    r.label = r.median_gw / r.median_rqaoa <= threshold ? 1 : 0;
}

inline void write_archive(const EvolutionConfig& cfg, const EvolveOutcome& out) {
  namespace fs = std::filesystem;
  const fs::path root(cfg.out_dir);
  fs::create_directories(root / "instances");
  for (const InstanceRecord& r : out.archive) {
    const std::string id = detail::instance_id(r.provenance.eval_index);
    detail::write_file(root / "instances" / (id + ".json"),
                       detail::instance_json(r, cfg.direction).dump(2) + "\n");
    detail::write_file(root / "instances" / (id + ".txt"), serialize(r.graph));
  }
  detail::write_file(root / "manifest.json", detail::manifest_json(cfg, out.archive).dump(2) + "\n");
  detail::write_file(root / "history.json", detail::history_json(out.cma).dump(2) + "\n");
  export_features(to_feature_rows(out.archive), (root / "features.csv").string());
}

// Evolves instances by CMA-ES over the edge-logit box. Every candidate whose
// fitness exceeds 1 is archived with features; the fitness and feature work
// for one generation runs across workers, keyed so results are independent of
// the schedule.
inline EvolveOutcome evolve(const EvolutionConfig& cfg) {
  validate_evolution_config(cfg);
  const int dim = static_cast<int>(pair_index_count(cfg.n));

  CmaConfig cc;
  cc.dimension = dim;
  cc.population_size = cfg.population_size;
  cc.bounds.assign(static_cast<std::size_t>(dim), Bounds{});
  cc.max_evals_per_restart = cfg.max_evals_per_restart;
  cc.max_restarts = cfg.max_restarts;
  cc.seed = cfg.seed;

  EvolveOutcome out;
  std::unordered_map<std::string, detail::FitnessOutcome> cache;
  const std::uint64_t feature_seed = derive_seed(cfg.seed, "features");

  const BatchObjective objective = [&](const std::vector<std::vector<double>>& xs,
                                       const CmaBatchInfo& info) {
    const std::size_t count = xs.size();
    std::vector<Graph> graphs(count);
    std::vector<std::string> keys(count);
    for (std::size_t i = 0; i < count; ++i) {
      graphs[i] = decode_latent(LatentPoint{xs[i], {}}, cfg.n);
      keys[i] = serialize(graphs[i]);
    }

    // Fitness for graphs not seen before, in parallel.
    std::vector<int> missing;
    for (std::size_t i = 0; i < count; ++i)
      if (!cache.count(keys[i]) &&
          std::none_of(missing.begin(), missing.end(),
                       [&](int j) { return keys[static_cast<std::size_t>(j)] == keys[i]; }))
        missing.push_back(static_cast<int>(i));
    std::vector<detail::FitnessOutcome> fresh(missing.size());
    parallel_for(static_cast<int>(missing.size()), [&](int j) {
      const std::size_t i = static_cast<std::size_t>(missing[static_cast<std::size_t>(j)]);
      fresh[static_cast<std::size_t>(j)] = detail::fitness_outcome(graphs[i], cfg);
    });
    for (std::size_t j = 0; j < missing.size(); ++j)
      cache.emplace(keys[static_cast<std::size_t>(missing[j])], std::move(fresh[j]));

    // Features for archive-bound graphs that still lack them, in parallel.
    std::vector<std::string> need;
    for (std::size_t i = 0; i < count; ++i) {
      const detail::FitnessOutcome& o = cache.at(keys[i]);
      if (o.valid && o.fitness > 1.0 && !o.has_features &&
          std::find(need.begin(), need.end(), keys[i]) == need.end())
        need.push_back(keys[i]);
    }
    std::vector<FeatureVector> feats(need.size());
    parallel_for(static_cast<int>(need.size()), [&](int j) {
      const detail::FitnessOutcome& o = cache.at(need[static_cast<std::size_t>(j)]);
      const Graph g = parse_graph(need[static_cast<std::size_t>(j)]);
      FeatureVector f;
      f.graph = compute_graph_features(g);
      f.gw = compute_gw_features(g, o.sdp, feature_seed);
      feats[static_cast<std::size_t>(j)] = f;
    });
    for (std::size_t j = 0; j < need.size(); ++j) {
      detail::FitnessOutcome& o = cache.at(need[j]);
      o.features = feats[j];
      o.has_features = true;
    }

    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) {
      const detail::FitnessOutcome& o = cache.at(keys[i]);
      values[i] = -o.fitness;  // cma minimizes
      if (o.valid && o.fitness > 1.0) {
        InstanceRecord rec;
        rec.graph = graphs[i];
        rec.median_rqaoa = o.median_rqaoa;
        rec.median_gw = o.median_gw;
        rec.ratio = o.fitness;
        rec.rqaoa_values = o.rqaoa_values;
        rec.gw_values = o.gw_values;
        rec.features = o.features;
        rec.provenance = {cfg.seed, info.restart, info.eval_base + static_cast<std::int64_t>(i)};
        out.archive.push_back(std::move(rec));
      }
    }
    return values;
  };

  out.cma = cma_minimize_batch(objective, cc);

  // Eval order is the tie-break, so a stable sort on ratio alone suffices.
  std::stable_sort(out.archive.begin(), out.archive.end(),
                   [](const InstanceRecord& a, const InstanceRecord& b) { return a.ratio > b.ratio; });
  apply_binary_labels(out.archive);
  if (!cfg.out_dir.empty()) write_archive(cfg, out);
  return out;
}

struct EvaluationReport {
  double median_rqaoa = 0.0;
  double median_gw = 0.0;
  double ratio_gw_over_rqaoa = 0.0;
  double ratio_rqaoa_over_gw = 0.0;
  std::vector<double> rqaoa_values;
  std::vector<double> gw_values;
  std::optional<double> optimum;  // brute force, n <= 20 only
  FeatureVector features;
};

// Full report for one explicit instance; solver failures propagate here
// (unlike fitness, where they turn into the penalty).
inline EvaluationReport evaluate(const Graph& g, const EvolutionConfig& cfg) {
  validate_evolution_config(cfg);
  if (g.edge_count() == 0) throw std::invalid_argument("evaluate: edgeless graph");
  detail::AlgorithmRuns runs = detail::run_algorithms(g, cfg);
  EvaluationReport rep;
  rep.median_rqaoa = median_of(runs.rqaoa_values);
  rep.median_gw = median_of(runs.gw_values);
  rep.ratio_gw_over_rqaoa = rep.median_gw / rep.median_rqaoa;
  rep.ratio_rqaoa_over_gw = rep.median_rqaoa / rep.median_gw;
  rep.rqaoa_values = std::move(runs.rqaoa_values);
  rep.gw_values = std::move(runs.gw_values);
  if (g.node_count() <= 20) rep.optimum = brute_force_maxcut(g).value;
  rep.features.graph = compute_graph_features(g);
  rep.features.gw = compute_gw_features(g, runs.sdp, derive_seed(cfg.seed, "features"));
  return rep;
}

inline nlohmann::ordered_json evaluation_json(const Graph& g, const EvaluationReport& rep) {
  nlohmann::ordered_json j;
  j["n"] = g.node_count();
  j["m"] = g.edge_count();
  j["median_rqaoa"] = rep.median_rqaoa;
  j["median_gw"] = rep.median_gw;
  j["ratio_gw_over_rqaoa"] = rep.ratio_gw_over_rqaoa;
  j["ratio_rqaoa_over_gw"] = rep.ratio_rqaoa_over_gw;
  if (rep.optimum)
    j["optimum"] = *rep.optimum;
  else
    j["optimum"] = nullptr;
  j["rqaoa_values"] = rep.rqaoa_values;
  j["gw_values"] = rep.gw_values;
  j["features"] = detail::features_json(rep.features);
  j["feature_flags"] = {{"mis_exact", rep.features.graph.mis_exact},
                        {"chromatic_exact", rep.features.graph.chromatic_exact},
                        {"edgeless", rep.features.graph.edgeless}};
  return j;
}

struct TraceArtifacts {
  RqaoaResult result;
  std::string trace_json;
  std::vector<std::string> dot_files;  // one per contraction, in step order
};

namespace detail {

inline std::string step_dot(const StepView& view, int step_index) {
  char buf[96];
  std::string out;
  std::snprintf(buf, sizeof(buf), "graph step_%d {\n", step_index);
  out += buf;
  std::snprintf(buf, sizeof(buf), "  graph [label=\"iteration %d\"];\n", step_index);
  out += buf;
  for (int v = 0; v < view.graph.node_count(); ++v) {
    std::snprintf(buf, sizeof(buf), "  %d;\n", view.orig_ids[static_cast<std::size_t>(v)]);
    out += buf;
  }
  const auto& edges = view.graph.edges();
  for (std::size_t ei = 0; ei < edges.size(); ++ei) {
    const Edge& e = edges[ei];
    const bool selected =
        e.u == view.step.record.edge_u && e.v == view.step.record.edge_v;
    std::snprintf(buf, sizeof(buf), "  %d -- %d [label=\"%.6f\"%s];\n",
                  view.orig_ids[static_cast<std::size_t>(e.u)],
                  view.orig_ids[static_cast<std::size_t>(e.v)],
                  view.step.edge_expectations[ei],
                  selected ? ", color=\"orange\", penwidth=2.0" : "");
    out += buf;
  }
  out += "}\n";
  return out;
}

}  // namespace detail

// Runs one seeded RQAOA solve and captures the full contraction story: a JSON
// summary plus one DOT drawing per step with the chosen edge highlighted.
inline TraceArtifacts trace_instance(const Graph& g, int n_c, std::uint64_t seed) {
  TraceArtifacts art;
  int step_index = 0;
  art.result = rqaoa_solve(g, n_c, seed, [&](const StepView& view) {
    art.dot_files.push_back(detail::step_dot(view, step_index));
    ++step_index;
  });

  nlohmann::ordered_json j;
  j["n"] = g.node_count();
  j["n_c"] = n_c;
  j["seed"] = seed;
  j["value"] = art.result.value;
  j["assignment"] = art.result.assignment;
  j["terminal_size"] = art.result.terminal_size;
  nlohmann::ordered_json steps = nlohmann::ordered_json::array();
  for (const ContractionRecord& r : art.result.trace) {
    nlohmann::ordered_json s;
    s["iteration"] = r.iteration;
    s["u"] = r.edge_u;
    s["v"] = r.edge_v;
    s["expectation"] = r.expectation;
    s["sigma"] = r.sigma;
    s["offset_delta"] = r.offset_delta;
    s["gamma"] = r.params.gamma;
    s["beta"] = r.params.beta;
    steps.push_back(std::move(s));
  }
  j["steps"] = std::move(steps);
  art.trace_json = j.dump(2) + "\n";
  return art;
}

inline void write_trace(const TraceArtifacts& art, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path root(out_dir);
  fs::create_directories(root);
  detail::write_file(root / "trace.json", art.trace_json);
  for (std::size_t i = 0; i < art.dot_files.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "step_%03d.dot", static_cast<int>(i));
    detail::write_file(root / name, art.dot_files[i]);
  }
}

// Rebuilds InstanceRecords from an archive directory written by evolve.
inline std::vector<InstanceRecord> load_archive(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  std::ifstream in(root / "manifest.json");
  if (!in) throw std::runtime_error("cannot open " + (root / "manifest.json").string());
  nlohmann::json manifest = nlohmann::json::parse(in);

  std::vector<InstanceRecord> archive;
  for (const auto& entry : manifest.at("instances")) {
    std::ifstream fin(root / entry.at("file").get<std::string>());
    if (!fin) throw std::runtime_error("cannot open archived instance file");
    nlohmann::json j = nlohmann::json::parse(fin);
    InstanceRecord rec;
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges"))
      edges.push_back(Edge{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    rec.graph = Graph(j.at("n").get<int>(), std::move(edges));
    rec.median_rqaoa = j.at("median_rqaoa").get<double>();
    rec.median_gw = j.at("median_gw").get<double>();
    rec.ratio = j.at("ratio").get<double>();
    rec.rqaoa_values = j.at("rqaoa_values").get<std::vector<double>>();
    rec.gw_values = j.at("gw_values").get<std::vector<double>>();
    rec.provenance.seed = j.at("provenance").at("seed").get<std::uint64_t>();
    rec.provenance.restart_index = j.at("provenance").at("restart").get<int>();
    rec.provenance.eval_index = j.at("provenance").at("eval").get<std::int64_t>();
    if (!j.at("label").is_null()) rec.label = j.at("label").get<int>();
    const auto refs = feature_refs(rec.features);
    for (std::size_t i = 0; i < kFeatureNames.size(); ++i)
      *refs[i] = parse_feature(j.at("features").at(std::string(kFeatureNames[i])).get<std::string>());
    rec.features.graph.mis_exact = j.at("feature_flags").at("mis_exact").get<bool>();
    rec.features.graph.chromatic_exact = j.at("feature_flags").at("chromatic_exact").get<bool>();
    rec.features.graph.edgeless = j.at("feature_flags").at("edgeless").get<bool>();
    archive.push_back(std::move(rec));
  }
  return archive;
}

}  // namespace cutforge
