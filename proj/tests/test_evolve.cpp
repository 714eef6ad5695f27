#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cutforge/evolve.hpp"
#include "cutforge/graph.hpp"
#include "cutforge/gw.hpp"
#include "cutforge/latent.hpp"
#include "cutforge/rng.hpp"
#include "helpers.hpp"

using namespace cutforge;
using namespace cutforge::testing;

namespace {

EvolutionConfig small_config() {
  EvolutionConfig cfg;
  cfg.n = 6;
  cfg.n_c = 3;
  cfg.runs_per_algorithm = 8;
  cfg.population_size = 8;
  cfg.max_evals_per_restart = 96;
  cfg.max_restarts = 0;
  cfg.seed = 11;
  return cfg;
}

LatentPoint latent_for(const Graph& g, int n) {
  LatentPoint p = LatentPoint::zeros(n);
  for (std::size_t i = 0; i < p.x.size(); ++i) p.x[i] = -1.0;
  for (const Edge& e : g.edges()) p.x[pair_index(n, e.u, e.v)] = 1.0;
  return p;
}

std::map<std::string, std::string> slurp_tree(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    files[std::filesystem::relative(entry.path(), root).string()] = buf.str();
  }
  return files;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("cutforge_test_" + tag);
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("fitness fixtures") {
  EvolutionConfig cfg = small_config();
  SECTION("edgeless decode is the penalty") {
    cfg.n = 4;
    cfg.n_c = 2;
    LatentPoint p = LatentPoint::zeros(4);
    for (double& x : p.x) x = -1.0;
    CHECK(fitness(p, cfg) == -1.0);
  }
  SECTION("single edge gives both algorithms the optimum") {
    cfg.n = 2;
    cfg.n_c = 1;
    LatentPoint p = LatentPoint::zeros(2);
    p.x[0] = 1.0;
    CHECK(fitness(p, cfg) == 1.0);
    cfg.direction = Direction::kRqaoaOverGw;
    CHECK(fitness(p, cfg) == 1.0);
  }
  SECTION("repeat evaluation is bit-identical") {
    Rng rng(77);
    const Graph g = random_graph(rng, 6, 0.6);
    const LatentPoint p = latent_for(g, 6);
    const double a = fitness(p, cfg);
    const double b = fitness(p, cfg);
    CHECK(a == b);
  }
  SECTION("length mismatch is rejected") {
    CHECK_THROWS_AS(fitness(LatentPoint::zeros(5), cfg), std::invalid_argument);
  }
}

TEST_CASE("config validation") {
  EvolutionConfig cfg = small_config();
  SECTION("n") {
    cfg.n = 1;
    CHECK_THROWS_AS(validate_evolution_config(cfg), std::invalid_argument);
  }
  SECTION("n_c low") {
    cfg.n_c = 0;
    CHECK_THROWS_AS(validate_evolution_config(cfg), std::invalid_argument);
  }
  SECTION("n_c high") {
    cfg.n_c = cfg.n + 1;
    CHECK_THROWS_AS(validate_evolution_config(cfg), std::invalid_argument);
  }
  SECTION("runs") {
    cfg.runs_per_algorithm = 0;
    CHECK_THROWS_AS(validate_evolution_config(cfg), std::invalid_argument);
  }
  SECTION("presets") {
    CHECK(preset_config("paper-20").n == 20);
    CHECK(preset_config("paper-20").n_c == 10);
    CHECK(preset_config("paper-100").n == 100);
    CHECK(preset_config("paper-100").n_c == 20);
    CHECK(preset_config("desk").n == 12);
    CHECK(preset_config("desk").population_size == 16);
    CHECK_THROWS_AS(preset_config("galaxy"), std::invalid_argument);
  }
}

TEST_CASE("evaluate fixtures") {
  EvolutionConfig cfg = small_config();
  SECTION("K_2") {
    cfg.n = 2;
    cfg.n_c = 1;
    const EvaluationReport rep = evaluate(complete_graph(2), cfg);
    CHECK(rep.median_rqaoa == 1.0);
    CHECK(rep.median_gw == 1.0);
    CHECK(rep.ratio_gw_over_rqaoa == 1.0);
    REQUIRE(rep.optimum.has_value());
    CHECK(*rep.optimum == 1.0);
  }
  SECTION("two disjoint triangles are solved component-wise") {
    const Graph g(6, {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 1.0},
                      {3, 4, 1.0}, {3, 5, 1.0}, {4, 5, 1.0}});
    const EvaluationReport rep = evaluate(g, cfg);
    CHECK(rep.median_rqaoa == 4.0);
  }
  SECTION("medians never exceed the optimum") {
    Rng rng(404);
    cfg.n = 12;
    cfg.n_c = 6;
    const Graph g = random_graph(rng, 12, 0.5);
    const EvaluationReport rep = evaluate(g, cfg);
    REQUIRE(rep.optimum.has_value());
    CHECK(rep.median_rqaoa <= *rep.optimum);
    CHECK(rep.median_gw <= *rep.optimum);
    CHECK(static_cast<int>(rep.rqaoa_values.size()) == cfg.runs_per_algorithm);
    CHECK(static_cast<int>(rep.gw_values.size()) == cfg.runs_per_algorithm);
  }
  SECTION("edgeless graph is rejected") {
    cfg.n = 4;
    cfg.n_c = 2;
    CHECK_THROWS_AS(evaluate(Graph(4), cfg), std::invalid_argument);
  }
}

TEST_CASE("trace artifacts") {
  SECTION("K_2 has exactly one iteration") {
    const TraceArtifacts art = trace_instance(complete_graph(2), 1, 9);
    CHECK(art.result.trace.size() == 1);
    REQUIRE(art.dot_files.size() == 1);
    CHECK(art.dot_files[0].find("--") != std::string::npos);
    CHECK(art.dot_files[0].find("orange") != std::string::npos);
  }
  SECTION("contractions stop at the threshold") {
    Rng rng(52);
    const Graph g = random_graph(rng, 8, 0.6);
    const TraceArtifacts art = trace_instance(g, 4, 13);
    CHECK(art.result.trace.size() <= 4);
    CHECK(art.dot_files.size() == art.result.trace.size());
    const nlohmann::json j = nlohmann::json::parse(art.trace_json);
    CHECK(j.at("steps").size() == art.result.trace.size());
    CHECK(j.at("value").get<double>() == art.result.value);
  }
  SECTION("DOT structure is well formed") {
    const TraceArtifacts art = trace_instance(cycle_graph(5), 2, 1);
    for (const std::string& dot : art.dot_files) {
      CHECK(dot.rfind("graph step_", 0) == 0);
      CHECK(dot.back() == '\n');
      CHECK(dot.find("label=") != std::string::npos);
      // Braces balance.
      CHECK(std::count(dot.begin(), dot.end(), '{') == std::count(dot.begin(), dot.end(), '}'));
    }
  }
}

TEST_CASE("labeling rules") {
  std::vector<InstanceRecord> recs(3);
  recs[0].median_rqaoa = 1.0;
  recs[0].median_gw = 0.95;
  recs[1].median_rqaoa = 1.0;
  recs[1].median_gw = 0.96;
  recs[2].median_rqaoa = 1.0;
  recs[2].median_gw = 1.0;
  SECTION("threshold mode at 0.96") {
    apply_threshold_labels(recs, 0.96);
    CHECK(*recs[0].label == 1);
    CHECK(*recs[1].label == 1);  // boundary inclusive
    CHECK(*recs[2].label == 0);
  }
  SECTION("binary mode") {
    apply_binary_labels(recs);
    CHECK(*recs[0].label == 0);
    CHECK(*recs[1].label == 0);
    CHECK(*recs[2].label == 1);  // tie goes to GW-not-beaten
  }
  SECTION("threshold domain") {
    CHECK_THROWS_AS(apply_threshold_labels(recs, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(apply_threshold_labels(recs, 1.5), std::invalid_argument);
    apply_threshold_labels(recs, 1.0);  // upper boundary is allowed
  }
}

TEST_CASE("evolve archive properties") {
  EvolutionConfig cfg = small_config();
  cfg.direction = Direction::kRqaoaOverGw;
  const EvolveOutcome out = evolve(cfg);
  CHECK(out.cma.evals == 96);
  REQUIRE_FALSE(out.archive.empty());

  std::set<std::int64_t> evals_seen;
  double prev_ratio = std::numeric_limits<double>::infinity();
  for (const InstanceRecord& r : out.archive) {
    CHECK(r.ratio > 1.0);
    CHECK(r.ratio <= prev_ratio);
    prev_ratio = r.ratio;
    // The stored ratio is exactly the configured-direction median quotient.
    CHECK(r.ratio == r.median_rqaoa / r.median_gw);
    CHECK(r.median_rqaoa > r.median_gw);
    // And the medians are exactly the medians of the stored per-run values.
    CHECK(r.median_rqaoa == median_of(r.rqaoa_values));
    CHECK(r.median_gw == median_of(r.gw_values));
    REQUIRE(r.label.has_value());
    CHECK(*r.label == 0);  // RQAOA-dominant by construction of the direction
    CHECK(r.provenance.seed == cfg.seed);
    CHECK(r.provenance.eval_index >= 0);
    CHECK(r.provenance.eval_index < out.cma.evals);
    CHECK(evals_seen.insert(r.provenance.eval_index).second);
    CHECK(r.graph.node_count() == cfg.n);
    CHECK(r.graph.edge_count() > 0);
  }
}

TEST_CASE("archived medians are reproducible through evaluate") {
  EvolutionConfig cfg = small_config();
  cfg.direction = Direction::kRqaoaOverGw;
  const EvolveOutcome out = evolve(cfg);
  REQUIRE_FALSE(out.archive.empty());
  const InstanceRecord& r = out.archive.front();
  const EvaluationReport rep = evaluate(r.graph, cfg);
  CHECK(rep.median_rqaoa == r.median_rqaoa);
  CHECK(rep.median_gw == r.median_gw);
  CHECK(rep.rqaoa_values == r.rqaoa_values);
  CHECK(rep.gw_values == r.gw_values);
}

TEST_CASE("zero budget evolves an empty archive") {
  EvolutionConfig cfg = small_config();
  cfg.max_evals_per_restart = 0;
  const EvolveOutcome out = evolve(cfg);
  CHECK(out.archive.empty());
  CHECK(out.cma.evals == 0);
}

TEST_CASE("evolve is byte-deterministic across reruns and worker counts") {
  EvolutionConfig cfg = small_config();
  cfg.direction = Direction::kRqaoaOverGw;
  const TempDir a("det_a"), b("det_b"), c("det_c");

  cfg.out_dir = a.path.string();
  evolve(cfg);
  cfg.out_dir = b.path.string();
  evolve(cfg);

  ::setenv("CUTFORGE_WORKERS", "1", 1);
  cfg.out_dir = c.path.string();
  evolve(cfg);
  ::unsetenv("CUTFORGE_WORKERS");

  const auto fa = slurp_tree(a.path), fb = slurp_tree(b.path), fc = slurp_tree(c.path);
  REQUIRE_FALSE(fa.empty());
  CHECK(fa == fb);
  CHECK(fa == fc);
  CHECK(fa.count("manifest.json") == 1);
  CHECK(fa.count("history.json") == 1);
  CHECK(fa.count("features.csv") == 1);
}

TEST_CASE("archive round-trips through the directory format") {
  EvolutionConfig cfg = small_config();
  cfg.direction = Direction::kRqaoaOverGw;
  const TempDir dir("roundtrip");
  cfg.out_dir = dir.path.string();
  const EvolveOutcome out = evolve(cfg);
  REQUIRE_FALSE(out.archive.empty());

  const std::vector<InstanceRecord> loaded = load_archive(cfg.out_dir);
  REQUIRE(loaded.size() == out.archive.size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const InstanceRecord& x = out.archive[i];
    const InstanceRecord& y = loaded[i];
    CHECK(serialize(x.graph) == serialize(y.graph));
    CHECK(x.median_rqaoa == y.median_rqaoa);
    CHECK(x.median_gw == y.median_gw);
    CHECK(x.ratio == y.ratio);
    CHECK(x.rqaoa_values == y.rqaoa_values);
    CHECK(x.gw_values == y.gw_values);
    CHECK(x.label == y.label);
    CHECK(x.provenance.eval_index == y.provenance.eval_index);
    const auto vx = feature_values(x.features);
    const auto vy = feature_values(y.features);
    for (std::size_t k = 0; k < vx.size(); ++k) {
      if (std::isnan(vx[k])) {
        CHECK(std::isnan(vy[k]));
      } else {
        CHECK(vx[k] == vy[k]);
      }
    }
  }
}
