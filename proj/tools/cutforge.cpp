#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cutforge/evolve.hpp"
#include "cutforge/graph.hpp"
#include "cutforge/gw.hpp"

namespace {

using namespace cutforge;

Graph read_graph_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open graph file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_graph(buf.str());
}

std::string file_stem(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

struct CommonFlags {
  std::string graph_path;
  std::string out;
  int nc = -1;  // -1 means "min(10, n)" for per-instance commands
  int runs = 100;
  std::uint64_t seed = 0;
};

int resolved_nc(int nc, const Graph& g) { return nc >= 0 ? nc : std::min(10, g.node_count()); }

int run_evolve(const EvolutionConfig& cfg) {
  const EvolveOutcome out = evolve(cfg);
  std::cout << "archived " << out.archive.size() << " instance(s) after " << out.cma.evals
            << " evaluations\n";
  if (!out.archive.empty())
    std::cout << "best ratio " << format_feature(out.archive.front().ratio) << " ("
              << direction_name(cfg.direction) << ")\n";
  if (!cfg.out_dir.empty()) std::cout << "archive written to " << cfg.out_dir << "\n";
  return 0;
}

int run_evaluate(const CommonFlags& flags) {
  const Graph g = read_graph_file(flags.graph_path);
  EvolutionConfig cfg;
  cfg.n = g.node_count();
  cfg.n_c = resolved_nc(flags.nc, g);
  cfg.runs_per_algorithm = flags.runs;
  cfg.seed = flags.seed;
  const EvaluationReport rep = evaluate(g, cfg);
  const std::string text = evaluation_json(g, rep).dump(2) + "\n";
  if (flags.out.empty()) {
    std::cout << text;
  } else {
    detail::write_file(flags.out, text);
    std::cout << "report written to " << flags.out << "\n";
  }
  return 0;
}

int run_trace(const CommonFlags& flags) {
  const Graph g = read_graph_file(flags.graph_path);
  const TraceArtifacts art = trace_instance(g, resolved_nc(flags.nc, g), flags.seed);
  write_trace(art, flags.out);
  std::cout << art.result.trace.size() << " contraction step(s), value "
            << format_feature(art.result.value) << "; trace written to " << flags.out << "\n";
  return 0;
}

int run_label(const std::string& archive_dir, double threshold, bool threshold_set,
              std::string out_path) {
  std::vector<InstanceRecord> archive = load_archive(archive_dir);
  if (threshold_set)
    apply_threshold_labels(archive, threshold);
  else
    apply_binary_labels(archive);
  if (out_path.empty())
    out_path = (std::filesystem::path(archive_dir) / "features.csv").string();
  export_features(to_feature_rows(archive), out_path);
  std::cout << "labeled " << archive.size() << " instance(s) -> " << out_path << "\n";
  return 0;
}

int run_features(const std::string& archive_dir, const CommonFlags& flags) {
  if (!archive_dir.empty()) {
    const std::vector<InstanceRecord> archive = load_archive(archive_dir);
    std::string out_path = flags.out;
    if (out_path.empty())
      out_path = (std::filesystem::path(archive_dir) / "features.csv").string();
    export_features(to_feature_rows(archive), out_path);
    std::cout << "features for " << archive.size() << " instance(s) -> " << out_path << "\n";
    return 0;
  }
  const Graph g = read_graph_file(flags.graph_path);
  FeatureRow row;
  row.instance_id = file_stem(flags.graph_path);
  row.n = g.node_count();
  row.ratio = std::numeric_limits<double>::quiet_NaN();  // no medians for a bare graph
  row.label = 0;
  row.features.graph = compute_graph_features(g);
  if (g.edge_count() > 0) row.features.gw = compute_gw_features(g, solve_sdp(g), flags.seed);
  const std::string csv = features_csv({row});
  if (flags.out.empty()) {
    std::cout << csv;
  } else {
    detail::write_file(flags.out, csv);
    std::cout << "features written to " << flags.out << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cutforge: evolve MaxCut instances that pull RQAOA and GW apart"};
  app.require_subcommand(1);

  // evolve
  auto* ev = app.add_subcommand("evolve", "run the evolutionary search and write an archive");
  std::string preset;
  int nodes = 0, nc = 0, runs = 0, popsize = 0, restarts = 0;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
  std::string direction, out_dir;
  ev->add_option("--preset", preset, "paper-20 | paper-100 | desk");
  ev->add_option("--nodes", nodes, "instance node count");
  ev->add_option("--nc", nc, "RQAOA brute-force threshold");
  ev->add_option("--direction", direction, "gw-over-rqaoa | rqaoa-over-gw");
  ev->add_option("--runs", runs, "runs per algorithm per fitness evaluation");
  ev->add_option("--popsize", popsize, "CMA-ES population size");
  ev->add_option("--budget", budget, "fitness evaluations per restart");
  ev->add_option("--restarts", restarts, "additional CMA-ES restarts");
  ev->add_option("--seed", seed, "master seed");
  ev->add_option("--out", out_dir, "archive output directory")->required();

  // evaluate / trace / features share flags
  CommonFlags eval_flags, trace_flags, feat_flags;
  auto* evl = app.add_subcommand("evaluate", "run both algorithms on one instance");
  evl->add_option("--graph", eval_flags.graph_path, "edge-list file")->required();
  evl->add_option("--nc", eval_flags.nc, "RQAOA brute-force threshold");
  evl->add_option("--runs", eval_flags.runs, "runs per algorithm");
  evl->add_option("--seed", eval_flags.seed, "master seed");
  evl->add_option("--out", eval_flags.out, "write the JSON report here instead of stdout");

  auto* tr = app.add_subcommand("trace", "record one seeded RQAOA contraction trace");
  tr->add_option("--graph", trace_flags.graph_path, "edge-list file")->required();
  tr->add_option("--nc", trace_flags.nc, "RQAOA brute-force threshold");
  tr->add_option("--seed", trace_flags.seed, "solve seed");
  tr->add_option("--out", trace_flags.out, "output directory")->required();

  auto* lb = app.add_subcommand("label", "label an archive and write its feature CSV");
  std::string label_archive, label_out;
  double threshold = 0.0;
  lb->add_option("--archive", label_archive, "archive directory from evolve")->required();
  auto* thr_opt = lb->add_option("--threshold", threshold,
                                 "GW/RQAOA quotient cutoff in (0,1]; omit for binary labels");
  lb->add_option("--out", label_out, "CSV path (default: <archive>/features.csv)");

  auto* ft = app.add_subcommand("features", "compute or re-export feature rows");
  std::string feat_archive;
  ft->add_option("--archive", feat_archive, "archive directory to re-export");
  ft->add_option("--graph", feat_flags.graph_path, "edge-list file for a one-off row");
  ft->add_option("--seed", feat_flags.seed, "seed for the rounding-based features");
  ft->add_option("--out", feat_flags.out, "CSV path (default: stdout or <archive>/features.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(ev)) {
      EvolutionConfig cfg = preset.empty() ? EvolutionConfig{} : preset_config(preset);
      if (ev->count("--nodes")) cfg.n = nodes;
      if (ev->count("--nc")) cfg.n_c = nc;
      if (ev->count("--direction")) cfg.direction = parse_direction(direction);
      if (ev->count("--runs")) cfg.runs_per_algorithm = runs;
      if (ev->count("--popsize")) cfg.population_size = popsize;
      if (ev->count("--budget")) cfg.max_evals_per_restart = budget;
      if (ev->count("--restarts")) cfg.max_restarts = restarts;
      if (ev->count("--seed")) cfg.seed = seed;
      cfg.out_dir = out_dir;
      return run_evolve(cfg);
    }
    if (app.got_subcommand(evl)) return run_evaluate(eval_flags);
    if (app.got_subcommand(tr)) return run_trace(trace_flags);
    if (app.got_subcommand(lb))
      return run_label(label_archive, threshold, thr_opt->count() > 0, label_out);
    if (app.got_subcommand(ft)) {
      if (feat_archive.empty() && feat_flags.graph_path.empty())
        throw std::invalid_argument("features: need --archive or --graph");
      return run_features(feat_archive, feat_flags);
    }
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
