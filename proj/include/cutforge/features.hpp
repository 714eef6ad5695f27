#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cutforge/graph.hpp"
#include "cutforge/gw.hpp"
#include "cutforge/jacobi.hpp"

namespace cutforge {

// Normalized Laplacian I - D^{-1/2} A D^{-1/2}; a degree-zero node
// contributes an all-zero row (eigenvalue 0). Ascending eigenvalues.
inline std::vector<double> laplacian_spectrum(const Graph& g) {
  const int n = g.node_count();
  std::vector<double> deg(static_cast<std::size_t>(n), 0.0);
  for (const Edge& e : g.edges()) {
    deg[static_cast<std::size_t>(e.u)] += e.w;
    deg[static_cast<std::size_t>(e.v)] += e.w;
  }
  std::vector<double> mat(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    if (deg[static_cast<std::size_t>(i)] != 0.0) mat[static_cast<std::size_t>(i) * n + i] = 1.0;
  for (const Edge& e : g.edges()) {
    const double d = deg[static_cast<std::size_t>(e.u)] * deg[static_cast<std::size_t>(e.v)];
    if (d == 0.0) continue;
    const double x = -e.w / std::sqrt(d);
    mat[static_cast<std::size_t>(e.u) * n + e.v] = x;
    mat[static_cast<std::size_t>(e.v) * n + e.u] = x;
  }
  return jacobi_eigensolver(std::move(mat), n).values;
}

namespace detail {

class BitSet {
 public:
  explicit BitSet(int n) : n_(n), words_(static_cast<std::size_t>((n + 63) / 64), 0) {}

  void set(int i) { words_[static_cast<std::size_t>(i >> 6)] |= 1ull << (i & 63); }
  void reset(int i) { words_[static_cast<std::size_t>(i >> 6)] &= ~(1ull << (i & 63)); }
  bool test(int i) const { return words_[static_cast<std::size_t>(i >> 6)] >> (i & 63) & 1; }

  int count() const {
    int c = 0;
    for (std::uint64_t w : words_) c += std::popcount(w);
    return c;
  }

  bool any() const {
    for (std::uint64_t w : words_)
      if (w) return true;
    return false;
  }

  int first() const {
    for (std::size_t i = 0; i < words_.size(); ++i)
      if (words_[i]) return static_cast<int>(i * 64) + std::countr_zero(words_[i]);
    return -1;
  }

  BitSet& operator&=(const BitSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
  }

  BitSet& subtract(const BitSet& o) {
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    return *this;
  }

  int intersection_count(const BitSet& o) const {
    int c = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
    return c;
  }

  int size() const { return n_; }

 private:
  int n_;
  std::vector<std::uint64_t> words_;
};

inline std::vector<BitSet> adjacency_bitsets(const Graph& g) {
  std::vector<BitSet> adj(static_cast<std::size_t>(g.node_count()), BitSet(g.node_count()));
  for (const Edge& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)].set(e.v);
    adj[static_cast<std::size_t>(e.v)].set(e.u);
  }
  return adj;
}

using Clock = std::chrono::steady_clock;

// Branch and bound for the maximum independent set; branches on the
// highest-degree candidate, prunes by counting. Deadline turns the result
// into the best found so far.
class MisSolver {
 public:
  MisSolver(const Graph& g, Clock::time_point deadline)
      : adj_(adjacency_bitsets(g)), deadline_(deadline) {}

  int solve(const Graph& g, bool& exact) {
    BitSet all(g.node_count());
    for (int i = 0; i < g.node_count(); ++i) all.set(i);
    best_ = greedy(g, all);
    search(all, 0);
    exact = !timed_out_;
    return best_;
  }

 private:
  int greedy(const Graph& g, BitSet cand) const {
    int size = 0;
    while (cand.any()) {
      int pick = -1, pick_deg = std::numeric_limits<int>::max();
      for (int v = 0; v < g.node_count(); ++v)
        if (cand.test(v)) {
          const int d = adj_[static_cast<std::size_t>(v)].intersection_count(cand);
          if (d < pick_deg) {
            pick_deg = d;
            pick = v;
          }
        }
      ++size;
      cand.reset(pick);
      cand.subtract(adj_[static_cast<std::size_t>(pick)]);
    }
    return size;
  }

  void search(const BitSet& cand, int current) {
    if (timed_out_) return;
    if ((++visits_ & 0xfff) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    const int remaining = cand.count();
    if (current + remaining <= best_) return;
    if (remaining == 0) {
      best_ = current;
      return;
    }
    int pick = -1, pick_deg = -1;
    for (int v = 0; v < cand.size(); ++v)
      if (cand.test(v)) {
        const int d = adj_[static_cast<std::size_t>(v)].intersection_count(cand);
        if (d > pick_deg) {
          pick_deg = d;
          pick = v;
        }
      }
    BitSet with = cand;
    with.reset(pick);
    with.subtract(adj_[static_cast<std::size_t>(pick)]);
    search(with, current + 1);
    BitSet without = cand;
    without.reset(pick);
    search(without, current);
  }

  std::vector<BitSet> adj_;
  Clock::time_point deadline_;
  int best_ = 0;
  std::uint64_t visits_ = 0;
  bool timed_out_ = false;
};

// DSATUR-ordered exact coloring under the same deadline scheme; the greedy
// largest-first count seeds the upper bound and remains the answer on
// timeout.
class ChromaticSolver {
 public:
  ChromaticSolver(const Graph& g, Clock::time_point deadline)
      : n_(g.node_count()), adj_(adjacency_bitsets(g)), deadline_(deadline) {}

  int solve(bool& exact) {
    best_ = greedy_largest_first();
    if (best_ > 1) {
      colors_.assign(static_cast<std::size_t>(n_), -1);
      search(0, 0);
    }
    exact = !timed_out_;
    return best_;
  }

 private:
  int greedy_largest_first() const {
    std::vector<int> order(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return adj_[static_cast<std::size_t>(a)].count() > adj_[static_cast<std::size_t>(b)].count();
    });
    std::vector<int> color(static_cast<std::size_t>(n_), -1);
    int used = 0;
    for (int v : order) {
      std::vector<char> taken(static_cast<std::size_t>(used) + 1, 0);
      for (int u = 0; u < n_; ++u)
        if (adj_[static_cast<std::size_t>(v)].test(u) && color[static_cast<std::size_t>(u)] >= 0)
          if (color[static_cast<std::size_t>(u)] <= used) taken[static_cast<std::size_t>(color[static_cast<std::size_t>(u)])] = 1;
      int c = 0;
      while (c < used && taken[static_cast<std::size_t>(c)]) ++c;
      color[static_cast<std::size_t>(v)] = c;
      used = std::max(used, c + 1);
    }
    return n_ == 0 ? 0 : std::max(used, 1);
  }

  void search(int colored, int used) {
    if (timed_out_) return;
    if ((++visits_ & 0xfff) == 0 && Clock::now() > deadline_) {
      timed_out_ = true;
      return;
    }
    if (used >= best_) return;
    if (colored == n_) {
      best_ = used;
      return;
    }
    // Highest saturation, then highest degree.
    int pick = -1, pick_sat = -1, pick_deg = -1;
    for (int v = 0; v < n_; ++v) {
      if (colors_[static_cast<std::size_t>(v)] >= 0) continue;
      std::uint64_t mask = 0;
      for (int u = 0; u < n_; ++u)
        if (adj_[static_cast<std::size_t>(v)].test(u) && colors_[static_cast<std::size_t>(u)] >= 0)
          mask |= 1ull << (colors_[static_cast<std::size_t>(u)] & 63);
      const int sat = std::popcount(mask);
      const int deg = adj_[static_cast<std::size_t>(v)].count();
      if (sat > pick_sat || (sat == pick_sat && deg > pick_deg)) {
        pick_sat = sat;
        pick_deg = deg;
        pick = v;
      }
    }
    const int limit = std::min(used + 1, best_ - 1);
    for (int c = 0; c < limit; ++c) {
      bool free = true;
      for (int u = 0; u < n_ && free; ++u)
        if (adj_[static_cast<std::size_t>(pick)].test(u) && colors_[static_cast<std::size_t>(u)] == c) free = false;
      if (!free) continue;
      colors_[static_cast<std::size_t>(pick)] = c;
      search(colored + 1, std::max(used, c + 1));
      colors_[static_cast<std::size_t>(pick)] = -1;
      if (timed_out_) return;
    }
  }

  int n_;
  std::vector<BitSet> adj_;
  Clock::time_point deadline_;
  std::vector<int> colors_;
  int best_ = 0;
  std::uint64_t visits_ = 0;
  bool timed_out_ = false;
};

// Minimum over per-node BFS of the shortest cycle through each root; exact
// girth for unweighted graphs.
inline double girth_bfs(const Graph& g) {
  const int n = g.node_count();
  int best = std::numeric_limits<int>::max();
  std::vector<int> dist(static_cast<std::size_t>(n)), parent(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(parent.begin(), parent.end(), -1);
    std::queue<int> q;
    dist[static_cast<std::size_t>(s)] = 0;
    q.push(s);
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (2 * dist[static_cast<std::size_t>(u)] >= best) continue;
      for (const auto& [v, w] : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(v)] == -1) {
          dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(v)] = u;
          q.push(v);
        } else if (v != parent[static_cast<std::size_t>(u)]) {
          best = std::min(best, dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(v)] + 1);
        }
      }
    }
  }
  if (best == std::numeric_limits<int>::max()) return std::numeric_limits<double>::infinity();
  return static_cast<double>(best);
}

}  // namespace detail

struct GraphFeatures {
  double log_num_edges = std::numeric_limits<double>::quiet_NaN();
  double density = 0.0;
  double logratio_edgetonodes = 0.0;
  double log_chromatic_num = 0.0;
  double norm_mis = 0.0;
  double graph_assortativity = 0.0;
  double spectral_gap = 0.0;
  double log_largesteigval = 0.0;
  double log_secondlargesteigval = 0.0;
  double log_smallesteigval = 0.0;
  double girth = 0.0;
  double transitivity = 0.0;
  bool mis_exact = true;        // false when the budget forced the greedy bound
  bool chromatic_exact = true;
  bool edgeless = false;        // LOG_NUM_EDGES has no value for such instances
};

// The 12 structural features. Logs are natural. NP-hard subproblems get an
// exact branch-and-bound answer within `budget_seconds`, otherwise the greedy
// bound with the matching flag cleared.
inline GraphFeatures compute_graph_features(const Graph& g, double budget_seconds = 10.0) {
  GraphFeatures f;
  const int n = g.node_count();
  const int m = g.edge_count();
  const auto nd = static_cast<double>(n);
  const auto md = static_cast<double>(m);

  f.edgeless = m == 0;
  f.log_num_edges = m > 0 ? std::log(md) : std::numeric_limits<double>::quiet_NaN();
  f.density = pair_index_count(n) > 0 ? md / static_cast<double>(pair_index_count(n)) : 0.0;
  f.logratio_edgetonodes = std::log(md / nd);

  const auto now = detail::Clock::now();
  const auto half = std::chrono::duration_cast<detail::Clock::duration>(
      std::chrono::duration<double>(budget_seconds / 2.0));
  detail::MisSolver mis(g, now + half);
  const int mis_size = mis.solve(g, f.mis_exact);
  f.norm_mis = static_cast<double>(mis_size) / nd;
  detail::ChromaticSolver chrom(g, detail::Clock::now() + half);
  const int chi = chrom.solve(f.chromatic_exact);
  f.log_chromatic_num = std::log(static_cast<double>(chi));

  // Newman degree assortativity over the directed edge list.
  {
    double sx = 0.0, sxy = 0.0, sx2 = 0.0;
    for (const Edge& e : g.edges()) {
      const double du = g.degree(e.u), dv = g.degree(e.v);
      sx += du + dv;
      sxy += 2.0 * du * dv;
      sx2 += du * du + dv * dv;
    }
    const double inv = m > 0 ? 1.0 / (2.0 * md) : 0.0;
    const double mu = sx * inv;
    const double var = sx2 * inv - mu * mu;
    const double cov = sxy * inv - mu * mu;
    f.graph_assortativity =
        (m == 0 || var <= 0.0) ? std::numeric_limits<double>::quiet_NaN() : cov / var;
  }

  const std::vector<double> spec = laplacian_spectrum(g);  // ascending
  f.log_largesteigval = std::log(spec[static_cast<std::size_t>(n - 1)]);
  f.log_secondlargesteigval =
      n >= 2 ? std::log(spec[static_cast<std::size_t>(n - 2)]) : std::numeric_limits<double>::quiet_NaN();
  f.spectral_gap = n >= 2 ? spec[static_cast<std::size_t>(n - 1)] - spec[static_cast<std::size_t>(n - 2)] : 0.0;
  f.log_smallesteigval =
      n >= 2 ? std::log(std::max(spec[1], 1e-300)) : std::numeric_limits<double>::quiet_NaN();

  f.girth = detail::girth_bfs(g);

  {
    long long closed = 0;  // ordered pairs of adjacent neighbors, = 3 * 2 * triangles / 2
    const auto adj = detail::adjacency_bitsets(g);
    for (const Edge& e : g.edges())
      closed += adj[static_cast<std::size_t>(e.u)].intersection_count(adj[static_cast<std::size_t>(e.v)]);
    long long triples = 0;
    for (int v = 0; v < n; ++v) {
      const long long d = g.degree(v);
      triples += d * (d - 1) / 2;
    }
    // closed counts each triangle once per edge, i.e. 3T.
    f.transitivity = triples > 0 ? static_cast<double>(closed) / static_cast<double>(triples) : 0.0;
  }
  return f;
}

struct GwFeatures {
  double percent_cut = 0.0;
  double percent_positive_lower_triangular = 0.0;
  double percent_close1_lower_triangular = 0.0;
  double percent_close3_lower_triangular = 0.0;
  double expected_costgw_over_sdp_cost = 0.0;
  double std_costgw_over_sdp_cost = 0.0;
};

// The 6 relaxation features: Gram-matrix triangular statistics plus the
// rounding performance over exactly 1,000 seeded trials.
inline GwFeatures compute_gw_features(const Graph& g, const SdpSolution& sol, std::uint64_t seed) {
  GwFeatures f;
  f.percent_cut = sol.relaxed_cost / static_cast<double>(g.edge_count());
  long long positive = 0, close1 = 0, close3 = 0, total = 0;
  for (int i = 1; i < sol.n; ++i)
    for (int j = 0; j < i; ++j) {
      const double x = sol.gram(i, j);
      ++total;
      if (x > 0.0) ++positive;
      if (std::abs(x) < 0.1) ++close1;
      if (std::abs(x) < 0.001) ++close3;
    }
  if (total > 0) {
    f.percent_positive_lower_triangular = static_cast<double>(positive) / static_cast<double>(total);
    f.percent_close1_lower_triangular = static_cast<double>(close1) / static_cast<double>(total);
    f.percent_close3_lower_triangular = static_cast<double>(close3) / static_cast<double>(total);
  }
  const GwResult r = gw_round(g, sol, 1000, seed);
  f.expected_costgw_over_sdp_cost = r.mean / sol.relaxed_cost;
  f.std_costgw_over_sdp_cost = r.std / sol.relaxed_cost;
  return f;
}

struct FeatureVector {
  GraphFeatures graph;
  GwFeatures gw;
};

inline constexpr std::array<std::string_view, 18> kFeatureNames = {
    "LOG_NUM_EDGES",
    "DENSITY",
    "LOGRATIO_EDGETONODES",
    "LOG_CHROMATIC_NUM",
    "NORM_MIS",
    "GRAPH_ASSORTATIVITY",
    "SPECTRAL_GAP",
    "LOG_LARGESTEIGVAL",
    "LOG_SECONDLARGESTEIGVAL",
    "LOG_SMALLESTEIGVAL",
    "GIRTH",
    "TRANSITIVITY",
    "PERCENT_CUT",
    "PERCENT_POSITIVE_LOWER_TRIANGULAR",
    "PERCENT_CLOSE1_LOWER_TRIANGULAR",
    "PERCENT_CLOSE3_LOWER_TRIANGULAR",
    "EXPECTED_COSTGW_OVER_SDP_COST",
    "STD_COSTGW_OVER_SDP_COST",
};

inline std::array<double, 18> feature_values(const FeatureVector& f) {
  return {f.graph.log_num_edges,
          f.graph.density,
          f.graph.logratio_edgetonodes,
          f.graph.log_chromatic_num,
          f.graph.norm_mis,
          f.graph.graph_assortativity,
          f.graph.spectral_gap,
          f.graph.log_largesteigval,
          f.graph.log_secondlargesteigval,
          f.graph.log_smallesteigval,
          f.graph.girth,
          f.graph.transitivity,
          f.gw.percent_cut,
          f.gw.percent_positive_lower_triangular,
          f.gw.percent_close1_lower_triangular,
          f.gw.percent_close3_lower_triangular,
          f.gw.expected_costgw_over_sdp_cost,
          f.gw.std_costgw_over_sdp_cost};
}

// %.17g with explicit sentinel spellings, so values round-trip bit-exactly
// and degenerate entries stay machine-readable.
inline std::string format_feature(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline double parse_feature(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  return std::strtod(s.c_str(), nullptr);
}

inline std::array<double*, 18> feature_refs(FeatureVector& f) {
  return {&f.graph.log_num_edges,
          &f.graph.density,
          &f.graph.logratio_edgetonodes,
          &f.graph.log_chromatic_num,
          &f.graph.norm_mis,
          &f.graph.graph_assortativity,
          &f.graph.spectral_gap,
          &f.graph.log_largesteigval,
          &f.graph.log_secondlargesteigval,
          &f.graph.log_smallesteigval,
          &f.graph.girth,
          &f.graph.transitivity,
          &f.gw.percent_cut,
          &f.gw.percent_positive_lower_triangular,
          &f.gw.percent_close1_lower_triangular,
          &f.gw.percent_close3_lower_triangular,
          &f.gw.expected_costgw_over_sdp_cost,
          &f.gw.std_costgw_over_sdp_cost};
}

struct FeatureRow {
  std::string instance_id;
  int n = 0;
  double ratio = 0.0;
  int label = 0;
  FeatureVector features;
};

inline std::string features_csv(const std::vector<FeatureRow>& rows) {
  std::string out = "instance_id,n,ratio,label";
  for (std::string_view name : kFeatureNames) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (const FeatureRow& r : rows) {
    out += r.instance_id;
    out += ',';
    out += std::to_string(r.n);
    out += ',';
    out += format_feature(r.ratio);
    out += ',';
    out += std::to_string(r.label);
    for (double x : feature_values(r.features)) {
      out += ',';
      out += format_feature(x);
    }
    out += '\n';
  }
  return out;
}

inline void export_features(const std::vector<FeatureRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("export_features: cannot open " + path);
  out << features_csv(rows);
  if (!out) throw std::runtime_error("export_features: write failed for " + path);
}

}  // namespace cutforge
