#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cutforge {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  int u = 0;  // u < v always
  int v = 0;
  double w = 0.0;

  friend bool operator==(const Edge& a, const Edge& b) {
    return a.u == b.u && a.v == b.v && a.w == b.w;
  }
};

// Undirected signed-weighted simple graph. Decoded instances carry unit
// weights; contraction introduces signed integer weights. Zero-weight edges
// are never stored, so degree-based quantities see the true support.
class Graph {
 public:
  Graph() = default;

  explicit Graph(int n) : n_(n) {
    if (n <= 0) throw std::invalid_argument("Graph: node count must be positive");
    adj_.resize(static_cast<std::size_t>(n));
  }

  Graph(int n, std::vector<Edge> edges) : Graph(n) {
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return a.u < b.u || (a.u == b.u && a.v < b.v); });
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const Edge& e = edges[i];
      if (e.u < 0 || e.v < 0 || e.u >= n || e.v >= n)
        throw std::invalid_argument("Graph: edge endpoint out of range");
      if (e.u == e.v) throw std::invalid_argument("Graph: self-loop");
      if (e.u > e.v) throw std::invalid_argument("Graph: edge must satisfy u < v");
      if (e.w == 0.0) throw std::invalid_argument("Graph: zero-weight edge");
      if (i > 0 && edges[i - 1].u == e.u && edges[i - 1].v == e.v)
        throw std::invalid_argument("Graph: duplicate edge");
    }
    edges_ = std::move(edges);
    for (const Edge& e : edges_) {
      adj_[static_cast<std::size_t>(e.u)].emplace_back(e.v, e.w);
      adj_[static_cast<std::size_t>(e.v)].emplace_back(e.u, e.w);
    }
  }

  int node_count() const { return n_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  const std::vector<Edge>& edges() const { return edges_; }

  // Neighbors of v as (node, weight), in ascending node order for v's earlier
  // partners first; order is deterministic (derived from sorted edges).
  const std::vector<std::pair<int, double>>& neighbors(int v) const {
    return adj_[static_cast<std::size_t>(v)];
  }

  int degree(int v) const { return static_cast<int>(adj_[static_cast<std::size_t>(v)].size()); }

  double weight(int u, int v) const {
    for (const auto& [k, w] : adj_[static_cast<std::size_t>(u)])
      if (k == v) return w;
    return 0.0;
  }

  bool has_edge(int u, int v) const { return weight(u, v) != 0.0; }

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<int, double>>> adj_;
};

// Spin vector, one entry of exactly +1 or -1 per node.
using CutAssignment = std::vector<int>;

inline void validate_assignment(const Graph& g, const CutAssignment& s) {
  if (static_cast<int>(s.size()) != g.node_count())
    throw std::invalid_argument("cut assignment length does not match node count");
  for (int x : s)
    if (x != 1 && x != -1) throw std::invalid_argument("cut assignment entries must be +1 or -1");
}

// C(s) = sum_e w_e (1 - s_u s_v) / 2: the total weight of crossing edges.
// Summation runs in canonical edge order, so equal inputs give bit-equal sums.
inline double cut_value(const Graph& g, const CutAssignment& s) {
  validate_assignment(g, s);
  double total = 0.0;
  for (const Edge& e : g.edges())
    if (s[static_cast<std::size_t>(e.u)] != s[static_cast<std::size_t>(e.v)]) total += e.w;
  return total;
}

struct MaxCutResult {
  double value = 0.0;
  CutAssignment assignment;
};

// Exhaustive maximum cut. Fixes s_0 = +1 (spin-flip symmetry halves the
// enumeration); ties go to the lowest binary encoding of the remaining spins.
inline MaxCutResult brute_force_maxcut(const Graph& g) {
  const int n = g.node_count();
  if (n > 30) throw std::invalid_argument("brute_force_maxcut: more than 30 nodes");

  CutAssignment s(static_cast<std::size_t>(n), 1);
  CutAssignment best_s = s;
  double cur = 0.0;
  double best = 0.0;

  const std::uint64_t mask_count = (n >= 1) ? (1ULL << (n - 1)) : 1ULL;
  for (std::uint64_t mask = 1; mask < mask_count; ++mask) {
    std::uint64_t changed = mask ^ (mask - 1);
    while (changed != 0) {
      const int bit = std::countr_zero(changed);
      changed &= changed - 1;
      const int node = bit + 1;
      for (const auto& [k, w] : g.neighbors(node)) {
        if (s[static_cast<std::size_t>(node)] != s[static_cast<std::size_t>(k)])
          cur -= w;
        else
          cur += w;
      }
      s[static_cast<std::size_t>(node)] = -s[static_cast<std::size_t>(node)];
    }
    if (cur > best) {
      best = cur;
      best_s = s;
    }
  }
  return MaxCutResult{cut_value(g, best_s), std::move(best_s)};
}

struct Component {
  Graph graph;                 // relabeled 0..k-1
  std::vector<int> to_parent;  // local index -> parent node id
};

// Components ordered by smallest parent node; local labels keep parent order.
inline std::vector<Component> connected_components(const Graph& g) {
  const int n = g.node_count();
  std::vector<int> comp(static_cast<std::size_t>(n), -1);
  int comp_count = 0;
  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (comp[static_cast<std::size_t>(root)] != -1) continue;
    const int id = comp_count++;
    comp[static_cast<std::size_t>(root)] = id;
    stack.push_back(root);
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (const auto& [k, w] : g.neighbors(v)) {
        if (comp[static_cast<std::size_t>(k)] == -1) {
          comp[static_cast<std::size_t>(k)] = id;
          stack.push_back(k);
        }
      }
    }
  }

  std::vector<std::vector<int>> members(static_cast<std::size_t>(comp_count));
  for (int v = 0; v < n; ++v) members[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])].push_back(v);

  std::vector<int> local(static_cast<std::size_t>(n), -1);
  std::vector<Component> out;
  out.reserve(static_cast<std::size_t>(comp_count));
  for (int id = 0; id < comp_count; ++id) {
    const std::vector<int>& nodes = members[static_cast<std::size_t>(id)];
    for (std::size_t i = 0; i < nodes.size(); ++i) local[static_cast<std::size_t>(nodes[i])] = static_cast<int>(i);
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
      if (comp[static_cast<std::size_t>(e.u)] == id)
        edges.push_back(Edge{local[static_cast<std::size_t>(e.u)], local[static_cast<std::size_t>(e.v)], e.w});
    out.push_back(Component{Graph(static_cast<int>(nodes.size()), std::move(edges)), nodes});
  }
  return out;
}

// Canonical upper-triangle indexing for node pairs (i < j), row-major:
// (0,1), (0,2), ..., (0,n-1), (1,2), ...
inline std::size_t pair_index_count(int n) {
  return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
}

inline std::size_t pair_index(int n, int i, int j) {
  return static_cast<std::size_t>(i) * (2 * static_cast<std::size_t>(n) - static_cast<std::size_t>(i) - 1) / 2 +
         static_cast<std::size_t>(j - i - 1);
}

namespace detail {
inline std::string format_weight(double w) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", w);
  return buf;
}
}  // namespace detail

// Edge-list text format: first line "n m", then m lines "u v w" with
// 0 <= u < v < n, canonical (u, v) order, LF line endings.
inline std::string serialize(const Graph& g) {
  std::string out = std::to_string(g.node_count()) + " " + std::to_string(g.edge_count()) + "\n";
  for (const Edge& e : g.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += ' ';
    out += detail::format_weight(e.w);
    out += '\n';
  }
  return out;
}

inline Graph parse_graph(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("parse: empty input");
  long long n = 0, m = 0;
  {
    std::istringstream hs(line);
    if (!(hs >> n >> m)) throw ParseError("parse: malformed header line: \"" + line + "\"");
    std::string rest;
    if (hs >> rest) throw ParseError("parse: trailing tokens in header: \"" + line + "\"");
    if (n <= 0) throw ParseError("parse: node count must be positive");
    if (m < 0) throw ParseError("parse: negative edge count");
  }
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long i = 0; i < m; ++i) {
    if (!std::getline(in, line)) throw ParseError("parse: expected " + std::to_string(m) + " edge lines, got " + std::to_string(i));
    std::istringstream es(line);
    long long u = 0, v = 0;
    double w = 0.0;
    if (!(es >> u >> v >> w)) throw ParseError("parse: malformed edge line: \"" + line + "\"");
    std::string rest;
    if (es >> rest) throw ParseError("parse: trailing tokens in edge line: \"" + line + "\"");
    if (u < 0 || v < 0 || u >= n || v >= n) throw ParseError("parse: edge endpoint out of range: \"" + line + "\"");
    if (u >= v) throw ParseError("parse: edge requires u < v: \"" + line + "\"");
    if (w == 0.0) throw ParseError("parse: zero-weight edge: \"" + line + "\"");
    if (!std::isfinite(w)) throw ParseError("parse: non-finite weight: \"" + line + "\"");
    edges.push_back(Edge{static_cast<int>(u), static_cast<int>(v), w});
  }
  {
    std::string rest;
    while (std::getline(in, rest))
      if (!rest.empty()) throw ParseError("parse: trailing content after edge list");
  }
  try {
    return Graph(static_cast<int>(n), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("parse: ") + e.what());
  }
}

}  // namespace cutforge
