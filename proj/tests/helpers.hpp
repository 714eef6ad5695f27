#pragma once

#include <bit>
#include <climits>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "cutforge/graph.hpp"
#include "cutforge/rng.hpp"

namespace cutforge::testing {

inline Graph cycle_graph(int n, double w = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back(Edge{i, i + 1, w});
  if (n > 2) edges.push_back(Edge{0, n - 1, w});
  return Graph(n, std::move(edges));
}

inline Graph path_graph(int n, double w = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back(Edge{i, i + 1, w});
  return Graph(n, std::move(edges));
}

inline Graph complete_graph(int n, double w = 1.0) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back(Edge{i, j, w});
  return Graph(n, std::move(edges));
}

inline Graph star_graph(int n, double w = 1.0) {
  std::vector<Edge> edges;
  for (int i = 1; i < n; ++i) edges.push_back(Edge{0, i, w});
  return Graph(n, std::move(edges));
}

// Outer cycle 0..4, spokes i -> i+5, inner pentagram 5..9.
inline Graph petersen_graph() {
  std::vector<Edge> edges;
  for (int i = 0; i < 5; ++i) {
    edges.push_back(Edge{std::min(i, (i + 1) % 5), std::max(i, (i + 1) % 5), 1.0});
    edges.push_back(Edge{i, i + 5, 1.0});
    const int a = i + 5, b = (i + 2) % 5 + 5;
    edges.push_back(Edge{std::min(a, b), std::max(a, b), 1.0});
  }
  return Graph(10, std::move(edges));
}

// G(n, p); unit weights, or nonzero integers in [-3, 3] when unit == false.
inline Graph random_graph(Rng& rng, int n, double p, bool unit = true) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) {
        double w = 1.0;
        if (!unit) {
          static const double pool[6] = {-3.0, -2.0, -1.0, 1.0, 2.0, 3.0};
          w = pool[rng.below(6)];
        }
        edges.push_back(Edge{i, j, w});
      }
  return Graph(n, std::move(edges));
}

// Largest independent set size by full enumeration.
inline int oracle_mis(const Graph& g) {
  const int n = g.node_count();
  if (n > 20) throw std::invalid_argument("oracle_mis: too large");
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const Edge& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)] |= 1u << e.v;
    adj[static_cast<std::size_t>(e.v)] |= 1u << e.u;
  }
  int best = 0;
  const std::uint32_t full = static_cast<std::uint32_t>((1ull << n) - 1);
  for (std::uint32_t m = 0; m <= full; ++m) {
    bool ok = true;
    for (std::uint32_t rest = m; rest && ok;) {
      const int v = std::countr_zero(rest);
      rest &= rest - 1;
      if (adj[static_cast<std::size_t>(v)] & rest) ok = false;
    }
    if (ok) best = std::max(best, std::popcount(m));
  }
  return best;
}

// Chromatic number by subset DP over independent sets.
inline int oracle_chromatic(const Graph& g) {
  const int n = g.node_count();
  if (n > 15) throw std::invalid_argument("oracle_chromatic: too large");
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(n), 0);
  for (const Edge& e : g.edges()) {
    adj[static_cast<std::size_t>(e.u)] |= 1u << e.v;
    adj[static_cast<std::size_t>(e.v)] |= 1u << e.u;
  }
  const std::uint32_t full = static_cast<std::uint32_t>((1ull << n) - 1);
  std::vector<char> indep(static_cast<std::size_t>(full) + 1);
  indep[0] = 1;
  for (std::uint32_t m = 1; m <= full; ++m) {
    const int v = std::countr_zero(m);
    const std::uint32_t rest = m & (m - 1);
    indep[m] = indep[rest] && (adj[static_cast<std::size_t>(v)] & rest) == 0;
  }
  std::vector<int> f(static_cast<std::size_t>(full) + 1, INT_MAX);
  f[0] = 0;
  for (std::uint32_t S = 1; S <= full; ++S) {
    const int v = std::countr_zero(S);
    for (std::uint32_t I = S;; I = (I - 1) & S) {
      if ((I >> v & 1) && indep[I] && f[S ^ I] != INT_MAX)
        f[S] = std::min(f[S], f[S ^ I] + 1);
      if (I == 0) break;
    }
  }
  return f[full];
}

}  // namespace cutforge::testing
