#pragma once

#include <stdexcept>
#include <vector>

#include "cutforge/graph.hpp"

namespace cutforge {

struct Bounds {
  double lo = -3.0;
  double hi = 3.0;
};

// Continuous edge-logit encoding of an n-node graph: one real per node pair
// in canonical upper-triangle order, thresholded at zero on decode.
struct LatentPoint {
  std::vector<double> x;
  std::vector<Bounds> bounds;

  static LatentPoint zeros(int n) {
    LatentPoint p;
    p.x.assign(pair_index_count(n), 0.0);
    p.bounds.assign(pair_index_count(n), Bounds{});
    return p;
  }
};

inline void validate_latent(const LatentPoint& p) {
  if (!p.bounds.empty() && p.bounds.size() != p.x.size())
    throw std::invalid_argument("latent point: bounds/coordinate length mismatch");
  for (std::size_t i = 0; i < p.bounds.size(); ++i)
    if (p.x[i] < p.bounds[i].lo || p.x[i] > p.bounds[i].hi)
      throw std::invalid_argument("latent point: coordinate outside its bounds");
}

// Pure function: edge (i, j) present with weight 1 iff x[k] > 0 at the
// canonical index k of the pair.
inline Graph decode_latent(const LatentPoint& p, int n) {
  if (p.x.size() != pair_index_count(n))
    throw std::invalid_argument("decode_latent: latent length does not match n(n-1)/2");
  std::vector<Edge> edges;
  std::size_t k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j, ++k)
      if (p.x[k] > 0.0) edges.push_back(Edge{i, j, 1.0});
  return Graph(n, std::move(edges));
}

}  // namespace cutforge
