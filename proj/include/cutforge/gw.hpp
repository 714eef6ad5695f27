#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "cutforge/graph.hpp"
#include "cutforge/rng.hpp"

namespace cutforge {

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Low-rank factor of the MaxCut SDP relaxation: n unit rows of rank r,
// gram(i,j) = v_i . v_j in [-1, 1].
struct SdpSolution {
  int n = 0;
  int rank = 0;
  std::vector<double> vectors;  // row-major n x rank
  double relaxed_cost = 0.0;
  long long iterations = 0;  // summed across restarts
  double grad_norm = 0.0;    // Riemannian, of the returned factor

  double gram(int i, int j) const {
    double dot = 0.0;
    for (int k = 0; k < rank; ++k)
      dot += vectors[static_cast<std::size_t>(i) * rank + k] *
             vectors[static_cast<std::size_t>(j) * rank + k];
    return dot;
  }
};

namespace detail {

inline double sdp_cost(const Graph& g, const std::vector<double>& v, int rank) {
  double cost = 0.0;
  for (const Edge& e : g.edges()) {
    double dot = 0.0;
    for (int k = 0; k < rank; ++k)
      dot += v[static_cast<std::size_t>(e.u) * rank + k] * v[static_cast<std::size_t>(e.v) * rank + k];
    cost += e.w * (1.0 - dot) / 2.0;
  }
  return cost;
}

inline void normalize_rows(std::vector<double>& v, int n, int rank) {
  for (int i = 0; i < n; ++i) {
    double norm = 0.0;
    for (int k = 0; k < rank; ++k) {
      const double x = v[static_cast<std::size_t>(i) * rank + k];
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v[static_cast<std::size_t>(i) * rank] = 1.0;
      for (int k = 1; k < rank; ++k) v[static_cast<std::size_t>(i) * rank + k] = 0.0;
    } else {
      for (int k = 0; k < rank; ++k) v[static_cast<std::size_t>(i) * rank + k] /= norm;
    }
  }
}

// Euclidean gradient of the cost projected onto the product of spheres.
// Returns the squared Frobenius norm of the Riemannian gradient.
inline double riemannian_gradient(const Graph& g, const std::vector<double>& v, int rank,
                                  std::vector<double>& grad) {
  const int n = g.node_count();
  grad.assign(static_cast<std::size_t>(n) * rank, 0.0);
  for (const Edge& e : g.edges())
    for (int k = 0; k < rank; ++k) {
      grad[static_cast<std::size_t>(e.u) * rank + k] -=
          0.5 * e.w * v[static_cast<std::size_t>(e.v) * rank + k];
      grad[static_cast<std::size_t>(e.v) * rank + k] -=
          0.5 * e.w * v[static_cast<std::size_t>(e.u) * rank + k];
    }
  double norm_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    double radial = 0.0;
    for (int k = 0; k < rank; ++k)
      radial += grad[static_cast<std::size_t>(i) * rank + k] * v[static_cast<std::size_t>(i) * rank + k];
    for (int k = 0; k < rank; ++k) {
      double& gk = grad[static_cast<std::size_t>(i) * rank + k];
      gk -= radial * v[static_cast<std::size_t>(i) * rank + k];
      norm_sq += gk * gk;
    }
  }
  return norm_sq;
}

struct AscentOutcome {
  std::vector<double> v;
  double cost = 0.0;
  double grad_norm = 0.0;
  long long iterations = 0;
  bool converged = false;
};

inline AscentOutcome ascend(const Graph& g, std::vector<double> v, int rank, double tol,
                            long long max_iters) {
  const int n = g.node_count();

  // Safe fixed step below the inverse curvature bound (max weighted degree
  // dominates the gradient Lipschitz constant). Near the optimum the Armijo
  // gain eta*|grad|^2 falls under the cost's float granularity; steps at the
  // floor are still true ascent, so they are accepted as long as the cost
  // does not measurably decrease.
  std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
  for (const Edge& e : g.edges()) {
    rowsum[static_cast<std::size_t>(e.u)] += std::abs(e.w);
    rowsum[static_cast<std::size_t>(e.v)] += std::abs(e.w);
  }
  const double maxdeg = *std::max_element(rowsum.begin(), rowsum.end());
  const double eta_floor = 0.5 / (1.0 + 0.5 * maxdeg);

  std::vector<double> grad, prev_v, prev_grad, cand;
  double cost = sdp_cost(g, v, rank);
  double eta = 1.0;

  // Nonmonotone (GLL-style) reference: the lowest of the last accepted costs.
  // Lets Barzilai-Borwein steps traverse near-flat curvature at tight optima
  // where strictly monotone steps decay the gradient only sublinearly.
  constexpr int kWindow = 10;
  double recent[kWindow];
  int recent_n = 0, recent_head = 0;
  recent[recent_head] = cost;
  recent_n = 1;

  AscentOutcome out;
  for (long long iter = 0; iter < max_iters; ++iter) {
    const double gn_sq = riemannian_gradient(g, v, rank, grad);
    out.iterations = iter + 1;
    if (std::sqrt(gn_sq) <= tol) {
      out.converged = true;
      break;
    }

    if (!prev_v.empty()) {
      double ss = 0.0, sy = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) {
        const double s = v[i] - prev_v[i];
        ss += s * s;
        sy += s * (grad[i] - prev_grad[i]);
      }
      if (sy != 0.0 && std::isfinite(ss / sy)) eta = std::abs(ss / sy);
    }
    eta = std::clamp(eta, eta_floor, 64.0);

    double ref = recent[0];
    for (int i = 1; i < recent_n; ++i) ref = std::min(ref, recent[i]);
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(cost));

    bool accepted = false;
    double cand_cost = cost;
    while (true) {
      cand = v;
      for (std::size_t i = 0; i < cand.size(); ++i) cand[i] += eta * grad[i];
      normalize_rows(cand, n, rank);
      cand_cost = sdp_cost(g, cand, rank);
      if (cand_cost >= ref + 1e-4 * eta * gn_sq - slack) {
        accepted = true;
        break;
      }
      if (eta <= eta_floor) break;
      eta = std::max(eta * 0.5, eta_floor);
    }
    if (!accepted) break;
    prev_v.swap(v);        // prev_v := old iterate
    prev_grad.swap(grad);  // prev_grad := its gradient
    v.swap(cand);
    cost = cand_cost;
    recent_head = (recent_head + 1) % kWindow;
    recent[recent_head] = cost;
    recent_n = std::min(recent_n + 1, kWindow);
  }
  out.grad_norm = std::sqrt(riemannian_gradient(g, v, rank, grad));
  out.converged = out.converged || out.grad_norm <= tol;
  out.cost = cost;
  out.v = std::move(v);
  return out;
}

}  // namespace detail

// Burer-Monteiro factorized SDP: maximize sum_e w_e (1 - v_u . v_v) / 2 over
// unit rows of rank ceil(sqrt(2n)) + 1 by Riemannian gradient ascent with
// backtracking line search. Deterministic: restarts draw from a fixed
// internal stream, and the best converged restart wins.
inline SdpSolution solve_sdp(const Graph& g) {
  if (g.edge_count() == 0) throw std::invalid_argument("solve_sdp: edgeless graph");
  for (const Edge& e : g.edges())
    if (e.w < 0.0) throw std::invalid_argument("solve_sdp: negative edge weight");

  const int n = g.node_count();
  const int rank = static_cast<int>(std::ceil(std::sqrt(2.0 * n))) + 1;
  constexpr double kTol = 1e-7;
  constexpr long long kMaxIters = 50000;
  constexpr int kRestarts = 8;
  constexpr std::uint64_t kSdpSeed = 0x8f1d2c3b4a596877ull;

  SdpSolution best;
  long long total_iters = 0;
  double best_failed_gn = std::numeric_limits<double>::infinity();
  bool have = false;
  for (int restart = 0; restart < kRestarts; ++restart) {
    Rng rng(derive_seed(kSdpSeed, "restart", static_cast<std::uint64_t>(restart)));
    std::vector<double> v(static_cast<std::size_t>(n) * rank);
    for (double& x : v) x = rng.gaussian();
    detail::normalize_rows(v, n, rank);
    detail::AscentOutcome out = detail::ascend(g, std::move(v), rank, kTol, kMaxIters);
    total_iters += out.iterations;
    if (out.converged) {
      if (!have || out.cost > best.relaxed_cost) {
        best.vectors = std::move(out.v);
        best.relaxed_cost = out.cost;
        best.grad_norm = out.grad_norm;
        have = true;
      }
    } else {
      best_failed_gn = std::min(best_failed_gn, out.grad_norm);
    }
  }
  if (!have) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "solve_sdp: no restart reached gradient norm %.1e within %lld iterations "
                  "(best residual %.3e)",
                  kTol, kMaxIters, best_failed_gn);
    throw SolverError(msg);
  }
  best.n = n;
  best.rank = rank;
  best.iterations = total_iters;
  best.relaxed_cost = detail::sdp_cost(g, best.vectors, rank);
  return best;
}

struct RoundedCut {
  CutAssignment assignment;
  double value = 0.0;
};

// One hyperplane rounding: a standard-normal direction signs each row,
// sign(0) := +1.
inline RoundedCut round_hyperplane(const Graph& g, const SdpSolution& sol, Rng& rng) {
  if (g.node_count() != sol.n) throw std::invalid_argument("round_hyperplane: solution/graph mismatch");
  std::vector<double> r(static_cast<std::size_t>(sol.rank));
  for (double& x : r) x = rng.gaussian();
  RoundedCut out;
  out.assignment.resize(static_cast<std::size_t>(sol.n));
  for (int i = 0; i < sol.n; ++i) {
    double dot = 0.0;
    for (int k = 0; k < sol.rank; ++k)
      dot += r[static_cast<std::size_t>(k)] * sol.vectors[static_cast<std::size_t>(i) * sol.rank + k];
    out.assignment[static_cast<std::size_t>(i)] = dot < 0.0 ? -1 : 1;
  }
  out.value = cut_value(g, out.assignment);
  return out;
}

struct GwResult {
  std::vector<double> samples;
  double best = 0.0;
  double mean = 0.0;
  double std = 0.0;  // population
  double median = 0.0;
};

inline double median_of(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(xs.begin(), xs.end());
  const std::size_t h = xs.size() / 2;
  return xs.size() % 2 ? xs[h] : (xs[h - 1] + xs[h]) / 2.0;
}

// Roundings of an already-solved relaxation; trial t draws from the stream
// seeded by hash(seed, t), so results are independent of evaluation order.
inline GwResult gw_round(const Graph& g, const SdpSolution& sol, int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("gw_round: trials must be >= 1");
  GwResult res;
  res.samples.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    res.samples.push_back(round_hyperplane(g, sol, rng).value);
  }
  res.best = *std::max_element(res.samples.begin(), res.samples.end());
  double sum = 0.0;
  for (double x : res.samples) sum += x;
  res.mean = sum / static_cast<double>(trials);
  double var = 0.0;
  for (double x : res.samples) var += (x - res.mean) * (x - res.mean);
  res.std = std::sqrt(var / static_cast<double>(trials));
  res.median = median_of(res.samples);
  return res;
}

// Full GW: one deterministic SDP solve, `trials` seeded roundings.
inline GwResult gw_solve(const Graph& g, int trials, std::uint64_t seed) {
  const SdpSolution sol = solve_sdp(g);
  return gw_round(g, sol, trials, seed);
}

}  // namespace cutforge
