#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cutforge/graph.hpp"
#include "cutforge/rng.hpp"

namespace cutforge {

// Canonical fundamental domain of the depth-1 angles.
inline constexpr double kGammaLo = -std::numbers::pi;
inline constexpr double kGammaHi = std::numbers::pi;
inline constexpr double kBetaLo = -std::numbers::pi / 4.0;
inline constexpr double kBetaHi = std::numbers::pi / 4.0;

struct QaoaParams {
  double gamma = 0.0;
  double beta = 0.0;
};

namespace detail {

// Batched depth-1 <Z_u Z_v> evaluation. The bracket products depend on gamma
// only, so a (gamma, beta) grid needs one neighborhood pass per gamma and a
// trivial combine per beta. Graphs whose weights are small integers (decoded
// instances and everything contraction makes of them) share a cos(gamma*k)
// table instead of calling cos per factor.
class QaoaEvaluator {
 public:
  explicit QaoaEvaluator(const Graph& g)
      : g_(&g),
        stamp_u_(static_cast<std::size_t>(g.node_count()), -1),
        stamp_v_(static_cast<std::size_t>(g.node_count()), -1),
        wv_(static_cast<std::size_t>(g.node_count()), 0.0) {
    for (const Edge& e : g.edges()) total_weight_ += e.w;
    integer_weights_ = true;
    double wmax = 0.0;
    for (const Edge& e : g.edges()) {
      if (std::nearbyint(e.w) != e.w || std::abs(e.w) > 512.0) {
        integer_weights_ = false;
        break;
      }
      wmax = std::max(wmax, std::abs(e.w));
    }
    wmax_ = integer_weights_ ? static_cast<int>(wmax) : 0;
    a_.resize(g.edges().size());
    b_.resize(g.edges().size());
  }

  double total_weight() const { return total_weight_; }

  void set_gamma(double gamma) {
    if (has_gamma_ && gamma == gamma_) return;
    gamma_ = gamma;
    has_gamma_ = true;
    if (integer_weights_) {
      cos_table_.resize(static_cast<std::size_t>(2 * wmax_ + 1));
      for (int k = 0; k <= 2 * wmax_; ++k) cos_table_[static_cast<std::size_t>(k)] = std::cos(gamma * k);
    }

    sum_wa_ = 0.0;
    sum_wb_ = 0.0;
    const auto& edges = g_->edges();
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const Edge& e = edges[ei];
      ++epoch_;
      for (const auto& [k, w] : g_->neighbors(e.v)) {
        stamp_v_[static_cast<std::size_t>(k)] = epoch_;
        wv_[static_cast<std::size_t>(k)] = w;
      }
      for (const auto& [k, w] : g_->neighbors(e.u)) stamp_u_[static_cast<std::size_t>(k)] = epoch_;

      double pu = 1.0, pv = 1.0, psum = 1.0, pdiff = 1.0;
      for (const auto& [k, wu] : g_->neighbors(e.u)) {
        if (k == e.v) continue;
        pu *= cf(wu);
        if (stamp_v_[static_cast<std::size_t>(k)] == epoch_) {
          const double wv = wv_[static_cast<std::size_t>(k)];
          psum *= cf(wu + wv);
          pdiff *= cf(wu - wv);
        } else {
          const double c = cf(wu);
          psum *= c;
          pdiff *= c;
        }
      }
      for (const auto& [k, wv] : g_->neighbors(e.v)) {
        if (k == e.u) continue;
        pv *= cf(wv);
        if (stamp_u_[static_cast<std::size_t>(k)] != epoch_) {
          const double c = cf(wv);
          psum *= c;
          pdiff *= c;
        }
      }
      a_[ei] = std::sin(gamma_ * e.w) * (pu + pv);
      b_[ei] = psum - pdiff;
      sum_wa_ += e.w * a_[ei];
      sum_wb_ += e.w * b_[ei];
    }
  }

  // <Z_u Z_v> of edge ei at the current gamma.
  double edge_zz(std::size_t ei, double beta) const {
    const double zz = 0.5 * std::sin(4.0 * beta) * a_[ei] -
                      0.5 * std::sin(2.0 * beta) * std::sin(2.0 * beta) * b_[ei];
    return std::clamp(zz, -1.0, 1.0);
  }

  void all_edge_zz(double beta, std::vector<double>& out) const {
    out.resize(a_.size());
    for (std::size_t i = 0; i < a_.size(); ++i) out[i] = edge_zz(i, beta);
  }

  // <C>(gamma, beta) = sum_e w_e (1 - <Z_u Z_v>) / 2 at the current gamma.
  double expected_cut(double beta) const {
    const double s4 = std::sin(4.0 * beta);
    const double s2 = std::sin(2.0 * beta);
    return 0.5 * total_weight_ - 0.25 * s4 * sum_wa_ + 0.25 * s2 * s2 * sum_wb_;
  }

 private:
  double cf(double x) const {
    if (integer_weights_) {
      const int k = static_cast<int>(std::abs(x));
      return cos_table_[static_cast<std::size_t>(k)];
    }
    return std::cos(gamma_ * x);
  }

  const Graph* g_;
  double total_weight_ = 0.0;
  bool integer_weights_ = false;
  int wmax_ = 0;
  bool has_gamma_ = false;
  double gamma_ = 0.0;
  std::vector<double> cos_table_;
  std::vector<double> a_, b_;
  double sum_wa_ = 0.0, sum_wb_ = 0.0;
  std::vector<int> stamp_u_, stamp_v_;
  std::vector<double> wv_;
  int epoch_ = 0;
};

}  // namespace detail

// Analytic depth-1 expectation <Z_u Z_v> for the weighted instance:
//   1/2 sin(4b) sin(g w_uv) [prod_{k!=u,v} cos(g w_uk) + prod_{k!=u,v} cos(g w_vk)]
//   - 1/2 sin^2(2b) [prod_{k!=u,v} cos(g (w_uk + w_vk)) - prod_{k!=u,v} cos(g (w_uk - w_vk))]
// with w_xy = 0 for absent pairs. Verified against statevector_expectation.
inline double edge_expectation(const Graph& g, QaoaParams p, int u, int v) {
  if (u > v) std::swap(u, v);
  const auto& edges = g.edges();
  std::size_t idx = edges.size();
  for (std::size_t i = 0; i < edges.size(); ++i)
    if (edges[i].u == u && edges[i].v == v) {
      idx = i;
      break;
    }
  if (idx == edges.size()) throw std::invalid_argument("edge_expectation: edge not present");
  detail::QaoaEvaluator ev(g);
  ev.set_gamma(p.gamma);
  return ev.edge_zz(idx, p.beta);
}

// Exact <Z_u Z_v> from the full 2^n statevector of the depth-1 state
// e^{-i b sum_j X_j} e^{-i g H} |+>^n with phase Hamiltonian
// H(z) = 1/2 sum_e w_e z_u z_v. Test oracle for edge_expectation.
inline double statevector_expectation(const Graph& g, QaoaParams p, int u, int v) {
  const int n = g.node_count();
  if (n > 12) throw std::invalid_argument("statevector_expectation: more than 12 nodes");
  if (u == v || u < 0 || v < 0 || u >= n || v >= n)
    throw std::invalid_argument("statevector_expectation: bad node pair");

  const std::size_t dim = std::size_t{1} << n;
  std::vector<std::complex<double>> amp(dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (std::size_t z = 0; z < dim; ++z) {
    double energy = 0.0;
    for (const Edge& e : g.edges()) {
      const int su = (z >> e.u) & 1 ? -1 : 1;
      const int sv = (z >> e.v) & 1 ? -1 : 1;
      energy += 0.5 * e.w * su * sv;
    }
    amp[z] = std::polar(norm, -p.gamma * energy);
  }

  const double c = std::cos(p.beta);
  const double s = std::sin(p.beta);
  const std::complex<double> mis(0.0, -s);
  for (int q = 0; q < n; ++q) {
    const std::size_t bit = std::size_t{1} << q;
    for (std::size_t i = 0; i < dim; ++i) {
      if (i & bit) continue;
      const std::size_t j = i | bit;
      const std::complex<double> a0 = amp[i];
      const std::complex<double> a1 = amp[j];
      amp[i] = c * a0 + mis * a1;
      amp[j] = c * a1 + mis * a0;
    }
  }

  double zz = 0.0;
  for (std::size_t z = 0; z < dim; ++z) {
    const int su = (z >> u) & 1 ? -1 : 1;
    const int sv = (z >> v) & 1 ? -1 : 1;
    zz += std::norm(amp[z]) * su * sv;
  }
  return zz;
}

struct OptimizeResult {
  QaoaParams params;
  double expected_cut = 0.0;
};

namespace detail {

// 64x64 grid over the canonical domain, then coordinate descent with step
// halving (40 iterations, convergence 1e-10). Fully deterministic.
inline OptimizeResult optimize_on(QaoaEvaluator& ev) {
  constexpr int kGrid = 64;
  const double dg = (kGammaHi - kGammaLo) / (kGrid - 1);
  const double db = (kBetaHi - kBetaLo) / (kGrid - 1);

  double best_g = kGammaLo, best_b = kBetaLo;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGrid; ++i) {
    const double gamma = kGammaLo + dg * i;
    ev.set_gamma(gamma);
    for (int j = 0; j < kGrid; ++j) {
      const double beta = kBetaLo + db * j;
      const double val = ev.expected_cut(beta);
      if (val > best_val) {
        best_val = val;
        best_g = gamma;
        best_b = beta;
      }
    }
  }

  auto value_at = [&](double gamma, double beta) {
    ev.set_gamma(gamma);
    return ev.expected_cut(beta);
  };

  double step_g = dg, step_b = db;
  for (int iter = 0; iter < 40 && std::max(step_g, step_b) > 1e-10; ++iter) {
    bool moved = false;
    for (const double dir : {1.0, -1.0}) {
      const double cand = std::clamp(best_g + dir * step_g, kGammaLo, kGammaHi);
      const double val = value_at(cand, best_b);
      if (val > best_val) {
        best_val = val;
        best_g = cand;
        moved = true;
      }
    }
    for (const double dir : {1.0, -1.0}) {
      const double cand = std::clamp(best_b + dir * step_b, kBetaLo, kBetaHi);
      const double val = value_at(best_g, cand);
      if (val > best_val) {
        best_val = val;
        best_b = cand;
        moved = true;
      }
    }
    if (!moved) {
      step_g *= 0.5;
      step_b *= 0.5;
    }
  }
  ev.set_gamma(best_g);
  return OptimizeResult{QaoaParams{best_g, best_b}, best_val};
}

}  // namespace detail

// Maximizes <C>(gamma, beta) over the canonical domain.
inline OptimizeResult optimize_parameters(const Graph& g) {
  if (g.edge_count() == 0) throw std::invalid_argument("optimize_parameters: edgeless graph");
  detail::QaoaEvaluator ev(g);
  return detail::optimize_on(ev);
}

struct ContractionRecord {
  int iteration = 0;
  int edge_u = 0;  // selected edge; original node ids in RqaoaResult::trace,
  int edge_v = 0;  // step-local ids straight out of rqaoa_step
  double expectation = 0.0;
  int sigma = 1;  // sign(expectation); +1 recorded for an exactly-zero expectation
  double offset_delta = 0.0;
  QaoaParams params;
  std::vector<int> node_map;  // new index -> pre-step index (or original id in trace)
};

struct StepResult {
  Graph contracted;
  ContractionRecord record;
  std::vector<double> edge_expectations;  // aligned with the input graph's edge order
};

namespace detail {

struct StepAnalysis {
  QaoaParams params;
  double expected_cut = 0.0;
  std::vector<double> zz;
  std::vector<std::size_t> tie_edges;  // argmax set of |zz|, exact float equality
};

inline StepAnalysis analyze_step(const Graph& g) {
  StepAnalysis an;
  QaoaEvaluator ev(g);
  const OptimizeResult opt = optimize_on(ev);
  an.params = opt.params;
  an.expected_cut = opt.expected_cut;
  ev.set_gamma(opt.params.gamma);
  ev.all_edge_zz(opt.params.beta, an.zz);
  double best_abs = -1.0;
  for (std::size_t i = 0; i < an.zz.size(); ++i) {
    const double a = std::abs(an.zz[i]);
    if (a > best_abs) {
      best_abs = a;
      an.tie_edges.clear();
      an.tie_edges.push_back(i);
    } else if (a == best_abs) {
      an.tie_edges.push_back(i);
    }
  }
  return an;
}

// Contract edge ei of g with sign sigma: s_v := sigma * s_u, node v removed,
// v's other edges folded into u's row, constants banked in offset_delta.
inline StepResult contract_edge(const Graph& g, const StepAnalysis& an, std::size_t ei) {
  const Edge sel = g.edges()[ei];
  const double zz = an.zz[ei];
  const int sigma = zz < 0.0 ? -1 : 1;
  const int u = sel.u, v = sel.v;

  double offset = 0.0;
  if (sigma == -1) {
    offset = sel.w;
    for (const auto& [k, w] : g.neighbors(v))
      if (k != u) offset += w;
  }

  std::map<std::pair<int, int>, double> acc;
  for (const Edge& e : g.edges())
    if (e.u != v && e.v != v) acc[{e.u, e.v}] = e.w;
  for (const auto& [k, w] : g.neighbors(v)) {
    if (k == u) continue;
    const std::pair<int, int> key{std::min(u, k), std::max(u, k)};
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, sigma * w);
    } else {
      it->second += sigma * w;
      if (it->second == 0.0) acc.erase(it);
    }
  }

  std::vector<Edge> edges;
  edges.reserve(acc.size());
  for (const auto& [key, w] : acc) {
    const int a = key.first < v ? key.first : key.first - 1;
    const int b = key.second < v ? key.second : key.second - 1;
    edges.push_back(Edge{a, b, w});
  }

  StepResult out{Graph(g.node_count() - 1, std::move(edges)), ContractionRecord{}, an.zz};
  out.record.edge_u = u;
  out.record.edge_v = v;
  out.record.expectation = zz;
  out.record.sigma = sigma;
  out.record.offset_delta = offset;
  out.record.params = an.params;
  out.record.node_map.resize(static_cast<std::size_t>(g.node_count() - 1));
  for (int i = 0; i < g.node_count() - 1; ++i)
    out.record.node_map[static_cast<std::size_t>(i)] = i < v ? i : i + 1;
  return out;
}

}  // namespace detail

// One RQAOA iteration: optimize (gamma, beta), select the edge of largest
// absolute expectation (exact ties broken uniformly via rng), contract it.
inline StepResult rqaoa_step(const Graph& g, Rng& rng) {
  if (g.node_count() < 2) throw std::invalid_argument("rqaoa_step: need at least 2 nodes");
  if (g.edge_count() < 1) throw std::invalid_argument("rqaoa_step: need at least one edge");
  const detail::StepAnalysis an = detail::analyze_step(g);
  std::size_t pick = an.tie_edges[0];
  if (an.tie_edges.size() > 1)
    pick = an.tie_edges[static_cast<std::size_t>(rng.below(an.tie_edges.size()))];
  return detail::contract_edge(g, an, pick);
}

struct RqaoaResult {
  double value = 0.0;
  CutAssignment assignment;
  std::vector<ContractionRecord> trace;
  int terminal_size = 0;  // largest component handed to brute force
};

// Per-step view handed to an observer: the component under contraction in
// step-local labels plus the map back to original node ids.
struct StepView {
  const Graph& graph;
  const std::vector<int>& orig_ids;
  const StepResult& step;
};

using StepObserver = std::function<void(const StepView&)>;

// Full recursive solver. Components below the n_c threshold (and everything
// the recursion disconnects down to it) go to brute force; larger connected
// pieces are contracted one edge at a time. Memoizes the per-graph analysis
// and terminal solves, so repeated runs that differ only in tie choices share
// the expensive work.
class RqaoaEngine {
 public:
  explicit RqaoaEngine(int n_c) : n_c_(n_c) {
    if (n_c < 1) throw std::invalid_argument("RqaoaEngine: n_c must be >= 1");
  }

  int n_c() const { return n_c_; }
  bool last_solve_used_rng() const { return last_solve_used_rng_; }

  RqaoaResult solve(const Graph& g, std::uint64_t seed, const StepObserver& observer = {}) {
    Rng rng(seed);
    last_solve_used_rng_ = false;
    RqaoaResult result;

    std::vector<int> identity(static_cast<std::size_t>(g.node_count()));
    for (int i = 0; i < g.node_count(); ++i) identity[static_cast<std::size_t>(i)] = i;

    Sub sub = solve_rec(g, identity, rng, observer, result);
    result.assignment = std::move(sub.spins);
    // Evaluated through cut_value so the value/assignment invariant is exact
    // by the same arithmetic; the banked offsets are equal by the per-step
    // contraction identity.
    result.value = cut_value(g, result.assignment);
    return result;
  }

 private:
  struct Sub {
    double value = 0.0;
    CutAssignment spins;
  };

  const detail::StepAnalysis& analyze(const Graph& g) {
    const std::string key = serialize(g);
    auto it = analysis_cache_.find(key);
    if (it != analysis_cache_.end()) return it->second;
    return analysis_cache_.emplace(key, detail::analyze_step(g)).first->second;
  }

  const MaxCutResult& terminal(const Graph& g) {
    const std::string key = serialize(g);
    auto it = terminal_cache_.find(key);
    if (it != terminal_cache_.end()) return it->second;
    return terminal_cache_.emplace(key, brute_force_maxcut(g)).first->second;
  }

  Sub solve_rec(const Graph& g, const std::vector<int>& orig_ids, Rng& rng,
                const StepObserver& observer, RqaoaResult& result) {
    const std::vector<Component> comps = connected_components(g);
    if (comps.size() > 1) {
      Sub sub;
      sub.spins.assign(static_cast<std::size_t>(g.node_count()), 1);
      for (const Component& c : comps) {
        std::vector<int> ids(c.to_parent.size());
        for (std::size_t i = 0; i < c.to_parent.size(); ++i)
          ids[i] = orig_ids[static_cast<std::size_t>(c.to_parent[i])];
        Sub part = solve_rec(c.graph, ids, rng, observer, result);
        sub.value += part.value;
        for (std::size_t i = 0; i < c.to_parent.size(); ++i)
          sub.spins[static_cast<std::size_t>(c.to_parent[i])] = part.spins[i];
      }
      return sub;
    }

    if (g.node_count() <= n_c_ || g.edge_count() == 0) {
      result.terminal_size = std::max(result.terminal_size, g.node_count());
      const MaxCutResult& mc = terminal(g);
      return Sub{mc.value, mc.assignment};
    }

    const detail::StepAnalysis& an = analyze(g);
    std::size_t pick = an.tie_edges[0];
    if (an.tie_edges.size() > 1) {
      last_solve_used_rng_ = true;
      pick = an.tie_edges[static_cast<std::size_t>(rng.below(an.tie_edges.size()))];
    }
    StepResult st = detail::contract_edge(g, an, pick);

    if (observer) observer(StepView{g, orig_ids, st});

    ContractionRecord rec = st.record;
    rec.iteration = static_cast<int>(result.trace.size());
    rec.edge_u = orig_ids[static_cast<std::size_t>(st.record.edge_u)];
    rec.edge_v = orig_ids[static_cast<std::size_t>(st.record.edge_v)];
    for (std::size_t i = 0; i < rec.node_map.size(); ++i)
      rec.node_map[i] = orig_ids[static_cast<std::size_t>(st.record.node_map[i])];
    result.trace.push_back(std::move(rec));

    std::vector<int> sub_ids(st.record.node_map.size());
    for (std::size_t i = 0; i < st.record.node_map.size(); ++i)
      sub_ids[i] = orig_ids[static_cast<std::size_t>(st.record.node_map[i])];

    Sub inner = solve_rec(st.contracted, sub_ids, rng, observer, result);

    Sub sub;
    sub.value = st.record.offset_delta + inner.value;
    sub.spins.assign(static_cast<std::size_t>(g.node_count()), 1);
    for (std::size_t i = 0; i < st.record.node_map.size(); ++i)
      sub.spins[static_cast<std::size_t>(st.record.node_map[i])] = inner.spins[i];
    sub.spins[static_cast<std::size_t>(st.record.edge_v)] =
        st.record.sigma * sub.spins[static_cast<std::size_t>(st.record.edge_u)];
    return sub;
  }

  int n_c_;
  bool last_solve_used_rng_ = false;
  std::unordered_map<std::string, detail::StepAnalysis> analysis_cache_;
  std::unordered_map<std::string, MaxCutResult> terminal_cache_;
};

// One-shot solve with a fresh engine.
inline RqaoaResult rqaoa_solve(const Graph& g, int n_c, std::uint64_t seed,
                               const StepObserver& observer = {}) {
  RqaoaEngine engine(n_c);
  return engine.solve(g, seed, observer);
}

}  // namespace cutforge
