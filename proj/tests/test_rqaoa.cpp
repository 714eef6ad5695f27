#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "cutforge/rqaoa.hpp"
#include "helpers.hpp"

using namespace cutforge;
using namespace cutforge::testing;

namespace {

QaoaParams random_params(Rng& rng) {
  return QaoaParams{rng.uniform(kGammaLo, kGammaHi), rng.uniform(kBetaLo, kBetaHi)};
}

Graph random_real_weighted(Rng& rng, int n, double p) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (rng.uniform() < p) edges.push_back(Edge{i, j, rng.uniform(-2.0, 2.0)});
  return Graph(n, std::move(edges));
}

CutAssignment expand_assignment(const ContractionRecord& rec, const CutAssignment& sub, int n) {
  CutAssignment s(static_cast<std::size_t>(n), 1);
  for (std::size_t i = 0; i < rec.node_map.size(); ++i)
    s[static_cast<std::size_t>(rec.node_map[i])] = sub[i];
  s[static_cast<std::size_t>(rec.edge_v)] = rec.sigma * s[static_cast<std::size_t>(rec.edge_u)];
  return s;
}

}  // namespace

TEST_CASE("edge expectation matches the statevector on random instances") {
  Rng rng(101);
  int cases = 0;
  while (cases < 200) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const bool integral = rng.below(2) == 0;
    const Graph g = integral ? random_graph(rng, n, 0.5, false) : random_real_weighted(rng, n, 0.5);
    if (g.edge_count() == 0) continue;
    const QaoaParams p = random_params(rng);
    for (const Edge& e : g.edges()) {
      const double analytic = edge_expectation(g, p, e.u, e.v);
      const double exact = statevector_expectation(g, p, e.u, e.v);
      REQUIRE(analytic == Catch::Approx(exact).margin(1e-9));
      REQUIRE(std::abs(analytic) <= 1.0);
    }
    ++cases;
  }
}

TEST_CASE("edge expectation closed form on a single edge") {
  Rng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    const double w = rng.uniform(-3.0, 3.0);
    if (w == 0.0) continue;
    const Graph g(2, {Edge{0, 1, w}});
    const QaoaParams p = random_params(rng);
    const double expect = std::sin(4.0 * p.beta) * std::sin(p.gamma * w);
    CHECK(edge_expectation(g, p, 0, 1) == Catch::Approx(expect).margin(1e-12));
  }
}

TEST_CASE("edge expectation vanishes at zero angles") {
  const Graph g = petersen_graph();
  for (const Edge& e : g.edges()) {
    CHECK(edge_expectation(g, QaoaParams{0.0, 0.7}, e.u, e.v) == 0.0);
    CHECK(edge_expectation(g, QaoaParams{1.3, 0.0}, e.u, e.v) == 0.0);
  }
  CHECK_THROWS_AS(edge_expectation(g, QaoaParams{}, 0, 2), std::invalid_argument);
}

TEST_CASE("statevector oracle rejects oversized graphs") {
  CHECK_THROWS_AS(statevector_expectation(Graph(13, {Edge{0, 1, 1.0}}), QaoaParams{}, 0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(statevector_expectation(Graph(4), QaoaParams{}, 2, 2), std::invalid_argument);
}

TEST_CASE("optimize_parameters finds the single-edge optimum") {
  const Graph g(2, {Edge{0, 1, 1.0}});
  const OptimizeResult r = optimize_parameters(g);
  CHECK(r.expected_cut == Catch::Approx(1.0).margin(1e-8));
  CHECK(r.params.gamma >= kGammaLo);
  CHECK(r.params.gamma <= kGammaHi);
  CHECK(r.params.beta >= kBetaLo);
  CHECK(r.params.beta <= kBetaHi);
  CHECK_THROWS_AS(optimize_parameters(Graph(3)), std::invalid_argument);
}

TEST_CASE("optimize_parameters reaches the known four-cycle value") {
  const OptimizeResult r = optimize_parameters(cycle_graph(4));
  CHECK(r.expected_cut == Catch::Approx(3.0).margin(1e-6));
}

TEST_CASE("optimized expectation never falls below half the total weight") {
  Rng rng(303);
  for (int rep = 0; rep < 10; ++rep) {
    const Graph g = random_graph(rng, 3 + static_cast<int>(rng.below(7)), 0.6, false);
    if (g.edge_count() == 0) continue;
    double w = 0.0;
    for (const Edge& e : g.edges()) w += e.w;
    const OptimizeResult r = optimize_parameters(g);
    CHECK(r.expected_cut >= w / 2.0 - 1e-12);
    CHECK(r.expected_cut <= brute_force_maxcut(g).value + 1e-9);
  }
}

TEST_CASE("rqaoa_step contracts the four-cycle into a signed triangle") {
  Rng rng(1);
  const StepResult st = rqaoa_step(cycle_graph(4), rng);
  CHECK(st.contracted.node_count() == 3);
  CHECK(st.record.sigma == -1);  // all expectations are -1/2 at the optimum
  CHECK(st.record.expectation == Catch::Approx(-0.5).margin(1e-6));
  CHECK(st.record.offset_delta == 2.0);
  CHECK(st.record.node_map.size() == 3);
  REQUIRE(st.edge_expectations.size() == 4);
  for (double e : st.edge_expectations) CHECK(e == Catch::Approx(-0.5).margin(1e-6));
  // One reattached edge of weight -1, two untouched unit edges.
  double sum = 0.0;
  for (const Edge& e : st.contracted.edges()) sum += e.w;
  CHECK(st.contracted.edge_count() == 3);
  CHECK(sum == 1.0);

  CHECK_THROWS_AS(rqaoa_step(Graph(1), rng), std::invalid_argument);
  CHECK_THROWS_AS(rqaoa_step(Graph(3), rng), std::invalid_argument);
}

TEST_CASE("contraction preserves the cut value for every assignment") {
  Rng rng(55);
  int cases = 0;
  while (cases < 40) {
    const int n = 3 + static_cast<int>(rng.below(6));  // up to 8 nodes
    const Graph g = random_graph(rng, n, 0.6, false);
    if (g.edge_count() == 0) continue;
    Rng step_rng(derive_seed(55, "step", static_cast<std::uint64_t>(cases)));
    const StepResult st = rqaoa_step(g, step_rng);
    const int m = st.contracted.node_count();
    for (std::uint64_t mask = 0; mask < (1ull << m); ++mask) {
      CutAssignment sub(static_cast<std::size_t>(m));
      for (int i = 0; i < m; ++i) sub[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? -1 : 1;
      const CutAssignment s = expand_assignment(st.record, sub, n);
      REQUIRE(cut_value(st.contracted, sub) + st.record.offset_delta == cut_value(g, s));
    }
    ++cases;
  }
}

TEST_CASE("rqaoa_solve returns a consistent optimal-or-below value") {
  Rng rng(77);
  for (int rep = 0; rep < 25; ++rep) {
    const int n = 3 + static_cast<int>(rng.below(10));  // up to 12 nodes
    const Graph g = random_graph(rng, n, 0.5, false);
    const RqaoaResult r = rqaoa_solve(g, 4, derive_seed(77, "solve", static_cast<std::uint64_t>(rep)));
    REQUIRE(static_cast<int>(r.assignment.size()) == n);
    CHECK(r.value == cut_value(g, r.assignment));
    CHECK(r.value <= brute_force_maxcut(g).value);
    CHECK(r.terminal_size <= 4);
  }
}

TEST_CASE("rqaoa_solve recovers the optimum on small even cycles") {
  for (int n : {4, 6}) {
    int hits = 0;
    for (int run = 0; run < 20; ++run) {
      const RqaoaResult r = rqaoa_solve(cycle_graph(n), 2, derive_seed(9, "cycle", static_cast<std::uint64_t>(run)));
      if (r.value == static_cast<double>(n)) ++hits;
    }
    CHECK(hits > 10);  // median over runs is the optimum
  }
}

TEST_CASE("rqaoa_solve is deterministic for a fixed seed") {
  Rng rng(88);
  const Graph g = random_graph(rng, 10, 0.5, false);
  const RqaoaResult a = rqaoa_solve(g, 3, 12345);
  const RqaoaResult b = rqaoa_solve(g, 3, 12345);
  CHECK(a.value == b.value);
  CHECK(a.assignment == b.assignment);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].edge_u == b.trace[i].edge_u);
    CHECK(a.trace[i].edge_v == b.trace[i].edge_v);
    CHECK(a.trace[i].sigma == b.trace[i].sigma);
  }
}

TEST_CASE("rqaoa_solve handles disconnected graphs componentwise") {
  // Two squares sharing no nodes plus an isolated vertex.
  const Graph square = cycle_graph(4);
  std::vector<Edge> edges;
  for (const Edge& e : square.edges()) {
    edges.push_back(e);
    edges.push_back(Edge{e.u + 4, e.v + 4, 1.0});
  }
  const Graph g(9, std::move(edges));
  const RqaoaResult r = rqaoa_solve(g, 3, 7);
  CHECK(r.value == cut_value(g, r.assignment));
  CHECK(r.value <= 8.0);
  CHECK(r.assignment.size() == 9);

  const RqaoaResult empty = rqaoa_solve(Graph(5), 3, 7);
  CHECK(empty.value == 0.0);
  CHECK(empty.trace.empty());
}

TEST_CASE("solve trace uses original node ids and increasing iterations") {
  Rng rng(91);
  const Graph g = random_graph(rng, 12, 0.5, false);
  const RqaoaResult r = rqaoa_solve(g, 4, 321);
  int expected_iter = 0;
  for (const ContractionRecord& rec : r.trace) {
    CHECK(rec.iteration == expected_iter++);
    CHECK(rec.edge_u >= 0);
    CHECK(rec.edge_u < 12);
    CHECK(rec.edge_v >= 0);
    CHECK(rec.edge_v < 12);
    CHECK(rec.edge_u != rec.edge_v);
    for (int id : rec.node_map) {
      CHECK(id >= 0);
      CHECK(id < 12);
    }
    CHECK(std::abs(rec.sigma) == 1);
    CHECK(std::abs(rec.expectation) <= 1.0);
  }
}

TEST_CASE("step observer sees every contraction") {
  Rng rng(92);
  const Graph g = random_graph(rng, 10, 0.6, false);
  int calls = 0;
  const RqaoaResult r = rqaoa_solve(g, 4, 11, [&](const StepView& view) {
    ++calls;
    CHECK(view.graph.node_count() == static_cast<int>(view.orig_ids.size()));
    CHECK(view.step.edge_expectations.size() == view.graph.edges().size());
  });
  CHECK(calls == static_cast<int>(r.trace.size()));
}
