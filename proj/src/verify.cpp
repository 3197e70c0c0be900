#include "graphpde/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <queue>
#include <set>
#include <stdexcept>

#include "graphpde/detail/parallel.hpp"

namespace graphpde {

ComparisonWitness max_set_witness(const Graph& graph, const VertexField& u,
                                  const VertexField& v) {
  ComparisonWitness w;
  const int n = graph.vertex_count();
  if (n == 0) return w;
  w.M = u[0] - v[0];
  for (int x = 1; x < n; ++x) w.M = std::max(w.M, u[x] - v[x]);
  for (int x = 0; x < n; ++x)
    if (u[x] - v[x] == w.M) w.W.push_back(x);
  w.C = u[w.W.front()];
  for (int x : w.W) w.C = std::max(w.C, u[x]);
  for (int x : w.W)
    if (u[x] == w.C) w.Z.push_back(x);
  return w;
}

ComparisonResult comparison_check(const OperatorSpec& spec, const Graph& graph,
                                  const VertexField& g, const VertexField& u,
                                  const VertexField& v, double tol, double hypothesis_tol) {
  VertexField fu = evaluate(spec, graph, u, g);
  VertexField fv = evaluate(spec, graph, v, g);
  for (int x = 0; x < graph.vertex_count(); ++x) {
    if (fu[x] < fv[x] - hypothesis_tol) {
      ComparisonResult r;
      r.outcome = ComparisonOutcome::hypothesis_not_satisfied;
      r.hypothesis_vertex = x;
      r.message = "F(u) < F(v) at vertex " + graph.id_of(x) +
                  "; the comparison hypothesis does not hold";
      return r;
    }
  }
  // On the boundary the hypothesis g - u >= g - v already forces u <= v.
  for (int b : graph.boundary_vertices()) {
    if (u[b] > v[b] + hypothesis_tol + tol) {
      ComparisonResult r;
      r.outcome = ComparisonOutcome::hypothesis_not_satisfied;
      r.hypothesis_vertex = b;
      r.message = "boundary ordering u <= v failed at " + graph.id_of(b) +
                  " despite the residual ordering";
      return r;
    }
  }

  ComparisonResult r;
  std::optional<int> violator;
  for (int x = 0; x < graph.vertex_count() && !violator; ++x)
    if (u[x] > v[x] + tol) violator = x;
  if (!violator) {
    r.outcome = ComparisonOutcome::pass;
    r.message = "u <= v everywhere";
    return r;
  }
  r.outcome = ComparisonOutcome::fail;
  r.witness = max_set_witness(graph, u, v);
  r.witness->violating_vertex = *violator;
  char buf[128];
  std::snprintf(buf, sizeof buf, "comparison fails: max(u - v) = %.17g at %zu vertices",
                r.witness->M, r.witness->W.size());
  r.message = buf;
  return r;
}

std::vector<int> active_neighbors(const Graph& graph, const VertexField& u, int x) {
  GradientVector grad = gradient(graph, u, x);
  double mx = grad[0];
  for (double v : grad) mx = std::max(mx, v);
  std::vector<int> out;
  auto ns = graph.neighbors(x);
  for (size_t i = 0; i < grad.size(); ++i)
    if (grad[i] == mx) out.push_back(ns[i]);
  return out;
}

PropagationTrace propagate_max(const OperatorSpec& spec, const Graph& graph,
                               const VertexField& u, const VertexField& v,
                               double hypothesis_tol) {
  ResolvedOperator op(spec, graph);
  if (op.depends_on_u())
    throw std::invalid_argument("propagate_max requires a gradient-form operator");
  for (int x : graph.interior_vertices())
    if (!(op.wplus(x) > 0.0))
      throw std::invalid_argument(
          "propagate_max requires wplus > 0 on interior vertices (vertex " + graph.id_of(x) +
          ")");
  for (int x : graph.interior_vertices()) {
    double fu = op.interior_residual(graph, u, x);
    double fv = op.interior_residual(graph, v, x);
    if (fu < fv - hypothesis_tol)
      throw std::invalid_argument("propagate_max requires F(u) >= F(v) on interior vertices");
  }

  PropagationTrace trace;
  trace.witness = max_set_witness(graph, u, v);
  if (!(trace.witness.M > 0.0))
    throw std::invalid_argument("propagate_max requires max(u - v) > 0");

  std::set<int> w_set(trace.witness.W.begin(), trace.witness.W.end());
  for (int start : trace.witness.W) {
    if (graph.is_boundary(start)) continue;
    std::vector<int> chain;
    std::set<int> visited{start};
    std::queue<int> queue;
    queue.push(start);
    while (!queue.empty()) {
      int y = queue.front();
      queue.pop();
      chain.push_back(y);
      if (graph.is_boundary(y)) continue;  // chain reached the boundary
      for (int z : active_neighbors(graph, u, y)) {
        if (!w_set.count(z)) {
          trace.lemma_violated = true;
          trace.violation_edge = {y, z};
          trace.chains.push_back(chain);
          return trace;
        }
        if (visited.insert(z).second) queue.push(z);
      }
    }
    trace.chains.push_back(std::move(chain));
  }
  return trace;
}

HarnackReport harnack_check(const OperatorSpec& spec, const Graph& graph, const VertexField& u,
                            double residual_tol, double eps_strict) {
  ResolvedOperator op(spec, graph);
  if (op.depends_on_u())
    throw std::invalid_argument("harnack_check requires a gradient-form operator");
  for (int x : graph.interior_vertices())
    if (!(op.wplus(x) > 0.0 && op.wminus(x) > 0.0))
      throw std::invalid_argument(
          "harnack_check requires the p-harmonious form wplus, wminus > 0 (vertex " +
          graph.id_of(x) + ")");

  HarnackReport report;
  for (int x : graph.interior_vertices()) {
    double residual = op.interior_residual(graph, u, x);
    if (std::abs(residual) > residual_tol) {
      report.residual_failures.push_back(x);
      report.passed = false;
      continue;
    }
    GradientVector grad = gradient(graph, u, x);
    double mx = grad[0], mn = grad[0], amax = 0.0;
    for (double e : grad) {
      mx = std::max(mx, e);
      mn = std::min(mn, e);
      amax = std::max(amax, std::abs(e));
    }
    HarnackOutcome outcome;
    if (amax <= eps_strict)
      outcome = HarnackOutcome::zero_branch;
    else if (mn < -eps_strict && mx > eps_strict)
      outcome = HarnackOutcome::strict_branch;
    else if (mx < -eps_strict || mn > eps_strict)
      outcome = HarnackOutcome::violation;  // gradient strictly one-signed
    else
      outcome = HarnackOutcome::indeterminate;
    if (outcome == HarnackOutcome::violation) {
      ++report.violations;
      report.passed = false;
    }
    if (outcome == HarnackOutcome::indeterminate) ++report.indeterminate;
    report.per_vertex.push_back({x, outcome, mn, mx});
  }
  return report;
}

namespace {

CounterexampleInstance make_k3() {
  GraphBuilder b;
  b.add_vertex("A", false);
  b.add_vertex("B", false);
  b.add_vertex("C", true, 0.0);
  b.add_undirected_edge("A", "B", 1.0);
  b.add_undirected_edge("B", "C", 1.0);
  b.add_undirected_edge("C", "A", 1.0);
  CounterexampleInstance inst;
  inst.name = "k3";
  inst.graph = b.build();
  inst.spec = OperatorSpec::eikonal_plus(-1.0);  // max(grad u) = -1
  inst.boundary_data = inst.graph.stored_boundary_data();
  inst.expected_outcome = "infeasible_detected";
  return inst;
}

CounterexampleInstance make_median12() {
  GraphBuilder b;
  const int coords[4] = {-2, -1, 1, 2};
  for (int i : coords) {
    for (int j : coords) {
      if (std::abs(i) + std::abs(j) > 3) continue;
      bool boundary = std::abs(i) + std::abs(j) == 3;
      std::optional<double> g;
      if (boundary) g = std::abs(i) == 2 ? 1.0 : -1.0;
      b.add_vertex(point_id({double(i), double(j)}), boundary, g);
    }
  }
  auto id = [](int i, int j) { return point_id({double(i), double(j)}); };
  // Each interior vertex (i, j), |i| = |j| = 1, has four axis-parallel
  // neighbors: two boundary arms and two interior vertices.
  for (int i : {-1, 1}) {
    for (int j : {-1, 1}) {
      b.add_undirected_edge(id(i, j), id(2 * i, j), 1.0);
      b.add_undirected_edge(id(i, j), id(i, 2 * j), 1.0);
    }
  }
  b.add_undirected_edge(id(-1, -1), id(-1, 1), 1.0);
  b.add_undirected_edge(id(-1, -1), id(1, -1), 1.0);
  b.add_undirected_edge(id(1, 1), id(-1, 1), 1.0);
  b.add_undirected_edge(id(1, 1), id(1, -1), 1.0);

  CounterexampleInstance inst;
  inst.name = "median12";
  inst.graph = b.build();
  inst.spec = OperatorSpec::one_laplacian();
  inst.boundary_data = inst.graph.stored_boundary_data();
  for (double value : {1.0, -1.0}) {
    VertexField u(inst.graph, value);
    for (int bv : inst.graph.boundary_vertices()) u[bv] = inst.boundary_data[bv];
    inst.known_solutions.push_back(std::move(u));
  }
  inst.expected_outcome = "two distinct zero-residual solutions";
  return inst;
}

}  // namespace

CounterexampleInstance counterexample_catalog(const std::string& name) {
  if (name == "k3" || name == "k3_nonexistence") return make_k3();
  if (name == "median12" || name == "median_nonuniqueness") return make_median12();
  throw std::invalid_argument("unknown counterexample: " + name +
                              " (known: k3, median12)");
}

FuzzResult comparison_fuzz(const OperatorSpec& spec, const GraphFamily& family, long trials,
                           std::uint64_t seed, const SolverConfig& config, int threads) {
  FuzzResult result;
  result.trials = trials;

  std::mutex mutex;
  long clean_graphs = 0;
  std::optional<std::pair<long, FuzzViolation>> first;

  detail::parallel_for(trials, threads, [&](long t) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ static_cast<std::uint64_t>(0x1000 + t)));
    Graph graph = family(rng);
    auto connectivity = graph.connected_to_boundary();
    if (!connectivity.connected)
      throw std::invalid_argument("graph family produced a graph not connected to the boundary");

    EllipticityReport cls = classify_ellipticity(spec, graph, 300, seed ^ (7919u * (t + 1)));
    bool theorem = !cls.uniformly_elliptic.violation_found || !cls.proper.violation_found;

    std::uniform_real_distribution<double> gdist(-5.0, 5.0);
    std::uniform_real_distribution<double> bump(0.0, 5.0);
    VertexField g1(graph, 0.0), g2(graph, 0.0);
    bool equal_pair = rng() % 4 == 0;
    for (int b : graph.boundary_vertices()) {
      g1[b] = gdist(rng);
      g2[b] = equal_pair ? g1[b] : g1[b] + bump(rng);
    }
    SolveReport r1 = solve(spec, graph, g1, config);
    SolveReport r2 = solve(spec, graph, g2, config);

    std::lock_guard<std::mutex> lock(mutex);
    if (theorem) ++clean_graphs;
    if (!r1.converged() || !r2.converged()) {
      ++result.solver_failures;
      return;
    }
    if (!theorem) return;  // informational run, no assertion
    for (int x = 0; x < graph.vertex_count(); ++x) {
      if (r1.solution[x] > r2.solution[x] + 2.0 * config.tolerance) {
        ++result.violations;
        if (!first || t < first->first)
          first = {t, FuzzViolation{t, graph, g1, g2, r1.solution, r2.solution, x}};
        break;
      }
    }
  });

  result.theorem_applies = clean_graphs == trials;
  if (first) result.first_violation = std::move(first->second);
  char buf[160];
  if (result.theorem_applies) {
    std::snprintf(buf, sizeof buf,
                  "classified uniformly elliptic or proper on all %ld sampled graphs; "
                  "solution ordering asserted", trials);
  } else {
    std::snprintf(buf, sizeof buf,
                  "no theorem applies on %ld of %ld sampled graphs; those runs informational",
                  trials - clean_graphs, trials);
  }
  result.label = buf;
  return result;
}

}  // namespace graphpde
