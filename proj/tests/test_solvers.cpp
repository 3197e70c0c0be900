#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "graphpde/generators.hpp"
#include "graphpde/solvers.hpp"
#include "graphpde/verify.hpp"
#include "test_support.hpp"

using namespace graphpde;
using graphpde::testing::path_graph;
using graphpde::testing::random_field;

namespace {

VertexField boundary_values(const Graph& g, std::map<VertexId, double> values) {
  VertexField f(g, 0.0);
  for (const auto& [id, v] : values) f[g.index_of(id)] = v;
  return f;
}

Graph abc_path() {  // A - B - C, unit weights, boundary {C}
  GraphBuilder b;
  b.add_vertex("A", false).add_vertex("B", false).add_vertex("C", true);
  b.add_undirected_edge("A", "B", 1.0);
  b.add_undirected_edge("B", "C", 1.0);
  return b.build();
}

}  // namespace

TEST_CASE("the fixed-point map averages neighbors for the unit-path laplacian") {
  Graph p = path_graph(5);
  OperatorSpec spec = OperatorSpec::laplacian();
  CHECK(fixed_point_constant_L(spec, p) == 2.0);

  std::mt19937_64 rng(3);
  VertexField u = random_field(p, rng);
  VertexField g = boundary_values(p, {{"v0", 0.0}, {"v4", 1.0}});
  VertexField t = fixed_point_map_T(spec, p, u, g);
  for (int x : p.interior_vertices()) {
    auto ns = p.neighbors(x);
    double avg = (u[ns[0]] + u[ns[1]]) / 2.0;
    CHECK(t[x] == doctest::Approx(avg).epsilon(1e-14));
  }
  CHECK(t[p.index_of("v0")] == 0.0);
  CHECK(t[p.index_of("v4")] == 1.0);
}

TEST_CASE("solutions are fixed points of T") {
  Graph p = path_graph(5);
  VertexField u(p, 0.0), g(p, 0.0);
  for (int i = 0; i < 5; ++i) u[p.index_of("v" + std::to_string(i))] = i / 4.0;
  g[p.index_of("v4")] = 1.0;
  VertexField t = fixed_point_map_T(OperatorSpec::laplacian(), p, u, g);
  for (int v = 0; v < p.vertex_count(); ++v) CHECK(t[v] == u[v]);
}

TEST_CASE("degenerate operator with L = 0") {
  Graph p = path_graph(4);
  OperatorSpec zero = OperatorSpec::laplacian();
  zero.w0 = 0.0;
  VertexField g = boundary_values(p, {{"v0", 2.0}, {"v3", 5.0}});
  CHECK(fixed_point_constant_L(zero, p) == 0.0);
  CHECK_THROWS_AS(fixed_point_map_T(zero, p, g, g), std::domain_error);
  SolveReport r = solve_fixed_point(zero, p, g);
  CHECK(r.converged());  // any extension of g is a solution
  CHECK(r.residual_inf_norm == 0.0);
}

TEST_CASE("fixed-point solve reproduces linear interpolation on the unit path") {
  Graph p = path_graph(5);
  VertexField g = boundary_values(p, {{"v0", 0.0}, {"v4", 1.0}});
  const double expected[5] = {0.0, 0.25, 0.5, 0.75, 1.0};

  for (auto spec : {OperatorSpec::laplacian(), OperatorSpec::inf_laplacian()}) {
    SolveReport r = solve_fixed_point(spec, p, g);
    REQUIRE(r.converged());
    CHECK(r.residual_inf_norm <= 1e-10);
    for (int i = 0; i < 5; ++i)
      CHECK(r.solution[p.index_of("v" + std::to_string(i))] ==
            doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("constant boundary data yields the constant solution") {
  Graph p = path_graph(6);
  VertexField g(p, 3.25);
  for (auto spec : {OperatorSpec::laplacian(), OperatorSpec::one_laplacian(),
                    OperatorSpec::normalized_p(4.0)}) {
    SolveReport r = solve_fixed_point(spec, p, g);
    REQUIRE(r.converged());
    for (int v = 0; v < p.vertex_count(); ++v)
      CHECK(r.solution[v] == doctest::Approx(3.25).epsilon(1e-12));
  }
}

TEST_CASE("gauss-seidel agrees with the fixed-point solver") {
  Graph p = path_graph(5);
  VertexField g = boundary_values(p, {{"v0", 0.0}, {"v4", 1.0}});
  SolveReport fp = solve_fixed_point(OperatorSpec::laplacian(), p, g);
  SolveReport gs = solve_gauss_seidel(OperatorSpec::laplacian(), p, g);
  REQUIRE(fp.converged());
  REQUIRE(gs.converged());
  for (int v = 0; v < p.vertex_count(); ++v)
    CHECK(fp.solution[v] == doctest::Approx(gs.solution[v]).epsilon(1e-9));
}

TEST_CASE("normalized p(2) has the same solutions as the laplacian on a grid") {
  Graph grid = lattice_grid(5, 4);
  std::mt19937_64 rng(9);
  VertexField g = random_boundary_data(grid, -2.0, 2.0, rng);
  SolveReport lap = solve_gauss_seidel(OperatorSpec::laplacian(), grid, g);
  SolveReport p2 = solve_gauss_seidel(OperatorSpec::normalized_p(2.0), grid, g);
  REQUIRE(lap.converged());
  REQUIRE(p2.converged());
  for (int v = 0; v < grid.vertex_count(); ++v)
    CHECK(lap.solution[v] == doctest::Approx(p2.solution[v]).epsilon(1e-8));
}

TEST_CASE("gauss-seidel picks the solution selected by the initial guess") {
  auto inst = counterexample_catalog("median12");
  SolverConfig config;
  config.scheme = SolveScheme::gauss_seidel_local;
  config.initial_constant = 1.0;
  SolveReport plus = solve_gauss_seidel(inst.spec, inst.graph, inst.boundary_data, config);
  config.initial_constant = -1.0;
  SolveReport minus = solve_gauss_seidel(inst.spec, inst.graph, inst.boundary_data, config);
  REQUIRE(plus.converged());
  REQUIRE(minus.converged());
  for (int x : inst.graph.interior_vertices()) {
    CHECK(plus.solution[x] == 1.0);
    CHECK(minus.solution[x] == -1.0);
  }
}

TEST_CASE("gauss-seidel reports a missing scalar root") {
  Graph p = path_graph(4);
  OperatorSpec spec = OperatorSpec::laplacian(2.0);  // Lap u = 2
  spec.w0 = 0.0;                                      // no gradient terms left
  VertexField g(p, 0.0);
  CHECK_THROWS_AS(solve_gauss_seidel(spec, p, g), std::runtime_error);
}

TEST_CASE("eikonal solver returns signed distances on the unit path") {
  Graph g = abc_path();
  VertexField zero(g, 0.0), h(g, 1.0);

  SolveReport minus = solve_eikonal(g, zero, h, EikonalSign::minus);
  REQUIRE(minus.converged());
  CHECK(minus.solution[g.index_of("A")] == 2.0);
  CHECK(minus.solution[g.index_of("B")] == 1.0);
  CHECK(minus.solution[g.index_of("C")] == 0.0);

  SolveReport plus = solve_eikonal(g, zero, h, EikonalSign::plus);
  REQUIRE(plus.converged());
  CHECK(plus.solution[g.index_of("A")] == -2.0);
  CHECK(plus.solution[g.index_of("B")] == -1.0);
  CHECK(plus.solution[g.index_of("C")] == 0.0);
}

TEST_CASE("eikonal boundary reduction honors nonzero data exactly") {
  Graph g = abc_path();
  VertexField bd(g, 0.0), h(g, 1.0);
  bd[g.index_of("C")] = 3.0;
  SolveReport r = solve_eikonal(g, bd, h, EikonalSign::minus);
  REQUIRE(r.converged());
  CHECK(r.solution[g.index_of("A")] == 5.0);
  CHECK(r.solution[g.index_of("B")] == 4.0);
  CHECK(r.solution[g.index_of("C")] == 3.0);
}

TEST_CASE("eikonal solver rejects bad input") {
  Graph g = abc_path();
  VertexField zero(g, 0.0);
  VertexField bad_h(g, 0.0);
  CHECK_THROWS_AS(solve_eikonal(g, zero, bad_h, EikonalSign::minus), std::invalid_argument);

  GraphBuilder b;  // interior vertex that cannot reach the boundary
  b.add_vertex("A", false).add_vertex("B", true);
  b.add_edge("B", "A", 1.0);
  Graph stranded = b.build();
  VertexField z2(stranded, 0.0), h2(stranded, 1.0);
  CHECK_THROWS_AS(solve_eikonal(stranded, z2, h2, EikonalSign::minus), std::invalid_argument);
}

TEST_CASE("eikonal solution equals the signed distance oracle exactly") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    Graph g = random_digraph(6 + int(rng() % 15), 20, 2, 0.1, 10.0, rng);
    VertexField zero(g, 0.0), h(g, 1.0);
    SolveReport minus = solve_eikonal(g, zero, h, EikonalSign::minus);
    SolveReport plus = solve_eikonal(g, zero, h, EikonalSign::plus);
    auto dist = graphpde::testing::boundary_distance_oracle(g);
    for (int v = 0; v < g.vertex_count(); ++v) {
      CHECK(minus.solution[v] == dist[static_cast<size_t>(v)]);
      CHECK(plus.solution[v] == -dist[static_cast<size_t>(v)]);
    }
  }
}

TEST_CASE("infeasibility is detected on the wrong-sign triangle") {
  auto inst = counterexample_catalog("k3");
  SolverConfig config;
  config.max_iterations = 10000;
  SolveReport r = detect_infeasibility(inst.spec, inst.graph, inst.boundary_data, config);
  CHECK(r.status == SolveStatus::infeasible_detected);
  CHECK(r.stagnation_floor >= 0.4);
  CHECK(r.iterations <= 10000);
}

TEST_CASE("detect_infeasibility passes solvable problems through") {
  Graph p = path_graph(5);
  VertexField g = boundary_values(p, {{"v0", 0.0}, {"v4", 1.0}});
  SolveReport r = detect_infeasibility(OperatorSpec::laplacian(), p, g);
  CHECK(r.converged());

  // Correct-sign eikonal on the triangle has the distance solution.
  auto k3 = counterexample_catalog("k3");
  SolveReport ok = detect_infeasibility(OperatorSpec::eikonal_plus(1.0), k3.graph,
                                        k3.boundary_data);
  CHECK(ok.converged());
  CHECK(ok.residual_inf_norm <= 1e-10);
}

TEST_CASE("fixed-point iterates respect the boundary range for homogeneous specs") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 15; ++trial) {
    Graph g = random_tree(5 + int(rng() % 10), 2, 0.5, 2.0, rng);
    VertexField bd = random_boundary_data(g, -3.0, 3.0, rng);
    SolverConfig config;
    config.check_range = true;  // throws if an iterate leaves [min g, max g]
    config.max_iterations = 20000;
    for (auto spec : {OperatorSpec::laplacian(), OperatorSpec::inf_laplacian(),
                      OperatorSpec::normalized_p(3.0)}) {
      SolveReport r = solve_fixed_point(spec, g, bd, config);
      CHECK(r.converged());
    }
  }
}

TEST_CASE("the fixed-point map T is monotone for elliptic homogeneous specs") {
  std::mt19937_64 rng(27);
  Graph g = lattice_grid(4, 4);
  VertexField bd = random_boundary_data(g, -2.0, 2.0, rng);
  for (auto spec : {OperatorSpec::laplacian(), OperatorSpec::one_laplacian(),
                    OperatorSpec::normalized_p(4.0)}) {
    for (int trial = 0; trial < 25; ++trial) {
      VertexField u = random_field(g, rng, -5.0, 5.0);
      VertexField v(g, 0.0);
      for (int i = 0; i < g.vertex_count(); ++i)
        v[i] = u[i] + std::abs(random_field(g, rng)[0]);
      VertexField tu = fixed_point_map_T(spec, g, u, bd);
      VertexField tv = fixed_point_map_T(spec, g, v, bd);
      for (int i = 0; i < g.vertex_count(); ++i) CHECK(tu[i] <= tv[i] + 1e-12);
    }
  }
}

TEST_CASE("converged reports re-verify through evaluate") {
  Graph p = path_graph(6);
  std::mt19937_64 rng(33);
  VertexField g = random_boundary_data(p, -1.0, 4.0, rng);
  SolveReport r = solve_gauss_seidel(OperatorSpec::normalized_p(4.0), p, g);
  REQUIRE(r.converged());
  VertexField residual = evaluate(OperatorSpec::normalized_p(4.0), p, r.solution, g);
  CHECK(interior_residual_inf_norm(residual, p) <= 1e-10);
  CHECK(r.residual_inf_norm == interior_residual_inf_norm(residual, p));
}

TEST_CASE("non-finite boundary data is rejected up front") {
  Graph p = path_graph(4);
  VertexField g(p, 0.0);
  g[p.index_of("v3")] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(solve_fixed_point(OperatorSpec::laplacian(), p, g), std::invalid_argument);
  VertexField h(p, 1.0);
  CHECK_THROWS_AS(solve_eikonal(p, g, h, EikonalSign::minus), std::invalid_argument);
}

TEST_CASE("solver status surfaces instead of silent failure") {
  auto inst = counterexample_catalog("k3");
  SolverConfig config;
  config.max_iterations = 50;
  config.stagnation_window = 100;  // too wide to trigger before the cap
  SolveReport r = solve_fixed_point(inst.spec, inst.graph, inst.boundary_data, config);
  CHECK(r.status == SolveStatus::max_iter);
  CHECK(!r.message.empty());
}

TEST_CASE("solve dispatches on the configured scheme") {
  Graph g = abc_path();
  VertexField bd(g, 0.0);
  SolverConfig config;
  config.scheme = SolveScheme::eikonal_label_setting;
  SolveReport r = solve(OperatorSpec::eikonal_minus(-1.0), g, bd, config);
  REQUIRE(r.converged());
  CHECK(r.solution[g.index_of("A")] == 2.0);
  CHECK_THROWS_AS(solve(OperatorSpec::laplacian(), g, bd, config), std::invalid_argument);
}
