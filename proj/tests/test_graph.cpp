#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "graphpde/generators.hpp"
#include "graphpde/graph.hpp"
#include "test_support.hpp"

using namespace graphpde;
using graphpde::testing::path_graph;

namespace {

bool has_issue(const std::vector<ValidationIssue>& issues, ValidationIssue::Code code) {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.code == code; });
}

// Independent oracle: minimum over all simple directed paths of the summed
// edge lengths 1/w, accumulated front to back.
double brute_force_distance(const Graph& g, int from, int to) {
  double best = kUnreachable;
  std::vector<bool> visited(static_cast<size_t>(g.vertex_count()), false);
  auto dfs = [&](auto&& self, int v, double acc) -> void {
    if (v == to) {
      best = std::min(best, acc);
      return;
    }
    visited[static_cast<size_t>(v)] = true;
    auto ns = g.neighbors(v);
    auto ws = g.weights(v);
    for (size_t i = 0; i < ns.size(); ++i)
      if (!visited[static_cast<size_t>(ns[i])]) self(self, ns[i], acc + 1.0 / ws[i]);
    visited[static_cast<size_t>(v)] = false;
  };
  dfs(dfs, from, 0.0);
  return best;
}

}  // namespace

TEST_CASE("validate accepts a boundary-terminated path") {
  Graph g = path_graph(3);
  CHECK(g.validate().empty());
}

TEST_CASE("validate reports every violated invariant") {
  GraphBuilder b;
  b.add_vertex("A", false).add_vertex("B", false);
  b.add_edge("A", "B", 0.0);   // nonpositive weight
  b.add_edge("A", "A", 1.0);   // self loop
  b.add_edge("A", "B", 2.0);   // duplicate ordered pair
  Graph g = b.build();         // also: empty boundary, B isolated interior
  auto issues = g.validate();
  CHECK(has_issue(issues, ValidationIssue::Code::empty_boundary));
  CHECK(has_issue(issues, ValidationIssue::Code::nonpositive_weight));
  CHECK(has_issue(issues, ValidationIssue::Code::self_loop));
  CHECK(has_issue(issues, ValidationIssue::Code::duplicate_edge));
  CHECK(has_issue(issues, ValidationIssue::Code::isolated_interior_vertex));
}

TEST_CASE("directed distance is the reciprocal weight") {
  GraphBuilder b;
  b.add_vertex("x", false).add_vertex("y", true).add_vertex("z", true);
  b.add_edge("x", "y", 2.0);
  b.add_edge("x", "z", 1.0);
  Graph g = b.build();
  CHECK(g.directed_distance(g.index_of("x"), g.index_of("y")) == 0.5);
  CHECK(g.directed_distance(g.index_of("x"), g.index_of("z")) == 1.0);
  CHECK(g.directed_distance(g.index_of("x"), g.index_of("x")) == 0.0);
  CHECK_THROWS_AS(g.directed_distance(g.index_of("y"), g.index_of("z")), std::invalid_argument);
}

TEST_CASE("path distance on a unit path and a weighted triangle") {
  Graph p = path_graph(3);
  CHECK(p.path_distance(p.index_of("v0"), p.index_of("v2")) == 2.0);

  // A->B->C beats the direct A->C edge: 1 + 1 < 1/0.4 = 2.5.
  GraphBuilder b;
  b.add_vertex("A", false).add_vertex("B", false).add_vertex("C", true);
  b.add_edge("A", "B", 1.0).add_edge("B", "C", 1.0).add_edge("A", "C", 0.4);
  Graph t = b.build();
  CHECK(t.path_distance(t.index_of("A"), t.index_of("C")) == 2.0);
}

TEST_CASE("disconnected pairs have infinite distance") {
  GraphBuilder b;
  b.add_vertex("A", false).add_vertex("B", true);
  b.add_edge("B", "A", 1.0);  // only the reverse direction exists
  Graph g = b.build();
  CHECK(g.path_distance(g.index_of("A"), g.index_of("B")) == kUnreachable);
  CHECK(g.path_distance(g.index_of("B"), g.index_of("A")) == 1.0);
}

TEST_CASE("path distance matches brute-force path enumeration") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    int n = 3 + static_cast<int>(rng() % 6);  // at most 8 vertices
    Graph g = random_digraph(n, n, 1 + static_cast<int>(rng() % 2), 0.1, 10.0, rng);
    for (int x = 0; x < g.vertex_count(); ++x)
      for (int y = 0; y < g.vertex_count(); ++y)
        CHECK(g.path_distance(x, y) == brute_force_distance(g, x, y));
  }
}

TEST_CASE("path distance satisfies the triangle inequality") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 25; ++trial) {
    int n = 4 + static_cast<int>(rng() % 9);  // at most 12 vertices
    Graph g = random_digraph(n, 2 * n, 2, 0.1, 10.0, rng);
    for (int x = 0; x < n; ++x) {
      for (int y = 0; y < n; ++y) {
        for (int z = 0; z < n; ++z) {
          double dxz = g.path_distance(x, z);
          double dxy = g.path_distance(x, y);
          double dyz = g.path_distance(y, z);
          if (std::isinf(dxy) || std::isinf(dyz)) continue;
          CHECK(dxz <= dxy + dyz + 1e-12 * (1.0 + dxy + dyz));
        }
      }
    }
  }
}

TEST_CASE("connected_to_boundary finds stranded vertices") {
  Graph p = path_graph(3, /*both_ends_boundary=*/false);
  CHECK(p.connected_to_boundary().connected);

  GraphBuilder b;  // two components, boundary only in one
  b.add_vertex("A", false).add_vertex("B", true).add_vertex("C", false).add_vertex("D", false);
  b.add_undirected_edge("A", "B", 1.0);
  b.add_undirected_edge("C", "D", 1.0);
  Graph g = b.build();
  auto conn = g.connected_to_boundary();
  CHECK(!conn.connected);
  CHECK(conn.stranded.size() == 2);

  GraphBuilder s;  // single interior vertex with an edge into the boundary
  s.add_vertex("in", false).add_vertex("out", true);
  s.add_edge("in", "out", 1.0);
  CHECK(s.build().connected_to_boundary().connected);
}

TEST_CASE("geometric grid on the 3x3 integer lattice") {
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) points.push_back({double(i), double(j)});
  Graph g = geometric_grid({{1.0, 0.0}, {0.0, 1.0}}, points);
  CHECK(g.vertex_count() == 9);
  CHECK(g.interior_vertices().size() == 1);
  CHECK(g.boundary_vertices().size() == 8);
  int center = g.index_of("(1,1)");
  CHECK(!g.is_boundary(center));
  CHECK(g.degree(center) == 4);
  for (int v = 0; v < g.vertex_count(); ++v)
    for (double w : g.weights(v)) CHECK(w == 1.0);
  CHECK(g.validate().empty());
}

TEST_CASE("geometric grid with a stretched direction") {
  Graph g = geometric_grid({{2.0}}, {{0.0}, {2.0}, {4.0}});
  CHECK(g.boundary_vertices().size() == 2);
  CHECK(g.is_boundary(g.index_of("(0)")));
  CHECK(g.is_boundary(g.index_of("(4)")));
  CHECK(!g.is_boundary(g.index_of("(2)")));
  for (int v = 0; v < g.vertex_count(); ++v)
    for (double w : g.weights(v)) CHECK(w == 0.5);
}

TEST_CASE("geometric grid rejects bad input") {
  CHECK_THROWS_AS(geometric_grid({{0.0, 0.0}}, {{0.0, 0.0}}), std::invalid_argument);
  std::vector<std::vector<double>> square = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  CHECK_THROWS_AS(geometric_grid({{1.0, 0.0}, {0.0, 1.0}}, square), std::invalid_argument);
  CHECK_NOTHROW(geometric_grid({{1.0, 0.0}, {0.0, 1.0}}, square, /*require_interior=*/false));
}

TEST_CASE("geometric grids of several shapes validate with 2l interior neighbors") {
  std::vector<std::vector<double>> points;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) points.push_back({double(i), double(j)});
  Graph g = geometric_grid({{1.0, 0.0}, {0.0, 1.0}}, points);
  CHECK(g.validate().empty());
  for (int v : g.interior_vertices()) CHECK(g.degree(v) == 4);
}

TEST_CASE("vertex fields map to and from id keyed tables") {
  Graph g = path_graph(3);
  std::map<VertexId, double> table{{"v0", 1.0}, {"v1", -2.5}, {"v2", 0.25}};
  VertexField f = VertexField::from_map(g, table);
  CHECK(f[g.index_of("v1")] == -2.5);
  CHECK(f.to_map(g) == table);
  table.erase("v2");
  CHECK_THROWS_AS(VertexField::from_map(g, table), std::invalid_argument);
}

TEST_CASE("neighbor shuffling preserves the edge multiset") {
  std::mt19937_64 rng(11);
  Graph g = random_digraph(9, 12, 2, 0.5, 2.0, rng);
  Graph shuffled = g.with_shuffled_neighbors(99);
  REQUIRE(shuffled.vertex_count() == g.vertex_count());
  for (int v = 0; v < g.vertex_count(); ++v) {
    std::multiset<std::pair<int, double>> a, b;
    for (size_t i = 0; i < g.neighbors(v).size(); ++i)
      a.insert({g.neighbors(v)[i], g.weights(v)[i]});
    for (size_t i = 0; i < shuffled.neighbors(v).size(); ++i)
      b.insert({shuffled.neighbors(v)[i], shuffled.weights(v)[i]});
    CHECK(a == b);
  }
}
