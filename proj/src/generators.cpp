#include "graphpde/generators.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>
#include <string>

namespace graphpde {

namespace {

std::string vertex_name(int i) { return "v" + std::to_string(i); }

std::vector<bool> boundary_mask(int n, int boundary_count, std::mt19937_64& rng) {
  boundary_count = std::clamp(boundary_count, 1, n);
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
  for (int i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
  std::vector<bool> mask(static_cast<size_t>(n), false);
  for (int i = 0; i < boundary_count; ++i) mask[static_cast<size_t>(order[i])] = true;
  return mask;
}

double random_weight(double wmin, double wmax, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(wmin, wmax);
  return dist(rng);
}

}  // namespace

Graph random_tree(int n, int boundary_count, double wmin, double wmax, std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("random_tree needs at least 2 vertices");
  auto mask = boundary_mask(n, boundary_count, rng);
  GraphBuilder b;
  for (int i = 0; i < n; ++i) b.add_vertex(vertex_name(i), mask[static_cast<size_t>(i)]);
  for (int i = 1; i < n; ++i) {
    int parent = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    b.add_undirected_edge(vertex_name(parent), vertex_name(i), random_weight(wmin, wmax, rng));
  }
  return b.build();
}

Graph lattice_grid(int nx, int ny) {
  if (nx < 3 || ny < 3) throw std::invalid_argument("lattice_grid needs at least 3x3 points");
  GraphBuilder b;
  auto name = [&](int i, int j) { return "g" + std::to_string(i) + "_" + std::to_string(j); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      b.add_vertex(name(i, j), i == 0 || i == nx - 1 || j == 0 || j == ny - 1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (i + 1 < nx) b.add_undirected_edge(name(i, j), name(i + 1, j), 1.0);
      if (j + 1 < ny) b.add_undirected_edge(name(i, j), name(i, j + 1), 1.0);
    }
  }
  return b.build();
}

Graph random_digraph(int n, int extra_edges, int boundary_count, double wmin, double wmax,
                     std::mt19937_64& rng) {
  if (n < 2) throw std::invalid_argument("random_digraph needs at least 2 vertices");
  auto mask = boundary_mask(n, boundary_count, rng);
  GraphBuilder b;
  for (int i = 0; i < n; ++i) b.add_vertex(vertex_name(i), mask[static_cast<size_t>(i)]);
  std::set<std::pair<int, int>> used;
  for (int i = 1; i < n; ++i) {
    int parent = static_cast<int>(rng() % static_cast<std::uint64_t>(i));
    b.add_undirected_edge(vertex_name(parent), vertex_name(i), random_weight(wmin, wmax, rng));
    used.insert({parent, i});
    used.insert({i, parent});
  }
  for (int e = 0; e < extra_edges; ++e) {
    int from = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    int to = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    if (from == to || !used.insert({from, to}).second) continue;
    b.add_edge(vertex_name(from), vertex_name(to), random_weight(wmin, wmax, rng));
  }
  return b.build();
}

VertexField random_boundary_data(const Graph& graph, double lo, double hi,
                                 std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  VertexField g(graph, 0.0);
  for (int b : graph.boundary_vertices()) g[b] = dist(rng);
  return g;
}

std::pair<VertexField, VertexField> ordered_boundary_pair(const Graph& graph, double lo,
                                                          double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::uniform_real_distribution<double> bump(0.0, hi - lo);
  VertexField g1(graph, 0.0), g2(graph, 0.0);
  bool equal_pair = rng() % 4 == 0;
  for (int b : graph.boundary_vertices()) {
    g1[b] = dist(rng);
    g2[b] = equal_pair ? g1[b] : g1[b] + bump(rng);
  }
  return {std::move(g1), std::move(g2)};
}

}  // namespace graphpde
