#pragma once

#include <random>

#include "graphpde/graph.hpp"

namespace graphpde {

/// Random spanning tree on n vertices, expanded to symmetric directed
/// edges with weights in [wmin, wmax]; boundary_count vertices (at least
/// one) are marked boundary.  Always connected to the boundary.
Graph random_tree(int n, int boundary_count, double wmin, double wmax, std::mt19937_64& rng);

/// nx-by-ny four-neighbor lattice with rim boundary and unit weights.
Graph lattice_grid(int nx, int ny);

/// Random tree plus extra random directed edges; stays connected to the
/// boundary by construction.
Graph random_digraph(int n, int extra_edges, int boundary_count, double wmin, double wmax,
                     std::mt19937_64& rng);

/// Uniform boundary data in [lo, hi]; interior entries zero.
VertexField random_boundary_data(const Graph& graph, double lo, double hi,
                                 std::mt19937_64& rng);

/// Pair g1 <= g2 on the boundary (equal with probability 1/4).
std::pair<VertexField, VertexField> ordered_boundary_pair(const Graph& graph, double lo,
                                                          double hi, std::mt19937_64& rng);

}  // namespace graphpde
