#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace graphpde {

using VertexId = std::string;

/// Distance value meaning "no directed path exists".
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct ValidationIssue {
  enum class Code {
    empty_boundary,
    nonpositive_weight,
    self_loop,
    duplicate_edge,
    isolated_interior_vertex,
  };
  Code code;
  std::string detail;
};

std::string to_string(ValidationIssue::Code code);

class Graph;

/// A real value per vertex, aligned with a graph's vertex indexing.
class VertexField {
 public:
  VertexField() = default;
  VertexField(const Graph& graph, double fill);
  explicit VertexField(int size, double fill = 0.0) : values_(size, fill) {}

  double operator[](int v) const { return values_[static_cast<size_t>(v)]; }
  double& operator[](int v) { return values_[static_cast<size_t>(v)]; }
  int size() const { return static_cast<int>(values_.size()); }
  std::span<const double> values() const { return values_; }

  bool all_finite() const;

  /// Requires the map to cover exactly the graph's vertex set.
  static VertexField from_map(const Graph& graph, const std::map<VertexId, double>& values);
  std::map<VertexId, double> to_map(const Graph& graph) const;

 private:
  std::vector<double> values_;
};

/// Finite weighted directed graph with a designated boundary vertex set and
/// a fixed ordering of each vertex's out-neighbors.  Immutable once built;
/// safe to share across threads.
class Graph {
 public:
  int vertex_count() const { return static_cast<int>(ids_.size()); }
  int edge_count() const;

  const VertexId& id_of(int v) const { return ids_[static_cast<size_t>(v)]; }
  /// Throws std::out_of_range for unknown ids.
  int index_of(const VertexId& id) const;
  std::optional<int> find(const VertexId& id) const;

  bool is_boundary(int v) const { return boundary_[static_cast<size_t>(v)]; }
  const std::vector<int>& boundary_vertices() const { return boundary_list_; }
  const std::vector<int>& interior_vertices() const { return interior_list_; }

  /// Out-neighbors of v in their fixed order, and the matching edge weights.
  std::span<const int> neighbors(int v) const;
  std::span<const double> weights(int v) const;
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }

  /// Per-vertex Dirichlet value carried by the input file, if any.
  std::optional<double> stored_boundary_value(int v) const { return stored_g_[static_cast<size_t>(v)]; }
  /// Boundary data assembled from stored values; throws if any boundary
  /// vertex lacks one.  Interior entries are zero.
  VertexField stored_boundary_data() const;
  bool has_complete_boundary_data() const;

  /// Checks every structural invariant and returns all violations found.
  std::vector<ValidationIssue> validate() const;

  /// 1/w_xy for a neighbor y of x; 0 when y == x.  Throws when y is
  /// neither x nor an out-neighbor of x.
  double directed_distance(int x, int y) const;

  /// Shortest directed path length under edge lengths 1/w; kUnreachable
  /// when no path exists.
  double path_distance(int x, int y) const;

  struct BoundaryConnectivity {
    bool connected;
    std::vector<int> stranded;  // vertices with no directed path to the boundary
  };
  BoundaryConnectivity connected_to_boundary() const;

  /// Copy with each vertex's neighbor order permuted (deterministically by
  /// seed).  Operator values must be invariant under this.
  Graph with_shuffled_neighbors(std::uint64_t seed) const;

 private:
  friend class GraphBuilder;

  std::vector<VertexId> ids_;
  std::map<VertexId, int> index_;
  std::vector<bool> boundary_;
  std::vector<std::optional<double>> stored_g_;
  std::vector<int> boundary_list_;
  std::vector<int> interior_list_;
  // CSR-style adjacency in insertion order.
  std::vector<int> adj_offset_;
  std::vector<int> adj_to_;
  std::vector<double> adj_weight_;
};

/// Accumulates vertices and edges, then freezes them into a Graph.  Permits
/// graphs that violate the model invariants so Graph::validate can report
/// them; only structurally impossible input (unknown endpoints, duplicate
/// vertex ids) throws.
class GraphBuilder {
 public:
  GraphBuilder& add_vertex(VertexId id, bool boundary,
                           std::optional<double> g = std::nullopt);
  GraphBuilder& add_edge(const VertexId& from, const VertexId& to, double weight);
  /// Expands to two directed edges of equal weight.
  GraphBuilder& add_undirected_edge(const VertexId& a, const VertexId& b, double weight);
  Graph build() const;

 private:
  struct RawEdge {
    int from;
    int to;
    double weight;
  };
  std::vector<VertexId> ids_;
  std::map<VertexId, int> index_;
  std::vector<bool> boundary_;
  std::vector<std::optional<double>> g_;
  std::vector<RawEdge> edges_;
};

/// Geometric graph of step vectors: neighbors of x are x +- v_j, the
/// boundary is the set of vertices lacking the full 2l-neighbor set, and
/// weights are 1/||v_j||.  Point coordinates are matched exactly.
/// Throws on a zero direction vector, or (when require_interior) when no
/// vertex has the full neighbor set.
Graph geometric_grid(const std::vector<std::vector<double>>& directions,
                     const std::vector<std::vector<double>>& points,
                     bool require_interior = true);

/// Vertex id used by geometric_grid for a point, e.g. "(1,-2)".
VertexId point_id(const std::vector<double>& point);

}  // namespace graphpde
