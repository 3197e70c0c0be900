#include "graphpde/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace graphpde {

std::string to_string(ValidationIssue::Code code) {
  switch (code) {
    case ValidationIssue::Code::empty_boundary: return "empty boundary";
    case ValidationIssue::Code::nonpositive_weight: return "nonpositive weight";
    case ValidationIssue::Code::self_loop: return "self loop";
    case ValidationIssue::Code::duplicate_edge: return "duplicate edge";
    case ValidationIssue::Code::isolated_interior_vertex: return "isolated interior vertex";
  }
  return "unknown";
}

VertexField::VertexField(const Graph& graph, double fill)
    : values_(static_cast<size_t>(graph.vertex_count()), fill) {}

bool VertexField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

VertexField VertexField::from_map(const Graph& graph,
                                  const std::map<VertexId, double>& values) {
  if (static_cast<int>(values.size()) != graph.vertex_count())
    throw std::invalid_argument("field must cover exactly the vertex set");
  VertexField f(graph, 0.0);
  for (const auto& [id, value] : values) f[graph.index_of(id)] = value;
  return f;
}

std::map<VertexId, double> VertexField::to_map(const Graph& graph) const {
  std::map<VertexId, double> out;
  for (int v = 0; v < size(); ++v) out[graph.id_of(v)] = values_[static_cast<size_t>(v)];
  return out;
}

int Graph::edge_count() const { return static_cast<int>(adj_to_.size()); }

int Graph::index_of(const VertexId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown vertex id: " + id);
  return it->second;
}

std::optional<int> Graph::find(const VertexId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::span<const int> Graph::neighbors(int v) const {
  size_t b = static_cast<size_t>(adj_offset_[static_cast<size_t>(v)]);
  size_t e = static_cast<size_t>(adj_offset_[static_cast<size_t>(v) + 1]);
  return {adj_to_.data() + b, e - b};
}

std::span<const double> Graph::weights(int v) const {
  size_t b = static_cast<size_t>(adj_offset_[static_cast<size_t>(v)]);
  size_t e = static_cast<size_t>(adj_offset_[static_cast<size_t>(v) + 1]);
  return {adj_weight_.data() + b, e - b};
}

VertexField Graph::stored_boundary_data() const {
  VertexField g(*this, 0.0);
  for (int v : boundary_list_) {
    if (!stored_g_[static_cast<size_t>(v)])
      throw std::invalid_argument("boundary vertex " + id_of(v) + " has no stored g value");
    g[v] = *stored_g_[static_cast<size_t>(v)];
  }
  return g;
}

bool Graph::has_complete_boundary_data() const {
  return std::all_of(boundary_list_.begin(), boundary_list_.end(),
                     [&](int v) { return stored_g_[static_cast<size_t>(v)].has_value(); });
}

std::vector<ValidationIssue> Graph::validate() const {
  std::vector<ValidationIssue> issues;
  if (boundary_list_.empty())
    issues.push_back({ValidationIssue::Code::empty_boundary, "boundary set is empty"});
  std::set<std::pair<int, int>> seen;
  for (int v = 0; v < vertex_count(); ++v) {
    auto ns = neighbors(v);
    auto ws = weights(v);
    for (size_t i = 0; i < ns.size(); ++i) {
      if (!(ws[i] > 0.0) || !std::isfinite(ws[i]))
        issues.push_back({ValidationIssue::Code::nonpositive_weight,
                          "edge " + id_of(v) + " -> " + id_of(ns[i]) + " has weight " +
                              std::to_string(ws[i])});
      if (ns[i] == v)
        issues.push_back({ValidationIssue::Code::self_loop, "self loop at " + id_of(v)});
      if (!seen.insert({v, ns[i]}).second)
        issues.push_back({ValidationIssue::Code::duplicate_edge,
                          "duplicate edge " + id_of(v) + " -> " + id_of(ns[i])});
    }
  }
  for (int v : interior_list_) {
    if (degree(v) < 1)
      issues.push_back({ValidationIssue::Code::isolated_interior_vertex,
                        "interior vertex " + id_of(v) + " has no out-neighbors"});
  }
  return issues;
}

double Graph::directed_distance(int x, int y) const {
  if (x == y) return 0.0;
  auto ns = neighbors(x);
  auto ws = weights(x);
  for (size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == y) return 1.0 / ws[i];
  }
  throw std::invalid_argument(id_of(y) + " is not a neighbor of " + id_of(x));
}

double Graph::path_distance(int x, int y) const {
  const double inf = kUnreachable;
  std::vector<double> dist(static_cast<size_t>(vertex_count()), inf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<size_t>(x)] = 0.0;
  queue.push({0.0, x});
  while (!queue.empty()) {
    auto [d, v] = queue.top();
    queue.pop();
    if (d > dist[static_cast<size_t>(v)]) continue;
    if (v == y) return d;
    auto ns = neighbors(v);
    auto ws = weights(v);
    for (size_t i = 0; i < ns.size(); ++i) {
      double nd = d + 1.0 / ws[i];
      if (nd < dist[static_cast<size_t>(ns[i])]) {
        dist[static_cast<size_t>(ns[i])] = nd;
        queue.push({nd, ns[i]});
      }
    }
  }
  return dist[static_cast<size_t>(y)];
}

Graph::BoundaryConnectivity Graph::connected_to_boundary() const {
  // Reverse reachability from the boundary set.
  std::vector<std::vector<int>> rev(static_cast<size_t>(vertex_count()));
  for (int v = 0; v < vertex_count(); ++v)
    for (int n : neighbors(v)) rev[static_cast<size_t>(n)].push_back(v);
  std::vector<bool> reached(static_cast<size_t>(vertex_count()), false);
  std::queue<int> queue;
  for (int b : boundary_list_) {
    reached[static_cast<size_t>(b)] = true;
    queue.push(b);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop();
    for (int p : rev[static_cast<size_t>(v)]) {
      if (!reached[static_cast<size_t>(p)]) {
        reached[static_cast<size_t>(p)] = true;
        queue.push(p);
      }
    }
  }
  BoundaryConnectivity out;
  for (int v = 0; v < vertex_count(); ++v)
    if (!reached[static_cast<size_t>(v)]) out.stranded.push_back(v);
  out.connected = out.stranded.empty();
  return out;
}

Graph Graph::with_shuffled_neighbors(std::uint64_t seed) const {
  Graph copy = *this;
  std::mt19937_64 rng(seed);
  for (int v = 0; v < vertex_count(); ++v) {
    size_t b = static_cast<size_t>(adj_offset_[static_cast<size_t>(v)]);
    size_t e = static_cast<size_t>(adj_offset_[static_cast<size_t>(v) + 1]);
    for (size_t i = e; i > b + 1; --i) {
      size_t j = b + rng() % (i - b);
      std::swap(copy.adj_to_[i - 1], copy.adj_to_[j]);
      std::swap(copy.adj_weight_[i - 1], copy.adj_weight_[j]);
    }
  }
  return copy;
}

GraphBuilder& GraphBuilder::add_vertex(VertexId id, bool boundary,
                                       std::optional<double> g) {
  if (index_.count(id)) throw std::invalid_argument("duplicate vertex id: " + id);
  index_[id] = static_cast<int>(ids_.size());
  ids_.push_back(std::move(id));
  boundary_.push_back(boundary);
  g_.push_back(g);
  return *this;
}

GraphBuilder& GraphBuilder::add_edge(const VertexId& from, const VertexId& to,
                                     double weight) {
  auto fi = index_.find(from);
  auto ti = index_.find(to);
  if (fi == index_.end()) throw std::invalid_argument("edge references unknown vertex: " + from);
  if (ti == index_.end()) throw std::invalid_argument("edge references unknown vertex: " + to);
  edges_.push_back({fi->second, ti->second, weight});
  return *this;
}

GraphBuilder& GraphBuilder::add_undirected_edge(const VertexId& a, const VertexId& b,
                                                double weight) {
  add_edge(a, b, weight);
  add_edge(b, a, weight);
  return *this;
}

Graph GraphBuilder::build() const {
  Graph g;
  g.ids_ = ids_;
  g.index_ = index_;
  g.boundary_ = boundary_;
  g.stored_g_ = g_;
  for (int v = 0; v < static_cast<int>(ids_.size()); ++v) {
    if (boundary_[static_cast<size_t>(v)])
      g.boundary_list_.push_back(v);
    else
      g.interior_list_.push_back(v);
  }
  // Bucket edges by source, preserving insertion order within each vertex.
  std::vector<int> counts(ids_.size() + 1, 0);
  for (const RawEdge& e : edges_) counts[static_cast<size_t>(e.from) + 1]++;
  g.adj_offset_.assign(ids_.size() + 1, 0);
  for (size_t v = 1; v <= ids_.size(); ++v)
    g.adj_offset_[v] = g.adj_offset_[v - 1] + counts[v];
  g.adj_to_.resize(edges_.size());
  g.adj_weight_.resize(edges_.size());
  std::vector<int> cursor(g.adj_offset_.begin(), g.adj_offset_.end() - 1);
  for (const RawEdge& e : edges_) {
    int slot = cursor[static_cast<size_t>(e.from)]++;
    g.adj_to_[static_cast<size_t>(slot)] = e.to;
    g.adj_weight_[static_cast<size_t>(slot)] = e.weight;
  }
  return g;
}

VertexId point_id(const std::vector<double>& point) {
  std::string id = "(";
  char buf[40];
  for (size_t i = 0; i < point.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", point[i]);
    if (i) id += ",";
    id += buf;
  }
  id += ")";
  return id;
}

Graph geometric_grid(const std::vector<std::vector<double>>& directions,
                     const std::vector<std::vector<double>>& points,
                     bool require_interior) {
  if (directions.empty()) throw std::invalid_argument("no direction vectors");
  const size_t dim = directions.front().size();
  std::vector<double> norms;
  for (const auto& v : directions) {
    if (v.size() != dim) throw std::invalid_argument("direction dimension mismatch");
    double n2 = 0.0;
    for (double c : v) n2 += c * c;
    if (n2 == 0.0) throw std::invalid_argument("zero direction vector");
    norms.push_back(std::sqrt(n2));
  }

  std::map<std::vector<double>, int> point_index;
  for (size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != dim) throw std::invalid_argument("point dimension mismatch");
    if (!point_index.insert({points[i], static_cast<int>(i)}).second)
      throw std::invalid_argument("duplicate point");
  }

  // Signed step list (v1, -v1, v2, -v2, ...); a vertex is interior iff every
  // step lands on a point of the set.
  std::vector<std::vector<double>> steps;
  std::vector<double> step_norm;
  for (size_t j = 0; j < directions.size(); ++j) {
    steps.push_back(directions[j]);
    step_norm.push_back(norms[j]);
    std::vector<double> neg(dim);
    for (size_t c = 0; c < dim; ++c) neg[c] = -directions[j][c];
    steps.push_back(neg);
    step_norm.push_back(norms[j]);
  }

  auto neighbor_of = [&](const std::vector<double>& p, const std::vector<double>& s) {
    std::vector<double> q(dim);
    for (size_t c = 0; c < dim; ++c) q[c] = p[c] + s[c];
    auto it = point_index.find(q);
    return it == point_index.end() ? -1 : it->second;
  };

  std::vector<bool> interior(points.size(), true);
  for (size_t i = 0; i < points.size(); ++i) {
    for (const auto& s : steps) {
      if (neighbor_of(points[i], s) < 0) {
        interior[i] = false;
        break;
      }
    }
  }
  if (require_interior && std::none_of(interior.begin(), interior.end(), [](bool b) { return b; }))
    throw std::invalid_argument("no interior vertex: every point lacks a full neighbor set");

  GraphBuilder builder;
  for (size_t i = 0; i < points.size(); ++i)
    builder.add_vertex(point_id(points[i]), !interior[i]);
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t k = 0; k < steps.size(); ++k) {
      int n = neighbor_of(points[i], steps[k]);
      if (n >= 0)
        builder.add_edge(point_id(points[i]), point_id(points[static_cast<size_t>(n)]),
                         1.0 / step_norm[k]);
    }
  }
  return builder.build();
}

}  // namespace graphpde
