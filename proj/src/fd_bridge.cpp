#include "graphpde/fd_bridge.hpp"

#include <cmath>
#include <stdexcept>

namespace graphpde {

double fit_order(std::span<const ConsistencyRow> rows) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& row : rows) {
    if (!(row.error > 0.0)) continue;  // exact rows carry no order information
    double x = std::log(row.step);
    double y = std::log(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / denom;
}

namespace {

ConsistencyTable make_table(std::vector<ConsistencyRow> rows) {
  ConsistencyTable table;
  table.rows = std::move(rows);
  table.fitted_order = fit_order(table.rows);
  table.exact = true;
  for (const auto& r : table.rows)
    if (r.error != 0.0) table.exact = false;
  return table;
}

}  // namespace

ConsistencyTable second_difference_consistency(const ScalarFn& u, double x0,
                                               double exact_second_derivative,
                                               std::span<const double> steps) {
  std::vector<ConsistencyRow> rows;
  for (double h : steps) {
    if (!(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
    double value = (u(x0 + h) - 2.0 * u(x0) + u(x0 - h)) / (h * h);
    rows.push_back({h, value, std::abs(value - exact_second_derivative)});
  }
  return make_table(std::move(rows));
}

ConsistencyTable abs_gradient_consistency(const ScalarFn& u, double x0, double exact_value,
                                          std::span<const double> steps,
                                          AbsGradientScheme scheme) {
  std::vector<ConsistencyRow> rows;
  for (double h : steps) {
    if (!(h > 0.0)) throw std::invalid_argument("step sizes must be positive");
    double fwd = u(x0 + h) - u(x0);
    double bwd = u(x0 - h) - u(x0);
    double value = scheme == AbsGradientScheme::max_form ? std::max(fwd, bwd) / h
                                                         : std::min(fwd, bwd) / h;
    rows.push_back({h, value, std::abs(value - exact_value)});
  }
  return make_table(std::move(rows));
}

namespace {

double ball_scheme_value(const PlaneFn& u, double cx, double cy, double r, int k) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < k; ++j) {
    double theta = 2.0 * M_PI * j / k;
    double value = u(cx + r * std::cos(theta), cy + r * std::sin(theta));
    lo = std::min(lo, value);
    hi = std::max(hi, value);
  }
  return (lo + hi - 2.0 * u(cx, cy)) / (r * r);
}

}  // namespace

std::vector<BallSchemeRow> inf_laplacian_ball_consistency(const PlaneFn& u, double cx, double cy,
                                                          std::span<const double> radii,
                                                          int directions, double exact_value) {
  if (directions < 2) throw std::invalid_argument("need at least 2 directions");
  double probe = 1e-6 * std::max({1.0, std::abs(cx), std::abs(cy)});
  double gx = (u(cx + probe, cy) - u(cx - probe, cy)) / (2.0 * probe);
  double gy = (u(cx, cy + probe) - u(cx, cy - probe)) / (2.0 * probe);
  if (std::hypot(gx, gy) < 1e-8)
    throw std::domain_error("gradient vanishes at the center; the normalized operator is undefined");

  std::vector<BallSchemeRow> rows;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("radii must be positive");
    double value = ball_scheme_value(u, cx, cy, r, directions);
    double refined = ball_scheme_value(u, cx, cy, r, 2 * directions);
    rows.push_back({r, directions, value, std::abs(value - exact_value),
                    std::abs(value - refined)});
  }
  return rows;
}

double lambda1_scheme(const PlaneFn& u, double cx, double cy, double h, int directions) {
  if (directions < 2) throw std::invalid_argument("need at least 2 directions");
  if (!(h > 0.0)) throw std::invalid_argument("step must be positive");
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < directions; ++j) {
    double theta = M_PI * j / directions;
    double vx = std::cos(theta), vy = std::sin(theta);
    double value =
        (u(cx + h * vx, cy + h * vy) - 2.0 * u(cx, cy) + u(cx - h * vx, cy - h * vy)) / (h * h);
    best = std::min(best, value);
  }
  return best;
}

StencilGrid StencilGrid::line(double x0, double step, int count) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (count < 3) throw std::invalid_argument("a line grid needs at least 3 points");
  StencilGrid grid;
  grid.dimension = 1;
  grid.step = step;
  grid.directions = {{step}};
  double weight = 1.0 / step;
  GraphBuilder b;
  for (int i = 0; i < count; ++i) {
    grid.coordinates.push_back({x0 + i * step});
    b.add_vertex(point_id(grid.coordinates.back()), i == 0 || i == count - 1);
  }
  for (int i = 0; i < count; ++i) {
    if (i + 1 < count) b.add_edge(point_id(grid.coordinates[i]), point_id(grid.coordinates[i + 1]), weight);
    if (i > 0) b.add_edge(point_id(grid.coordinates[i]), point_id(grid.coordinates[i - 1]), weight);
  }
  grid.graph = b.build();
  return grid;
}

StencilGrid StencilGrid::rectangle(double x0, double y0, double step, int nx, int ny) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  if (nx < 3 || ny < 3) throw std::invalid_argument("a rectangle grid needs at least 3x3 points");
  StencilGrid grid;
  grid.dimension = 2;
  grid.step = step;
  grid.directions = {{step, 0.0}, {0.0, step}};
  double weight = 1.0 / step;
  GraphBuilder b;
  auto coord = [&](int i, int j) {
    return std::vector<double>{x0 + i * step, y0 + j * step};
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      grid.coordinates.push_back(coord(i, j));
      bool rim = i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
      b.add_vertex(point_id(grid.coordinates.back()), rim);
    }
  }
  // Neighbor order (+x, -x, +y, -y), matching the signed direction list.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      auto from = point_id(coord(i, j));
      if (i + 1 < nx) b.add_edge(from, point_id(coord(i + 1, j)), weight);
      if (i > 0) b.add_edge(from, point_id(coord(i - 1, j)), weight);
      if (j + 1 < ny) b.add_edge(from, point_id(coord(i, j + 1)), weight);
      if (j > 0) b.add_edge(from, point_id(coord(i, j - 1)), weight);
    }
  }
  grid.graph = b.build();
  return grid;
}

VertexField StencilGrid::sample(const PlaneFn& u) const {
  if (dimension != 2) throw std::invalid_argument("grid is not two-dimensional");
  VertexField f(graph, 0.0);
  for (int v = 0; v < graph.vertex_count(); ++v) f[v] = u(coordinates[v][0], coordinates[v][1]);
  return f;
}

VertexField StencilGrid::sample(const ScalarFn& u) const {
  if (dimension != 1) throw std::invalid_argument("grid is not one-dimensional");
  VertexField f(graph, 0.0);
  for (int v = 0; v < graph.vertex_count(); ++v) f[v] = u(coordinates[v][0]);
  return f;
}

const Graph& grid_to_graph(const StencilGrid& grid) { return grid.graph; }

}  // namespace graphpde
