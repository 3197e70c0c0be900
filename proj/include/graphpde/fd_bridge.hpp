#pragma once

#include <functional>
#include <span>
#include <vector>

#include "graphpde/graph.hpp"

namespace graphpde {

using ScalarFn = std::function<double(double)>;
using PlaneFn = std::function<double(double, double)>;

struct ConsistencyRow {
  double step;
  double scheme_value;
  double error;
};

struct ConsistencyTable {
  std::vector<ConsistencyRow> rows;
  double fitted_order;  // least-squares slope of log error vs log step; NaN if underdetermined
  bool exact;           // every error is exactly zero
};

/// Least-squares slope of log(error) against log(step), skipping zero-error
/// rows.  Needs at least two usable rows, else NaN.
double fit_order(std::span<const ConsistencyRow> rows);

/// (u(x+h) - 2u(x) + u(x-h)) / h^2 against the caller's exact u''(x0).
ConsistencyTable second_difference_consistency(const ScalarFn& u, double x0,
                                               double exact_second_derivative,
                                               std::span<const double> steps);

enum class AbsGradientScheme { max_form, min_form };

/// Upwind schemes (1/h) max(u(x+h)-u(x), u(x-h)-u(x)) for |u_x| and the min
/// form for -|u_x|, against the caller's exact value at x0.
ConsistencyTable abs_gradient_consistency(const ScalarFn& u, double x0, double exact_value,
                                          std::span<const double> steps,
                                          AbsGradientScheme scheme = AbsGradientScheme::max_form);

struct BallSchemeRow {
  double radius;
  int directions;
  double scheme_value;
  double error;
  double angular_refinement_delta;  // |value(k) - value(2k)|, the directional-resolution part
};

/// Normalized infinity-Laplacian ball scheme
///   (min_{dB_r} u + max_{dB_r} u - 2 u(c)) / r^2
/// with the sphere sampled at k equally spaced angles, against the caller's
/// exact <D^2u grad u, grad u>/|grad u|^2.  Throws when the gradient at the
/// center is numerically zero (the normalized operator is undefined there).
std::vector<BallSchemeRow> inf_laplacian_ball_consistency(const PlaneFn& u, double cx, double cy,
                                                          std::span<const double> radii,
                                                          int directions, double exact_value);

/// min over k sampled unit directions v of the second difference
/// (u(x+hv) - 2u(x) + u(x-hv)) / h^2; the directions are angles j*pi/k, so
/// the x axis is always sampled and the y axis whenever k is even.
double lambda1_scheme(const PlaneFn& u, double cx, double cy, double h, int directions);

/// A regular convex geometric graph realizing a finite-difference stencil,
/// with the coordinate of every vertex.  Weights are 1/step, so graph
/// gradient entries are first difference quotients; second-order stencils
/// differ from graph operators by one explicit factor of 1/step.
struct StencilGrid {
  int dimension = 1;
  double step = 1.0;
  std::vector<std::vector<double>> directions;   // the step vectors v_j
  std::vector<std::vector<double>> coordinates;  // per vertex index
  Graph graph;

  static StencilGrid line(double x0, double step, int count);
  /// nx-by-ny lattice with the 5-point direction set.
  static StencilGrid rectangle(double x0, double y0, double step, int nx, int ny);

  const std::vector<double>& point(int vertex) const {
    return coordinates[static_cast<size_t>(vertex)];
  }
  /// Vertex field sampling a function on the grid coordinates.
  VertexField sample(const PlaneFn& u) const;
  VertexField sample(const ScalarFn& u) const;
};

const Graph& grid_to_graph(const StencilGrid& grid);

}  // namespace graphpde
