#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "graphpde/operators.hpp"

namespace graphpde {

enum class SolveScheme { fixed_point_T, gauss_seidel_local, eikonal_label_setting };
enum class SolveStatus { converged, max_iter, stagnated, infeasible_detected };

std::string to_string(SolveScheme scheme);
std::string to_string(SolveStatus status);

struct SolverConfig {
  double tolerance = 1e-10;            // residual inf-norm over interior vertices
  long max_iterations = 1000000;
  double damping = 1.0;                // theta in (0, 1]
  long stagnation_window = 1000;       // iterations without residual improvement
  SolveScheme scheme = SolveScheme::fixed_point_T;
  std::optional<double> initial_constant;    // default: (min g + max g) / 2
  std::optional<VertexField> initial_guess;  // warm start; interior entries used
  long history_stride = 100;
  bool check_range = false;   // assert iterates stay in [min g, max g] (homogeneous specs)
  double blowup_bound = 1e15;
};

struct SolveReport {
  VertexField solution;
  double residual_inf_norm = 0.0;
  long iterations = 0;
  SolveStatus status = SolveStatus::max_iter;
  std::vector<std::pair<long, double>> residual_history;  // decimated (iteration, residual)
  double stagnation_floor = 0.0;  // min residual across the final window, when stagnated
  std::string message;
  bool converged() const { return status == SolveStatus::converged; }
};

/// Constant L = max over interior x and neighbors y of env(x) * w_xy, where
/// env is the spec's homogeneity envelope.  Zero signals the degenerate
/// all-zero operator.
double fixed_point_constant_L(const OperatorSpec& spec, const Graph& graph);

/// One application of the map T:
///   T(u)(x) = u(x) + (1/L) f(x, grad u(x))  on interior vertices,
///   T(u)(x) = g(x)                          on the boundary.
/// For a source-free spec, min over N(x) of u <= T(u)(x) <= max over N(x)
/// of u at every interior x.  Throws std::domain_error when L = 0.
VertexField fixed_point_map_T(const OperatorSpec& spec, const Graph& graph,
                              const VertexField& u, const VertexField& g);

/// Damped Picard iteration u <- (1-theta) u + theta T(u).  Statuses other
/// than converged are reported, never silently dropped.
SolveReport solve_fixed_point(const OperatorSpec& spec, const Graph& graph,
                              const VertexField& g, const SolverConfig& config = {});

/// Sweeps interior vertices in insertion order, exactly solving the scalar
/// equation F(u)(x) = 0 at each visit (piecewise-linear root find).
SolveReport solve_gauss_seidel(const OperatorSpec& spec, const Graph& graph,
                               const VertexField& g, const SolverConfig& config = {});

enum class EikonalSign { plus, minus };

/// Solves max(grad u) = h (plus) or min(grad u) = -h (minus) with Dirichlet
/// data g, for h > 0 on interior vertices, by label-setting shortest
/// distances on the shifted, boundary-augmented, h-rescaled graph.  The
/// returned field is exact on the boundary and solves the interior
/// equation to rounding error.
SolveReport solve_eikonal(const Graph& graph, const VertexField& g, const VertexField& h,
                          EikonalSign sign, const SolverConfig& config = {});

/// Runs the configured solver and diagnoses persistent residual stagnation
/// as likely infeasibility.  A diagnostic, not a proof of nonexistence.
SolveReport detect_infeasibility(const OperatorSpec& spec, const Graph& graph,
                                 const VertexField& g, const SolverConfig& config = {});

/// Dispatch on config.scheme (eikonal_label_setting requires an eikonal
/// kind whose source supplies h).
SolveReport solve(const OperatorSpec& spec, const Graph& graph, const VertexField& g,
                  const SolverConfig& config = {});

}  // namespace graphpde
