#include "graphpde/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <queue>
#include <stdexcept>

namespace graphpde {

std::string to_string(SolveScheme scheme) {
  switch (scheme) {
    case SolveScheme::fixed_point_T: return "fixed-point";
    case SolveScheme::gauss_seidel_local: return "gauss-seidel";
    case SolveScheme::eikonal_label_setting: return "eikonal";
  }
  return "unknown";
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter: return "max_iter";
    case SolveStatus::stagnated: return "stagnated";
    case SolveStatus::infeasible_detected: return "infeasible_detected";
  }
  return "unknown";
}

namespace {

void check_config(const SolverConfig& config) {
  if (!(config.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!(config.damping > 0 && config.damping <= 1))
    throw std::invalid_argument("damping must lie in (0, 1]");
  if (config.max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
}

std::pair<double, double> boundary_range(const Graph& graph, const VertexField& g) {
  const auto& bvs = graph.boundary_vertices();
  if (bvs.empty()) throw std::invalid_argument("graph has an empty boundary");
  double lo = g[bvs.front()], hi = g[bvs.front()];
  for (int b : bvs) {
    if (!std::isfinite(g[b]))
      throw std::invalid_argument("boundary datum at " + graph.id_of(b) + " is not finite");
    lo = std::min(lo, g[b]);
    hi = std::max(hi, g[b]);
  }
  return {lo, hi};
}

VertexField initial_field(const Graph& graph, const VertexField& g,
                          const SolverConfig& config) {
  auto [lo, hi] = boundary_range(graph, g);
  double fill = config.initial_constant.value_or((lo + hi) / 2.0);
  VertexField u(graph, fill);
  if (config.initial_guess) {
    if (config.initial_guess->size() != graph.vertex_count())
      throw std::invalid_argument("initial guess size does not match graph");
    u = *config.initial_guess;
  }
  for (int b : graph.boundary_vertices()) u[b] = g[b];
  return u;
}

// Shared bookkeeping for iterative schemes: history decimation, stagnation
// across a window, and divergence of the iterates.
class IterationMonitor {
 public:
  IterationMonitor(const SolverConfig& config) : config_(config) {
    window_.reserve(static_cast<size_t>(std::max<long>(config.stagnation_window, 1)));
  }

  void record(SolveReport& report, long iteration, double residual) {
    if (iteration == 0 || config_.history_stride <= 1 ||
        iteration % config_.history_stride == 0)
      report.residual_history.push_back({iteration, residual});
    last_ = {iteration, residual};

    size_t cap = static_cast<size_t>(std::max<long>(config_.stagnation_window, 1));
    if (window_.size() == cap) window_.erase(window_.begin());
    window_.push_back(residual);

    if (!std::isfinite(best_) || residual < best_ - std::max(1e-14, 1e-12 * best_)) {
      best_ = residual;
      since_improvement_ = 0;
    } else {
      ++since_improvement_;
    }
  }

  bool stagnated() const {
    return config_.stagnation_window > 0 && since_improvement_ >= config_.stagnation_window;
  }

  double window_floor() const {
    double floor = window_.empty() ? 0.0 : window_.front();
    for (double r : window_) floor = std::min(floor, r);
    return floor;
  }

  void finalize(SolveReport& report) const {
    if (!report.residual_history.empty() && report.residual_history.back() != last_)
      report.residual_history.push_back(last_);
  }

 private:
  const SolverConfig& config_;
  std::vector<double> window_;
  double best_ = std::numeric_limits<double>::infinity();
  long since_improvement_ = 0;
  std::pair<long, double> last_{0, 0.0};
};

double interior_norm(const Graph& graph, const VertexField& u) {
  double n = 0.0;
  for (int x : graph.interior_vertices()) n = std::max(n, std::abs(u[x]));
  return n;
}

void recheck_residual(const OperatorSpec& spec, const Graph& graph, const VertexField& g,
                      SolveReport& report) {
  VertexField residual = evaluate(spec, graph, report.solution, g);
  report.residual_inf_norm = interior_residual_inf_norm(residual, graph);
}

}  // namespace

double fixed_point_constant_L(const OperatorSpec& spec, const Graph& graph) {
  ResolvedOperator op(spec, graph);
  double L = 0.0;
  for (int x : graph.interior_vertices()) {
    double env = op.homogeneity_envelope(x);
    for (double w : graph.weights(x)) L = std::max(L, env * w);
  }
  return L;
}

VertexField fixed_point_map_T(const OperatorSpec& spec, const Graph& graph,
                              const VertexField& u, const VertexField& g) {
  ResolvedOperator op(spec, graph);
  if (op.depends_on_u())
    throw std::invalid_argument("fixed_point_map_T requires a gradient-form operator");
  double L = fixed_point_constant_L(spec, graph);
  if (L == 0.0)
    throw std::domain_error("degenerate operator: L = 0, any extension of g is a solution");
  VertexField out(graph, 0.0);
  for (int x : graph.interior_vertices())
    out[x] = u[x] + op.interior_residual(graph, u, x) / L;
  for (int b : graph.boundary_vertices()) out[b] = g[b];
  return out;
}

SolveReport solve_fixed_point(const OperatorSpec& spec, const Graph& graph,
                              const VertexField& g, const SolverConfig& config) {
  check_config(config);
  ResolvedOperator op(spec, graph);
  if (op.depends_on_u())
    throw std::invalid_argument("solve_fixed_point requires a gradient-form operator");

  SolveReport report;
  report.solution = initial_field(graph, g, config);
  const auto& interior = graph.interior_vertices();
  auto [lo, hi] = boundary_range(graph, g);
  double range_slack = 1e-12 * (1.0 + std::max(std::abs(lo), std::abs(hi)));

  double L = fixed_point_constant_L(spec, graph);
  if (L == 0.0) {
    // All interior coefficients vanish; the boundary extension either
    // already solves the problem or no iteration can change the residual.
    recheck_residual(spec, graph, g, report);
    report.residual_history.push_back({0, report.residual_inf_norm});
    if (report.residual_inf_norm <= config.tolerance) {
      report.status = SolveStatus::converged;
      report.message = "degenerate operator (L = 0): any extension of g is a solution";
    } else {
      report.status = SolveStatus::stagnated;
      report.stagnation_floor = report.residual_inf_norm;
      report.message = "degenerate operator (L = 0) with nonzero source";
    }
    return report;
  }

  IterationMonitor monitor(config);
  std::vector<double> f(interior.size(), 0.0);
  VertexField& u = report.solution;
  long iteration = 0;
  for (;; ++iteration) {
    double residual = 0.0;
    for (size_t i = 0; i < interior.size(); ++i) {
      f[i] = op.interior_residual(graph, u, interior[i]);
      residual = std::max(residual, std::abs(f[i]));
    }
    monitor.record(report, iteration, residual);
    report.iterations = iteration;
    if (residual <= config.tolerance) {
      report.status = SolveStatus::converged;
      break;
    }
    if (iteration >= config.max_iterations) {
      report.status = SolveStatus::max_iter;
      report.message = "iteration limit reached";
      break;
    }
    if (monitor.stagnated()) {
      report.status = SolveStatus::stagnated;
      report.stagnation_floor = monitor.window_floor();
      report.message = "residual made no progress across the stagnation window";
      break;
    }
    double theta = config.damping;
    for (size_t i = 0; i < interior.size(); ++i) {
      int x = interior[i];
      u[x] += theta * (f[i] / L);
      if (config.check_range && (u[x] < lo - range_slack || u[x] > hi + range_slack))
        throw std::logic_error("fixed-point iterate left [min g, max g] at vertex " +
                               graph.id_of(x));
    }
    if (interior_norm(graph, u) > config.blowup_bound) {
      report.status = SolveStatus::stagnated;
      report.stagnation_floor = monitor.window_floor();
      report.message = "iterates diverged beyond the blowup bound";
      report.iterations = iteration + 1;
      break;
    }
  }
  monitor.finalize(report);
  recheck_residual(spec, graph, g, report);
  return report;
}

namespace {

// Root of the scalar equation F(t) = 0 at vertex x with all neighbor values
// frozen.  F is piecewise linear and nonincreasing in t; the pieces change
// where two gradient entries cross.
double solve_scalar(const ResolvedOperator& op, const Graph& graph, const VertexField& u,
                    int x) {
  if (op.kind() == OperatorKind::trivial) return op.source(x);
  auto ns = graph.neighbors(x);
  auto ws = graph.weights(x);
  const size_t d = ns.size();
  if (d == 0)
    throw std::runtime_error("scalar solve at isolated interior vertex " + graph.id_of(x));

  double slope_budget = op.w0(x) + op.w1(x) + op.wplus(x) + op.wminus(x);
  std::vector<double> grad(d);
  auto F = [&](double t) {
    for (size_t i = 0; i < d; ++i) grad[i] = ws[i] * (u[ns[i]] - t);
    return op.interior_value(x, t, grad);
  };

  if (slope_budget == 0.0) {
    if (op.source(x) == 0.0) return u[x];  // every value solves 0 = 0
    throw std::runtime_error("scalar equation has no root at vertex " + graph.id_of(x) +
                             ": all gradient coefficients vanish");
  }

  std::vector<double> breakpoints;
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = i + 1; j < d; ++j) {
      if (ws[i] == ws[j]) continue;
      double t = (ws[i] * u[ns[i]] - ws[j] * u[ns[j]]) / (ws[i] - ws[j]);
      if (std::isfinite(t)) breakpoints.push_back(t);
    }
  }
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  auto linear_root = [&](double a, double b) {
    double fa = F(a), fb = F(b);
    if (fa == fb) return fa == 0.0 ? a : u[x];
    return a + fa * (b - a) / (fa - fb);
  };

  if (breakpoints.empty()) return linear_root(u[x], u[x] + 1.0);
  if (F(breakpoints.front()) < 0.0)
    return linear_root(breakpoints.front() - 1.0, breakpoints.front());
  if (F(breakpoints.back()) > 0.0)
    return linear_root(breakpoints.back(), breakpoints.back() + 1.0);
  for (size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    double fa = F(breakpoints[k]);
    double fb = F(breakpoints[k + 1]);
    if (fa >= 0.0 && fb <= 0.0) return linear_root(breakpoints[k], breakpoints[k + 1]);
  }
  return breakpoints.back();  // F(front) >= 0 >= F(back): only reachable by rounding ties
}

}  // namespace

SolveReport solve_gauss_seidel(const OperatorSpec& spec, const Graph& graph,
                               const VertexField& g, const SolverConfig& config) {
  check_config(config);
  ResolvedOperator op(spec, graph);
  SolveReport report;
  report.solution = initial_field(graph, g, config);
  const auto& interior = graph.interior_vertices();

  IterationMonitor monitor(config);
  VertexField& u = report.solution;
  long sweep = 0;
  for (;; ++sweep) {
    double residual = 0.0;
    for (int x : interior)
      residual = std::max(residual, std::abs(op.interior_residual(graph, u, x)));
    monitor.record(report, sweep, residual);
    report.iterations = sweep;
    if (residual <= config.tolerance) {
      report.status = SolveStatus::converged;
      break;
    }
    if (sweep >= config.max_iterations) {
      report.status = SolveStatus::max_iter;
      report.message = "sweep limit reached";
      break;
    }
    if (monitor.stagnated()) {
      report.status = SolveStatus::stagnated;
      report.stagnation_floor = monitor.window_floor();
      report.message = "residual made no progress across the stagnation window";
      break;
    }
    for (int x : interior) u[x] = solve_scalar(op, graph, u, x);
    if (interior_norm(graph, u) > config.blowup_bound) {
      report.status = SolveStatus::stagnated;
      report.stagnation_floor = monitor.window_floor();
      report.message = "iterates diverged beyond the blowup bound";
      report.iterations = sweep + 1;
      break;
    }
  }
  monitor.finalize(report);
  recheck_residual(spec, graph, g, report);
  return report;
}

SolveReport solve_eikonal(const Graph& graph, const VertexField& g, const VertexField& h,
                          EikonalSign sign, const SolverConfig& config) {
  check_config(config);
  if (g.size() != graph.vertex_count() || h.size() != graph.vertex_count())
    throw std::invalid_argument("field size does not match graph");
  const auto& bvs = graph.boundary_vertices();
  if (bvs.empty()) throw std::invalid_argument("graph has an empty boundary");
  for (int x : graph.interior_vertices())
    if (!(h[x] > 0.0) || !std::isfinite(h[x]))
      throw std::invalid_argument("eikonal source h must be positive at interior vertex " +
                                  graph.id_of(x));
  for (int b : bvs)
    if (!std::isfinite(g[b]))
      throw std::invalid_argument("boundary datum at " + graph.id_of(b) + " is not finite");
  auto connectivity = graph.connected_to_boundary();
  if (!connectivity.connected)
    throw std::invalid_argument("vertex disconnected from boundary: " +
                                graph.id_of(connectivity.stranded.front()));

  const int n = graph.vertex_count();
  // Work on the minus-sign problem min(grad u) = -h; the plus problem is its
  // negation.  Shift the data so the effective boundary values are >= 0.
  std::vector<double> geff(static_cast<size_t>(n), 0.0);
  for (int b : bvs) geff[static_cast<size_t>(b)] = sign == EikonalSign::plus ? -g[b] : g[b];
  double shift = geff[static_cast<size_t>(bvs.front())];
  for (int b : bvs) shift = std::min(shift, geff[static_cast<size_t>(b)]);

  // Boundary vertices with positive shifted data are replaced by a single
  // edge to a zero-valued auxiliary vertex of matching length; their other
  // out-edges drop so the label stays pinned at the shifted datum.
  int total = n;
  std::vector<int> aux(static_cast<size_t>(n), -1);
  std::vector<double> aux_len(static_cast<size_t>(n), 0.0);
  for (int b : bvs) {
    double gp = geff[static_cast<size_t>(b)] - shift;
    if (gp > 0.0) {
      aux[static_cast<size_t>(b)] = total++;
      aux_len[static_cast<size_t>(b)] = gp;
    }
  }

  // rev[z] holds (x, len) for every auxiliary-graph edge x -> z, so settling
  // z relaxes the tails.  Interior edge lengths are h(x)/w_xz.
  std::vector<std::vector<std::pair<int, double>>> rev(static_cast<size_t>(total));
  for (int x : graph.interior_vertices()) {
    auto ns = graph.neighbors(x);
    auto ws = graph.weights(x);
    for (size_t i = 0; i < ns.size(); ++i)
      rev[static_cast<size_t>(ns[i])].push_back({x, h[x] / ws[i]});
  }
  for (int b : bvs)
    if (aux[static_cast<size_t>(b)] >= 0)
      rev[static_cast<size_t>(aux[static_cast<size_t>(b)])].push_back(
          {b, aux_len[static_cast<size_t>(b)]});

  std::vector<double> dist(static_cast<size_t>(total), kUnreachable);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int b : bvs) {
    int target = aux[static_cast<size_t>(b)] >= 0 ? aux[static_cast<size_t>(b)] : b;
    dist[static_cast<size_t>(target)] = 0.0;
    queue.push({0.0, target});
  }
  long settled = 0;
  while (!queue.empty()) {
    auto [dz, z] = queue.top();
    queue.pop();
    if (dz > dist[static_cast<size_t>(z)]) continue;
    ++settled;
    for (auto [x, len] : rev[static_cast<size_t>(z)]) {
      double nd = dz + len;
      if (nd < dist[static_cast<size_t>(x)]) {
        dist[static_cast<size_t>(x)] = nd;
        queue.push({nd, x});
      }
    }
  }
  for (int x = 0; x < n; ++x)
    if (!std::isfinite(dist[static_cast<size_t>(x)]))
      throw std::runtime_error("no path to boundary from vertex " + graph.id_of(x));

  SolveReport report;
  report.solution = VertexField(graph, 0.0);
  for (int x : graph.interior_vertices()) {
    double value = dist[static_cast<size_t>(x)] + shift;
    report.solution[x] = sign == EikonalSign::plus ? -value : value;
  }
  for (int b : bvs) report.solution[b] = g[b];
  report.iterations = settled;

  std::map<VertexId, double> source_table;
  for (int x = 0; x < n; ++x)
    source_table[graph.id_of(x)] =
        graph.is_boundary(x) ? 0.0 : (sign == EikonalSign::plus ? h[x] : -h[x]);
  OperatorSpec residual_spec = sign == EikonalSign::plus
                                   ? OperatorSpec::eikonal_plus(Coefficient::per_vertex(source_table))
                                   : OperatorSpec::eikonal_minus(Coefficient::per_vertex(source_table));
  recheck_residual(residual_spec, graph, g, report);
  report.residual_history.push_back({0, report.residual_inf_norm});
  report.status = report.residual_inf_norm <= config.tolerance ? SolveStatus::converged
                                                               : SolveStatus::stagnated;
  char buf[128];
  std::snprintf(buf, sizeof buf, "label-setting solve: shift %.17g, %d auxiliary vertices",
                shift, total - n);
  report.message = buf;
  return report;
}

SolveReport detect_infeasibility(const OperatorSpec& spec, const Graph& graph,
                                 const VertexField& g, const SolverConfig& config) {
  SolveReport report = config.scheme == SolveScheme::gauss_seidel_local
                           ? solve_gauss_seidel(spec, graph, g, config)
                           : solve_fixed_point(spec, graph, g, config);
  if (report.status == SolveStatus::stagnated) {
    report.status = SolveStatus::infeasible_detected;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "residual floor %.17g across the stagnation window; likely infeasible "
                  "(diagnostic, not a proof of nonexistence)",
                  report.stagnation_floor);
    report.message = buf;
  }
  return report;
}

SolveReport solve(const OperatorSpec& spec, const Graph& graph, const VertexField& g,
                  const SolverConfig& config) {
  switch (config.scheme) {
    case SolveScheme::fixed_point_T:
      return solve_fixed_point(spec, graph, g, config);
    case SolveScheme::gauss_seidel_local:
      return solve_gauss_seidel(spec, graph, g, config);
    case SolveScheme::eikonal_label_setting: {
      ResolvedOperator op(spec, graph);
      VertexField h(graph, 0.0);
      EikonalSign sign;
      if (spec.kind == OperatorKind::eikonal_plus) {
        sign = EikonalSign::plus;
        for (int x : graph.interior_vertices()) h[x] = op.source(x);
      } else if (spec.kind == OperatorKind::eikonal_minus) {
        sign = EikonalSign::minus;
        for (int x : graph.interior_vertices()) h[x] = -op.source(x);
      } else {
        throw std::invalid_argument(
            "eikonal label-setting applies to eikonal-plus/eikonal-minus operators only");
      }
      return solve_eikonal(graph, g, h, sign, config);
    }
  }
  throw std::invalid_argument("unknown solve scheme");
}

}  // namespace graphpde
