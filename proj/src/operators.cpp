#include "graphpde/operators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <random>
#include <stdexcept>

#include "graphpde/detail/parallel.hpp"

namespace graphpde {

namespace {

void require_interior(const Graph& graph, int x, const char* op) {
  if (graph.is_boundary(x))
    throw std::invalid_argument(std::string(op) + ": " + graph.id_of(x) +
                                " is a boundary vertex");
  if (graph.degree(x) == 0)
    throw std::invalid_argument(std::string(op) + ": interior vertex " + graph.id_of(x) +
                                " has no out-neighbors");
}

double max_entry(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::max(m, x);
  return m;
}

double min_entry(std::span<const double> v) {
  double m = v[0];
  for (double x : v) m = std::min(m, x);
  return m;
}

double sum_entries(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

GradientVector gradient(const Graph& graph, const VertexField& u, int x) {
  require_interior(graph, x, "gradient");
  auto ns = graph.neighbors(x);
  auto ws = graph.weights(x);
  GradientVector g(ns.size());
  for (size_t i = 0; i < ns.size(); ++i) g[i] = ws[i] * (u[ns[i]] - u[x]);
  return g;
}

double laplacian(const Graph& graph, const VertexField& u, int x) {
  return sum_entries(gradient(graph, u, x));
}

double eikonal_plus(const Graph& graph, const VertexField& u, int x) {
  return max_entry(gradient(graph, u, x));
}

double eikonal_minus(const Graph& graph, const VertexField& u, int x) {
  return min_entry(gradient(graph, u, x));
}

double inf_laplacian(const Graph& graph, const VertexField& u, int x) {
  GradientVector g = gradient(graph, u, x);
  return (max_entry(g) + min_entry(g)) / 2.0;
}

double one_laplacian(const Graph& graph, const VertexField& u, int x) {
  return median_of(gradient(graph, u, x));
}

double median_of(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty list");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string kind_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::laplacian: return "laplacian";
    case OperatorKind::eikonal_plus: return "eikonal-plus";
    case OperatorKind::eikonal_minus: return "eikonal-minus";
    case OperatorKind::inf_laplacian: return "inf-laplacian";
    case OperatorKind::one_laplacian: return "one-laplacian";
    case OperatorKind::p_harmonious: return "p-harmonious";
    case OperatorKind::normalized_p: return "normalized-p";
    case OperatorKind::positive_eikonal: return "positive-eikonal";
    case OperatorKind::trivial: return "trivial";
  }
  return "unknown";
}

OperatorKind kind_from_name(const std::string& name) {
  std::string n = name;
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "laplacian") return OperatorKind::laplacian;
  if (n == "eikonal-plus") return OperatorKind::eikonal_plus;
  if (n == "eikonal-minus") return OperatorKind::eikonal_minus;
  if (n == "inf-laplacian") return OperatorKind::inf_laplacian;
  if (n == "one-laplacian") return OperatorKind::one_laplacian;
  if (n == "p-harmonious") return OperatorKind::p_harmonious;
  if (n == "normalized-p") return OperatorKind::normalized_p;
  if (n == "positive-eikonal") return OperatorKind::positive_eikonal;
  if (n == "trivial") return OperatorKind::trivial;
  throw std::invalid_argument("unknown operator kind: " + name);
}

Coefficient Coefficient::per_vertex(std::map<VertexId, double> table) {
  Coefficient c;
  c.table_ = std::move(table);
  return c;
}

std::vector<double> Coefficient::resolve(const Graph& graph) const {
  std::vector<double> out(static_cast<size_t>(graph.vertex_count()), constant_);
  if (table_) {
    std::fill(out.begin(), out.end(), 0.0);
    for (const auto& [id, value] : *table_) out[static_cast<size_t>(graph.index_of(id))] = value;
  }
  return out;
}

OperatorSpec OperatorSpec::laplacian(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::laplacian;
  s.w0 = 1.0;
  s.source = std::move(source);
  s.homogeneous_part = HomogeneousPart::laplacian_part;
  return s;
}

OperatorSpec OperatorSpec::eikonal_plus(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::eikonal_plus;
  s.wplus = 1.0;
  s.source = std::move(source);
  return s;
}

OperatorSpec OperatorSpec::eikonal_minus(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::eikonal_minus;
  s.wminus = 1.0;
  s.source = std::move(source);
  return s;
}

OperatorSpec OperatorSpec::inf_laplacian(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::inf_laplacian;
  s.wplus = 0.5;
  s.wminus = 0.5;
  s.source = std::move(source);
  return s;
}

OperatorSpec OperatorSpec::one_laplacian(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::one_laplacian;
  s.w1 = 1.0;
  s.source = std::move(source);
  s.homogeneous_part = HomogeneousPart::median_part;
  return s;
}

OperatorSpec OperatorSpec::p_harmonious(Coefficient w0, Coefficient w1, Coefficient wplus,
                                        Coefficient wminus, Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::p_harmonious;
  bool has_w0 = !(w0.is_constant() && w0.constant() == 0.0);
  bool has_w1 = !(w1.is_constant() && w1.constant() == 0.0);
  s.w0 = std::move(w0);
  s.w1 = std::move(w1);
  s.wplus = std::move(wplus);
  s.wminus = std::move(wminus);
  s.source = std::move(source);
  if (has_w0 && has_w1)
    s.homogeneous_part = HomogeneousPart::custom;
  else if (has_w0)
    s.homogeneous_part = HomogeneousPart::laplacian_part;
  else if (has_w1)
    s.homogeneous_part = HomogeneousPart::median_part;
  else
    s.homogeneous_part = HomogeneousPart::none;
  return s;
}

OperatorSpec OperatorSpec::normalized_p(double p) {
  if (!(p >= 1.0))
    throw std::invalid_argument("normalized_p requires 1 <= p <= infinity");
  OperatorSpec s;
  s.kind = OperatorKind::normalized_p;
  s.p = p;
  if (std::isinf(p)) {
    s.w1 = 0.0;
    s.wplus = 0.5;
    s.wminus = 0.5;
  } else {
    // 1/p + 1/q = 1, coefficients 1/p and 1/(2q) = (p - 1)/(2p).
    s.w1 = 1.0 / p;
    double half_inv_q = (p - 1.0) / (2.0 * p);
    s.wplus = half_inv_q;
    s.wminus = half_inv_q;
  }
  s.homogeneous_part = HomogeneousPart::median_part;
  return s;
}

OperatorSpec OperatorSpec::positive_eikonal(Coefficient wplus, Coefficient source,
                                            Coefficient w0, Coefficient w1,
                                            Coefficient wminus) {
  OperatorSpec s;
  s.kind = OperatorKind::positive_eikonal;
  bool has_w0 = !(w0.is_constant() && w0.constant() == 0.0);
  bool has_w1 = !(w1.is_constant() && w1.constant() == 0.0);
  s.wplus = std::move(wplus);
  s.w0 = std::move(w0);
  s.w1 = std::move(w1);
  s.wminus = std::move(wminus);
  s.source = std::move(source);
  s.homogeneous_part = (has_w0 || has_w1) ? HomogeneousPart::custom : HomogeneousPart::none;
  return s;
}

OperatorSpec OperatorSpec::trivial(Coefficient source) {
  OperatorSpec s;
  s.kind = OperatorKind::trivial;
  s.source = std::move(source);
  return s;
}

ResolvedOperator::ResolvedOperator(const OperatorSpec& spec, const Graph& graph)
    : spec_(spec), graph_(&graph) {
  w0_ = spec.w0.resolve(graph);
  w1_ = spec.w1.resolve(graph);
  wplus_ = spec.wplus.resolve(graph);
  wminus_ = spec.wminus.resolve(graph);
  source_ = spec.source.resolve(graph);

  auto fail = [&](const std::string& what, int x) {
    throw std::invalid_argument("operator spec invalid at vertex " + graph.id_of(x) + ": " + what);
  };
  for (int x = 0; x < graph.vertex_count(); ++x) {
    for (const auto* f : {&w0_, &w1_, &wplus_, &wminus_, &source_})
      if (!std::isfinite((*f)[static_cast<size_t>(x)])) fail("non-finite coefficient", x);
  }
  if (spec.kind == OperatorKind::trivial) return;
  for (int x : graph.interior_vertices()) {
    if (w0(x) < 0 || w1(x) < 0 || wplus(x) < 0 || wminus(x) < 0)
      fail("negative coefficient", x);
    if (spec.kind == OperatorKind::p_harmonious && !(wplus(x) > 0 && wminus(x) > 0))
      fail("p-harmonious requires wplus > 0 and wminus > 0", x);
    if (spec.kind == OperatorKind::positive_eikonal && !(wplus(x) > 0 && source(x) > 0))
      fail("positive-eikonal requires wplus > 0 and source > 0", x);
  }
  if (spec.kind == OperatorKind::normalized_p) {
    if (!(spec.p >= 1.0)) throw std::invalid_argument("normalized_p requires 1 <= p <= infinity");
    OperatorSpec expect = OperatorSpec::normalized_p(spec.p);
    if (spec.w1.constant() != expect.w1.constant() ||
        spec.wplus.constant() != expect.wplus.constant() ||
        spec.wminus.constant() != expect.wminus.constant() ||
        !(spec.w0.is_constant() && spec.w0.constant() == 0.0))
      throw std::invalid_argument("normalized_p coefficients must satisfy w1 = 1/p, "
                                  "wplus = wminus = 1/(2q), w0 = 0");
  }
}

double ResolvedOperator::interior_value(int x, double r, std::span<const double> grad) const {
  if (spec_.kind == OperatorKind::trivial) return source(x) - r;
  if (grad.empty())
    throw std::invalid_argument("interior vertex " + graph_->id_of(x) + " has empty gradient");
  double value = 0.0;
  double a0 = w0(x), a1 = w1(x), ap = wplus(x), am = wminus(x);
  if (a0 != 0.0) value += a0 * sum_entries(grad);
  if (a1 != 0.0) value += a1 * median_of(grad);
  if (ap != 0.0) value += ap * max_entry(grad);
  if (am != 0.0) value += am * min_entry(grad);
  return value - source(x);
}

double ResolvedOperator::interior_residual(const Graph& graph, const VertexField& u,
                                           int x) const {
  GradientVector g = gradient(graph, u, x);
  return interior_value(x, u[x], g);
}

double ResolvedOperator::homogeneity_envelope(int x) const {
  if (spec_.kind == OperatorKind::trivial)
    throw std::invalid_argument("trivial equation has no homogeneity envelope");
  return w0(x) * graph_->degree(x) + w1(x) + wplus(x) + wminus(x);
}

VertexField evaluate(const OperatorSpec& spec, const Graph& graph, const VertexField& u,
                     const VertexField& g) {
  if (u.size() != graph.vertex_count() || g.size() != graph.vertex_count())
    throw std::invalid_argument("field size does not match graph");
  ResolvedOperator op(spec, graph);
  VertexField residual(graph, 0.0);
  for (int x : graph.interior_vertices()) residual[x] = op.interior_residual(graph, u, x);
  for (int x : graph.boundary_vertices()) residual[x] = g[x] - u[x];
  return residual;
}

VertexField evaluate(const OperatorSpec& spec, const Graph& graph, const VertexField& u) {
  return evaluate(spec, graph, u, graph.stored_boundary_data());
}

double interior_residual_inf_norm(const VertexField& residual, const Graph& graph) {
  double norm = 0.0;
  for (int x : graph.interior_vertices()) norm = std::max(norm, std::abs(residual[x]));
  return norm;
}

HomogeneityReport homogeneity_check(const OperatorSpec& spec, const Graph& graph, long trials,
                                    std::uint64_t seed,
                                    const std::optional<Coefficient>& envelope_override,
                                    double sample_range) {
  ResolvedOperator op(spec, graph);
  std::vector<double> env;
  if (envelope_override) {
    env = envelope_override->resolve(graph);
  } else {
    env.resize(static_cast<size_t>(graph.vertex_count()), 0.0);
    for (int x : graph.interior_vertices())
      env[static_cast<size_t>(x)] = op.homogeneity_envelope(x);
  }

  HomogeneityReport report;
  auto check = [&](int x, const std::vector<double>& p) -> bool {
    double value = op.interior_value(x, 0.0, p);
    double lo = env[static_cast<size_t>(x)] * min_entry(p);
    double hi = env[static_cast<size_t>(x)] * max_entry(p);
    ++report.trials;
    if (value < lo || value > hi) {
      report.passed = false;
      report.witness = HomogeneityWitness{x, p, value, lo, hi};
      return false;
    }
    return true;
  };

  // Canonical probes first: constant vectors, the zero vector, basis bumps.
  for (int x : graph.interior_vertices()) {
    size_t d = static_cast<size_t>(graph.degree(x));
    if (d == 0) continue;
    std::vector<std::vector<double>> probes = {
        std::vector<double>(d, 0.0), std::vector<double>(d, 1.0), std::vector<double>(d, -1.0)};
    for (size_t i = 0; i < d; ++i) {
      std::vector<double> e(d, 0.0);
      e[i] = 1.0;
      probes.push_back(e);
      e[i] = -1.0;
      probes.push_back(std::move(e));
    }
    for (const auto& p : probes)
      if (!check(x, p)) return report;
  }

  std::mt19937_64 rng(detail::splitmix64(seed));
  std::uniform_real_distribution<double> uni(-sample_range, sample_range);
  for (long t = 0; t < trials; ++t) {
    for (int x : graph.interior_vertices()) {
      std::vector<double> p(static_cast<size_t>(graph.degree(x)));
      for (double& c : p) c = uni(rng);
      if (!check(x, p)) return report;
    }
  }
  return report;
}

namespace {

struct PairSample {
  double r, s;
  std::vector<double> p, q;
};

// q drawn freely; p = q minus nonnegative offsets so p <= q holds by
// construction, with deliberate mass on p == q and single-component gaps.
PairSample draw_pair(std::mt19937_64& rng, size_t d, double range) {
  std::uniform_real_distribution<double> uni(-range, range);
  std::uniform_real_distribution<double> gap(0.0, range);
  PairSample s;
  s.q.resize(d);
  for (double& c : s.q) c = uni(rng);
  s.p = s.q;
  switch (rng() % 4) {
    case 0: break;  // p == q
    case 1: s.p[rng() % d] -= gap(rng); break;
    case 2:
      for (double& c : s.p)
        if (rng() % 2) c -= gap(rng);
      break;
    default:
      for (double& c : s.p) c -= gap(rng);
      break;
  }
  s.s = uni(rng);
  switch (rng() % 3) {
    case 0: s.r = s.s; break;
    case 1: s.r = s.s + gap(rng); break;
    default: s.r = s.s + 1e-6; break;
  }
  return s;
}

}  // namespace

std::string EllipticityReport::summary() const {
  auto line = [](const char* name, const PropertyCheck& c) {
    char buf[256];
    if (!c.violation_found) {
      std::snprintf(buf, sizeof buf, "%s: no violation found in %ld trials\n", name, c.trials);
    } else if (c.witness) {
      std::snprintf(buf, sizeof buf,
                    "%s: violated (vertex index %d, r=%.6g, s=%.6g, f(r,p)=%.6g, f(s,q)=%.6g)\n",
                    name, c.witness->vertex, c.witness->r, c.witness->s, c.witness->f_rp,
                    c.witness->f_sq);
    } else {
      std::snprintf(buf, sizeof buf, "%s: violated\n", name);
    }
    return std::string(buf);
  };
  return line("elliptic", elliptic) + line("proper", proper) +
         line("uniformly elliptic", uniformly_elliptic) +
         line("weak combined (r>s, p<q)", weak_combined);
}

EllipticityReport classify_ellipticity(const OperatorSpec& spec, const Graph& graph, long trials,
                                       std::uint64_t seed, double sample_range, int threads) {
  ResolvedOperator op(spec, graph);
  const auto& interior = graph.interior_vertices();
  EllipticityReport report;
  report.trials = trials;
  report.seed = seed;
  if (interior.empty()) return report;

  std::mutex mutex;
  std::atomic<long> ell_trials{0}, prop_trials{0}, unif_trials{0}, weak_trials{0};

  struct Violation {
    long order;
    EllipticitySample sample;
  };
  std::optional<Violation> first_ell, first_prop, first_unif, first_weak;

  auto consider = [&](std::optional<Violation>& slot, long order, int x,
                      const PairSample& s, double f_rp, double f_sq) {
    std::lock_guard<std::mutex> lock(mutex);
    if (!slot || order < slot->order)
      slot = Violation{order, EllipticitySample{x, s.r, s.s, s.p, s.q, f_rp, f_sq}};
  };

  auto run_sample = [&](long order, int x, const PairSample& s) {
    bool p_eq_q = s.p == s.q;
    bool p_strict = !p_eq_q;  // p <= q holds by construction
    bool r_strict = s.r > s.s;
    double f_rp = op.interior_value(x, s.r, s.p);
    double f_sq = op.interior_value(x, s.s, s.q);
    ell_trials.fetch_add(1, std::memory_order_relaxed);
    if (f_rp > f_sq) consider(first_ell, order, x, s, f_rp, f_sq);
    if (r_strict) {
      prop_trials.fetch_add(1, std::memory_order_relaxed);
      if (!(f_rp < f_sq)) consider(first_prop, order, x, s, f_rp, f_sq);
    }
    if (p_strict) {
      unif_trials.fetch_add(1, std::memory_order_relaxed);
      if (!(f_rp < f_sq)) consider(first_unif, order, x, s, f_rp, f_sq);
    }
    if (r_strict && p_strict) {
      weak_trials.fetch_add(1, std::memory_order_relaxed);
      if (!(f_rp < f_sq)) consider(first_weak, order, x, s, f_rp, f_sq);
    }
  };

  // Deterministic probes: equal pairs under r > s, and single-component
  // bumps that leave the extreme/median entries alone.
  long order = 0;
  for (int x : interior) {
    size_t d = static_cast<size_t>(graph.degree(x));
    if (d == 0) continue;
    std::vector<double> base(d);
    for (size_t i = 0; i < d; ++i) base[i] = static_cast<double>(i);
    PairSample equal{1.0, 0.0, base, base};
    run_sample(order++, x, equal);
    for (size_t i = 0; i < d; ++i) {
      PairSample bump;
      bump.p = base;
      bump.q = base;
      bump.q[i] += 0.5;
      bump.r = 1.0;
      bump.s = 0.0;
      run_sample(order++, x, bump);
      bump.r = 0.0;
      run_sample(order++, x, bump);
    }
  }

  const long probe_orders = order;
  detail::parallel_for(trials, threads, [&](long t) {
    std::mt19937_64 rng(detail::splitmix64(seed ^ static_cast<std::uint64_t>(t + 1)));
    for (int x : interior) {
      size_t d = static_cast<size_t>(graph.degree(x));
      if (d == 0) continue;
      run_sample(probe_orders + t, x, draw_pair(rng, d, sample_range));
    }
  });

  auto finish = [](PropertyCheck& check, const std::optional<Violation>& v, long n) {
    check.trials = n;
    if (v) {
      check.violation_found = true;
      check.witness = v->sample;
    }
  };
  finish(report.elliptic, first_ell, ell_trials.load());
  finish(report.proper, first_prop, prop_trials.load());
  finish(report.uniformly_elliptic, first_unif, unif_trials.load());
  finish(report.weak_combined, first_weak, weak_trials.load());
  return report;
}

}  // namespace graphpde
