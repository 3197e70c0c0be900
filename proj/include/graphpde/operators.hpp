#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "graphpde/graph.hpp"

namespace graphpde {

/// One entry per out-neighbor of x, in neighbor order:
/// entry i = w_{x y_i} (u(y_i) - u(x)).
using GradientVector = std::vector<double>;

GradientVector gradient(const Graph& graph, const VertexField& u, int x);

/// Sum of the gradient entries.
double laplacian(const Graph& graph, const VertexField& u, int x);
/// Largest, respectively smallest, gradient entry.
double eikonal_plus(const Graph& graph, const VertexField& u, int x);
double eikonal_minus(const Graph& graph, const VertexField& u, int x);
/// (eikonal_plus + eikonal_minus) / 2, computed from one gradient.
double inf_laplacian(const Graph& graph, const VertexField& u, int x);
/// Median gradient entry; for an even count, the mean of the two middle values.
double one_laplacian(const Graph& graph, const VertexField& u, int x);

double median_of(std::span<const double> values);

enum class OperatorKind {
  laplacian,
  eikonal_plus,
  eikonal_minus,
  inf_laplacian,
  one_laplacian,
  p_harmonious,
  normalized_p,
  positive_eikonal,
  trivial,
};

std::string kind_name(OperatorKind kind);
OperatorKind kind_from_name(const std::string& name);

enum class HomogeneousPart { none, laplacian_part, median_part, custom };

/// A per-vertex coefficient: either one constant or an explicit table.
class Coefficient {
 public:
  Coefficient() = default;
  Coefficient(double constant) : constant_(constant) {}  // NOLINT: implicit by design
  static Coefficient per_vertex(std::map<VertexId, double> table);

  bool is_constant() const { return !table_.has_value(); }
  double constant() const { return constant_; }
  const std::map<VertexId, double>* table() const {
    return table_ ? &*table_ : nullptr;
  }
  /// One value per vertex index; a table must name every vertex it is read at.
  std::vector<double> resolve(const Graph& graph) const;

 private:
  double constant_ = 0.0;
  std::optional<std::map<VertexId, double>> table_;
};

/// Declarative description of a PDE operator F.  Interior residual:
///   F(u)(x) = w0 sum(grad) + w1 median(grad) + wplus max(grad)
///             + wminus min(grad) - source(x)
/// except kind trivial, where F(u)(x) = source(x) - u(x).  On boundary
/// vertices F(u)(x) = g(x) - u(x) for the Dirichlet data g.
struct OperatorSpec {
  OperatorKind kind = OperatorKind::laplacian;
  double p = 2.0;  // normalized_p only; may be infinity
  Coefficient w0{0.0};
  Coefficient w1{0.0};
  Coefficient wplus{0.0};
  Coefficient wminus{0.0};
  Coefficient source{0.0};
  HomogeneousPart homogeneous_part = HomogeneousPart::none;

  static OperatorSpec laplacian(Coefficient source = 0.0);
  static OperatorSpec eikonal_plus(Coefficient source = 0.0);
  static OperatorSpec eikonal_minus(Coefficient source = 0.0);
  static OperatorSpec inf_laplacian(Coefficient source = 0.0);
  static OperatorSpec one_laplacian(Coefficient source = 0.0);
  /// Coefficients of w0*Lap + w1*Median + wplus*max + wminus*min - source;
  /// wplus and wminus must be strictly positive on interior vertices.
  static OperatorSpec p_harmonious(Coefficient w0, Coefficient w1, Coefficient wplus,
                                   Coefficient wminus, Coefficient source = 0.0);
  /// Discrete normalized p-Laplacian: w1 = 1/p, wplus = wminus = 1/(2q)
  /// with 1/p + 1/q = 1.  p = infinity maps to wplus = wminus = 1/2.
  static OperatorSpec normalized_p(double p);
  /// wplus*max + f - source with f the optional homogeneous part; wplus and
  /// source must be strictly positive on interior vertices.
  static OperatorSpec positive_eikonal(Coefficient wplus, Coefficient source,
                                       Coefficient w0 = 0.0, Coefficient w1 = 0.0,
                                       Coefficient wminus = 0.0);
  /// F(u)(x) = source(x) - u(x) everywhere (the proper model equation).
  static OperatorSpec trivial(Coefficient source);
};

/// OperatorSpec bound to a graph: coefficients resolved per vertex and the
/// spec's structural invariants checked (throws std::invalid_argument).
class ResolvedOperator {
 public:
  ResolvedOperator(const OperatorSpec& spec, const Graph& graph);

  const OperatorSpec& spec() const { return spec_; }
  OperatorKind kind() const { return spec_.kind; }
  bool depends_on_u() const { return spec_.kind == OperatorKind::trivial; }

  double w0(int x) const { return w0_[static_cast<size_t>(x)]; }
  double w1(int x) const { return w1_[static_cast<size_t>(x)]; }
  double wplus(int x) const { return wplus_[static_cast<size_t>(x)]; }
  double wminus(int x) const { return wminus_[static_cast<size_t>(x)]; }
  double source(int x) const { return source_[static_cast<size_t>(x)]; }

  /// f(x, r, p): the interior operator applied to an arbitrary value r and
  /// gradient vector p (r is read only by kind trivial).
  double interior_value(int x, double r, std::span<const double> grad) const;
  double interior_residual(const Graph& graph, const VertexField& u, int x) const;

  /// Envelope constant of the min/max sandwich:
  ///   env(x) min(p) <= f(x, p) <= env(x) max(p),
  /// equal to w0(x) d(x) + w1(x) + wplus(x) + wminus(x).  Throws for the
  /// u-dependent trivial kind.
  double homogeneity_envelope(int x) const;

 private:
  OperatorSpec spec_;
  const Graph* graph_;
  std::vector<double> w0_, w1_, wplus_, wminus_, source_;
};

/// Residual field of the Dirichlet problem: interior f(x, u(x), grad u(x)),
/// boundary g(x) - u(x).  u solves the problem iff the result is zero.
VertexField evaluate(const OperatorSpec& spec, const Graph& graph, const VertexField& u,
                     const VertexField& g);
/// As above with g taken from the graph's stored boundary data.
VertexField evaluate(const OperatorSpec& spec, const Graph& graph, const VertexField& u);

double interior_residual_inf_norm(const VertexField& residual, const Graph& graph);

struct HomogeneityWitness {
  int vertex;
  std::vector<double> p;
  double value;
  double lower;
  double upper;
};

struct HomogeneityReport {
  bool passed = true;
  long trials = 0;
  std::optional<HomogeneityWitness> witness;
};

/// Randomized check of the sandwich inequality env*min(p) <= f(x,p) <=
/// env*max(p).  The envelope defaults to the spec's own (which holds by
/// construction); pass an override to test a claimed envelope.
HomogeneityReport homogeneity_check(const OperatorSpec& spec, const Graph& graph,
                                    long trials, std::uint64_t seed,
                                    const std::optional<Coefficient>& envelope_override = {},
                                    double sample_range = 10.0);

struct EllipticitySample {
  int vertex;
  double r, s;
  std::vector<double> p, q;
  double f_rp, f_sq;
};

struct PropertyCheck {
  bool violation_found = false;
  long trials = 0;
  std::optional<EllipticitySample> witness;
};

/// Randomized falsifier for the monotonicity structure conditions.  A clean
/// result means "no violation found in N trials", never a proof.
struct EllipticityReport {
  PropertyCheck elliptic;             // r >= s, p <= q  =>  f(r,p) <= f(s,q)
  PropertyCheck proper;               // r >  s, p <= q  =>  f(r,p) <  f(s,q)
  PropertyCheck uniformly_elliptic;   // r >= s, p <  q  =>  f(r,p) <  f(s,q)
  PropertyCheck weak_combined;        // r >  s, p <  q  =>  f(r,p) <  f(s,q)
  long trials = 0;
  std::uint64_t seed = 0;
  std::string summary() const;
};

EllipticityReport classify_ellipticity(const OperatorSpec& spec, const Graph& graph,
                                       long trials, std::uint64_t seed,
                                       double sample_range = 10.0, int threads = 1);

}  // namespace graphpde
