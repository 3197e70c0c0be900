#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "graphpde/operators.hpp"
#include "graphpde/solvers.hpp"

namespace graphpde {

/// Where the maximum M of u - v is attained (W), and the subset Z of W
/// where u itself is maximal (value C).
struct ComparisonWitness {
  double M = 0.0;
  std::vector<int> W;
  double C = 0.0;
  std::vector<int> Z;
  std::optional<int> violating_vertex;
};

ComparisonWitness max_set_witness(const Graph& graph, const VertexField& u,
                                  const VertexField& v);

enum class ComparisonOutcome { pass, fail, hypothesis_not_satisfied };

struct ComparisonResult {
  ComparisonOutcome outcome;
  std::optional<ComparisonWitness> witness;  // on fail
  std::optional<int> hypothesis_vertex;      // on hypothesis_not_satisfied
  std::string message;
  bool passed() const { return outcome == ComparisonOutcome::pass; }
};

/// Comparison principle instance check: requires F(u) >= F(v) everywhere
/// (else hypothesis_not_satisfied), then tests u <= v + tol pointwise.
ComparisonResult comparison_check(const OperatorSpec& spec, const Graph& graph,
                                  const VertexField& g, const VertexField& u,
                                  const VertexField& v, double tol = 0.0,
                                  double hypothesis_tol = 0.0);

/// Neighbors attaining max(grad u)(x): the full argmax set.
std::vector<int> active_neighbors(const Graph& graph, const VertexField& u, int x);

struct PropagationTrace {
  ComparisonWitness witness;
  std::vector<std::vector<int>> chains;  // per start vertex: vertices visited
  bool lemma_violated = false;           // an active neighbor left W
  std::optional<std::pair<int, int>> violation_edge;
};

/// Follows active neighbors breadth-first from every interior vertex of W
/// and checks each landing vertex is again in W.  Requires a spec of the
/// form wplus*max(grad) + elliptic part with wplus > 0 on interior
/// vertices, F(u) >= F(v) on interior vertices, and M > 0; throws
/// std::invalid_argument when a hypothesis fails.
PropagationTrace propagate_max(const OperatorSpec& spec, const Graph& graph,
                               const VertexField& u, const VertexField& v,
                               double hypothesis_tol = 0.0);

enum class HarnackOutcome { strict_branch, zero_branch, indeterminate, violation };

struct HarnackVertex {
  int vertex;
  HarnackOutcome outcome;
  double eik_minus;
  double eik_plus;
};

struct HarnackReport {
  bool passed = true;  // no violations and the residual precondition held
  std::vector<HarnackVertex> per_vertex;
  std::vector<int> residual_failures;  // vertices where |F(u)| > residual_tol
  long violations = 0;
  long indeterminate = 0;
};

/// Dichotomy at every interior vertex of a p-harmonious solution: either
/// min(grad) < 0 < max(grad) or grad = 0, within the eps_strict band.
/// Values inside the band are reported indeterminate rather than pass/fail.
HarnackReport harnack_check(const OperatorSpec& spec, const Graph& graph,
                            const VertexField& u, double residual_tol = 1e-10,
                            double eps_strict = 1e-8);

struct CounterexampleInstance {
  std::string name;
  Graph graph;
  OperatorSpec spec;
  VertexField boundary_data;
  std::vector<VertexField> known_solutions;
  std::string expected_outcome;
};

/// The catalog of well-posedness counterexamples:
///  - "k3": wrong-sign eikonal max(grad u) = -1 on the triangle, no solution;
///  - "median12": median equation on the twelve-vertex cross, two solutions.
CounterexampleInstance counterexample_catalog(const std::string& name);

struct FuzzViolation {
  long trial;
  Graph graph;
  VertexField g1, g2;
  VertexField u1, u2;
  int vertex;
};

struct FuzzResult {
  bool theorem_applies = false;  // spec classified uniformly elliptic or proper
  std::string label;
  long trials = 0;
  long solver_failures = 0;
  long violations = 0;
  std::optional<FuzzViolation> first_violation;
  bool passed() const { return !theorem_applies || violations == 0; }
};

using GraphFamily = std::function<Graph(std::mt19937_64&)>;

/// Draws graphs from the family, solves with ordered boundary data
/// g1 <= g2, and checks u1 <= u2 + 2 tol pointwise.  The ordering is
/// asserted only when the randomized classifier finds the spec uniformly
/// elliptic or proper on the sampled graphs; otherwise the result is
/// labeled "no theorem applies" and violations are informational.
FuzzResult comparison_fuzz(const OperatorSpec& spec, const GraphFamily& family, long trials,
                           std::uint64_t seed, const SolverConfig& config = {},
                           int threads = 1);

}  // namespace graphpde
