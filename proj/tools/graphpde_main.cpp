#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "graphpde/fd_bridge.hpp"
#include "graphpde/generators.hpp"
#include "graphpde/io.hpp"
#include "graphpde/verify.hpp"

namespace fs = std::filesystem;
using namespace graphpde;

namespace {

constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 1,
  exit_validation = 2,
  exit_solver = 3,
  exit_verification = 4,
};

struct GlobalOptions {
  std::uint64_t seed = 42;
  int threads = 1;
};

// Every command writes a manifest next to its outputs.  Replaying the
// stored argument list with the same tool version reproduces the outputs
// byte for byte, so no timestamps or absolute paths are recorded.
struct ManifestWriter {
  std::string command;
  std::vector<std::string> args;  // normalized: excludes --out
  GlobalOptions globals;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;

  void write(const fs::path& out_dir) const {
    OrderedJson doc;
    doc["tool"] = "graphpde";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["args"] = args;
    doc["seed"] = globals.seed;
    doc["threads"] = globals.threads;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    write_text_file(out_dir / "manifest.json", doc.dump(2) + "\n");
  }
};

fs::path ensure_out_dir(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

bool parse_number(const std::string& text, double& value) {
  char* end = nullptr;
  value = std::strtod(text.c_str(), &end);
  return end && *end == '\0' && end != text.c_str();
}

// A coefficient flag is either a literal number or a field CSV path.
Coefficient coefficient_flag(const std::string& text, const Graph& graph) {
  double value = 0.0;
  if (parse_number(text, value)) return Coefficient(value);
  VertexField field = read_field_csv(graph, text);
  std::map<VertexId, double> table;
  for (int v = 0; v < graph.vertex_count(); ++v) table[graph.id_of(v)] = field[v];
  return Coefficient::per_vertex(std::move(table));
}

struct OperatorFlags {
  std::string op;
  std::string spec_file;
  double p = 2.0;
  std::string rhs;
  std::string w0, w1, wplus, wminus;

  void attach(CLI::App* cmd) {
    cmd->add_option("--op", op,
                    "operator kind: laplacian, eikonal-plus, eikonal-minus, inf-laplacian, "
                    "one-laplacian, p-harmonious, normalized-p, positive-eikonal, trivial");
    cmd->add_option("--spec", spec_file, "operator spec JSON file (alternative to --op)");
    cmd->add_option("--p", p, "exponent for --op normalized-p (use inf via --p-inf)");
    cmd->add_option("--rhs", rhs, "right-hand side: constant or field CSV path");
    cmd->add_option("--w0", w0, "laplacian coefficient: constant or field CSV");
    cmd->add_option("--w1", w1, "median coefficient: constant or field CSV");
    cmd->add_option("--wplus", wplus, "max-gradient coefficient: constant or field CSV");
    cmd->add_option("--wminus", wminus, "min-gradient coefficient: constant or field CSV");
  }

  OperatorSpec build(const Graph& graph) const {
    if (!spec_file.empty()) return read_spec_json(spec_file);
    if (op.empty()) throw CLI::ValidationError("--op or --spec is required");
    OperatorKind kind = kind_from_name(op);
    Coefficient source = rhs.empty() ? Coefficient(0.0) : coefficient_flag(rhs, graph);
    switch (kind) {
      case OperatorKind::laplacian: {
        OperatorSpec s = OperatorSpec::laplacian(source);
        if (!w0.empty()) s.w0 = coefficient_flag(w0, graph);
        return s;
      }
      case OperatorKind::eikonal_plus: return OperatorSpec::eikonal_plus(source);
      case OperatorKind::eikonal_minus: return OperatorSpec::eikonal_minus(source);
      case OperatorKind::inf_laplacian: return OperatorSpec::inf_laplacian(source);
      case OperatorKind::one_laplacian: return OperatorSpec::one_laplacian(source);
      case OperatorKind::p_harmonious:
        return OperatorSpec::p_harmonious(
            w0.empty() ? Coefficient(0.0) : coefficient_flag(w0, graph),
            w1.empty() ? Coefficient(0.0) : coefficient_flag(w1, graph),
            wplus.empty() ? Coefficient(1.0) : coefficient_flag(wplus, graph),
            wminus.empty() ? Coefficient(1.0) : coefficient_flag(wminus, graph), source);
      case OperatorKind::normalized_p: {
        OperatorSpec s = OperatorSpec::normalized_p(p);
        s.source = source;
        return s;
      }
      case OperatorKind::positive_eikonal:
        return OperatorSpec::positive_eikonal(
            wplus.empty() ? Coefficient(1.0) : coefficient_flag(wplus, graph), source,
            w0.empty() ? Coefficient(0.0) : coefficient_flag(w0, graph),
            w1.empty() ? Coefficient(0.0) : coefficient_flag(w1, graph),
            wminus.empty() ? Coefficient(0.0) : coefficient_flag(wminus, graph));
      case OperatorKind::trivial: return OperatorSpec::trivial(source);
    }
    throw CLI::ValidationError("unknown operator kind");
  }
};

Graph load_graph_checked(const std::string& path) {
  Graph graph = read_graph_json(path);
  auto issues = graph.validate();
  if (!issues.empty()) {
    std::string what = path + " fails validation:";
    for (const auto& issue : issues) what += "\n  " + to_string(issue.code) + ": " + issue.detail;
    throw std::invalid_argument(what);
  }
  return graph;
}

VertexField boundary_data(const Graph& graph, const std::string& g_file) {
  if (!g_file.empty()) return read_field_csv(graph, g_file);
  return graph.stored_boundary_data();
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string graph_file, g_file, out = ".";
  OperatorFlags op;
  std::string scheme = "fixed-point";
  double tol = 1e-10;
  long max_iter = 1000000;
  double theta = 1.0;
  long window = 1000;
  std::optional<double> init_const;
  std::string init_file;
};

int run_solve(const SolveArgs& args, const GlobalOptions& globals,
              const std::vector<std::string>& manifest_args) {
  Graph graph = load_graph_checked(args.graph_file);
  OperatorSpec spec = args.op.build(graph);
  VertexField g = boundary_data(graph, args.g_file);

  SolverConfig config;
  config.tolerance = args.tol;
  config.max_iterations = args.max_iter;
  config.damping = args.theta;
  config.stagnation_window = args.window;
  if (args.scheme == "fixed-point")
    config.scheme = SolveScheme::fixed_point_T;
  else if (args.scheme == "gauss-seidel")
    config.scheme = SolveScheme::gauss_seidel_local;
  else if (args.scheme == "eikonal")
    config.scheme = SolveScheme::eikonal_label_setting;
  else
    throw CLI::ValidationError("unknown scheme: " + args.scheme);
  if (args.init_const) config.initial_constant = *args.init_const;
  if (!args.init_file.empty()) config.initial_guess = read_field_csv(graph, args.init_file);

  SolveReport report = solve(spec, graph, g, config);
  if (report.status == SolveStatus::stagnated) {
    // Persistent stagnation is the solver-level infeasibility diagnostic.
    report = detect_infeasibility(spec, graph, g, config);
  }

  fs::path dir = ensure_out_dir(args.out);
  write_field_csv(graph, report.solution, dir / "solution.csv");
  write_report_json(report, graph, dir / "report.json");
  write_text_file(dir / "residual_history.csv", residual_history_csv(report));
  ManifestWriter manifest{"solve", manifest_args, globals,
                          {args.graph_file},
                          {"solution.csv", "report.json", "residual_history.csv"}};
  if (!args.g_file.empty()) manifest.inputs.push_back(args.g_file);
  manifest.write(dir);

  std::printf("status: %s\niterations: %ld\nresidual_inf_norm: %s\n",
              to_string(report.status).c_str(), report.iterations,
              format_double(report.residual_inf_norm).c_str());
  return report.converged() ? exit_ok : exit_solver;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::string graph_file, g_file, out = ".";
  OperatorFlags op;
  std::string u_file, v_file, solution_file;
  long trials = 10000;
  double tol = 1e-10;
  double eps_strict = 1e-8;
  std::string family = "trees";
  std::string expect;  // comma-separated property assertions for ellipticity
};

int run_verify_ellipticity(const VerifyArgs& args, const GlobalOptions& globals,
                           const std::vector<std::string>& manifest_args) {
  Graph graph = args.graph_file.empty() ? lattice_grid(3, 3) : load_graph_checked(args.graph_file);
  OperatorSpec spec = args.op.build(graph);
  EllipticityReport report =
      classify_ellipticity(spec, graph, args.trials, globals.seed, 10.0, globals.threads);
  std::fputs(report.summary().c_str(), stdout);

  fs::path dir = ensure_out_dir(args.out);
  OrderedJson doc;
  doc["summary"] = report.summary();
  auto entry = [](const PropertyCheck& c) {
    OrderedJson e;
    e["violation_found"] = c.violation_found;
    e["trials"] = c.trials;
    return e;
  };
  doc["elliptic"] = entry(report.elliptic);
  doc["proper"] = entry(report.proper);
  doc["uniformly_elliptic"] = entry(report.uniformly_elliptic);
  doc["weak_combined"] = entry(report.weak_combined);
  write_text_file(dir / "ellipticity.json", doc.dump(2) + "\n");
  ManifestWriter manifest{"verify", manifest_args, globals, {}, {"ellipticity.json"}};
  if (!args.graph_file.empty()) manifest.inputs.push_back(args.graph_file);
  manifest.write(dir);

  if (!args.expect.empty()) {
    // e.g. --expect uniformly-elliptic,not-proper
    std::stringstream ss(args.expect);
    std::string token;
    while (std::getline(ss, token, ',')) {
      bool negated = token.rfind("not-", 0) == 0;
      std::string prop = negated ? token.substr(4) : token;
      const PropertyCheck* check = nullptr;
      if (prop == "elliptic") check = &report.elliptic;
      else if (prop == "proper") check = &report.proper;
      else if (prop == "uniformly-elliptic") check = &report.uniformly_elliptic;
      else if (prop == "weak-combined") check = &report.weak_combined;
      else throw CLI::ValidationError("unknown property: " + prop);
      bool holds = !check->violation_found;
      if (holds == negated) {
        std::fprintf(stderr, "expectation failed: %s\n", token.c_str());
        return exit_verification;
      }
    }
  }
  return exit_ok;
}

int run_verify_comparison(const VerifyArgs& args, const GlobalOptions& globals,
                          const std::vector<std::string>& manifest_args) {
  Graph graph = load_graph_checked(args.graph_file);
  OperatorSpec spec = args.op.build(graph);
  VertexField g = boundary_data(graph, args.g_file);
  VertexField u = read_field_csv(graph, args.u_file);
  VertexField v = read_field_csv(graph, args.v_file);
  auto result = comparison_check(spec, graph, g, u, v, args.tol, args.tol);

  OrderedJson doc;
  doc["outcome"] = result.outcome == ComparisonOutcome::pass ? "pass"
                   : result.outcome == ComparisonOutcome::fail ? "fail"
                                                               : "hypothesis_not_satisfied";
  doc["message"] = result.message;
  if (result.witness) {
    doc["M"] = result.witness->M;
    doc["W"] = OrderedJson::array();
    for (int x : result.witness->W) doc["W"].push_back(graph.id_of(x));
    doc["C"] = result.witness->C;
    doc["Z"] = OrderedJson::array();
    for (int x : result.witness->Z) doc["Z"].push_back(graph.id_of(x));
    if (result.witness->violating_vertex)
      doc["violating_vertex"] = graph.id_of(*result.witness->violating_vertex);
  }
  fs::path dir = ensure_out_dir(args.out);
  write_text_file(dir / "comparison.json", doc.dump(2) + "\n");
  ManifestWriter{"verify", manifest_args, globals,
                 {args.graph_file, args.u_file, args.v_file},
                 {"comparison.json"}}
      .write(dir);
  std::printf("%s\n", result.message.c_str());
  if (result.outcome == ComparisonOutcome::hypothesis_not_satisfied) return exit_validation;
  return result.passed() ? exit_ok : exit_verification;
}

int run_verify_harnack(const VerifyArgs& args, const GlobalOptions& globals,
                       const std::vector<std::string>& manifest_args) {
  Graph graph = load_graph_checked(args.graph_file);
  OperatorSpec spec = args.op.build(graph);
  VertexField u = read_field_csv(graph, args.solution_file);
  HarnackReport report = harnack_check(spec, graph, u, args.tol, args.eps_strict);

  OrderedJson doc;
  doc["passed"] = report.passed;
  doc["violations"] = report.violations;
  doc["indeterminate"] = report.indeterminate;
  doc["residual_failures"] = OrderedJson::array();
  for (int x : report.residual_failures) doc["residual_failures"].push_back(graph.id_of(x));
  doc["vertices"] = OrderedJson::array();
  for (const auto& v : report.per_vertex) {
    OrderedJson e;
    e["vertex"] = graph.id_of(v.vertex);
    e["outcome"] = v.outcome == HarnackOutcome::strict_branch   ? "strict"
                   : v.outcome == HarnackOutcome::zero_branch   ? "zero"
                   : v.outcome == HarnackOutcome::indeterminate ? "indeterminate"
                                                                : "violation";
    e["eik_minus"] = v.eik_minus;
    e["eik_plus"] = v.eik_plus;
    doc["vertices"].push_back(std::move(e));
  }
  fs::path dir = ensure_out_dir(args.out);
  write_text_file(dir / "harnack.json", doc.dump(2) + "\n");
  ManifestWriter{"verify", manifest_args, globals,
                 {args.graph_file, args.solution_file},
                 {"harnack.json"}}
      .write(dir);

  std::printf("harnack: %s (%ld violations, %ld indeterminate, %zu residual failures)\n",
              report.passed ? "pass" : "fail", report.violations, report.indeterminate,
              report.residual_failures.size());
  if (!report.residual_failures.empty()) return exit_validation;
  return report.passed ? exit_ok : exit_verification;
}

int run_verify_propagate(const VerifyArgs& args, const GlobalOptions& globals,
                         const std::vector<std::string>& manifest_args) {
  Graph graph = load_graph_checked(args.graph_file);
  OperatorSpec spec = args.op.build(graph);
  VertexField u = read_field_csv(graph, args.u_file);
  VertexField v = read_field_csv(graph, args.v_file);
  PropagationTrace trace = propagate_max(spec, graph, u, v, args.tol);

  OrderedJson doc;
  doc["M"] = trace.witness.M;
  doc["lemma_violated"] = trace.lemma_violated;
  doc["chains"] = OrderedJson::array();
  for (const auto& chain : trace.chains) {
    OrderedJson c = OrderedJson::array();
    for (int x : chain) c.push_back(graph.id_of(x));
    doc["chains"].push_back(std::move(c));
  }
  fs::path dir = ensure_out_dir(args.out);
  write_text_file(dir / "propagation.json", doc.dump(2) + "\n");
  ManifestWriter{"verify", manifest_args, globals,
                 {args.graph_file, args.u_file, args.v_file},
                 {"propagation.json"}}
      .write(dir);
  std::printf("propagation chains: %zu, lemma violated: %s\n", trace.chains.size(),
              trace.lemma_violated ? "yes" : "no");
  return trace.lemma_violated ? exit_verification : exit_ok;
}

int run_verify_fuzz(const VerifyArgs& args, const GlobalOptions& globals,
                    const std::vector<std::string>& manifest_args) {
  Graph probe = lattice_grid(3, 3);
  OperatorSpec spec = args.op.build(probe);
  GraphFamily family;
  if (args.family == "trees") {
    family = [](std::mt19937_64& rng) {
      return random_tree(5 + int(rng() % 12), 2, 0.5, 2.0, rng);
    };
  } else if (args.family == "grids") {
    family = [](std::mt19937_64& rng) {
      return lattice_grid(3 + int(rng() % 3), 3 + int(rng() % 3));
    };
  } else if (args.family == "digraphs") {
    family = [](std::mt19937_64& rng) {
      return random_digraph(5 + int(rng() % 12), 12, 2, 0.1, 10.0, rng);
    };
  } else {
    throw CLI::ValidationError("unknown family: " + args.family);
  }
  SolverConfig config;
  config.scheme = SolveScheme::gauss_seidel_local;
  config.tolerance = args.tol;
  FuzzResult result =
      comparison_fuzz(spec, family, args.trials, globals.seed, config, globals.threads);

  fs::path dir = ensure_out_dir(args.out);
  OrderedJson doc;
  doc["label"] = result.label;
  doc["theorem_applies"] = result.theorem_applies;
  doc["trials"] = result.trials;
  doc["violations"] = result.violations;
  doc["solver_failures"] = result.solver_failures;
  std::vector<std::string> outputs = {"fuzz.json"};
  if (result.first_violation) {
    const auto& bundle = *result.first_violation;
    write_graph_json(bundle.graph, dir / "counterexample.graph.json");
    write_field_csv(bundle.graph, bundle.g1, dir / "counterexample.g1.csv");
    write_field_csv(bundle.graph, bundle.g2, dir / "counterexample.g2.csv");
    write_field_csv(bundle.graph, bundle.u1, dir / "counterexample.u1.csv");
    write_field_csv(bundle.graph, bundle.u2, dir / "counterexample.u2.csv");
    doc["counterexample_vertex"] = bundle.graph.id_of(bundle.vertex);
    for (const char* f : {"counterexample.graph.json", "counterexample.g1.csv",
                          "counterexample.g2.csv", "counterexample.u1.csv",
                          "counterexample.u2.csv"})
      outputs.push_back(f);
  }
  write_text_file(dir / "fuzz.json", doc.dump(2) + "\n");
  ManifestWriter{"verify", manifest_args, globals, {}, outputs}.write(dir);
  std::printf("%s\nviolations: %ld in %ld trials\n", result.label.c_str(), result.violations,
              result.trials);
  return result.passed() ? exit_ok : exit_verification;
}

// ---------------------------------------------------------------------------
// counterexample

int run_counterexample(const std::string& name, const std::string& out,
                       const GlobalOptions& globals,
                       const std::vector<std::string>& manifest_args) {
  CounterexampleInstance inst;
  try {
    inst = counterexample_catalog(name);
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "%s\n", err.what());
    return exit_usage;
  }
  fs::path dir = ensure_out_dir(out);
  std::vector<std::string> outputs = {inst.name + ".graph.json", inst.name + ".spec.json"};
  write_graph_json(inst.graph, dir / (inst.name + ".graph.json"));
  write_spec_json(inst.spec, dir / (inst.name + ".spec.json"));
  for (size_t i = 0; i < inst.known_solutions.size(); ++i) {
    std::string fname = inst.name + ".solution" + std::to_string(i + 1) + ".csv";
    write_field_csv(inst.graph, inst.known_solutions[i], dir / fname);
    outputs.push_back(fname);
  }

  std::printf("%s: expected outcome: %s\n", inst.name.c_str(), inst.expected_outcome.c_str());
  bool confirmed = false;
  std::string transcript;
  if (inst.name == "k3") {
    SolverConfig config;
    config.max_iterations = 10000;
    SolveReport r = detect_infeasibility(inst.spec, inst.graph, inst.boundary_data, config);
    transcript = "status " + to_string(r.status) + ", residual floor " +
                 format_double(r.stagnation_floor) + " after " + std::to_string(r.iterations) +
                 " iterations";
    confirmed = r.status == SolveStatus::infeasible_detected;
  } else {
    confirmed = true;
    for (const auto& u : inst.known_solutions) {
      VertexField residual = evaluate(inst.spec, inst.graph, u, inst.boundary_data);
      double norm = 0.0;
      for (int v = 0; v < inst.graph.vertex_count(); ++v)
        norm = std::max(norm, std::abs(residual[v]));
      transcript += "solution residual inf-norm " + format_double(norm) + "; ";
      confirmed = confirmed && norm == 0.0;
    }
    SolverConfig config;
    config.scheme = SolveScheme::gauss_seidel_local;
    config.initial_constant = 1.0;
    SolveReport plus = solve_gauss_seidel(inst.spec, inst.graph, inst.boundary_data, config);
    config.initial_constant = -1.0;
    SolveReport minus = solve_gauss_seidel(inst.spec, inst.graph, inst.boundary_data, config);
    double gap = 0.0;
    for (int x : inst.graph.interior_vertices())
      gap = std::max(gap, std::abs(plus.solution[x] - minus.solution[x]));
    transcript += "gauss-seidel limits from +1/-1 differ by " + format_double(gap);
    confirmed = confirmed && plus.converged() && minus.converged() && gap > 1.0;
  }
  std::printf("%s\n", transcript.c_str());
  std::printf("confirmed: %s\n", confirmed ? "yes" : "no");

  write_text_file(dir / (inst.name + ".transcript.txt"),
                  inst.expected_outcome + "\n" + transcript + "\nconfirmed: " +
                      (confirmed ? "yes" : "no") + "\n");
  outputs.push_back(inst.name + ".transcript.txt");
  ManifestWriter{"counterexample", manifest_args, globals, {}, outputs}.write(dir);
  return confirmed ? exit_ok : exit_verification;
}

// ---------------------------------------------------------------------------
// fd-consistency

struct FdArgs {
  std::string scheme, fn, out = ".";
  std::vector<double> steps = {0.1, 0.05, 0.025};
  std::vector<double> radii = {0.2, 0.1, 0.05};
  double x0 = 1.0;
  std::vector<double> center = {1.0, 0.0};
  int directions = 64;
  double h = 0.1;
};

int run_fd(const FdArgs& args, const GlobalOptions& globals,
           const std::vector<std::string>& manifest_args) {
  fs::path dir = ensure_out_dir(args.out);
  std::string csv = "step,value,error\n";
  bool bar_met = true;
  std::string bar_note;

  if (args.scheme == "second-diff" || args.scheme == "abs-gradient") {
    ScalarFn u;
    double exact_dd = 0.0, exact_abs = 0.0;
    AbsGradientScheme form = AbsGradientScheme::max_form;
    if (args.fn == "quadratic") {
      u = [](double x) { return x * x; };
      exact_dd = 2.0;
      exact_abs = std::abs(2.0 * args.x0);
    } else if (args.fn == "quartic") {
      u = [](double x) { return x * x * x * x; };
      exact_dd = 12.0 * args.x0 * args.x0;
      exact_abs = std::abs(4.0 * args.x0 * args.x0 * args.x0);
    } else if (args.fn == "sin") {
      u = [](double x) { return std::sin(x); };
      exact_dd = -std::sin(args.x0);
      exact_abs = std::abs(std::cos(args.x0));
    } else if (args.fn == "linear") {
      u = [](double x) { return x; };
      exact_dd = 0.0;
      exact_abs = 1.0;
    } else if (args.fn == "neg-abs") {
      u = [](double x) { return -std::abs(x); };
      exact_dd = 0.0;  // away from the kink
      exact_abs = -1.0;
      form = AbsGradientScheme::min_form;
    } else {
      throw CLI::ValidationError("unknown 1-d test function: " + args.fn);
    }
    ConsistencyTable table =
        args.scheme == "second-diff"
            ? second_difference_consistency(u, args.x0, exact_dd, args.steps)
            : abs_gradient_consistency(u, args.x0, exact_abs, args.steps, form);
    for (const auto& row : table.rows)
      csv += format_double(row.step) + "," + format_double(row.scheme_value) + "," +
             format_double(row.error) + "\n";
    double bar = args.scheme == "second-diff" ? 1.9 : 0.9;
    if (table.exact) {
      bar_note = "scheme exact on this function";
    } else {
      char buf[96];
      std::snprintf(buf, sizeof buf, "fitted order %.4f (bar %.2f)", table.fitted_order, bar);
      bar_note = buf;
      bar_met = table.fitted_order >= bar;
    }
  } else if (args.scheme == "inf-laplacian-ball") {
    PlaneFn u;
    double exact = 0.0;
    if (args.fn == "xsq") {
      u = [](double x, double) { return x * x; };
      exact = 2.0;
    } else if (args.fn == "aniso") {
      u = [](double x, double y) { return x * x + 4.0 * y * y; };
      // grad (2x, 8y), Hessian diag(2, 8)
      double gx = 2.0 * args.center[0], gy = 8.0 * args.center[1];
      exact = (2.0 * gx * gx + 8.0 * gy * gy) / (gx * gx + gy * gy);
    } else if (args.fn == "sqdiff") {
      u = [](double x, double y) { return x * x - y * y; };
      double gx = 2.0 * args.center[0], gy = -2.0 * args.center[1];
      exact = (2.0 * gx * gx - 2.0 * gy * gy) / (gx * gx + gy * gy);
    } else if (args.fn == "rotate") {
      u = [](double x, double y) { return x + x * y; };
      double gx = 1.0 + args.center[1], gy = args.center[0];
      exact = 2.0 * gx * gy / (gx * gx + gy * gy);
    } else {
      throw CLI::ValidationError("unknown 2-d test function: " + args.fn);
    }
    auto rows =
        inf_laplacian_ball_consistency(u, args.center[0], args.center[1], args.radii,
                                       args.directions, exact);
    csv = "radius,directions,value,error,angular_delta\n";
    for (const auto& row : rows)
      csv += format_double(row.radius) + "," + std::to_string(row.directions) + "," +
             format_double(row.scheme_value) + "," + format_double(row.error) + "," +
             format_double(row.angular_refinement_delta) + "\n";
    // Declared bar: errors do not grow as the radius shrinks, up to the
    // floating-point floor of 1e-12 on exactly-reproduced functions.
    for (size_t i = 0; i + 1 < rows.size(); ++i)
      if (rows[i + 1].error > rows[i].error + 1e-12) bar_met = false;
    bar_note = bar_met ? "error decreases with the radius" : "error grew as the radius shrank";
  } else if (args.scheme == "lambda1") {
    PlaneFn u;
    std::optional<double> expected;
    double tol = 1e-9;
    if (args.fn == "aniso") {
      u = [](double x, double y) { return x * x + 4.0 * y * y; };
      expected = 2.0;
      tol = 0.0;  // axis directions make the quadratic exact
    } else if (args.fn == "saddle") {
      u = [](double x, double y) { return x * y; };
      expected = -1.0;
      tol = 1e-9;
    } else if (args.fn == "xsq") {
      u = [](double x, double) { return x * x; };
      expected = 0.0;
      tol = 1e-9;
    } else {
      throw CLI::ValidationError("unknown 2-d test function: " + args.fn);
    }
    double value = lambda1_scheme(u, args.center[0], args.center[1], args.h, args.directions);
    csv = "h,directions,value\n" + format_double(args.h) + "," +
          std::to_string(args.directions) + "," + format_double(value) + "\n";
    if (expected) {
      bar_met = std::abs(value - *expected) <= tol;
      bar_note = "value " + format_double(value) + " vs expected " + format_double(*expected);
    }
  } else {
    throw CLI::ValidationError("unknown scheme: " + args.scheme);
  }

  write_text_file(dir / "fd_table.csv", csv);
  ManifestWriter{"fd-consistency", manifest_args, globals, {}, {"fd_table.csv"}}.write(dir);
  std::fputs(csv.c_str(), stdout);
  if (!bar_note.empty()) std::printf("%s\n", bar_note.c_str());
  return bar_met ? exit_ok : exit_verification;
}

// ---------------------------------------------------------------------------
// generate / distance / replay

struct GenerateArgs {
  std::string kind = "path";
  int n = 5;
  int nx = 5, ny = 5;
  double step = 1.0;
  std::optional<double> g_const;
  std::string out = ".";
  std::string name;
};

int run_generate(const GenerateArgs& args, const GlobalOptions& globals,
                 const std::vector<std::string>& manifest_args) {
  Graph graph;
  if (args.kind == "path") {
    GraphBuilder b;
    for (int i = 0; i < args.n; ++i) {
      bool boundary = i == 0 || i == args.n - 1;
      std::optional<double> g;
      if (boundary && args.g_const) g = *args.g_const;
      b.add_vertex("v" + std::to_string(i), boundary, g);
    }
    for (int i = 0; i + 1 < args.n; ++i)
      b.add_undirected_edge("v" + std::to_string(i), "v" + std::to_string(i + 1),
                            1.0 / args.step);
    graph = b.build();
  } else if (args.kind == "grid") {
    StencilGrid grid = StencilGrid::rectangle(0.0, 0.0, args.step, args.nx, args.ny);
    if (args.g_const) {
      GraphBuilder b;
      const Graph& g0 = grid.graph;
      for (int v = 0; v < g0.vertex_count(); ++v)
        b.add_vertex(g0.id_of(v), g0.is_boundary(v),
                     g0.is_boundary(v) ? std::optional<double>(*args.g_const) : std::nullopt);
      for (int v = 0; v < g0.vertex_count(); ++v) {
        auto ns = g0.neighbors(v);
        auto ws = g0.weights(v);
        for (size_t i = 0; i < ns.size(); ++i) b.add_edge(g0.id_of(v), g0.id_of(ns[i]), ws[i]);
      }
      graph = b.build();
    } else {
      graph = grid.graph;
    }
  } else {
    throw CLI::ValidationError("unknown kind: " + args.kind);
  }
  std::string name = args.name.empty() ? args.kind + ".graph.json" : args.name;
  fs::path dir = ensure_out_dir(args.out);
  write_graph_json(graph, dir / name);
  ManifestWriter{"generate", manifest_args, globals, {}, {name}}.write(dir);
  std::printf("wrote %s (%d vertices, %d edges)\n", (dir / name).string().c_str(),
              graph.vertex_count(), graph.edge_count());
  return exit_ok;
}

struct DistanceArgs {
  std::string graph_file, from, to, out = ".";
  bool to_boundary = false;
};

int run_distance(const DistanceArgs& args, const GlobalOptions& globals,
                 const std::vector<std::string>& manifest_args) {
  Graph graph = load_graph_checked(args.graph_file);
  fs::path dir = ensure_out_dir(args.out);
  if (args.to_boundary) {
    VertexField dist(graph, 0.0);
    for (int x = 0; x < graph.vertex_count(); ++x) {
      double best = kUnreachable;
      for (int b : graph.boundary_vertices())
        best = std::min(best, graph.path_distance(x, b));
      dist[x] = best;
    }
    write_field_csv(graph, dist, dir / "distance.csv");
    ManifestWriter{"distance", manifest_args, globals, {args.graph_file}, {"distance.csv"}}
        .write(dir);
    std::printf("wrote %s\n", (dir / "distance.csv").string().c_str());
    return exit_ok;
  }
  if (args.from.empty() || args.to.empty())
    throw CLI::ValidationError("--from and --to (or --to-boundary) are required");
  double d = graph.path_distance(graph.index_of(args.from), graph.index_of(args.to));
  std::printf("%s\n", std::isinf(d) ? "inf" : format_double(d).c_str());
  return exit_ok;
}

int dispatch(std::vector<std::string> args);

int run_replay(const std::string& manifest_file, const std::string& out) {
  OrderedJson doc = OrderedJson::parse(read_text_file(manifest_file));
  if (doc.value("version", "") != kVersion)
    std::fprintf(stderr, "warning: manifest written by version %s, this is %s\n",
                 doc.value("version", "?").c_str(), kVersion);
  std::vector<std::string> args;
  for (const auto& a : doc.at("args")) args.push_back(a.get<std::string>());
  args.push_back("--out");
  args.push_back(out.empty() ? "." : out);
  args.insert(args.begin(), "--seed");
  args.insert(args.begin() + 1, std::to_string(doc.at("seed").get<std::uint64_t>()));
  return dispatch(std::move(args));
}

// ---------------------------------------------------------------------------

int dispatch(std::vector<std::string> argv_tail) {
  CLI::App app{"nonlinear elliptic PDEs on weighted directed graphs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOptions globals;
  if (const char* env = std::getenv("GRAPHPDE_THREADS")) globals.threads = std::atoi(env);
  app.add_option("--seed", globals.seed, "seed for all randomized components");
  app.add_option("--threads", globals.threads, "worker cap (env GRAPHPDE_THREADS)");
  app.fallthrough();  // global flags may follow the subcommand

  // The manifest stores the subcommand arguments without --out, so a replay
  // into a fresh directory reproduces identical bytes.
  std::vector<std::string> manifest_args;
  {
    bool skip = false;
    for (const auto& a : argv_tail) {
      if (skip) {
        skip = false;
        continue;
      }
      // --out, --seed and --threads live in dedicated manifest fields.
      if (a == "--out" || a == "--seed" || a == "--threads") {
        skip = true;
        continue;
      }
      manifest_args.push_back(a);
    }
  }

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "solve a Dirichlet problem");
  solve_cmd->add_option("--graph", solve_args.graph_file, "graph JSON file")->required();
  solve_args.op.attach(solve_cmd);
  solve_cmd->add_option("--g", solve_args.g_file, "boundary data CSV (default: stored g)");
  solve_cmd->add_option("--scheme", solve_args.scheme, "fixed-point | gauss-seidel | eikonal");
  solve_cmd->add_option("--tol", solve_args.tol, "residual inf-norm tolerance");
  solve_cmd->add_option("--max-iter", solve_args.max_iter, "iteration cap");
  solve_cmd->add_option("--theta", solve_args.theta, "damping in (0,1]");
  solve_cmd->add_option("--stagnation-window", solve_args.window, "stagnation window");
  double init_const_value = 0.0;
  auto* init_opt = solve_cmd->add_option("--init", init_const_value,
                                         "constant interior initial guess");
  solve_cmd->add_option("--init-file", solve_args.init_file, "initial guess CSV");
  solve_cmd->add_option("--out", solve_args.out, "output directory");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "well-posedness checks");
  verify_cmd->require_subcommand(1);
  auto attach_verify = [&](CLI::App* sub) {
    sub->add_option("--graph", verify_args.graph_file, "graph JSON file");
    verify_args.op.attach(sub);
    sub->add_option("--tol", verify_args.tol, "comparison/residual tolerance");
    sub->add_option("--out", verify_args.out, "output directory");
  };
  auto* ell_cmd = verify_cmd->add_subcommand("ellipticity", "randomized classifier");
  attach_verify(ell_cmd);
  ell_cmd->add_option("--trials", verify_args.trials, "samples per interior vertex");
  ell_cmd->add_option("--expect", verify_args.expect,
                      "comma-separated assertions, e.g. uniformly-elliptic,not-proper");
  auto* cmp_cmd = verify_cmd->add_subcommand("comparison", "comparison principle instance");
  attach_verify(cmp_cmd);
  cmp_cmd->add_option("--u", verify_args.u_file, "field CSV")->required();
  cmp_cmd->add_option("--v", verify_args.v_file, "field CSV")->required();
  cmp_cmd->add_option("--g", verify_args.g_file, "boundary data CSV");
  auto* har_cmd = verify_cmd->add_subcommand("harnack", "p-harmonious dichotomy");
  attach_verify(har_cmd);
  har_cmd->add_option("--solution", verify_args.solution_file, "field CSV")->required();
  har_cmd->add_option("--eps-strict", verify_args.eps_strict, "strictness band");
  auto* prop_cmd = verify_cmd->add_subcommand("propagate", "active-neighbor propagation");
  attach_verify(prop_cmd);
  prop_cmd->add_option("--u", verify_args.u_file, "field CSV")->required();
  prop_cmd->add_option("--v", verify_args.v_file, "field CSV")->required();
  auto* fuzz_cmd = verify_cmd->add_subcommand("fuzz", "randomized comparison fuzzing");
  attach_verify(fuzz_cmd);
  fuzz_cmd->add_option("--trials", verify_args.trials, "number of sampled instances");
  fuzz_cmd->add_option("--family", verify_args.family, "trees | grids | digraphs");

  std::string ce_name, ce_out = ".";
  auto* ce_cmd = app.add_subcommand("counterexample", "well-posedness counterexamples");
  ce_cmd->add_option("name", ce_name, "k3 | median12")->required();
  ce_cmd->add_option("--out", ce_out, "output directory");

  FdArgs fd_args;
  auto* fd_cmd = app.add_subcommand("fd-consistency", "finite-difference consistency studies");
  fd_cmd->add_option("--scheme", fd_args.scheme,
                     "second-diff | abs-gradient | inf-laplacian-ball | lambda1")
      ->required();
  fd_cmd->add_option("--fn", fd_args.fn, "test function")->required();
  fd_cmd->add_option("--steps", fd_args.steps, "step sizes")->delimiter(',');
  fd_cmd->add_option("--radii", fd_args.radii, "ball radii")->delimiter(',');
  fd_cmd->add_option("--x0", fd_args.x0, "evaluation point (1-d schemes)");
  fd_cmd->add_option("--center", fd_args.center, "evaluation center x,y")->delimiter(',');
  fd_cmd->add_option("--directions", fd_args.directions, "direction count");
  fd_cmd->add_option("--h-step", fd_args.h, "step for lambda1");
  fd_cmd->add_option("--out", fd_args.out, "output directory");

  GenerateArgs gen_args;
  auto* gen_cmd = app.add_subcommand("generate", "write grid graphs");
  gen_cmd->add_option("--kind", gen_args.kind, "path | grid");
  gen_cmd->add_option("--n", gen_args.n, "path length");
  gen_cmd->add_option("--nx", gen_args.nx, "grid width");
  gen_cmd->add_option("--ny", gen_args.ny, "grid height");
  gen_cmd->add_option("--step", gen_args.step, "grid spacing");
  double g_const_value = 0.0;
  auto* g_const_opt = gen_cmd->add_option("--g-const", g_const_value, "constant boundary datum");
  gen_cmd->add_option("--name", gen_args.name, "output file name");
  gen_cmd->add_option("--out", gen_args.out, "output directory");

  DistanceArgs dist_args;
  auto* dist_cmd = app.add_subcommand("distance", "path distances");
  dist_cmd->add_option("--graph", dist_args.graph_file, "graph JSON file")->required();
  dist_cmd->add_option("--from", dist_args.from, "source vertex id");
  dist_cmd->add_option("--to", dist_args.to, "target vertex id");
  dist_cmd->add_flag("--to-boundary", dist_args.to_boundary,
                     "per-vertex distance to the boundary (CSV)");
  dist_cmd->add_option("--out", dist_args.out, "output directory");

  std::string replay_file, replay_out;
  auto* replay_cmd = app.add_subcommand("replay", "re-run a recorded manifest");
  replay_cmd->add_option("manifest", replay_file, "manifest.json path")->required();
  replay_cmd->add_option("--out", replay_out, "output directory");

  // CLI11 parses argv-style (reversed) vectors.
  std::vector<std::string> reversed(argv_tail.rbegin(), argv_tail.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  if (init_opt->count()) solve_args.init_const = init_const_value;
  if (g_const_opt->count()) gen_args.g_const = g_const_value;

  try {
    if (solve_cmd->parsed()) return run_solve(solve_args, globals, manifest_args);
    if (verify_cmd->parsed()) {
      if (ell_cmd->parsed()) return run_verify_ellipticity(verify_args, globals, manifest_args);
      if (cmp_cmd->parsed()) return run_verify_comparison(verify_args, globals, manifest_args);
      if (har_cmd->parsed()) return run_verify_harnack(verify_args, globals, manifest_args);
      if (prop_cmd->parsed()) return run_verify_propagate(verify_args, globals, manifest_args);
      if (fuzz_cmd->parsed()) return run_verify_fuzz(verify_args, globals, manifest_args);
    }
    if (ce_cmd->parsed()) return run_counterexample(ce_name, ce_out, globals, manifest_args);
    if (fd_cmd->parsed()) return run_fd(fd_args, globals, manifest_args);
    if (gen_cmd->parsed()) return run_generate(gen_args, globals, manifest_args);
    if (dist_cmd->parsed()) return run_distance(dist_args, globals, manifest_args);
    if (replay_cmd->parsed()) return run_replay(replay_file, replay_out);
  } catch (const CLI::ValidationError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return exit_usage;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "validation error: %s\n", err.what());
    return exit_validation;
  } catch (const std::out_of_range& err) {
    std::fprintf(stderr, "validation error: %s\n", err.what());
    return exit_validation;
  } catch (const std::runtime_error& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return exit_usage;
  }
  return exit_usage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(std::move(args));
}
