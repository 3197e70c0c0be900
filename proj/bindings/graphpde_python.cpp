#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>
#include <sstream>

#include "graphpde/fd_bridge.hpp"
#include "graphpde/generators.hpp"
#include "graphpde/io.hpp"
#include "graphpde/verify.hpp"

namespace py = pybind11;
using namespace graphpde;

namespace {

std::map<VertexId, double> field_to_dict(const Graph& g, const VertexField& f) {
  return f.to_map(g);
}

VertexField dict_to_field(const Graph& g, const std::map<VertexId, double>& values) {
  return VertexField::from_map(g, values);
}

VertexField boundary_dict_to_field(const Graph& g, const std::map<VertexId, double>& values) {
  VertexField f(g, 0.0);
  for (const auto& [id, v] : values) f[g.index_of(id)] = v;
  return f;
}

Coefficient to_coefficient(const py::object& obj) {
  if (py::isinstance<py::dict>(obj))
    return Coefficient::per_vertex(obj.cast<std::map<VertexId, double>>());
  return Coefficient(obj.cast<double>());
}

SolverConfig make_config(double tolerance, long max_iterations, double damping,
                         long stagnation_window, const std::string& scheme,
                         std::optional<double> initial_constant) {
  SolverConfig config;
  config.tolerance = tolerance;
  config.max_iterations = max_iterations;
  config.damping = damping;
  config.stagnation_window = stagnation_window;
  config.initial_constant = initial_constant;
  if (scheme == "fixed-point")
    config.scheme = SolveScheme::fixed_point_T;
  else if (scheme == "gauss-seidel")
    config.scheme = SolveScheme::gauss_seidel_local;
  else if (scheme == "eikonal")
    config.scheme = SolveScheme::eikonal_label_setting;
  else
    throw std::invalid_argument("unknown scheme: " + scheme);
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "nonlinear elliptic PDEs on finite weighted directed graphs";
  m.attr("__version__") = "0.1.0";
  m.attr("UNREACHABLE") = kUnreachable;

  py::class_<Graph>(m, "Graph")
      .def_static(
          "from_json",
          [](const std::string& text) { return parse_graph_json(OrderedJson::parse(text)); },
          py::arg("text"), "Parse a graph from its JSON document text.")
      .def_static(
          "from_file", [](const std::string& path) { return read_graph_json(path); },
          py::arg("path"))
      .def_property_readonly("vertex_count", &Graph::vertex_count)
      .def_property_readonly("edge_count", &Graph::edge_count)
      .def_property_readonly("vertices",
                             [](const Graph& g) {
                               std::vector<VertexId> ids;
                               for (int v = 0; v < g.vertex_count(); ++v)
                                 ids.push_back(g.id_of(v));
                               return ids;
                             })
      .def_property_readonly("boundary",
                             [](const Graph& g) {
                               std::vector<VertexId> ids;
                               for (int v : g.boundary_vertices()) ids.push_back(g.id_of(v));
                               return ids;
                             })
      .def_property_readonly("interior",
                             [](const Graph& g) {
                               std::vector<VertexId> ids;
                               for (int v : g.interior_vertices()) ids.push_back(g.id_of(v));
                               return ids;
                             })
      .def("is_boundary",
           [](const Graph& g, const VertexId& id) { return g.is_boundary(g.index_of(id)); })
      .def("neighbors",
           [](const Graph& g, const VertexId& id) {
             std::vector<VertexId> out;
             for (int n : g.neighbors(g.index_of(id))) out.push_back(g.id_of(n));
             return out;
           })
      .def("validate",
           [](const Graph& g) {
             std::vector<std::string> issues;
             for (const auto& issue : g.validate())
               issues.push_back(to_string(issue.code) + ": " + issue.detail);
             return issues;
           })
      .def("directed_distance",
           [](const Graph& g, const VertexId& x, const VertexId& y) {
             return g.directed_distance(g.index_of(x), g.index_of(y));
           })
      .def("path_distance",
           [](const Graph& g, const VertexId& x, const VertexId& y) {
             return g.path_distance(g.index_of(x), g.index_of(y));
           })
      .def("connected_to_boundary",
           [](const Graph& g) {
             auto conn = g.connected_to_boundary();
             std::vector<VertexId> stranded;
             for (int v : conn.stranded) stranded.push_back(g.id_of(v));
             return py::make_tuple(conn.connected, stranded);
           })
      .def("stored_boundary_data",
           [](const Graph& g) { return field_to_dict(g, g.stored_boundary_data()); })
      .def("to_json", [](const Graph& g) { return graph_to_json_string(g); })
      .def("__repr__", [](const Graph& g) {
        std::ostringstream out;
        out << "<graphpde.Graph " << g.vertex_count() << " vertices, " << g.edge_count()
            << " edges, " << g.boundary_vertices().size() << " boundary>";
        return out.str();
      });

  m.def(
      "geometric_grid",
      [](const std::vector<std::vector<double>>& directions,
         const std::vector<std::vector<double>>& points, bool require_interior) {
        return geometric_grid(directions, points, require_interior);
      },
      py::arg("directions"), py::arg("points"), py::arg("require_interior") = true);
  m.def("lattice_grid", &lattice_grid, py::arg("nx"), py::arg("ny"));

  py::class_<OperatorSpec>(m, "OperatorSpec")
      .def_static("from_json",
                  [](const std::string& text) {
                    return parse_spec_json(OrderedJson::parse(text));
                  })
      .def_static("laplacian",
                  [](const py::object& source) {
                    return OperatorSpec::laplacian(to_coefficient(source));
                  },
                  py::arg("source") = 0.0)
      .def_static("eikonal_plus",
                  [](const py::object& source) {
                    return OperatorSpec::eikonal_plus(to_coefficient(source));
                  },
                  py::arg("source") = 0.0)
      .def_static("eikonal_minus",
                  [](const py::object& source) {
                    return OperatorSpec::eikonal_minus(to_coefficient(source));
                  },
                  py::arg("source") = 0.0)
      .def_static("inf_laplacian",
                  [](const py::object& source) {
                    return OperatorSpec::inf_laplacian(to_coefficient(source));
                  },
                  py::arg("source") = 0.0)
      .def_static("one_laplacian",
                  [](const py::object& source) {
                    return OperatorSpec::one_laplacian(to_coefficient(source));
                  },
                  py::arg("source") = 0.0)
      .def_static("p_harmonious",
                  [](const py::object& w0, const py::object& w1, const py::object& wplus,
                     const py::object& wminus, const py::object& source) {
                    return OperatorSpec::p_harmonious(to_coefficient(w0), to_coefficient(w1),
                                                      to_coefficient(wplus),
                                                      to_coefficient(wminus),
                                                      to_coefficient(source));
                  },
                  py::arg("w0") = 0.0, py::arg("w1") = 0.0, py::arg("wplus") = 1.0,
                  py::arg("wminus") = 1.0, py::arg("source") = 0.0)
      .def_static("normalized_p", &OperatorSpec::normalized_p, py::arg("p"))
      .def_static("positive_eikonal",
                  [](const py::object& wplus, const py::object& source) {
                    return OperatorSpec::positive_eikonal(to_coefficient(wplus),
                                                          to_coefficient(source));
                  },
                  py::arg("wplus") = 1.0, py::arg("source") = 1.0)
      .def_static("trivial",
                  [](const py::object& source) {
                    return OperatorSpec::trivial(to_coefficient(source));
                  },
                  py::arg("source"))
      .def_property_readonly("kind", [](const OperatorSpec& s) { return kind_name(s.kind); })
      .def("to_json", &spec_to_json_string)
      .def("__repr__", [](const OperatorSpec& s) {
        return "<graphpde.OperatorSpec " + kind_name(s.kind) + ">";
      });

  m.def(
      "gradient",
      [](const Graph& g, const std::map<VertexId, double>& u, const VertexId& x) {
        return gradient(g, dict_to_field(g, u), g.index_of(x));
      },
      py::arg("graph"), py::arg("u"), py::arg("x"));
  auto bind_pointwise = [&](const char* name, double (*fn)(const Graph&, const VertexField&,
                                                           int)) {
    m.def(
        name,
        [fn](const Graph& g, const std::map<VertexId, double>& u, const VertexId& x) {
          return fn(g, dict_to_field(g, u), g.index_of(x));
        },
        py::arg("graph"), py::arg("u"), py::arg("x"));
  };
  bind_pointwise("laplacian", &laplacian);
  bind_pointwise("eikonal_plus", &eikonal_plus);
  bind_pointwise("eikonal_minus", &eikonal_minus);
  bind_pointwise("inf_laplacian", &inf_laplacian);
  bind_pointwise("one_laplacian", &one_laplacian);

  m.def(
      "evaluate",
      [](const OperatorSpec& spec, const Graph& g, const std::map<VertexId, double>& u,
         const std::optional<std::map<VertexId, double>>& bd) {
        VertexField gf = bd ? boundary_dict_to_field(g, *bd) : g.stored_boundary_data();
        return field_to_dict(g, evaluate(spec, g, dict_to_field(g, u), gf));
      },
      py::arg("spec"), py::arg("graph"), py::arg("u"), py::arg("g") = py::none(),
      "Residual of the Dirichlet problem at every vertex.");

  m.def(
      "homogeneity_check",
      [](const OperatorSpec& spec, const Graph& g, long trials, std::uint64_t seed) {
        auto report = homogeneity_check(spec, g, trials, seed);
        py::dict out;
        out["passed"] = report.passed;
        out["trials"] = report.trials;
        if (report.witness) {
          out["vertex"] = g.id_of(report.witness->vertex);
          out["p"] = report.witness->p;
          out["value"] = report.witness->value;
        }
        return out;
      },
      py::arg("spec"), py::arg("graph"), py::arg("trials") = 1000, py::arg("seed") = 42);

  m.def(
      "classify_ellipticity",
      [](const OperatorSpec& spec, const Graph& g, long trials, std::uint64_t seed) {
        auto report = classify_ellipticity(spec, g, trials, seed);
        auto entry = [](const PropertyCheck& c) {
          py::dict d;
          d["violation_found"] = c.violation_found;
          d["trials"] = c.trials;
          return d;
        };
        py::dict out;
        out["elliptic"] = entry(report.elliptic);
        out["proper"] = entry(report.proper);
        out["uniformly_elliptic"] = entry(report.uniformly_elliptic);
        out["weak_combined"] = entry(report.weak_combined);
        out["summary"] = report.summary();
        return out;
      },
      py::arg("spec"), py::arg("graph"), py::arg("trials") = 10000, py::arg("seed") = 42);

  py::class_<SolveReport>(m, "SolveReport")
      .def_property_readonly("status",
                             [](const SolveReport& r) { return to_string(r.status); })
      .def_property_readonly("iterations", [](const SolveReport& r) { return r.iterations; })
      .def_property_readonly("residual_inf_norm",
                             [](const SolveReport& r) { return r.residual_inf_norm; })
      .def_property_readonly("stagnation_floor",
                             [](const SolveReport& r) { return r.stagnation_floor; })
      .def_property_readonly("message", [](const SolveReport& r) { return r.message; })
      .def_property_readonly("converged", &SolveReport::converged)
      .def_property_readonly("residual_history",
                             [](const SolveReport& r) { return r.residual_history; })
      .def("solution",
           [](const SolveReport& r, const Graph& g) { return field_to_dict(g, r.solution); })
      .def("__repr__", [](const SolveReport& r) {
        return "<graphpde.SolveReport " + to_string(r.status) + ", " +
               std::to_string(r.iterations) + " iterations>";
      });

  m.def(
      "solve",
      [](const OperatorSpec& spec, const Graph& g,
         const std::optional<std::map<VertexId, double>>& bd, const std::string& scheme,
         double tolerance, long max_iterations, double damping, long stagnation_window,
         std::optional<double> initial_constant) {
        VertexField gf = bd ? boundary_dict_to_field(g, *bd) : g.stored_boundary_data();
        SolverConfig config = make_config(tolerance, max_iterations, damping,
                                          stagnation_window, scheme, initial_constant);
        return solve(spec, g, gf, config);
      },
      py::arg("spec"), py::arg("graph"), py::arg("g") = py::none(),
      py::arg("scheme") = "fixed-point", py::arg("tolerance") = 1e-10,
      py::arg("max_iterations") = 1000000, py::arg("damping") = 1.0,
      py::arg("stagnation_window") = 1000, py::arg("init") = py::none());

  m.def(
      "solve_eikonal",
      [](const Graph& g, const std::optional<std::map<VertexId, double>>& bd,
         const py::object& h, const std::string& sign, double tolerance) {
        VertexField gf = bd ? boundary_dict_to_field(g, *bd) : g.stored_boundary_data();
        VertexField hf(g, 0.0);
        if (py::isinstance<py::dict>(h)) {
          auto table = h.cast<std::map<VertexId, double>>();
          for (const auto& [id, v] : table) hf[g.index_of(id)] = v;
        } else {
          double value = h.cast<double>();
          for (int x : g.interior_vertices()) hf[x] = value;
        }
        SolverConfig config;
        config.tolerance = tolerance;
        return solve_eikonal(g, gf, hf, sign == "plus" ? EikonalSign::plus : EikonalSign::minus,
                             config);
      },
      py::arg("graph"), py::arg("g") = py::none(), py::arg("h") = 1.0,
      py::arg("sign") = "minus", py::arg("tolerance") = 1e-10);

  m.def(
      "detect_infeasibility",
      [](const OperatorSpec& spec, const Graph& g,
         const std::optional<std::map<VertexId, double>>& bd, long max_iterations) {
        VertexField gf = bd ? boundary_dict_to_field(g, *bd) : g.stored_boundary_data();
        SolverConfig config;
        config.max_iterations = max_iterations;
        return detect_infeasibility(spec, g, gf, config);
      },
      py::arg("spec"), py::arg("graph"), py::arg("g") = py::none(),
      py::arg("max_iterations") = 10000);

  m.def(
      "comparison_check",
      [](const OperatorSpec& spec, const Graph& g, const std::map<VertexId, double>& bd,
         const std::map<VertexId, double>& u, const std::map<VertexId, double>& v, double tol) {
        auto result = comparison_check(spec, g, boundary_dict_to_field(g, bd),
                                       dict_to_field(g, u), dict_to_field(g, v), tol, tol);
        py::dict out;
        out["outcome"] = result.outcome == ComparisonOutcome::pass ? "pass"
                         : result.outcome == ComparisonOutcome::fail
                             ? "fail"
                             : "hypothesis_not_satisfied";
        out["message"] = result.message;
        if (result.witness) {
          out["M"] = result.witness->M;
          std::vector<VertexId> w_ids;
          for (int x : result.witness->W) w_ids.push_back(g.id_of(x));
          out["W"] = w_ids;
        }
        return out;
      },
      py::arg("spec"), py::arg("graph"), py::arg("g"), py::arg("u"), py::arg("v"),
      py::arg("tol") = 0.0);

  m.def(
      "active_neighbors",
      [](const Graph& g, const std::map<VertexId, double>& u, const VertexId& x) {
        std::vector<VertexId> out;
        for (int z : active_neighbors(g, dict_to_field(g, u), g.index_of(x)))
          out.push_back(g.id_of(z));
        return out;
      },
      py::arg("graph"), py::arg("u"), py::arg("x"));

  m.def(
      "propagate_max",
      [](const OperatorSpec& spec, const Graph& g, const std::map<VertexId, double>& u,
         const std::map<VertexId, double>& v, double tol) {
        auto trace = propagate_max(spec, g, dict_to_field(g, u), dict_to_field(g, v), tol);
        py::dict out;
        out["M"] = trace.witness.M;
        out["lemma_violated"] = trace.lemma_violated;
        std::vector<std::vector<VertexId>> chains;
        for (const auto& chain : trace.chains) {
          std::vector<VertexId> ids;
          for (int x : chain) ids.push_back(g.id_of(x));
          chains.push_back(std::move(ids));
        }
        out["chains"] = chains;
        return out;
      },
      py::arg("spec"), py::arg("graph"), py::arg("u"), py::arg("v"), py::arg("tol") = 0.0);

  m.def(
      "comparison_fuzz",
      [](const OperatorSpec& spec, const std::string& family, long trials, std::uint64_t seed,
         double tolerance) {
        GraphFamily fn;
        if (family == "trees") {
          fn = [](std::mt19937_64& rng) {
            return random_tree(5 + int(rng() % 12), 2, 0.5, 2.0, rng);
          };
        } else if (family == "grids") {
          fn = [](std::mt19937_64& rng) {
            return lattice_grid(3 + int(rng() % 3), 3 + int(rng() % 3));
          };
        } else if (family == "digraphs") {
          fn = [](std::mt19937_64& rng) {
            return random_digraph(5 + int(rng() % 12), 12, 2, 0.1, 10.0, rng);
          };
        } else {
          throw std::invalid_argument("unknown family: " + family);
        }
        SolverConfig config;
        config.scheme = SolveScheme::gauss_seidel_local;
        config.tolerance = tolerance;
        auto result = comparison_fuzz(spec, fn, trials, seed, config);
        py::dict out;
        out["label"] = result.label;
        out["theorem_applies"] = result.theorem_applies;
        out["trials"] = result.trials;
        out["violations"] = result.violations;
        out["solver_failures"] = result.solver_failures;
        out["passed"] = result.passed();
        return out;
      },
      py::arg("spec"), py::arg("family") = "trees", py::arg("trials") = 50,
      py::arg("seed") = 42, py::arg("tolerance") = 1e-10);

  m.def(
      "fixed_point_map",
      [](const OperatorSpec& spec, const Graph& g, const std::map<VertexId, double>& u,
         const std::map<VertexId, double>& bd) {
        return field_to_dict(
            g, fixed_point_map_T(spec, g, dict_to_field(g, u), boundary_dict_to_field(g, bd)));
      },
      py::arg("spec"), py::arg("graph"), py::arg("u"), py::arg("g"),
      "One application of the existence-proof map T.");

  m.def(
      "harnack_check",
      [](const OperatorSpec& spec, const Graph& g, const std::map<VertexId, double>& u,
         double residual_tol, double eps_strict) {
        auto report = harnack_check(spec, g, dict_to_field(g, u), residual_tol, eps_strict);
        py::dict out;
        out["passed"] = report.passed;
        out["violations"] = report.violations;
        out["indeterminate"] = report.indeterminate;
        std::vector<VertexId> failures;
        for (int x : report.residual_failures) failures.push_back(g.id_of(x));
        out["residual_failures"] = failures;
        return out;
      },
      py::arg("spec"), py::arg("graph"), py::arg("u"), py::arg("residual_tol") = 1e-10,
      py::arg("eps_strict") = 1e-8);

  py::class_<CounterexampleInstance>(m, "CounterexampleInstance")
      .def_readonly("name", &CounterexampleInstance::name)
      .def_readonly("graph", &CounterexampleInstance::graph)
      .def_readonly("spec", &CounterexampleInstance::spec)
      .def_readonly("expected_outcome", &CounterexampleInstance::expected_outcome)
      .def_property_readonly("boundary_data",
                             [](const CounterexampleInstance& inst) {
                               return field_to_dict(inst.graph, inst.boundary_data);
                             })
      .def_property_readonly("known_solutions", [](const CounterexampleInstance& inst) {
        std::vector<std::map<VertexId, double>> out;
        for (const auto& u : inst.known_solutions) out.push_back(field_to_dict(inst.graph, u));
        return out;
      });
  m.def("counterexample_catalog", &counterexample_catalog, py::arg("name"));

  m.def(
      "second_difference_consistency",
      [](const std::function<double(double)>& u, double x0, double exact,
         const std::vector<double>& steps) {
        auto table = second_difference_consistency(u, x0, exact, steps);
        std::vector<py::tuple> rows;
        for (const auto& row : table.rows)
          rows.push_back(py::make_tuple(row.step, row.scheme_value, row.error));
        py::dict out;
        out["rows"] = rows;
        out["fitted_order"] = table.fitted_order;
        out["exact"] = table.exact;
        return out;
      },
      py::arg("u"), py::arg("x0"), py::arg("exact"), py::arg("steps"));

  m.def(
      "abs_gradient_consistency",
      [](const std::function<double(double)>& u, double x0, double exact,
         const std::vector<double>& steps, const std::string& form) {
        auto table = abs_gradient_consistency(u, x0, exact, steps,
                                              form == "min" ? AbsGradientScheme::min_form
                                                            : AbsGradientScheme::max_form);
        std::vector<py::tuple> rows;
        for (const auto& row : table.rows)
          rows.push_back(py::make_tuple(row.step, row.scheme_value, row.error));
        py::dict out;
        out["rows"] = rows;
        out["fitted_order"] = table.fitted_order;
        out["exact"] = table.exact;
        return out;
      },
      py::arg("u"), py::arg("x0"), py::arg("exact"), py::arg("steps"), py::arg("form") = "max");

  m.def(
      "inf_laplacian_ball_consistency",
      [](const std::function<double(double, double)>& u, double cx, double cy,
         const std::vector<double>& radii, int directions, double exact) {
        auto rows = inf_laplacian_ball_consistency(u, cx, cy, radii, directions, exact);
        std::vector<py::tuple> out;
        for (const auto& row : rows)
          out.push_back(py::make_tuple(row.radius, row.scheme_value, row.error,
                                       row.angular_refinement_delta));
        return out;
      },
      py::arg("u"), py::arg("cx"), py::arg("cy"), py::arg("radii"), py::arg("directions") = 64,
      py::arg("exact") = 0.0);

  m.def("lambda1_scheme", &lambda1_scheme, py::arg("u"), py::arg("cx"), py::arg("cy"),
        py::arg("h"), py::arg("directions") = 16);

  py::class_<StencilGrid>(m, "StencilGrid")
      .def_static("line", &StencilGrid::line, py::arg("x0"), py::arg("step"), py::arg("count"))
      .def_static("rectangle", &StencilGrid::rectangle, py::arg("x0"), py::arg("y0"),
                  py::arg("step"), py::arg("nx"), py::arg("ny"))
      .def_readonly("dimension", &StencilGrid::dimension)
      .def_readonly("step", &StencilGrid::step)
      .def_property_readonly("graph", [](const StencilGrid& s) { return s.graph; })
      .def("point",
           [](const StencilGrid& s, const VertexId& id) {
             return s.point(s.graph.index_of(id));
           })
      .def("__repr__", [](const StencilGrid& s) {
        return "<graphpde.StencilGrid dim " + std::to_string(s.dimension) + ", " +
               std::to_string(s.graph.vertex_count()) + " vertices>";
      });
  m.def("grid_to_graph", [](const StencilGrid& s) { return grid_to_graph(s); });

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    } catch (const std::out_of_range& e) {
      PyErr_SetString(PyExc_KeyError, e.what());
    }
  });
}
