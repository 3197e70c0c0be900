#include "graphpde/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace graphpde {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Graph parse_graph_json(const OrderedJson& doc) {
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges"))
    throw std::runtime_error("graph JSON must carry \"vertices\" and \"edges\"");
  bool undirected = doc.value("undirected", false);
  GraphBuilder b;
  for (const auto& v : doc.at("vertices")) {
    std::optional<double> g;
    if (v.contains("g") && !v.at("g").is_null()) g = v.at("g").get<double>();
    b.add_vertex(v.at("id").get<std::string>(), v.value("boundary", false), g);
  }
  for (const auto& e : doc.at("edges")) {
    auto from = e.at("from").get<std::string>();
    auto to = e.at("to").get<std::string>();
    double w = e.at("w").get<double>();
    if (undirected)
      b.add_undirected_edge(from, to, w);
    else
      b.add_edge(from, to, w);
  }
  return b.build();
}

Graph read_graph_json(const std::filesystem::path& path) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
  return parse_graph_json(doc);
}

OrderedJson graph_to_json(const Graph& graph) {
  OrderedJson doc;
  doc["undirected"] = false;  // directed edges are written explicitly
  doc["vertices"] = OrderedJson::array();
  for (int v = 0; v < graph.vertex_count(); ++v) {
    OrderedJson jv;
    jv["id"] = graph.id_of(v);
    jv["boundary"] = graph.is_boundary(v);
    if (auto g = graph.stored_boundary_value(v)) jv["g"] = *g;
    doc["vertices"].push_back(std::move(jv));
  }
  doc["edges"] = OrderedJson::array();
  for (int v = 0; v < graph.vertex_count(); ++v) {
    auto ns = graph.neighbors(v);
    auto ws = graph.weights(v);
    for (size_t i = 0; i < ns.size(); ++i) {
      OrderedJson je;
      je["from"] = graph.id_of(v);
      je["to"] = graph.id_of(ns[i]);
      je["w"] = ws[i];
      doc["edges"].push_back(std::move(je));
    }
  }
  return doc;
}

std::string graph_to_json_string(const Graph& graph) {
  return graph_to_json(graph).dump(2) + "\n";
}

void write_graph_json(const Graph& graph, const std::filesystem::path& path) {
  write_text_file(path, graph_to_json_string(graph));
}

VertexField parse_field_csv(const Graph& graph, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty field CSV");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "vertex,value")
    throw std::runtime_error("field CSV must start with header \"vertex,value\"");
  VertexField field(graph, 0.0);
  std::vector<bool> seen(static_cast<size_t>(graph.vertex_count()), false);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.rfind(',');
    if (comma == std::string::npos)
      throw std::runtime_error("field CSV line " + std::to_string(lineno) + ": missing comma");
    std::string id = line.substr(0, comma);
    int v = graph.index_of(id);
    if (seen[static_cast<size_t>(v)])
      throw std::runtime_error("field CSV line " + std::to_string(lineno) + ": duplicate vertex " + id);
    seen[static_cast<size_t>(v)] = true;
    field[v] = std::stod(line.substr(comma + 1));
  }
  for (int v = 0; v < graph.vertex_count(); ++v)
    if (!seen[static_cast<size_t>(v)])
      throw std::runtime_error("field CSV is missing vertex " + graph.id_of(v));
  return field;
}

VertexField read_field_csv(const Graph& graph, const std::filesystem::path& path) {
  return parse_field_csv(graph, read_text_file(path));
}

std::string field_to_csv_string(const Graph& graph, const VertexField& field) {
  std::string out = "vertex,value\n";
  for (int v = 0; v < graph.vertex_count(); ++v)
    out += graph.id_of(v) + "," + format_double(field[v]) + "\n";
  return out;
}

void write_field_csv(const Graph& graph, const VertexField& field,
                     const std::filesystem::path& path) {
  write_text_file(path, field_to_csv_string(graph, field));
}

namespace {

Coefficient parse_coefficient(const OrderedJson& value) {
  if (value.is_number()) return Coefficient(value.get<double>());
  if (value.is_object()) {
    std::map<VertexId, double> table;
    for (const auto& [id, entry] : value.items()) table[id] = entry.get<double>();
    return Coefficient::per_vertex(std::move(table));
  }
  throw std::runtime_error("coefficient must be a number or an {id: value} object");
}

OrderedJson coefficient_to_json(const Coefficient& c) {
  if (c.is_constant()) return c.constant();
  OrderedJson obj = OrderedJson::object();
  for (const auto& [id, value] : *c.table()) obj[id] = value;
  return obj;
}

bool is_zero(const Coefficient& c) { return c.is_constant() && c.constant() == 0.0; }

}  // namespace

OperatorSpec parse_spec_json(const OrderedJson& doc) {
  if (!doc.is_object() || !doc.contains("kind"))
    throw std::runtime_error("operator spec JSON must carry \"kind\"");
  OperatorKind kind = kind_from_name(doc.at("kind").get<std::string>());
  Coefficient w0 = doc.contains("w0") ? parse_coefficient(doc.at("w0")) : Coefficient(0.0);
  Coefficient w1 = doc.contains("w1") ? parse_coefficient(doc.at("w1")) : Coefficient(0.0);
  Coefficient wplus = doc.contains("wplus") ? parse_coefficient(doc.at("wplus")) : Coefficient(0.0);
  Coefficient wminus = doc.contains("wminus") ? parse_coefficient(doc.at("wminus")) : Coefficient(0.0);
  Coefficient source = doc.contains("source") ? parse_coefficient(doc.at("source")) : Coefficient(0.0);

  switch (kind) {
    case OperatorKind::laplacian: {
      OperatorSpec s = OperatorSpec::laplacian(source);
      if (doc.contains("w0")) s.w0 = w0;
      return s;
    }
    case OperatorKind::eikonal_plus: {
      OperatorSpec s = OperatorSpec::eikonal_plus(source);
      if (doc.contains("wplus")) s.wplus = wplus;
      return s;
    }
    case OperatorKind::eikonal_minus: {
      OperatorSpec s = OperatorSpec::eikonal_minus(source);
      if (doc.contains("wminus")) s.wminus = wminus;
      return s;
    }
    case OperatorKind::inf_laplacian: {
      OperatorSpec s = OperatorSpec::inf_laplacian(source);
      if (doc.contains("wplus")) s.wplus = wplus;
      if (doc.contains("wminus")) s.wminus = wminus;
      return s;
    }
    case OperatorKind::one_laplacian: {
      OperatorSpec s = OperatorSpec::one_laplacian(source);
      if (doc.contains("w1")) s.w1 = w1;
      return s;
    }
    case OperatorKind::p_harmonious:
      return OperatorSpec::p_harmonious(w0, w1, wplus, wminus, source);
    case OperatorKind::normalized_p: {
      if (!doc.contains("p")) throw std::runtime_error("normalized-p spec needs \"p\"");
      double p = doc.at("p").is_string() ? std::numeric_limits<double>::infinity()
                                         : doc.at("p").get<double>();
      if (doc.contains("w0") || doc.contains("w1") || doc.contains("wplus") ||
          doc.contains("wminus"))
        throw std::runtime_error("normalized-p derives its coefficients from p");
      OperatorSpec s = OperatorSpec::normalized_p(p);
      s.source = source;
      return s;
    }
    case OperatorKind::positive_eikonal:
      return OperatorSpec::positive_eikonal(is_zero(wplus) ? Coefficient(1.0) : wplus, source,
                                            w0, w1, wminus);
    case OperatorKind::trivial:
      return OperatorSpec::trivial(source);
  }
  throw std::runtime_error("unhandled operator kind");
}

OperatorSpec read_spec_json(const std::filesystem::path& path) {
  OrderedJson doc;
  try {
    doc = OrderedJson::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& err) {
    throw std::runtime_error(path.string() + ": " + err.what());
  }
  return parse_spec_json(doc);
}

OrderedJson spec_to_json(const OperatorSpec& spec) {
  OrderedJson doc;
  doc["kind"] = kind_name(spec.kind);
  if (spec.kind == OperatorKind::normalized_p) {
    // Coefficients are derived from p; only p and the source are stored.
    if (std::isinf(spec.p))
      doc["p"] = "inf";
    else
      doc["p"] = spec.p;
    if (!is_zero(spec.source)) doc["source"] = coefficient_to_json(spec.source);
    return doc;
  }
  if (!is_zero(spec.w0)) doc["w0"] = coefficient_to_json(spec.w0);
  if (!is_zero(spec.w1)) doc["w1"] = coefficient_to_json(spec.w1);
  if (!is_zero(spec.wplus)) doc["wplus"] = coefficient_to_json(spec.wplus);
  if (!is_zero(spec.wminus)) doc["wminus"] = coefficient_to_json(spec.wminus);
  if (!is_zero(spec.source)) doc["source"] = coefficient_to_json(spec.source);
  return doc;
}

std::string spec_to_json_string(const OperatorSpec& spec) {
  return spec_to_json(spec).dump(2) + "\n";
}

void write_spec_json(const OperatorSpec& spec, const std::filesystem::path& path) {
  write_text_file(path, spec_to_json_string(spec));
}

OrderedJson report_to_json(const SolveReport& report, const Graph& graph) {
  OrderedJson doc;
  doc["status"] = to_string(report.status);
  doc["iterations"] = report.iterations;
  doc["residual_inf_norm"] = report.residual_inf_norm;
  if (report.status == SolveStatus::stagnated ||
      report.status == SolveStatus::infeasible_detected)
    doc["stagnation_floor"] = report.stagnation_floor;
  if (!report.message.empty()) doc["message"] = report.message;
  doc["solution"] = OrderedJson::object();
  for (int v = 0; v < graph.vertex_count(); ++v)
    doc["solution"][graph.id_of(v)] = report.solution[v];
  return doc;
}

void write_report_json(const SolveReport& report, const Graph& graph,
                       const std::filesystem::path& path) {
  write_text_file(path, report_to_json(report, graph).dump(2) + "\n");
}

std::string residual_history_csv(const SolveReport& report) {
  std::string out = "iteration,residual\n";
  for (const auto& [iteration, residual] : report.residual_history)
    out += std::to_string(iteration) + "," + format_double(residual) + "\n";
  return out;
}

}  // namespace graphpde
