#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "graphpde/operators.hpp"
#include "graphpde/solvers.hpp"

namespace graphpde {

using OrderedJson = nlohmann::ordered_json;

// Graph JSON:
//   {"vertices": [{"id": str, "boundary": bool, "g": number?}, ...],
//    "edges": [{"from": str, "to": str, "w": number}, ...],
//    "undirected": bool}
// An undirected file expands each edge into both directions at load time.
Graph parse_graph_json(const OrderedJson& doc);
Graph read_graph_json(const std::filesystem::path& path);
OrderedJson graph_to_json(const Graph& graph);
std::string graph_to_json_string(const Graph& graph);
void write_graph_json(const Graph& graph, const std::filesystem::path& path);

// Field CSV: header "vertex,value", one row per vertex, 17 significant
// digits so doubles round-trip.
VertexField parse_field_csv(const Graph& graph, const std::string& text);
VertexField read_field_csv(const Graph& graph, const std::filesystem::path& path);
std::string field_to_csv_string(const Graph& graph, const VertexField& field);
void write_field_csv(const Graph& graph, const VertexField& field,
                     const std::filesystem::path& path);

// OperatorSpec JSON:
//   {"kind": str, "p": number?, "w0": field?, "w1": field?, "wplus": field?,
//    "wminus": field?, "source": field?}
// where a field is a constant number or an {id: value} object.
OperatorSpec parse_spec_json(const OrderedJson& doc);
OperatorSpec read_spec_json(const std::filesystem::path& path);
OrderedJson spec_to_json(const OperatorSpec& spec);
std::string spec_to_json_string(const OperatorSpec& spec);
void write_spec_json(const OperatorSpec& spec, const std::filesystem::path& path);

OrderedJson report_to_json(const SolveReport& report, const Graph& graph);
void write_report_json(const SolveReport& report, const Graph& graph,
                       const std::filesystem::path& path);
std::string residual_history_csv(const SolveReport& report);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 17-significant-digit decimal form that round-trips doubles.
std::string format_double(double value);

}  // namespace graphpde
