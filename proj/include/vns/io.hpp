#pragma once

// JSON documents.
//
// vns-series/1:
//   {"schema": "vns-series/1", "observable": "z0",
//    "entries": [{"factor": 1, "value": 0.8, "stderr": 0.01, "shots": 4096}, ...]}
// vns-grid/1:
//   {"schema": "vns-grid/1", "observable": "z0", "factors_a": [1, 3], "factors_b": [1, 3],
//    "values": [v00, v01, v10, v11], "stderr": [...]}      (row-major, optional stderr)
// vns-circuit/1:
//   {"schema": "vns-circuit/1", "n": 2,
//    "layers": [{"h": [[[re, im], [re, im]], [[re, im], [re, im]]],
//                "lindblad": [{"op": <matrix>, "rate": 0.01}], "tau": 1.0}]}

#include <string>
#include <variant>

#include <json.hpp>

#include "vns/noisesim.hpp"
#include "vns/series.hpp"

namespace vns {

using json = nlohmann::json;

inline constexpr const char* kSeriesSchema = "vns-series/1";
inline constexpr const char* kGridSchema = "vns-grid/1";
inline constexpr const char* kCircuitSchema = "vns-circuit/1";

json to_json(const AmplifiedSeries& s);
json to_json(const AmplifiedGrid& g);
json to_json(const CircuitSpec& c);

/// Each throws SchemaError with a message naming the violation.
AmplifiedSeries series_from_json(const json& j);
AmplifiedGrid grid_from_json(const json& j);
CircuitSpec circuit_from_json(const json& j);

json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

using SeriesDocument = std::variant<AmplifiedSeries, AmplifiedGrid>;

/// Dispatches on the "schema" field.
SeriesDocument load_series(const std::string& path);
CircuitSpec load_circuit(const std::string& path);

json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);

}  // namespace vns
