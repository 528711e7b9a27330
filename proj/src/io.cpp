#include "vns/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "vns/errors.hpp"

namespace vns {

namespace {

void expect_schema(const json& j, const char* schema) {
  if (!j.is_object()) throw SchemaError("document is not a JSON object");
  if (!j.contains("schema") || !j["schema"].is_string())
    throw SchemaError("missing \"schema\" field");
  if (j["schema"].get<std::string>() != schema)
    throw SchemaError("schema mismatch: expected \"" + std::string(schema) + "\", found \"" +
                      j["schema"].get<std::string>() + "\"");
}

double number(const json& j, const char* field) {
  if (j.is_null()) throw SchemaError("NaN value");
  if (!j.is_number()) throw SchemaError(std::string("field \"") + field + "\" is not a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw SchemaError("NaN value");
  return v;
}

// Checks a factor list: odd, distinct, 1, 3, 5, ... once sorted.
void check_factors(std::vector<long long> factors) {
  for (long long f : factors)
    if (f < 1 || f % 2 == 0) throw SchemaError("even amplification factor");
  std::sort(factors.begin(), factors.end());
  for (std::size_t i = 1; i < factors.size(); ++i)
    if (factors[i] == factors[i - 1]) throw SchemaError("duplicate amplification factor");
  for (std::size_t i = 0; i < factors.size(); ++i)
    if (factors[i] != static_cast<long long>(2 * i + 1)) throw SchemaError("non-contiguous odd factors");
}

std::vector<long long> factor_list(const json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_array()) throw SchemaError(std::string("missing \"") + field + "\" array");
  std::vector<long long> out;
  for (const auto& f : j[field]) {
    if (!f.is_number_integer()) throw SchemaError("amplification factor is not an integer");
    out.push_back(f.get<long long>());
  }
  if (out.empty()) throw SchemaError(std::string("empty \"") + field + "\" array");
  return out;
}

}  // namespace

json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw SchemaError("matrix must be a nonempty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw SchemaError("matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) {
      const json& z = row[static_cast<std::size_t>(k)];
      if (z.is_array() && z.size() == 2)
        m(i, k) = Complex(number(z[0], "re"), number(z[1], "im"));
      else if (z.is_number())
        m(i, k) = Complex(number(z, "re"), 0.0);
      else
        throw SchemaError("complex entries must be [re, im] pairs");
    }
  }
  return m;
}

json to_json(const AmplifiedSeries& s) {
  json entries = json::array();
  for (const auto& e : s.entries())
    entries.push_back({{"factor", e.factor}, {"value", e.value}, {"stderr", e.error}, {"shots", e.shots}});
  return {{"schema", kSeriesSchema}, {"observable", s.observable()}, {"entries", entries}};
}

json to_json(const AmplifiedGrid& g) {
  json fa = json::array(), values = json::array(), errs = json::array();
  for (int i = 0; i <= g.order(); ++i) fa.push_back(2 * i + 1);
  for (int i = 0; i <= g.order(); ++i)
    for (int k = 0; k <= g.order(); ++k) {
      values.push_back(g.values()(i, k));
      errs.push_back(g.stderrs()(i, k));
    }
  return {{"schema", kGridSchema}, {"observable", g.observable()}, {"factors_a", fa},
          {"factors_b", fa}, {"values", values}, {"stderr", errs}};
}

json to_json(const CircuitSpec& c) {
  json layers = json::array();
  for (const auto& l : c.layers) {
    json terms = json::array();
    for (const auto& t : l.lindblad) terms.push_back({{"op", matrix_to_json(t.op)}, {"rate", t.rate}});
    layers.push_back({{"h", matrix_to_json(l.hamiltonian)}, {"lindblad", terms}, {"tau", l.duration}});
  }
  return {{"schema", kCircuitSchema}, {"n", c.dim}, {"layers", layers}};
}

AmplifiedSeries series_from_json(const json& j) {
  expect_schema(j, kSeriesSchema);
  if (!j.contains("entries") || !j["entries"].is_array() || j["entries"].empty())
    throw SchemaError("missing or empty \"entries\" array");
  std::vector<SeriesEntry> entries;
  std::vector<long long> factors;
  for (const auto& e : j["entries"]) {
    if (!e.is_object() || !e.contains("factor") || !e.contains("value"))
      throw SchemaError("entry needs \"factor\" and \"value\"");
    SeriesEntry s;
    s.value = number(e["value"], "value");
    s.error = e.contains("stderr") ? number(e["stderr"], "stderr") : 0.0;
    if (s.error < 0.0) throw SchemaError("negative standard error");
    if (e.contains("shots")) {
      if (!e["shots"].is_number_integer() || e["shots"].get<long long>() < 0)
        throw SchemaError("shots must be a non-negative integer");
      s.shots = e["shots"].get<long long>();
    }
    if (!e["factor"].is_number_integer()) throw SchemaError("amplification factor is not an integer");
    factors.push_back(e["factor"].get<long long>());
    s.factor = static_cast<int>(factors.back());
    entries.push_back(s);
  }
  check_factors(factors);
  const std::string obs = j.contains("observable") && j["observable"].is_string() ? j["observable"].get<std::string>() : "";
  try {
    return AmplifiedSeries(std::move(entries), obs);
  } catch (const ValidationError& e) {
    throw SchemaError(e.what());
  }
}

AmplifiedGrid grid_from_json(const json& j) {
  expect_schema(j, kGridSchema);
  const auto fa = factor_list(j, "factors_a");
  const auto fb = factor_list(j, "factors_b");
  check_factors(fa);
  check_factors(fb);
  if (fa.size() != fb.size()) throw SchemaError("grid must be square: factors_a and factors_b differ in length");
  // Factor lists may be given unsorted; values follow the listed order.
  const auto n = static_cast<Eigen::Index>(fa.size());
  auto read = [&](const char* field, bool required) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (!j.contains(field)) {
      if (required) throw SchemaError(std::string("missing \"") + field + "\" array");
      return m;
    }
    const json& a = j[field];
    if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != n * n)
      throw SchemaError(std::string("\"") + field + "\" must hold factors_a x factors_b entries (incomplete grid)");
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < n; ++k) {
        const double v = number(a[static_cast<std::size_t>(i * n + k)], field);
        m((fa[i] - 1) / 2, (fb[k] - 1) / 2) = v;
      }
    return m;
  };
  Eigen::MatrixXd values = read("values", true);
  Eigen::MatrixXd errs = read("stderr", false);
  const std::string obs = j.contains("observable") && j["observable"].is_string() ? j["observable"].get<std::string>() : "";
  try {
    return AmplifiedGrid(std::move(values), std::move(errs), obs);
  } catch (const ValidationError& e) {
    throw SchemaError(e.what());
  }
}

CircuitSpec circuit_from_json(const json& j) {
  expect_schema(j, kCircuitSchema);
  if (!j.contains("n") || !j["n"].is_number_integer() || j["n"].get<long long>() < 1)
    throw SchemaError("\"n\" must be a positive integer");
  if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty())
    throw SchemaError("missing or empty \"layers\" array");
  CircuitSpec c;
  c.dim = j["n"].get<Eigen::Index>();
  for (const auto& l : j["layers"]) {
    if (!l.is_object() || !l.contains("h")) throw SchemaError("layer needs \"h\"");
    LayerSpec layer;
    layer.hamiltonian = matrix_from_json(l["h"]);
    layer.duration = l.contains("tau") ? number(l["tau"], "tau") : 1.0;
    if (l.contains("lindblad")) {
      if (!l["lindblad"].is_array()) throw SchemaError("\"lindblad\" must be an array");
      for (const auto& t : l["lindblad"]) {
        if (!t.is_object() || !t.contains("op") || !t.contains("rate"))
          throw SchemaError("Lindblad term needs \"op\" and \"rate\"");
        layer.lindblad.push_back({matrix_from_json(t["op"]), number(t["rate"], "rate")});
      }
    }
    c.layers.push_back(std::move(layer));
  }
  try {
    c.validate();
  } catch (const ValidationError& e) {
    throw SchemaError(e.what());
  }
  return c;
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

SeriesDocument load_series(const std::string& path) {
  const json j = read_json_file(path);
  if (!j.is_object() || !j.contains("schema") || !j["schema"].is_string())
    throw SchemaError("missing \"schema\" field");
  const std::string schema = j["schema"].get<std::string>();
  if (schema == kSeriesSchema) return series_from_json(j);
  if (schema == kGridSchema) return grid_from_json(j);
  throw SchemaError("unsupported schema \"" + schema + "\"");
}

CircuitSpec load_circuit(const std::string& path) { return circuit_from_json(read_json_file(path)); }

}  // namespace vns
