// vns: command-line front end for the mitigation library.
//
// Exit codes: 0 ok, 2 usage / invalid input, 3 schema violation,
// 4 unreachable target, 5 numerical failure, 6 validation failed.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <locale>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vns/errors.hpp"
#include "vns/gselect.hpp"
#include "vns/io.hpp"
#include "vns/mitigation.hpp"
#include "vns/noisesim.hpp"
#include "vns/overhead.hpp"
#include "vns/validate.hpp"

namespace {

using vns::json;

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kUsage = 2, kSchema = 3, kUnreachable = 4, kNumerical = 5, kValidateFailed = 6 };

// JSON config files: top-level keys are options of the main app, nested objects
// hold options of subcommands ({"tradeoff": {"smin": 0.4}}).
class ConfigJSON : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0)
        j[name] = opt->as<std::string>();
      else if (default_also && !opt->get_default_str().empty())
        j[name] = opt->get_default_str();
    }
    for (const CLI::App* sub : app->get_subcommands({}))
      j[sub->get_name()] = json::parse(to_config(sub, default_also, false, ""));
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    json j;
    try {
      input >> j;
    } catch (const json::parse_error& e) {
      throw CLI::ConversionError(std::string("config file is not valid JSON: ") + e.what());
    }
    return walk(j, {});
  }

 private:
  static std::vector<CLI::ConfigItem> walk(const json& j, std::vector<std::string> parents) {
    std::vector<CLI::ConfigItem> out;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it->is_object()) {
        auto p = parents;
        p.push_back(it.key());
        auto sub = walk(*it, p);
        out.insert(out.end(), sub.begin(), sub.end());
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = it.key();
      auto text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
      if (it->is_array())
        for (const auto& v : *it) item.inputs.push_back(text(v));
      else
        item.inputs.push_back(text(*it));
      out.push_back(std::move(item));
    }
    return out;
  }
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

// Effective parameters of a subcommand (given or default), in declaration order.
json effective_config(const CLI::App* app) {
  json j = json::object();
  for (const CLI::Option* opt : app->get_options({})) {
    if (opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames()[0];
    if (name == "help" || name == "out" || name == "format") continue;
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? json(r[0]) : json(r);
    } else if (!opt->get_default_str().empty()) {
      j[name] = opt->get_default_str();
    }
  }
  for (const CLI::App* sub : app->get_subcommands()) j[sub->get_name()] = effective_config(sub);
  return j;
}

struct Header {
  std::string command;
  json config;
  std::uint64_t seed = 0;

  std::string config_text() const { return json{{"command", command}, {"config", config}}.dump(); }
  std::string hash() const { return hex(fnv1a(config_text())); }

  json as_json() const {
    return {{"tool", "vns"}, {"version", kVersion}, {"command", command}, {"config", config},
            {"config_hash", hash()}, {"seed", seed}};
  }
  void write_csv(std::ostream& os) const {
    os << "# vns " << kVersion << "\n";
    os << "# command: " << command << "\n";
    os << "# config: " << config.dump() << "\n";
    os << "# config_hash: " << hash() << "\n";
    os << "# seed: " << seed << "\n";
  }
};

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") {
      os_ = &std::cout;
    } else {
      std::filesystem::path p(path);
      const char* dir = std::getenv("VNS_OUTPUT_DIR");
      if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
      if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
      file_ = std::make_unique<std::ofstream>(p);
      if (!*file_) throw std::runtime_error("cannot write '" + p.string() + "'");
      os_ = file_.get();
    }
    os_->imbue(std::locale::classic());
    *os_ << std::setprecision(17);
  }
  std::ostream& os() { return *os_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

void emit_json(Output& out, const Header& h, const json& result) {
  out.os() << json{{"header", h.as_json()}, {"result", result}}.dump(2) << "\n";
}

std::vector<double> parse_range(const std::string& spec) {
  // lo:hi:step
  std::vector<double> parts;
  std::stringstream ss(spec);
  ss.imbue(std::locale::classic());
  std::string tok;
  while (std::getline(ss, tok, ':')) parts.push_back(std::stod(tok));
  if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
    throw vns::ValidationError("range must be lo:hi:step with step > 0");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
  for (long i = 0; i <= n; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  return out;
}

// "z0", "x1", or products such as "z0z1".
vns::CMatrix parse_observable(const std::string& spec, Eigen::Index dim) {
  int nq = 0;
  while ((Eigen::Index{1} << nq) < dim) ++nq;
  if ((Eigen::Index{1} << nq) != dim) throw vns::ValidationError("observable strings need a qubit register");
  vns::CMatrix a = vns::CMatrix::Identity(dim, dim);
  std::size_t i = 0;
  if (spec.empty()) throw vns::ValidationError("empty observable");
  while (i < spec.size()) {
    const char p = static_cast<char>(std::tolower(static_cast<unsigned char>(spec[i++])));
    std::size_t j = i;
    while (j < spec.size() && std::isdigit(static_cast<unsigned char>(spec[j]))) ++j;
    if (j == i) throw vns::ValidationError("observable '" + spec + "' needs a qubit index after each Pauli");
    a = a * vns::pauli_on(p, std::stoi(spec.substr(i, j - i)), nq);
    i = j;
  }
  return a;
}

vns::AmplifiedSeries require_series(const vns::SeriesDocument& d) {
  if (!std::holds_alternative<vns::AmplifiedSeries>(d))
    throw vns::ValidationError("this command needs a vns-series/1 document");
  return std::get<vns::AmplifiedSeries>(d);
}

json selection_json(const vns::GSelection& s) {
  json cands = {{"extremum", s.diagnostics.extremum_candidates},
                {"inflection", s.diagnostics.inflection_candidates}};
  return {{"g", s.g},
          {"method", vns::to_string(s.method)},
          {"diagnostics",
           {{"candidates", cands},
            {"epsilon", s.diagnostics.epsilon},
            {"stderr_at_1", s.diagnostics.stderr_at_1},
            {"plateau_variation", s.diagnostics.plateau_variation},
            {"total_variation", s.diagnostics.total_variation},
            {"g_max", s.diagnostics.g_max},
            {"residual", s.diagnostics.residual},
            {"note", s.diagnostics.note}}}};
}

json report_json(const vns::OverheadReport& r) {
  return {{"scheme", vns::to_string(r.scheme.tag)}, {"m", r.scheme.m},   {"g", r.g},
          {"layers", r.scheme.layers()},           {"s_layer", r.s_layer},
          {"infidelity", r.infidelity},            {"gamma2", r.gamma2}, {"avg_depth", r.avg_depth},
          {"runtime", r.runtime},                  {"benign", r.benign}, {"reachable", r.reachable}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Virtual-noise-scaling error mitigation toolkit"};
  app.config_formatter(std::make_shared<ConfigJSON>());
  app.set_config("--config", "", "JSON config file (keys mirror flags; subcommand options nested)");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string out_path;
  std::uint64_t seed = 0;
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_path, "output file (relative paths go under $VNS_OUTPUT_DIR)");
  };

  // coeffs
  int c_order = 2;
  double c_g = 1.0;
  std::string c_format = "csv";
  auto* coeffs = app.add_subcommand("coeffs", "mitigation coefficients a_k(g)");
  coeffs->add_option("--order", c_order, "mitigation order m")->capture_default_str()->check(CLI::NonNegativeNumber);
  coeffs->add_option("--g", c_g, "virtual noise scale g")->capture_default_str()->check(CLI::PositiveNumber);
  coeffs->add_option("--format", c_format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
  add_out(coeffs);

  // curve-g
  std::string series_path;
  int order = 2;
  double gmin = 0.0, gmax_curve = 2.0, gstep = 1e-3;
  auto* curve = app.add_subcommand("curve-g", "sample the mitigated value P(g) (CSV)");
  curve->add_option("--series", series_path, "vns-series/1 file")->required();
  curve->add_option("--order", order, "mitigation order m")->capture_default_str()->check(CLI::NonNegativeNumber);
  curve->add_option("--gmin", gmin)->capture_default_str();
  curve->add_option("--gmax", gmax_curve)->capture_default_str();
  curve->add_option("--step", gstep)->capture_default_str()->check(CLI::PositiveNumber);
  add_out(curve);

  // select-g
  double sel_gmax = 0.0, sel_eps = 0.0, sel_step = 1e-3;
  auto* selectg = app.add_subcommand("select-g", "choose g from the measured curve (JSON)");
  selectg->add_option("--series", series_path, "vns-series/1 file")->required();
  selectg->add_option("--order", order, "mitigation order m")->capture_default_str()->check(CLI::NonNegativeNumber);
  selectg->add_option("--gmax", sel_gmax, "upper end of the search (default sqrt(2), 2 for m <= 4)");
  selectg->add_option("--eps", sel_eps, "plateau tolerance (default max(10 stderr, 1e-4))");
  selectg->add_option("--step", sel_step, "grid step")->capture_default_str()->check(CLI::PositiveNumber);
  add_out(selectg);

  // mitigate
  std::string mit_g = "1";
  auto* mitigate = app.add_subcommand("mitigate", "mitigated value from a series or two-layer grid (JSON)");
  mitigate->add_option("--series", series_path, "vns-series/1 or vns-grid/1 file")->required();
  mitigate->add_option("--order", order, "mitigation order m")->capture_default_str()->check(CLI::NonNegativeNumber);
  mitigate->add_option("--g", mit_g, "number, or 'auto' (series only)")->capture_default_str();
  mitigate->add_option("--gmax", sel_gmax, "g search limit for --g auto");
  mitigate->add_option("--eps", sel_eps, "plateau tolerance for --g auto");
  add_out(mitigate);

  // tradeoff
  double smin = 0.4;
  std::string schemes = "all";
  int mmax = 20;
  auto* tradeoff = app.add_subcommand("tradeoff", "runtime overhead vs infidelity per scheme and order (CSV)");
  tradeoff->add_option("--smin", smin, "total s_min of the circuit")->capture_default_str();
  tradeoff->add_option("--schemes", schemes, "comma list or 'all'")->capture_default_str();
  tradeoff->add_option("--mmax", mmax)->capture_default_str()->check(CLI::NonNegativeNumber);
  add_out(tradeoff);

  // slopes
  std::string smin_grid = "0.3:0.95:0.01";
  auto* slopes = app.add_subcommand("slopes", "asymptotic d lnR / d lnI per scheme (CSV)");
  slopes->add_option("--smin-grid", smin_grid, "lo:hi:step")->capture_default_str();
  add_out(slopes);

  // crossover
  std::string pair = "taylor1l,taylor2l", mode = "asymptotic";
  auto* cross = app.add_subcommand("crossover", "s_min where one layer count overtakes another (JSON)");
  cross->add_option("--pair", pair, "two schemes, comma separated")->capture_default_str();
  cross->add_option("--mode", mode, "asymptotic or finite")->capture_default_str()->check(CLI::IsMember({"asymptotic", "finite"}));
  add_out(cross);

  // plan
  double target = 0.024;
  int plan_mmax = 30;
  auto* plan = app.add_subcommand("plan", "cheapest scheme/order meeting a target infidelity (JSON)");
  plan->add_option("--smin", smin, "total s_min")->capture_default_str();
  plan->add_option("--target", target, "target infidelity")->capture_default_str();
  plan->add_option("--mmax", plan_mmax)->capture_default_str();
  add_out(plan);

  // analytic-g
  std::string ag_mode = "eq";
  int ag_order = -1;
  auto* ag = app.add_subcommand("analytic-g", "g from s_min (eq, inv_sqrt, midpoint, gbar)");
  ag->add_option("--mode", ag_mode)->capture_default_str();
  ag->add_option("--smin", smin)->capture_default_str();
  ag->add_option("--order", ag_order, "order m (gbar)");
  add_out(ag);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "simulate amplified circuits and emit a vns-series/1 document");
  simulate->require_subcommand(1);
  std::string observable = "z0";
  int orders = 6, slices = 1;
  long long shots = 0;
  bool half_angle = false;
  std::string circuit_path;
  auto sim_common = [&](CLI::App* sub) {
    sub->add_option("--observable", observable, "Pauli string such as z0, x0 or z0z1")->capture_default_str();
    sub->add_option("--orders", orders, "highest order m (factors 1..2m+1)")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--shots", shots, "shots per factor, 0 = exact")->capture_default_str()->check(CLI::NonNegativeNumber);
    sub->add_option("--slices", slices, "slices per layer")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "sampling seed")->capture_default_str();
    add_out(sub);
  };
  auto* sim_ti = simulate->add_subcommand("trotter-ising", "four-qubit Ising Trotter circuit");
  sim_common(sim_ti);
  sim_ti->add_flag("--half-angle", half_angle, "rotations exp(-i theta P / 2) instead of exp(-i theta P)");
  auto* sim_c = simulate->add_subcommand("circuit", "circuit from a vns-circuit/1 file, initial state |0>");
  sim_common(sim_c);
  sim_c->add_option("--circuit", circuit_path, "vns-circuit/1 file")->required();

  // scan-hermiticity
  std::vector<int> slicing{1, 2, 4, 8};
  auto* scan = app.add_subcommand("scan-hermiticity", "effective-noise Hermiticity defect vs slicing (CSV)");
  scan->add_option("--slices", slicing, "slicings")->delimiter(',')->capture_default_str();
  scan->add_option("--circuit", circuit_path, "vns-circuit/1 file (default: Trotter scenario)");
  scan->add_flag("--half-angle", half_angle);
  add_out(scan);

  // validate
  auto* validate = app.add_subcommand("validate", "run the property battery; nonzero exit on failure");
  validate->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    Header header;
    header.command = sub->get_name();
    header.config = effective_config(sub);
    header.seed = seed;
    if (sub == simulate) header.command += " " + sub->get_subcommands().front()->get_name();

    if (sub == coeffs) {
      const auto c = vns::coefficients(c_order, c_g);
      Output out(out_path);
      if (c_format == "json") {
        std::vector<double> a(c.a.data(), c.a.data() + c.a.size());
        emit_json(out, header, {{"order", c.order}, {"g", c.scale}, {"a", a}, {"gamma", c.gamma}});
      } else {
        header.write_csv(out.os());
        out.os() << "k,factor,a\n";
        for (int k = 0; k <= c.order; ++k) out.os() << k << "," << 2 * k + 1 << "," << c.a(k) << "\n";
        out.os() << "# gamma: " << c.gamma << "\n";
      }
    } else if (sub == curve) {
      const auto s = require_series(vns::load_series(series_path));
      Output out(out_path);
      header.write_csv(out.os());
      out.os() << "g,value\n";
      for (const auto& [g, v] : vns::mitigated_vs_g_curve(s, order, gmin, gmax_curve, gstep))
        out.os() << g << "," << v << "\n";
    } else if (sub == selectg) {
      const auto s = require_series(vns::load_series(series_path));
      vns::GPolicy pol;
      pol.g_max = sel_gmax;
      pol.plateau_tolerance = sel_eps;
      pol.grid_step = sel_step;
      const auto sel = vns::select_g(s, order, pol);
      Output out(out_path);
      emit_json(out, header, selection_json(sel));
    } else if (sub == mitigate) {
      const auto doc = vns::load_series(series_path);
      json result;
      if (std::holds_alternative<vns::AmplifiedGrid>(doc)) {
        if (mit_g == "auto") throw vns::ValidationError("--g auto needs a series, not a grid");
        const double g = std::stod(mit_g);
        const auto c = vns::coefficients(order, g);
        const auto e = vns::mitigate_two_layer(std::get<vns::AmplifiedGrid>(doc), c, c);
        result = {{"value", e.value}, {"stderr", e.error}, {"g", g}, {"method", "fixed"}};
      } else {
        const auto& s = std::get<vns::AmplifiedSeries>(doc);
        double g = 1.0;
        std::string method = "fixed";
        if (mit_g == "auto") {
          vns::GPolicy pol;
          pol.g_max = sel_gmax;
          pol.plateau_tolerance = sel_eps;
          const auto sel = vns::select_g(s, order, pol);
          g = sel.g;
          method = vns::to_string(sel.method);
        } else {
          g = std::stod(mit_g);
        }
        const auto e = vns::mitigate_series(s, vns::coefficients(order, g));
        result = {{"value", e.value}, {"stderr", e.error}, {"g", g}, {"method", method}};
      }
      Output out(out_path);
      emit_json(out, header, result);
    } else if (sub == tradeoff) {
      std::vector<vns::SchemeTag> tags;
      if (schemes == "all") {
        tags = vns::all_schemes();
      } else {
        std::stringstream ss(schemes);
        std::string t;
        while (std::getline(ss, t, ',')) tags.push_back(vns::parse_scheme(t));
      }
      Output out(out_path);
      header.write_csv(out.os());
      if (smin < 0.5) out.os() << "# note: s_min below 1/2 lies outside the benign-noise regime\n";
      out.os() << "scheme,m,g,infidelity,gamma2,avg_depth,R\n";
      for (auto tag : tags)
        for (int m = 0; m <= mmax; ++m) {
          const auto r = vns::runtime_overhead({tag, m}, smin);
          out.os() << vns::to_string(tag) << "," << m << "," << r.g << "," << r.infidelity << "," << r.gamma2
                   << "," << r.avg_depth << "," << r.runtime << "\n";
        }
    } else if (sub == slopes) {
      const auto grid = parse_range(smin_grid);
      Output out(out_path);
      header.write_csv(out.os());
      out.os() << "smin";
      for (auto t : vns::all_schemes()) out.os() << "," << vns::to_string(t);
      out.os() << "\n";
      for (double s : grid) {
        out.os() << s;
        for (auto t : vns::all_schemes()) out.os() << "," << vns::slope(t, s);
        out.os() << "\n";
      }
    } else if (sub == cross) {
      const auto comma = pair.find(',');
      if (comma == std::string::npos) throw vns::ValidationError("--pair needs two schemes");
      const auto a = vns::parse_scheme(pair.substr(0, comma));
      const auto b = vns::parse_scheme(pair.substr(comma + 1));
      const auto x = vns::crossover(a, b, mode == "finite" ? vns::CrossoverMode::FiniteOrder
                                                           : vns::CrossoverMode::Asymptotic);
      Output out(out_path);
      emit_json(out, header, {{"pair", {vns::to_string(a), vns::to_string(b)}}, {"mode", mode},
                              {"crossover", x ? json(*x) : json(nullptr)}});
    } else if (sub == plan) {
      const auto r = vns::recommend_plan(smin, target, plan_mmax);
      Output out(out_path);
      emit_json(out, header, report_json(r));
      if (!r.reachable) {
        std::cerr << "target infidelity " << target << " unreachable for m <= " << plan_mmax
                  << "; best achieved " << r.infidelity << "\n";
        return kUnreachable;
      }
    } else if (sub == ag) {
      const auto md = vns::parse_analytic_g(ag_mode);
      if (md == vns::AnalyticG::Det) throw vns::ValidationError("det mode needs a noise channel; use the library");
      const double g = vns::analytic_g(md, smin, ag_order >= 0 ? std::optional<int>(ag_order) : std::nullopt);
      Output out(out_path);
      emit_json(out, header, {{"mode", ag_mode}, {"smin", smin}, {"g", g}});
    } else if (sub == simulate) {
      CLI::App* which = simulate->get_subcommands().front();
      vns::CircuitSpec c;
      if (which == sim_ti) {
        vns::TrotterIsingParams p;
        p.half_angle = half_angle;
        c = vns::trotter_ising_circuit(p);
      } else {
        c = vns::load_circuit(circuit_path);
      }
      const vns::ObservableOp a(parse_observable(observable, c.dim));
      const auto series = vns::simulate_series(c, vns::ground_state(c.dim), a, orders, shots, seed, slices, observable);
      Output out(out_path);
      json doc = vns::to_json(series);
      doc["header"] = header.as_json();
      out.os() << doc.dump(2) << "\n";
    } else if (sub == scan) {
      vns::CircuitSpec c;
      if (circuit_path.empty()) {
        vns::TrotterIsingParams p;
        p.half_angle = half_angle;
        c = vns::trotter_ising_circuit(p);
      } else {
        c = vns::load_circuit(circuit_path);
      }
      const auto pts = vns::hermiticity_scan(c, slicing);
      Output out(out_path);
      header.write_csv(out.os());
      out.os() << "slices,defect,circuit_defect\n";
      for (const auto& p : pts) out.os() << p.slices << "," << p.defect << "," << p.circuit_defect << "\n";
    } else if (sub == validate) {
      const auto results = vns::run_property_battery(seed ? seed : 20240601);
      bool ok = true;
      for (const auto& r : results) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << "  (" << r.detail << ")";
        std::cout << "\n";
        ok &= r.passed;
      }
      return ok ? kOk : kValidateFailed;
    }
  } catch (const vns::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kSchema;
  } catch (const vns::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}
