// feller: scenario-driven classification of model manifolds.
//
//   feller classify --g "sinh(r)" --dim 3
//   feller run scenarios/ex_versus1.json --json
//   feller presets --write scenarios

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "feller/error.hpp"
#include "feller/presets.hpp"
#include "feller/report.hpp"
#include "feller/scenario.hpp"

namespace {

using nlohmann::json;
using namespace feller;

struct Common {
  bool json_out = false;
  std::string dump_dir;
  std::optional<double> tail_margin;
  std::optional<int> tail_budget;
  std::optional<double> tol_exterior;
  std::optional<double> tol_heat_wall;
  std::optional<double> tol_heat_richardson;
  std::optional<double> max_radius;
  std::uint64_t seed = 0;  // reserved; the core uses no randomness
};

void add_common(CLI::App* app, Common& c) {
  app->add_flag("--json", c.json_out, "Print the full JSON report");
  app->add_option("--dump-profiles", c.dump_dir, "Write CSV profiles into this directory");
  app->add_option("--tol-tail-margin", c.tail_margin, "Ratio margin of the tail test");
  app->add_option("--tol-tail-budget", c.tail_budget, "Dyadic window budget of the tail test");
  app->add_option("--tol-exterior", c.tol_exterior, "Exhaustion sup-norm tolerance");
  app->add_option("--tol-heat-wall", c.tol_heat_wall, "Heat wall-doubling tolerance");
  app->add_option("--tol-heat-richardson", c.tol_heat_richardson, "Heat Richardson tolerance");
  app->add_option("--max-radius", c.max_radius, "Exterior reporting radius");
  app->add_option("--seed", c.seed, "Reserved; no randomness is used");
}

void apply_overrides(json& doc, const Common& c) {
  if (!doc.is_object()) return;
  json& t = doc["tolerances"];
  if (t.is_null()) t = json::object();
  if (!t.is_object()) return;  // parse_scenario reports it
  if (c.tail_margin) t["tail_margin"] = *c.tail_margin;
  if (c.tail_budget) t["tail_budget"] = *c.tail_budget;
  if (c.tol_exterior) t["exterior"] = *c.tol_exterior;
  if (c.tol_heat_wall) t["heat_wall"] = *c.tol_heat_wall;
  if (c.tol_heat_richardson) t["heat_richardson"] = *c.tol_heat_richardson;
  if (c.max_radius) t["max_radius"] = *c.max_radius;
  if (t.empty()) doc.erase("tolerances");
}

json params_json(const std::vector<std::string>& items) {
  json p = json::object();
  for (const auto& it : items) {
    const auto eq = it.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ScenarioError(ErrorCode::ValidationError, "params", 0, "expected name=value, got '" + it + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(it.substr(eq + 1), &used);
      if (used != it.size() - eq - 1) throw std::invalid_argument(it);
      p[it.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw ScenarioError(ErrorCode::ValidationError, "params." + it.substr(0, eq), 0, "not a number");
    }
  }
  return p;
}

void print_error(const Error& e, bool as_json) {
  if (as_json) {
    json j{{"error", {{"code", to_string(e.code())}, {"message", e.what()}}}};
    if (const auto* se = dynamic_cast<const ScenarioError*>(&e)) {
      j["error"]["field"] = se->field();
      j["error"]["line"] = se->line();
    }
    std::cout << j.dump(2) << "\n";
  }
  std::cerr << "error: " << e.what() << "\n";
}

int run_doc(json doc, const Common& c) {
  apply_overrides(doc, c);
  const Scenario s = parse_scenario(doc);
  const Report r = run_scenario(s);
  if (c.json_out) std::cout << to_json(r).dump(2) << "\n";
  else std::cout << summarize(r);
  if (!c.dump_dir.empty()) {
    for (const auto& p : dump_profiles(r, c.dump_dir))
      if (!c.json_out) std::cout << "wrote " << p << "\n";
  }
  return r.exit_code();
}

struct ModelArgs {
  std::string g;
  std::string table;
  std::string tail;
  std::vector<double> blend;
  int dim = 2;
  std::vector<std::string> params;
};

void add_model_args(CLI::App* app, ModelArgs& m) {
  app->add_option("--g", m.g, "Warping function g(r)");
  app->add_option("--table", m.table, "CSV of (r, g) samples instead of --g");
  app->add_option("--tail", m.tail, "Tail formula in r used beyond the blend window");
  app->add_option("--blend", m.blend, "Blend window start end")->expected(2);
  app->add_option("--dim", m.dim, "Dimension m")->capture_default_str();
  app->add_option("--param", m.params, "Parameter name=value (repeatable)");
}

json model_doc(const ModelArgs& m, const std::string& name, const std::vector<std::string>& routes) {
  json model{{"dim", m.dim}};
  if (!m.table.empty()) model["table"] = m.table;
  else if (!m.g.empty()) model["g"] = m.g;
  if (!m.tail.empty()) model["tail"] = m.tail;
  if (!m.blend.empty()) model["blend"] = m.blend;
  return json{{"version", kScenarioVersion}, {"name", name},          {"kind", "model"},
              {"model", model},              {"params", params_json(m.params)}, {"routes", routes}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parabolicity, stochastic completeness and the Feller property of model manifolds"};
  app.require_subcommand(1);
  Common common;
  ModelArgs model;

  auto* classify = app.add_subcommand("classify", "Integral tests on a model");
  add_model_args(classify, model);
  add_common(classify, common);

  auto* exterior = app.add_subcommand("exterior", "Minimal exterior solution of Delta h = lambda h");
  add_model_args(exterior, model);
  add_common(exterior, common);
  double R0 = 1.0, lambda = 1.0;
  exterior->add_option("--R0", R0, "Inner radius")->capture_default_str();
  exterior->add_option("--lambda", lambda, "Spectral parameter")->capture_default_str();

  auto* heat = app.add_subcommand("heat", "Heat semigroup probes");
  add_model_args(heat, model);
  add_common(heat, common);
  double heat_R = 1.0;
  std::vector<double> heat_t, mass_t;
  heat->add_option("--R", heat_R, "Radius of the initial ball")->capture_default_str();
  heat->add_option("--t", heat_t, "Probe times");
  heat->add_option("--mass-t", mass_t, "Times of the pole mass history");

  auto* compare = app.add_subcommand("compare", "Curvature comparison, or the subsolution test on a model");
  add_model_args(compare, model);
  add_common(compare, common);
  std::string G, bound = "sectional_upper", declared_tail;
  double beta = 1.0, tail_from = 0.0;
  compare->add_option("--G", G, "Radial curvature bound G(r)");
  compare->add_option("--bound", bound, "sectional_upper | ricci_lower | hsu")->capture_default_str();
  compare->add_option("--beta", beta, "Exponent of the sharpness model (hsu)")->capture_default_str();
  compare->add_option("--declared-tail", declared_tail, "Closed-form Jacobi solution used beyond --tail-from");
  compare->add_option("--tail-from", tail_from, "Radius where the declared tail takes over");
  bool compare_all = false;
  compare->add_flag("--all-routes", compare_all, "Also classify the comparison model");

  auto* ends = app.add_subcommand("ends", "Both ends of a warped line R x_f S^{m-1}");
  add_common(ends, common);
  std::string f, tail_pos, tail_neg;
  std::vector<double> line_blend;
  std::vector<std::string> line_routes{"integral"};
  ends->add_option("--f", f, "Warping function f(t) on the line")->required();
  ends->add_option("--tail-pos", tail_pos, "Tail formula in r for the end at +inf");
  ends->add_option("--tail-neg", tail_neg, "Tail formula in r for the end at -inf");
  ends->add_option("--blend", line_blend, "Blend window start end")->expected(2);
  ends->add_option("--routes", line_routes, "Routes: integral exterior heat")->capture_default_str();
  int line_dim = 2;
  ends->add_option("--dim", line_dim, "Dimension m")->capture_default_str();
  std::vector<std::string> line_params;
  ends->add_option("--param", line_params, "Parameter name=value (repeatable)");

  auto* iso = app.add_subcommand("isoperimetry", "Faber-Krahn profile: V(t), Gaussian bound, Feller");
  add_common(iso, common);
  std::string Lambda;
  std::optional<double> T, distance;
  std::vector<double> iso_t;
  std::vector<std::string> iso_params;
  iso->add_option("--Lambda", Lambda, "Faber-Krahn profile Lambda(s)")->required();
  iso->add_option("--T", T, "Regularity threshold (default: infinity)");
  iso->add_option("--t", iso_t, "Times at which V(t) is reported");
  iso->add_option("--distance", distance, "Distance in the Gaussian bound");
  iso->add_option("--param", iso_params, "Parameter name=value (repeatable)");

  auto* run = app.add_subcommand("run", "Run a scenario file or a preset by name");
  add_common(run, common);
  std::string scenario_path;
  run->add_option("scenario", scenario_path, "Scenario JSON file or preset name")->required();

  auto* presets = app.add_subcommand("presets", "List the bundled scenarios");
  std::string write_dir;
  bool presets_json = false;
  presets->add_option("--write", write_dir, "Write every preset as <dir>/<name>.json");
  presets->add_flag("--json", presets_json, "Print the catalog as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitValidation;
  }

  try {
    if (*presets) {
      if (!write_dir.empty()) {
        for (const auto& p : write_presets(write_dir)) std::cout << "wrote " << p << "\n";
        return kExitOk;
      }
      if (presets_json) {
        json cat = json::array();
        for (const auto& p : list_presets())
          cat.push_back({{"name", p.name}, {"anchor", p.anchor}, {"tags", p.tags}, {"scenario", parse_json_text(p.text)}});
        std::cout << cat.dump(2) << "\n";
        return kExitOk;
      }
      for (const auto& p : list_presets()) {
        std::cout << p.name << "\n    anchor: " << p.anchor << "\n";
        if (!p.tags.empty()) {
          std::cout << "    tags:";
          for (const auto& t : p.tags) std::cout << " [" << t << "]";
          std::cout << "\n";
        }
      }
      return kExitOk;
    }
    if (*run) {
      if (!std::filesystem::exists(scenario_path)) {
        if (const Preset* p = find_preset(scenario_path)) return run_doc(parse_json_text(p->text), common);
      }
      return run_doc(load_json_file(scenario_path), common);
    }
    if (*classify) return run_doc(model_doc(model, "classify", {"integral"}), common);
    if (*exterior) {
      json doc = model_doc(model, "exterior", {"exterior"});
      doc["exterior"] = {{"R0", R0}, {"lambda", lambda}};
      return run_doc(doc, common);
    }
    if (*heat) {
      json doc = model_doc(model, "heat", {"heat"});
      json h{{"R", heat_R}};
      if (!heat_t.empty()) h["times"] = heat_t;
      if (!mass_t.empty()) h["mass_times"] = mass_t;
      doc["heat"] = h;
      return run_doc(doc, common);
    }
    if (*compare) {
      if (G.empty()) return run_doc(model_doc(model, "compare", {"comparison"}), common);
      json c{{"dim", model.dim}, {"G", G}, {"bound", bound}, {"beta", beta}};
      if (!declared_tail.empty()) {
        c["declared_tail"] = declared_tail;
        c["tail_from"] = tail_from;
      }
      const std::vector<std::string> routes =
          compare_all ? std::vector<std::string>{"integral", "exterior", "heat", "comparison"}
                      : std::vector<std::string>{"comparison"};
      return run_doc(json{{"version", kScenarioVersion},
                          {"name", "compare"},
                          {"kind", "curvature_bound"},
                          {"curvature", c},
                          {"params", params_json(model.params)},
                          {"routes", routes}},
                     common);
    }
    if (*ends) {
      json w{{"dim", line_dim}, {"f", f}};
      if (!tail_pos.empty()) w["tail_pos"] = tail_pos;
      if (!tail_neg.empty()) w["tail_neg"] = tail_neg;
      if (!line_blend.empty()) w["blend"] = line_blend;
      return run_doc(json{{"version", kScenarioVersion},
                          {"name", "ends"},
                          {"kind", "warped_line"},
                          {"warped_line", w},
                          {"params", params_json(line_params)},
                          {"routes", line_routes}},
                     common);
    }
    if (*iso) {
      json fk{{"Lambda", Lambda}};
      if (T) fk["T"] = *T;
      if (!iso_t.empty()) fk["times"] = iso_t;
      if (distance) fk["distance"] = *distance;
      return run_doc(json{{"version", kScenarioVersion},
                          {"name", "isoperimetry"},
                          {"kind", "faber_krahn"},
                          {"faber_krahn", fk},
                          {"params", params_json(iso_params)},
                          {"routes", {"isoperimetry"}}},
                     common);
    }
  } catch (const ScenarioError& e) {
    print_error(e, common.json_out);
    return kExitValidation;
  } catch (const ParseError& e) {
    print_error(e, common.json_out);
    return kExitValidation;
  } catch (const Error& e) {
    print_error(e, common.json_out);
    return kExitRouteFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRouteFailure;
  }
  return kExitOk;
}
