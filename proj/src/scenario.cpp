#include "feller/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace feller {

using nlohmann::json;

const char* to_string(ScenarioKind k) noexcept {
  switch (k) {
    case ScenarioKind::Model: return "model";
    case ScenarioKind::WarpedLine: return "warped_line";
    case ScenarioKind::CurvatureBound: return "curvature_bound";
    case ScenarioKind::FaberKrahn: return "faber_krahn";
  }
  return "?";
}

const char* to_string(Route r) noexcept {
  switch (r) {
    case Route::Integral: return "integral";
    case Route::Exterior: return "exterior";
    case Route::Heat: return "heat";
    case Route::Comparison: return "comparison";
    case Route::Isoperimetry: return "isoperimetry";
  }
  return "?";
}

std::optional<ScenarioKind> kind_from_string(std::string_view s) {
  for (auto k : {ScenarioKind::Model, ScenarioKind::WarpedLine, ScenarioKind::CurvatureBound, ScenarioKind::FaberKrahn})
    if (s == to_string(k)) return k;
  return std::nullopt;
}

std::optional<Route> route_from_string(std::string_view s) {
  for (auto r : {Route::Integral, Route::Exterior, Route::Heat, Route::Comparison, Route::Isoperimetry})
    if (s == to_string(r)) return r;
  return std::nullopt;
}

std::vector<Route> applicable_routes(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::Model: return {Route::Integral, Route::Exterior, Route::Heat, Route::Comparison};
    case ScenarioKind::WarpedLine: return {Route::Integral, Route::Exterior, Route::Heat};
    case ScenarioKind::CurvatureBound: return {Route::Integral, Route::Exterior, Route::Heat, Route::Comparison};
    case ScenarioKind::FaberKrahn: return {Route::Isoperimetry};
  }
  return {};
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& message) {
  throw ScenarioError(ErrorCode::ValidationError, field, 0, message);
}

/// Typed access to one JSON object; finish() rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) invalid(path_, "expected an object");
  }

  [[nodiscard]] std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    if (!j_.contains(key)) return false;
    used_.insert(key);
    return true;
  }

  double number(const std::string& key, double def) {
    return has(key) ? as_number(j_.at(key), field(key)) : def;
  }

  int integer(const std::string& key, int def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) invalid(field(key), "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key, const std::string& def, bool required = false) {
    if (!has(key)) {
      if (required) invalid(field(key), "missing");
      return def;
    }
    const json& v = j_.at(key);
    if (!v.is_string()) invalid(field(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<std::string> opt_string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return string(key, {});
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> def) {
    if (!has(key)) return def;
    const json& v = j_.at(key);
    if (!v.is_array()) invalid(field(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], field(key) + "[" + std::to_string(i) + "]"));
    return out;
  }

  std::vector<std::string> strings(const std::string& key) {
    if (!has(key)) return {};
    const json& v = j_.at(key);
    if (!v.is_array()) invalid(field(key), "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) invalid(field(key) + "[" + std::to_string(i) + "]", "expected a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

  std::optional<Reader> object(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return Reader(j_.at(key), field(key));
  }

  [[nodiscard]] const json& raw(const std::string& key) const { return j_.at(key); }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!used_.count(it.key())) invalid(field(it.key()), "unknown key");
  }

 private:
  static double as_number(const json& v, const std::string& field) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    }
    invalid(field, "expected a number");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

void check_formula(const std::string& text, const char* var, const ParamTable& params, const std::string& field) {
  try {
    (void)Expr::parse(text, var, params);
  } catch (const ParseError& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(ErrorCode::ParseError)) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw ScenarioError(ErrorCode::ParseError, field, 0, msg);
  }
}

void check_dim(int m, const std::string& field) {
  if (m < 2 || m > 64) invalid(field, "dimension must lie in [2, 64]");
}

void check_positive(double x, const std::string& field) {
  if (!(x > 0.0) || !std::isfinite(x)) invalid(field, "must be a positive finite number");
}

void check_times(const std::vector<double>& t, const std::string& field, bool allow_zero) {
  for (double x : t)
    if (!(allow_zero ? x >= 0.0 : x > 0.0) || !std::isfinite(x)) invalid(field, "times must be finite and positive");
}

void check_window(double a, double b, const std::string& field) {
  if (!(a > 0.0 && b > a) || !std::isfinite(b)) invalid(field, "blend window needs 0 < start < end");
}

json number_json(double x) {
  if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
  return json(x);
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  Reader top(doc, "");
  Scenario s;
  s.version = top.integer("version", -1);
  if (s.version != kScenarioVersion)
    invalid("version", "expected version " + std::to_string(kScenarioVersion));
  s.name = top.string("name", "scenario");
  s.anchor = top.string("anchor", "");
  s.description = top.string("description", "");
  s.tags = top.strings("tags");

  const std::string kind = top.string("kind", "", true);
  const auto k = kind_from_string(kind);
  if (!k) invalid("kind", "unknown kind '" + kind + "'");
  s.kind = *k;

  if (auto p = top.object("params")) {
    for (auto it = doc.at("params").begin(); it != doc.at("params").end(); ++it) {
      if (!it.value().is_number()) invalid("params." + it.key(), "expected a number");
      s.params[it.key()] = it.value().get<double>();
      (void)p->has(it.key());
    }
  }

  auto need = [&](const char* key) {
    auto r = top.object(key);
    if (!r) invalid(key, std::string("required for kind ") + to_string(s.kind));
    return std::move(*r);
  };

  switch (s.kind) {
    case ScenarioKind::Model: {
      Reader r = need("model");
      s.model.dim = r.integer("dim", 2);
      check_dim(s.model.dim, r.field("dim"));
      s.model.table = r.opt_string("table");
      if (s.model.table) {
        if (!std::filesystem::exists(*s.model.table)) invalid(r.field("table"), "file not found: " + *s.model.table);
      } else {
        s.model.g = r.string("g", "", true);
        check_formula(s.model.g, "r", s.params, r.field("g"));
      }
      s.model.tail = r.opt_string("tail");
      if (s.model.tail) check_formula(*s.model.tail, "r", s.params, r.field("tail"));
      const auto w = r.numbers("blend", {s.model.blend_start, s.model.blend_end});
      if (w.size() != 2) invalid(r.field("blend"), "expected [start, end]");
      s.model.blend_start = w[0];
      s.model.blend_end = w[1];
      if (s.model.tail) check_window(w[0], w[1], r.field("blend"));
      r.finish();
      break;
    }
    case ScenarioKind::WarpedLine: {
      Reader r = need("warped_line");
      s.line.dim = r.integer("dim", 2);
      check_dim(s.line.dim, r.field("dim"));
      s.line.f = r.string("f", "", true);
      check_formula(s.line.f, "t", s.params, r.field("f"));
      s.line.tail_pos = r.opt_string("tail_pos");
      s.line.tail_neg = r.opt_string("tail_neg");
      if (s.line.tail_pos) check_formula(*s.line.tail_pos, "r", s.params, r.field("tail_pos"));
      if (s.line.tail_neg) check_formula(*s.line.tail_neg, "r", s.params, r.field("tail_neg"));
      const auto w = r.numbers("blend", {s.line.blend_start, s.line.blend_end});
      if (w.size() != 2) invalid(r.field("blend"), "expected [start, end]");
      check_window(w[0], w[1], r.field("blend"));
      s.line.blend_start = w[0];
      s.line.blend_end = w[1];
      r.finish();
      break;
    }
    case ScenarioKind::CurvatureBound: {
      Reader r = need("curvature");
      s.curvature.dim = r.integer("dim", 2);
      check_dim(s.curvature.dim, r.field("dim"));
      s.curvature.G = r.string("G", "", true);
      check_formula(s.curvature.G, "r", s.params, r.field("G"));
      s.curvature.bound = r.string("bound", s.curvature.bound);
      if (s.curvature.bound != "sectional_upper" && s.curvature.bound != "ricci_lower" && s.curvature.bound != "hsu")
        invalid(r.field("bound"), "expected sectional_upper, ricci_lower or hsu");
      s.curvature.beta = r.number("beta", s.curvature.beta);
      check_positive(s.curvature.beta, r.field("beta"));
      s.curvature.declared_tail = r.opt_string("declared_tail");
      if (s.curvature.declared_tail) check_formula(*s.curvature.declared_tail, "r", s.params, r.field("declared_tail"));
      s.curvature.tail_from = r.number("tail_from", s.curvature.tail_from);
      if (s.curvature.declared_tail) check_positive(s.curvature.tail_from, r.field("tail_from"));
      r.finish();
      break;
    }
    case ScenarioKind::FaberKrahn: {
      Reader r = need("faber_krahn");
      s.faber_krahn.Lambda = r.string("Lambda", "", true);
      check_formula(s.faber_krahn.Lambda, "s", s.params, r.field("Lambda"));
      s.faber_krahn.T = r.number("T", s.faber_krahn.T);
      if (!(s.faber_krahn.T > 0.0)) invalid(r.field("T"), "must be positive");
      s.faber_krahn.times = r.numbers("times", s.faber_krahn.times);
      check_times(s.faber_krahn.times, r.field("times"), false);
      s.faber_krahn.distance = r.number("distance", s.faber_krahn.distance);
      if (!(s.faber_krahn.distance >= 0.0)) invalid(r.field("distance"), "must be nonnegative");
      if (auto c = r.object("constants")) {
        s.faber_krahn.constants.C = c->number("C", s.faber_krahn.constants.C);
        s.faber_krahn.constants.c = c->number("c", s.faber_krahn.constants.c);
        s.faber_krahn.constants.D = c->number("D", s.faber_krahn.constants.D);
        c->finish();
        if (!(s.faber_krahn.constants.D > 4.0)) invalid(r.field("constants.D"), "must exceed 4");
        check_positive(s.faber_krahn.constants.C, r.field("constants.C"));
        check_positive(s.faber_krahn.constants.c, r.field("constants.c"));
      }
      r.finish();
      break;
    }
  }

  const auto allowed = applicable_routes(s.kind);
  if (top.has("routes")) {
    const auto names = top.strings("routes");
    if (names.empty()) invalid("routes", "must not be empty");
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string f = "routes[" + std::to_string(i) + "]";
      const auto rt = route_from_string(names[i]);
      if (!rt) invalid(f, "unknown route '" + names[i] + "'");
      if (std::find(allowed.begin(), allowed.end(), *rt) == allowed.end())
        invalid(f, "route '" + names[i] + "' does not apply to kind " + to_string(s.kind));
      if (std::find(s.routes.begin(), s.routes.end(), *rt) != s.routes.end()) invalid(f, "duplicate route");
      s.routes.push_back(*rt);
    }
    // Report order is fixed regardless of the order requested.
    std::vector<Route> ordered;
    for (Route r : allowed)
      if (std::find(s.routes.begin(), s.routes.end(), r) != s.routes.end()) ordered.push_back(r);
    s.routes = ordered;
  } else {
    s.routes = allowed;
  }
  auto wants = [&](Route r) { return std::find(s.routes.begin(), s.routes.end(), r) != s.routes.end(); };
  if (s.kind == ScenarioKind::CurvatureBound && s.curvature.bound == "hsu" && !wants(Route::Comparison))
    invalid("routes", "the hsu bound needs the comparison route");

  if (auto r = top.object("exterior")) {
    s.exterior.R0 = r->number("R0", s.exterior.R0);
    s.exterior.lambda = r->number("lambda", s.exterior.lambda);
    check_positive(s.exterior.R0, r->field("R0"));
    check_positive(s.exterior.lambda, r->field("lambda"));
    r->finish();
  }
  if (auto r = top.object("heat")) {
    s.heat.R = r->number("R", s.heat.R);
    check_positive(s.heat.R, r->field("R"));
    s.heat.times = r->numbers("times", s.heat.times);
    if (s.heat.times.empty()) invalid(r->field("times"), "must not be empty");
    check_times(s.heat.times, r->field("times"), false);
    s.heat.mass_times = r->numbers("mass_times", s.heat.mass_times);
    check_times(s.heat.mass_times, r->field("mass_times"), true);
    r->finish();
  }
  if (auto r = top.object("tolerances")) {
    s.tol.tail_margin = r->number("tail_margin", s.tol.tail_margin);
    if (!(s.tol.tail_margin > 0.0 && s.tol.tail_margin < 1.0)) invalid(r->field("tail_margin"), "must lie in (0, 1)");
    s.tol.tail_budget = r->integer("tail_budget", s.tol.tail_budget);
    if (s.tol.tail_budget < 16 || s.tol.tail_budget > 1000) invalid(r->field("tail_budget"), "must lie in [16, 1000]");
    s.tol.exterior = r->number("exterior", s.tol.exterior);
    check_positive(s.tol.exterior, r->field("exterior"));
    s.tol.heat_wall = r->number("heat_wall", s.tol.heat_wall);
    check_positive(s.tol.heat_wall, r->field("heat_wall"));
    s.tol.heat_richardson = r->number("heat_richardson", s.tol.heat_richardson);
    check_positive(s.tol.heat_richardson, r->field("heat_richardson"));
    s.tol.max_radius = r->number("max_radius", s.tol.max_radius);
    if (!(s.tol.max_radius >= 0.0) || !std::isfinite(s.tol.max_radius))
      invalid(r->field("max_radius"), "must be finite and nonnegative");
    r->finish();
  }
  if (s.tol.max_radius > 0.0 && s.tol.max_radius <= s.exterior.R0)
    invalid("tolerances.max_radius", "must exceed exterior.R0");
  top.finish();
  return s;
}

json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    throw ScenarioError(ErrorCode::ParseError, "", line, e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(ErrorCode::ValidationError, "", 0, "cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str());
}

Scenario parse_scenario_text(const std::string& text) { return parse_scenario(parse_json_text(text)); }

Scenario load_scenario(const std::string& path) { return parse_scenario(load_json_file(path)); }

json to_json(const Scenario& s) {
  json j;
  j["version"] = s.version;
  j["name"] = s.name;
  j["anchor"] = s.anchor;
  j["description"] = s.description;
  j["tags"] = s.tags;
  j["kind"] = to_string(s.kind);
  j["params"] = json::object();
  for (const auto& [k, v] : s.params) j["params"][k] = v;
  switch (s.kind) {
    case ScenarioKind::Model: {
      json m{{"dim", s.model.dim}};
      if (s.model.table) m["table"] = *s.model.table;
      else m["g"] = s.model.g;
      if (s.model.tail) {
        m["tail"] = *s.model.tail;
        m["blend"] = {s.model.blend_start, s.model.blend_end};
      }
      j["model"] = m;
      break;
    }
    case ScenarioKind::WarpedLine: {
      json w{{"dim", s.line.dim}, {"f", s.line.f}, {"blend", {s.line.blend_start, s.line.blend_end}}};
      if (s.line.tail_pos) w["tail_pos"] = *s.line.tail_pos;
      if (s.line.tail_neg) w["tail_neg"] = *s.line.tail_neg;
      j["warped_line"] = w;
      break;
    }
    case ScenarioKind::CurvatureBound: {
      json c{{"dim", s.curvature.dim}, {"G", s.curvature.G}, {"bound", s.curvature.bound}, {"beta", s.curvature.beta}};
      if (s.curvature.declared_tail) {
        c["declared_tail"] = *s.curvature.declared_tail;
        c["tail_from"] = s.curvature.tail_from;
      }
      j["curvature"] = c;
      break;
    }
    case ScenarioKind::FaberKrahn: {
      const auto& f = s.faber_krahn;
      j["faber_krahn"] = json{{"Lambda", f.Lambda},
                              {"T", number_json(f.T)},
                              {"times", f.times},
                              {"distance", f.distance},
                              {"constants", {{"C", f.constants.C}, {"c", f.constants.c}, {"D", f.constants.D}}}};
      break;
    }
  }
  json routes = json::array();
  for (Route r : s.routes) routes.push_back(to_string(r));
  j["routes"] = routes;
  j["exterior"] = {{"R0", s.exterior.R0}, {"lambda", s.exterior.lambda}};
  j["heat"] = {{"R", s.heat.R}, {"times", s.heat.times}, {"mass_times", s.heat.mass_times}};
  j["tolerances"] = {{"tail_margin", s.tol.tail_margin},   {"tail_budget", s.tol.tail_budget},
                     {"exterior", s.tol.exterior},         {"heat_wall", s.tol.heat_wall},
                     {"heat_richardson", s.tol.heat_richardson}, {"max_radius", s.tol.max_radius}};
  return j;
}

}  // namespace feller
