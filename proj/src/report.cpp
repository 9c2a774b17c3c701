#include "feller/report.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "feller/classifier.hpp"
#include "feller/comparison.hpp"
#include "feller/ends.hpp"
#include "feller/exterior.hpp"
#include "feller/heat.hpp"
#include "feller/isoperimetry.hpp"

namespace feller {

using nlohmann::json;

namespace {

struct RunOptions {
  ClassifierOptions classifier;
  ExteriorOptions exterior;
  HeatOptions heat;
  JacobiOptions jacobi;
};

RunOptions options_for(const Scenario& s) {
  RunOptions o;
  o.classifier.tail.margin = s.tol.tail_margin;
  o.classifier.tail.window_budget = s.tol.tail_budget;
  o.exterior.tolerance = s.tol.exterior;
  o.exterior.report_radius = s.tol.max_radius;
  o.heat.wall_tolerance = s.tol.heat_wall;
  o.heat.richardson_tolerance = s.tol.heat_richardson;
  if (s.curvature.declared_tail) {
    o.jacobi.declared_tail = WarpingSource::from_formula(*s.curvature.declared_tail, s.params);
    o.jacobi.tail_from = s.curvature.tail_from;
  }
  return o;
}

WarpingFunction warping_of(const ModelSpec& m, const ParamTable& params) {
  if (m.table) {
    WarpingSource body = load_table_csv(*m.table);
    if (!m.tail) return WarpingFunction(std::move(body));
    return WarpingFunction(std::move(body), WarpingSource::from_formula(*m.tail, params), m.blend_start, m.blend_end);
  }
  if (m.tail) return WarpingFunction::spliced(m.g, *m.tail, m.blend_start, m.blend_end, params);
  return WarpingFunction::parse(m.g, params);
}

WarpedLine warped_line_of(const WarpedLineSpec& w, const ParamTable& params) {
  WarpedLine W = WarpedLine::parse(w.f, w.dim, params);
  if (w.tail_pos) W.tail_pos = Expr::parse(*w.tail_pos, "r", params);
  if (w.tail_neg) W.tail_neg = Expr::parse(*w.tail_neg, "r", params);
  W.blend_start = w.blend_start;
  W.blend_end = w.blend_end;
  return W;
}

struct Part {
  std::string name;
  ModelManifold model;
};

/// The model manifolds a scenario speaks about, built once on first use.
/// A construction error is remembered and rethrown to every route that asks.
class Subjects {
 public:
  Subjects(const Scenario& s, const RunOptions& o) : s_(s), o_(o) {}

  const std::vector<Part>& parts() {
    if (error_) std::rethrow_exception(error_);
    if (!built_) {
      try {
        build();
        built_ = true;
      } catch (...) {
        error_ = std::current_exception();
        throw;
      }
    }
    return parts_;
  }

  const HsuSharpness* sharpness() {
    (void)parts();
    return sharp_ ? &*sharp_ : nullptr;
  }

 private:
  void build() {
    switch (s_.kind) {
      case ScenarioKind::Model:
        parts_.push_back({"manifold", make_model(s_.model.dim, warping_of(s_.model, s_.params))});
        break;
      case ScenarioKind::WarpedLine: {
        EndModels e = split_ends(warped_line_of(s_.line, s_.params));
        parts_.push_back({"end1", std::move(e.end1)});
        parts_.push_back({"end2", std::move(e.end2)});
        break;
      }
      case ScenarioKind::CurvatureBound: {
        const auto& c = s_.curvature;
        const Expr G = Expr::parse(c.G, "r", s_.params);
        if (c.bound == "hsu") {
          sharp_.emplace(hsu_sharpness_model(G, c.beta, c.dim));
          parts_.push_back({"sharpness_model", sharp_->model});
        } else {
          parts_.push_back({"comparison_model", jacobi_model(G, c.dim, o_.jacobi)});
        }
        break;
      }
      case ScenarioKind::FaberKrahn:
        break;
    }
  }

  const Scenario& s_;
  const RunOptions& o_;
  std::vector<Part> parts_;
  std::optional<HsuSharpness> sharp_;
  bool built_ = false;
  std::exception_ptr error_;
};

json verdict_list(const ClassificationReport& r) {
  return json{{"parabolic", to_json(r.parabolic)},
              {"stochastically_complete", to_json(r.stochastically_complete)},
              {"feller", to_json(r.feller)},
              {"volume_finite", to_json(r.volume_finite)}};
}

json classification_details(const ClassificationReport& r) {
  json d;
  d["verdicts"] = verdict_list(r);
  d["volume"] = r.volume_value;
  json flags = json::array();
  for (const auto& f : r.consistency_flags)
    flags.push_back({{"name", f.name}, {"violated", f.violated}, {"detail", f.detail}});
  d["consistency_flags"] = flags;
  d["consistent"] = r.consistent();
  json green = json::array();
  for (const auto& [rr, G] : r.green_kernel_at) green.push_back({rr, G});
  d["green_kernel"] = green;
  return d;
}

Verdict combined(const std::vector<Verdict>& parts) {
  return parts.size() == 1 ? parts.front() : combine_end_verdicts(parts);
}

RouteResult integral_route(const Scenario& s, const RunOptions& o, Subjects& subj) {
  RouteResult res;
  if (s.kind == ScenarioKind::WarpedLine) {
    const WarpedLineReport w = classify_warped_line(warped_line_of(s.line, s.params), o.classifier);
    res.verdicts.push_back({"feller", w.feller});
    res.details["end1"] = classification_details(w.end1);
    res.details["end2"] = classification_details(w.end2);
    res.details["failing_end"] = w.failing_end;
    return res;
  }
  const Part& p = subj.parts().front();
  const ClassificationReport r = classify(p.model, o.classifier);
  res.verdicts.push_back({"feller", r.feller});
  res.verdicts.push_back({"parabolic", r.parabolic});
  res.verdicts.push_back({"stochastically_complete", r.stochastically_complete});
  res.verdicts.push_back({"volume_finite", r.volume_finite});
  res.details = classification_details(r);
  res.details.erase("verdicts");
  return res;
}

RouteResult exterior_route(const Scenario& s, const RunOptions& o, Subjects& subj) {
  RouteResult res;
  std::vector<Verdict> verdicts;
  for (const Part& p : subj.parts()) {
    const ExhaustionTrace tr = minimal_exterior_solution(p.model, s.exterior.R0, s.exterior.lambda, o.exterior);
    const ExhaustionChecks ck = check_exhaustion(tr);
    verdicts.push_back(decay_verdict(tr));
    json d;
    d["decay_verdict"] = to_json(verdicts.back());
    d["converged"] = tr.converged;
    d["note"] = tr.note;
    d["report_radius"] = tr.report_radius;
    d["far_value"] = tr.far_value;
    d["limit_estimate"] = tr.limit_estimate;
    d["inner_slope"] = tr.inner_slope;
    d["outer_radii"] = tr.outer_radii;
    d["sup_deltas"] = tr.sup_deltas;
    d["checks"] = {{"monotone_in_n", ck.monotone_in_n},
                   {"worst_monotone_violation", ck.worst_monotone_violation},
                   {"bounded", ck.bounded},
                   {"flux_nondecreasing", ck.flux_nondecreasing},
                   {"strictly_decreasing", ck.strictly_decreasing},
                   {"slope_dichotomy", ck.slope_dichotomy}};
    res.details[p.name] = d;
    DumpTable t{p.name + "_h", {"r", "h"}, {}};
    const RadialProfile& h = tr.limit();
    for (std::size_t i = 0; i < h.size(); ++i) t.rows.push_back({h.r[i], h.v[i]});
    res.tables.push_back(std::move(t));
  }
  res.verdicts.push_back({"feller", combined(verdicts)});
  return res;
}

RouteResult heat_route(const Scenario& s, const RunOptions& o, Subjects& subj) {
  RouteResult res;
  std::vector<Verdict> verdicts;
  const auto radii = default_probe_radii(s.heat.R);
  for (const Part& p : subj.parts()) {
    std::vector<Verdict> probes;
    json d;
    d["probe_radii"] = radii;
    json pj = json::array();
    DumpTable t{p.name + "_u", {"t", "r", "u"}, {}};
    for (double time : s.heat.times) {
      HeatState st;
      probes.push_back(feller_probe(p.model, s.heat.R, time, radii, o.heat, &st));
      pj.push_back({{"t", time},
                    {"verdict", to_json(probes.back())},
                    {"wall", st.outer_radius},
                    {"wall_delta", st.wall_delta},
                    {"wall_too_close", st.wall_too_close},
                    {"richardson_error", st.richardson_error},
                    {"richardson_ok", st.richardson_ok},
                    {"mass", st.mass},
                    {"initial_mass", st.initial_mass}});
      for (std::size_t i = 0; i < st.profile.size(); ++i) t.rows.push_back({time, st.profile.r[i], st.profile.v[i]});
    }
    d["probes"] = pj;
    verdicts.push_back(combine_all(probes));
    res.tables.push_back(std::move(t));

    if (s.kind != ScenarioKind::WarpedLine && !s.heat.mass_times.empty()) {
      const auto hist = mass_history(p.model, s.heat.mass_times, o.heat);
      double worst_loss = 0.0, worst_dev = 0.0;
      DumpTable mt{p.name + "_mass", {"t", "mass"}, {}};
      json mj = json::array();
      for (const auto& [time, m] : hist) {
        worst_loss = std::max(worst_loss, 1.0 - m);
        worst_dev = std::max(worst_dev, std::fabs(1.0 - m));
        mt.rows.push_back({time, m});
        mj.push_back({time, m});
      }
      d["mass_history"] = mj;
      res.tables.push_back(std::move(mt));
      Verdict sc;
      if (worst_loss > 1e-3) sc = Verdict::make(Truth::Fails, "pole mass of P_t 1 drops visibly below 1");
      else if (worst_dev <= 1e-4) sc = Verdict::make(Truth::Holds, "pole mass of P_t 1 stays within 1e-4 of 1");
      else sc = Verdict::make(Truth::Inconclusive, "pole mass of P_t 1 slightly below 1");
      sc.with("max_mass_loss", worst_loss);
      res.verdicts.push_back({"stochastically_complete", sc});
    }
    res.details[p.name] = d;
  }
  res.verdicts.insert(res.verdicts.begin(), {"feller", combined(verdicts)});
  return res;
}

json convergence_json(const ConvergenceVerdict& c) {
  return json{{"status", to_string(c.status)},
              {"partial_value", c.partial_value},
              {"last_log_ratio", c.last_log_ratio},
              {"windows", c.windows.size()},
              {"note", c.note}};
}

RouteResult comparison_route(const Scenario& s, const RunOptions& o, Subjects& subj) {
  RouteResult res;
  if (s.kind == ScenarioKind::CurvatureBound) {
    const auto& c = s.curvature;
    const Expr G = Expr::parse(c.G, "r", s.params);
    if (c.bound == "hsu") {
      const Verdict v = hsu_criterion(G, o.classifier.tail);
      res.verdicts.push_back({"feller", v});
      const HsuSharpness* h = subj.sharpness();
      res.details["sharpness"] = {{"alpha", h->alpha},
                                  {"alpha_heuristic", h->alpha_heuristic},
                                  {"window_maxima", h->window_maxima},
                                  {"curvature_check", to_json(h->curvature_check)},
                                  {"volume_tail", convergence_json(h->volume_tail)},
                                  {"ratio_tail", convergence_json(h->ratio_tail)},
                                  {"checks_pass", h->checks_pass()}};
    } else {
      const CurvatureBound b{G, c.bound == "sectional_upper" ? BoundKind::SectionalUpper : BoundKind::RicciLower,
                             c.dim, c.G};
      res.verdicts.push_back({"feller", apply_bound(b, o.jacobi)});
      res.details["bound"] = to_string(b.kind);
    }
    return res;
  }
  // A model: the Khasminskii-type test with u the alpha function, which
  // needs finite volume and stochastic completeness.
  const Part& p = subj.parts().front();
  const Verdict vol = classify_volume_finite(p.model, o.classifier);
  const Verdict sc = classify_stochastically_complete(p.model, o.classifier);
  res.details["volume_finite"] = to_json(vol);
  res.details["stochastically_complete"] = to_json(sc);
  if (!vol.holds() || !sc.holds()) {
    res.verdicts.push_back(
        {"feller", Verdict::make(Truth::Inconclusive, "subsolution test needs finite volume and stochastic completeness")});
    return res;
  }
  const double r0 = s.exterior.R0, r1 = 64.0 * s.exterior.R0;
  RadialProfile u;
  try {
    u = alpha_function(p.model, r0, r1);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EvaluationFailure) throw;
    res.verdicts.push_back({"feller", Verdict::make(Truth::Inconclusive, std::string("alpha function unavailable: ") + e.what())});
    return res;
  }
  const Nonlinearity f{Expr::constant(1.0), 1.0, 0.0, u.v.front()};
  res.verdicts.push_back({"feller", khasminskii_subsolution_test(p.model, u, f, r0)});
  DumpTable t{"alpha_function", {"r", "u"}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) t.rows.push_back({u.r[i], u.v[i]});
  res.tables.push_back(std::move(t));
  return res;
}

RouteResult isoperimetry_route(const Scenario& s) {
  RouteResult res;
  const auto& f = s.faber_krahn;
  const FaberKrahnProfile P = FaberKrahnProfile::parse(f.Lambda, s.params);
  res.verdicts.push_back({"feller", feller_from_faber_krahn(P, f.T)});
  res.details["admissibility"] = convergence_json(P.integrability());
  if (!P.admissible()) return res;
  const RegularityResult reg = check_regularity(P, f.T);
  res.details["regularity"] = {{"pass", reg.pass}, {"reason", reg.reason}, {"samples", reg.samples.size()}};
  DumpTable rt{"regularity", {"t", "tV'/V"}, {}};
  for (const auto& [t, g] : reg.samples) rt.rows.push_back({t, g});
  DumpTable vt{"volume", {"t", "V", "tV'/V", "gaussian_bound"}, {}};
  json vj = json::array();
  for (double t : f.times) {
    const double V = v_from_lambda(P, t);
    const double rate = log_growth_rate(P, t);
    const double bound = gaussian_bound(P, f.constants, f.distance, t);
    vt.rows.push_back({t, V, rate, bound});
    vj.push_back({{"t", t}, {"V", V}, {"growth_rate", rate}, {"gaussian_bound", bound}});
  }
  res.details["volume"] = vj;
  res.details["distance"] = f.distance;
  res.tables.push_back(std::move(vt));
  res.tables.push_back(std::move(rt));
  return res;
}

std::string truth_name(Truth t) { return to_string(t); }

}  // namespace

const Verdict* RouteResult::find(const std::string& property) const {
  for (const auto& pv : verdicts)
    if (pv.property == property) return &pv.verdict;
  return nullptr;
}

std::size_t Report::conflicts() const {
  return static_cast<std::size_t>(std::count_if(cross.begin(), cross.end(), [](const CrossEntry& e) { return e.conflict(); }));
}

bool Report::route_failure() const {
  return std::any_of(routes.begin(), routes.end(), [](const RouteResult& r) { return !r.ok; });
}

int Report::exit_code() const {
  if (conflicts() > 0) return kExitConflict;
  if (route_failure()) return kExitRouteFailure;
  return kExitOk;
}

const RouteResult* Report::find(Route r) const {
  for (const auto& x : routes)
    if (x.route == r) return &x;
  return nullptr;
}

std::vector<CrossEntry> cross_validate(const std::vector<RouteResult>& routes) {
  std::vector<CrossEntry> out;
  for (const char* prop : {"feller", "parabolic", "stochastically_complete", "volume_finite"}) {
    for (std::size_t i = 0; i < routes.size(); ++i) {
      const Verdict* a = routes[i].ok ? routes[i].find(prop) : nullptr;
      if (!a) continue;
      for (std::size_t j = i + 1; j < routes.size(); ++j) {
        const Verdict* b = routes[j].ok ? routes[j].find(prop) : nullptr;
        if (b) out.push_back({prop, routes[i].route, routes[j].route, a->status, b->status});
      }
    }
  }
  return out;
}

Report run_scenario(const Scenario& s) {
  Report rep;
  rep.scenario = s;
  rep.scenario_hash = fnv1a64(to_json(s).dump());
  const RunOptions o = options_for(s);
  Subjects subj(s, o);
  for (Route r : s.routes) {
    RouteResult res;
    try {
      switch (r) {
        case Route::Integral: res = integral_route(s, o, subj); break;
        case Route::Exterior: res = exterior_route(s, o, subj); break;
        case Route::Heat: res = heat_route(s, o, subj); break;
        case Route::Comparison: res = comparison_route(s, o, subj); break;
        case Route::Isoperimetry: res = isoperimetry_route(s); break;
      }
    } catch (const Error& e) {
      res = RouteResult{};
      res.ok = false;
      res.error_code = to_string(e.code());
      res.error = e.what();
    } catch (const std::exception& e) {
      res = RouteResult{};
      res.ok = false;
      res.error_code = "Unexpected";
      res.error = e.what();
    }
    res.route = r;
    rep.routes.push_back(std::move(res));
  }
  rep.cross = cross_validate(rep.routes);
  return rep;
}

Report run_scenario(const std::string& path) { return run_scenario(load_scenario(path)); }

json to_json(const Verdict& v) {
  json ev = json::object();
  for (const auto& [k, x] : v.evidence) ev[k] = x;
  return json{{"status", to_string(v.status)}, {"basis", v.basis}, {"evidence", ev}};
}

json to_json(const Report& r) {
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016" PRIx64, r.scenario_hash);
  json j;
  j["provenance"] = {{"tool", "feller"},
                     {"version", kToolVersion},
                     {"scenario_hash", std::string("fnv1a64:") + hash},
                     {"options", to_json(r.scenario)}};
  j["scenario"] = {{"name", r.scenario.name},
                   {"kind", to_string(r.scenario.kind)},
                   {"anchor", r.scenario.anchor},
                   {"tags", r.scenario.tags}};
  json routes = json::array();
  for (const auto& rr : r.routes) {
    json x;
    x["route"] = to_string(rr.route);
    x["ok"] = rr.ok;
    if (!rr.ok) x["error"] = {{"code", rr.error_code}, {"message", rr.error}};
    json vs = json::object();
    for (const auto& pv : rr.verdicts) vs[pv.property] = to_json(pv.verdict);
    x["verdicts"] = vs;
    x["details"] = rr.details;
    routes.push_back(x);
  }
  j["routes"] = routes;
  json entries = json::array();
  for (const auto& e : r.cross) {
    const char* state = e.conflict() ? "conflict"
                        : (e.va == Truth::Inconclusive || e.vb == Truth::Inconclusive) ? "open"
                                                                                         : "agree";
    entries.push_back({{"property", e.property},
                       {"a", to_string(e.a)},
                       {"b", to_string(e.b)},
                       {"a_status", to_string(e.va)},
                       {"b_status", to_string(e.vb)},
                       {"state", state}});
  }
  j["cross_validation"] = {{"entries", entries}, {"conflicts", r.conflicts()}, {"clean", r.conflicts() == 0}};
  j["exit_code"] = r.exit_code();
  return j;
}

std::string summarize(const Report& r) {
  std::ostringstream os;
  os << "scenario " << r.scenario.name << " (" << to_string(r.scenario.kind) << ")";
  if (!r.scenario.anchor.empty()) os << " [" << r.scenario.anchor << "]";
  os << "\n";
  for (const auto& rr : r.routes) {
    os << "  " << std::left << std::setw(13) << to_string(rr.route);
    if (!rr.ok) {
      os << " error " << rr.error << "\n";
      continue;
    }
    for (const auto& pv : rr.verdicts) os << " " << pv.property << "=" << truth_name(pv.verdict.status);
    os << "\n";
    for (const auto& pv : rr.verdicts)
      if (pv.property == "feller") os << "  " << std::setw(13) << "" << " (" << pv.verdict.basis << ")\n";
  }
  const std::size_t n = r.conflicts();
  os << "cross-validation: " << (n ? std::to_string(n) + " conflict(s)" : std::string("clean")) << " over "
     << r.cross.size() << " pair(s)\n";
  for (const auto& e : r.cross)
    if (e.conflict())
      os << "  CONFLICT " << e.property << ": " << to_string(e.a) << "=" << to_string(e.va) << " vs "
         << to_string(e.b) << "=" << to_string(e.vb) << "\n";
  return os.str();
}

std::vector<std::string> dump_profiles(const Report& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::string stem = r.scenario.name;
  std::replace_if(stem.begin(), stem.end(), [](char c) { return !(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'); }, '_');
  std::vector<std::string> written;
  for (const auto& rr : r.routes) {
    for (const auto& t : rr.tables) {
      const fs::path path = fs::path(dir) / (stem + "_" + to_string(rr.route) + "_" + t.name + ".csv");
      std::ofstream out(path);
      if (!out) throw Error(ErrorCode::ValidationError, "cannot write " + path.string());
      for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
      out << "\n" << std::setprecision(17);
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << "\n";
      }
      written.push_back(path.string());
    }
  }
  return written;
}

}  // namespace feller
