#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "feller/error.hpp"
#include "feller/expr.hpp"
#include "feller/isoperimetry.hpp"

namespace feller {

enum class ScenarioKind { Model, WarpedLine, CurvatureBound, FaberKrahn };
enum class Route { Integral, Exterior, Heat, Comparison, Isoperimetry };

[[nodiscard]] const char* to_string(ScenarioKind k) noexcept;
[[nodiscard]] const char* to_string(Route r) noexcept;
[[nodiscard]] std::optional<ScenarioKind> kind_from_string(std::string_view s);
[[nodiscard]] std::optional<Route> route_from_string(std::string_view s);

/// Routes that make sense for a kind, in report order.
[[nodiscard]] std::vector<Route> applicable_routes(ScenarioKind k);

/// Scenario file problems. `field()` is a dotted path into the document
/// (empty for syntax errors); `line()` is 1-based, 0 when unknown.
class ScenarioError : public Error {
 public:
  ScenarioError(ErrorCode code, std::string field, std::size_t line, const std::string& message)
      : Error(code, (field.empty() ? std::string() : "field '" + field + "': ") +
                        (line ? "line " + std::to_string(line) + ": " : std::string()) + message),
        field_(std::move(field)),
        line_(line) {}

  [[nodiscard]] const std::string& field() const noexcept { return field_; }
  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::string field_;
  std::size_t line_;
};

struct ModelSpec {
  int dim = 2;
  std::string g;                     // formula in r
  std::optional<std::string> tail;   // formula in r, used beyond the blend window
  double blend_start = 1.0;
  double blend_end = 2.0;
  std::optional<std::string> table;  // CSV of (r, g) instead of a formula
};

struct WarpedLineSpec {
  int dim = 2;
  std::string f;  // formula in t
  std::optional<std::string> tail_pos;
  std::optional<std::string> tail_neg;
  double blend_start = 0.5;
  double blend_end = 1.5;
};

struct CurvatureSpec {
  int dim = 2;
  std::string G;                          // formula in r
  std::string bound = "sectional_upper";  // sectional_upper | ricci_lower | hsu
  double beta = 1.0;                      // hsu: exponent of the sharpness model
  std::optional<std::string> declared_tail;
  double tail_from = 0.0;
};

struct FaberKrahnSpec {
  std::string Lambda;  // formula in s
  double T = std::numeric_limits<double>::infinity();
  std::vector<double> times{0.1, 1.0, 10.0};
  double distance = 10.0;
  GaussianConstants constants;
};

struct ExteriorSpec {
  double R0 = 1.0;
  double lambda = 1.0;
};

struct HeatSpec {
  double R = 1.0;
  std::vector<double> times{0.1, 1.0, 10.0};
  std::vector<double> mass_times{0.5, 1.0, 2.0};
};

struct Tolerances {
  double tail_margin = 0.05;
  int tail_budget = 60;
  double exterior = 1e-8;
  double heat_wall = 1e-8;
  double heat_richardson = 1e-5;
  double max_radius = 0.0;  // exterior reporting radius; 0 selects 256 R0
};

struct Scenario {
  int version = 1;
  std::string name;
  std::string anchor;
  std::string description;
  std::vector<std::string> tags;
  ScenarioKind kind = ScenarioKind::Model;
  ParamTable params;
  ModelSpec model;
  WarpedLineSpec line;
  CurvatureSpec curvature;
  FaberKrahnSpec faber_krahn;
  ExteriorSpec exterior;
  HeatSpec heat;
  std::vector<Route> routes;
  Tolerances tol;
};

inline constexpr int kScenarioVersion = 1;

/// Validates a parsed document: known keys only, every formula parses,
/// every route applies to the kind. Missing routes select all applicable ones.
[[nodiscard]] Scenario parse_scenario(const nlohmann::json& doc);
/// JSON syntax errors become ScenarioError(ParseError) with a line number.
[[nodiscard]] nlohmann::json parse_json_text(const std::string& text);
[[nodiscard]] nlohmann::json load_json_file(const std::string& path);
[[nodiscard]] Scenario parse_scenario_text(const std::string& text);
[[nodiscard]] Scenario load_scenario(const std::string& path);

/// Canonical form with every default filled in; parse_scenario(to_json(s))
/// reproduces s.
[[nodiscard]] nlohmann::json to_json(const Scenario& s);

/// 64-bit FNV-1a.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace feller
