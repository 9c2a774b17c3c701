#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "feller/scenario.hpp"
#include "feller/verdict.hpp"

namespace feller {

inline constexpr const char* kToolVersion = "1.0.0";

/// A table written by --dump-profiles as <scenario>_<route>_<name>.csv.
struct DumpTable {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct PropertyVerdict {
  std::string property;  // feller, parabolic, stochastically_complete, volume_finite
  Verdict verdict;
};

struct RouteResult {
  Route route = Route::Integral;
  bool ok = true;
  std::string error_code;  // ErrorCode name when !ok
  std::string error;
  std::vector<PropertyVerdict> verdicts;
  nlohmann::json details = nlohmann::json::object();
  std::vector<DumpTable> tables;

  [[nodiscard]] const Verdict* find(const std::string& property) const;
};

/// One pair of routes that both speak to the same property.
struct CrossEntry {
  std::string property;
  Route a = Route::Integral;
  Route b = Route::Integral;
  Truth va = Truth::Inconclusive;
  Truth vb = Truth::Inconclusive;

  [[nodiscard]] bool conflict() const noexcept {
    return va != Truth::Inconclusive && vb != Truth::Inconclusive && va != vb;
  }
};

struct Report {
  Scenario scenario;
  std::vector<RouteResult> routes;
  std::vector<CrossEntry> cross;
  std::uint64_t scenario_hash = 0;

  [[nodiscard]] std::size_t conflicts() const;
  [[nodiscard]] bool route_failure() const;
  /// 0 success, 3 a route raised, 4 a conclusive disagreement.
  [[nodiscard]] int exit_code() const;
  [[nodiscard]] const RouteResult* find(Route r) const;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRouteFailure = 3;
inline constexpr int kExitConflict = 4;

/// Runs the requested routes in report order. Errors raised inside a route
/// are recorded on that route; the others still run.
[[nodiscard]] Report run_scenario(const Scenario& s);
[[nodiscard]] Report run_scenario(const std::string& path);

[[nodiscard]] std::vector<CrossEntry> cross_validate(const std::vector<RouteResult>& routes);

/// Deterministic: keys are sorted and no timing or host data is included.
[[nodiscard]] nlohmann::json to_json(const Report& r);
[[nodiscard]] nlohmann::json to_json(const Verdict& v);

/// Short human-readable summary.
[[nodiscard]] std::string summarize(const Report& r);

/// Writes every route table as CSV into `dir` (created if needed); returns the paths.
std::vector<std::string> dump_profiles(const Report& r, const std::string& dir);

}  // namespace feller
