#pragma once

#include <string>
#include <vector>

#include "feller/scenario.hpp"

namespace feller {

inline constexpr const char* kOpenProblemTag = "open problem — experiment only";

struct Preset {
  std::string name;
  std::string anchor;  // the worked example or statement the scenario reproduces
  std::vector<std::string> tags;
  std::string text;    // scenario file contents

  [[nodiscard]] Scenario scenario() const { return parse_scenario_text(text); }
};

/// Bundled scenarios in a fixed order.
[[nodiscard]] const std::vector<Preset>& list_presets();
[[nodiscard]] const Preset* find_preset(std::string_view name);

/// Writes <dir>/<name>.json for every preset; returns the paths.
std::vector<std::string> write_presets(const std::string& dir);

}  // namespace feller
