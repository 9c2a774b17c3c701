#include "feller/presets.hpp"

#include <filesystem>
#include <fstream>

namespace feller {

namespace {

Preset make(const std::string& text) {
  const Scenario s = parse_scenario_text(text);
  return Preset{s.name, s.anchor, s.tags, text};
}

std::vector<Preset> build_catalog() {
  std::vector<Preset> out;
  out.push_back(make(R"json({
  "version": 1,
  "name": "euclidean_m2",
  "anchor": "flat plane: parabolic, stochastically complete, Feller",
  "description": "g = r in dimension 2",
  "tags": ["closed form"],
  "kind": "model",
  "model": {"dim": 2, "g": "r"},
  "routes": ["integral", "exterior", "heat", "comparison"]
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "euclidean_m3",
  "anchor": "flat 3-space: non-parabolic, Feller; exterior solution exp(-(r-1))/r",
  "description": "g = r in dimension 3",
  "tags": ["closed form"],
  "kind": "model",
  "model": {"dim": 3, "g": "r"},
  "routes": ["integral", "exterior", "heat", "comparison"]
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "hyperbolic3",
  "anchor": "hyperbolic 3-space as the Jacobi model of Sec <= -1: Feller, non-parabolic, stochastically complete",
  "description": "sectional upper bound G = -1 in dimension 3",
  "tags": ["closed form", "comparison"],
  "kind": "curvature_bound",
  "curvature": {"dim": 3, "G": "-1", "bound": "sectional_upper"},
  "routes": ["integral", "exterior", "heat", "comparison"]
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "ex_versus1",
  "anchor": "finite-volume model g = exp(-alpha r^beta), beta > 2: stochastically complete, parabolic, not Feller",
  "description": "g = r near the pole, exp(-alpha r^beta) beyond the blend window [1, 10]",
  "tags": ["regression"],
  "kind": "model",
  "params": {"alpha": 1, "beta": 3},
  "model": {"dim": 2, "g": "r", "tail": "exp(-alpha*r^beta)", "blend": [1, 10]},
  "routes": ["integral", "exterior", "heat", "comparison"],
  "heat": {"R": 1, "times": [1], "mass_times": [0.5, 1]}
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "ex_hsu1_family",
  "anchor": "sharpness of the 1/G criterion: Ric >= -(1+r)^4 is silent and g = exp(-beta int G) is not Feller",
  "description": "G = (1+r)^2, beta = 1, dimension 2",
  "tags": ["sharpness"],
  "kind": "curvature_bound",
  "curvature": {"dim": 2, "G": "(1+r)^2", "bound": "hsu", "beta": 1},
  "routes": ["integral", "exterior", "heat", "comparison"],
  "heat": {"R": 1, "times": [1], "mass_times": [0.5, 1]}
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "ex_covering1_warped_line",
  "anchor": "R x_f S^1 with f = exp(t^3): the end at -inf is not Feller, so neither is the line",
  "description": "two-ended warped line in dimension 2",
  "tags": ["ends"],
  "kind": "warped_line",
  "warped_line": {"dim": 2, "f": "exp(t^3)"},
  "routes": ["integral", "exterior", "heat"],
  "heat": {"R": 1, "times": [1]}
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "LK_problem_experiments",
  "anchor": "annulus volumes bounded below by exp(-A R^2): is the model Feller?",
  "description": "g = r near the pole, exp(-A r^2) beyond [1, 2]; the annulus volume decays like exp(-A R^2)",
  "tags": ["open problem — experiment only"],
  "kind": "model",
  "params": {"A": 1},
  "model": {"dim": 2, "g": "r", "tail": "exp(-A*r^2)", "blend": [1, 2]},
  "routes": ["integral", "exterior", "heat", "comparison"],
  "heat": {"R": 1, "times": [1], "mass_times": [0.5, 1]}
}
)json"));
  out.push_back(make(R"json({
  "version": 1,
  "name": "faber_krahn_p3",
  "anchor": "power-law Faber-Krahn profile Lambda = s^(-2/3): V(t) = (2t/3)^(3/2), Gaussian bound, Feller",
  "description": "Euclidean-type profile with p = 3",
  "tags": ["closed form", "isoperimetry"],
  "kind": "faber_krahn",
  "params": {"p": 3},
  "faber_krahn": {"Lambda": "s^(-2/p)", "times": [0.1, 1, 10], "distance": 10},
  "routes": ["isoperimetry"]
}
)json"));
  return out;
}

}  // namespace

const std::vector<Preset>& list_presets() {
  static const std::vector<Preset> catalog = build_catalog();
  return catalog;
}

const Preset* find_preset(std::string_view name) {
  for (const auto& p : list_presets())
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<std::string> write_presets(const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> out;
  for (const auto& p : list_presets()) {
    const fs::path path = fs::path(dir) / (p.name + ".json");
    std::ofstream f(path);
    if (!f) throw Error(ErrorCode::ValidationError, "cannot write " + path.string());
    f << p.text;
    out.push_back(path.string());
  }
  return out;
}

}  // namespace feller
