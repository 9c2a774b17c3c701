#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <string>

#include "feller/presets.hpp"
#include "feller/report.hpp"
#include "feller/scenario.hpp"

using namespace feller;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int rc = -1;
  std::string out;
};

std::string bin() {
  const char* b = std::getenv("FELLER_BIN");
  return b ? b : "./feller";
}

Run run(const std::string& args) {
  Run r;
  const std::string cmd = bin() + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path temp_file(const std::string& name, const std::string& text) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

bool scenario_error(const std::string& text, std::string* field, std::size_t* line = nullptr) {
  try {
    (void)parse_scenario_text(text);
  } catch (const ScenarioError& e) {
    *field = e.field();
    if (line) *line = e.line();
    return true;
  }
  return false;
}

}  // namespace

TEST_CASE("preset catalog") {
  const auto presets = list_presets();
  CHECK(presets.size() >= 6);
  for (const auto& p : presets) {
    CAPTURE(p.name);
    CHECK_FALSE(p.anchor.empty());
    CHECK_NOTHROW((void)p.scenario());
  }
  const Preset* lk = find_preset("LK_problem_experiments");
  REQUIRE(lk != nullptr);
  CHECK(std::find(lk->tags.begin(), lk->tags.end(), kOpenProblemTag) != lk->tags.end());
}

TEST_CASE("bundled scenario files match the catalog") {
  const fs::path dir = fs::path(FELLER_SOURCE_DIR) / "scenarios";
  for (const auto& p : list_presets()) {
    CAPTURE(p.name);
    const fs::path file = dir / (p.name + ".json");
    REQUIRE(fs::exists(file));
    CHECK(to_json(load_scenario(file.string())) == to_json(p.scenario()));
  }
}

TEST_CASE("scenario round trip and validation") {
  for (const auto& p : list_presets()) {
    const Scenario s = p.scenario();
    CHECK(to_json(parse_scenario(to_json(s))) == to_json(s));
  }
  std::string field;
  std::size_t line = 0;
  CHECK(scenario_error(R"({"version": 1, "name": "x", "kind": "model", "model": {"dim": 2, "g": "r", "gg": 1}})", &field));
  CHECK(field == "model.gg");
  CHECK(scenario_error(R"({"version": 1, "name": "x", "kind": "model", "model": {"dim": 2, "g": "r^"}})", &field));
  CHECK(field == "model.g");
  CHECK(scenario_error(R"({"version": 1, "name": "x", "kind": "model", "model": {"dim": 1, "g": "r"}})", &field));
  CHECK(field == "model.dim");
  CHECK(scenario_error(R"({"version": 1, "name": "x", "kind": "faber_krahn", "faber_krahn": {"Lambda": "1/s"},
                           "routes": ["heat"]})",
                       &field));
  CHECK(field.rfind("routes", 0) == 0);
  CHECK(scenario_error("{\n  \"version\": 1,\n  \"name\": \"x\",\n  \"kind\" \"model\"\n}", &field, &line));
  CHECK(line == 4);
}

TEST_CASE("run a preset: JSON report, exit code and determinism") {
  const Run a = run("run euclidean_m3 --json");
  CHECK(a.rc == 0);
  const json doc = json::parse(a.out);
  CHECK(doc["exit_code"] == 0);
  CHECK(doc["cross_validation"]["clean"] == true);
  CHECK(doc.contains("provenance"));
  const Run b = run("run euclidean_m3 --json");
  CHECK(a.out == b.out);

  const Run via_run = run("run " + (fs::path(FELLER_SOURCE_DIR) / "scenarios" / "euclidean_m3.json").string() + " --json");
  CHECK(via_run.rc == 0);
  CHECK(via_run.out == a.out);
}

TEST_CASE("validation errors exit with 2") {
  const Run bad = run("classify --g 'r+*2' --json");
  CHECK(bad.rc == kExitValidation);
  const json err = json::parse(bad.out)["error"];
  CHECK(err["code"] == "ParseError");
  CHECK(err["field"] == "model.g");
  CHECK(err["message"].get<std::string>().find("'*'") != std::string::npos);

  const auto path = temp_file("feller_cli_unknown_key.json",
                              R"({"version": 1, "name": "x", "kind": "model", "model": {"dim": 2, "g": "r"}, "extra": 0})");
  const Run unknown = run("run " + path.string() + " --json");
  CHECK(unknown.rc == kExitValidation);
  CHECK(json::parse(unknown.out)["error"]["field"] == "extra");
  fs::remove(path);
}

TEST_CASE("route failures exit with 3") {
  const Run r = run("compare --G 1 --json");
  CHECK(r.rc == kExitRouteFailure);
  const json doc = json::parse(r.out);
  bool saw_conjugate = false;
  for (const auto& route : doc["routes"])
    if (!route["ok"].get<bool>() && route["error"]["code"] == "ConjugatePoint") saw_conjugate = true;
  CHECK(saw_conjugate);
}

TEST_CASE("conflicts take precedence over route failures") {
  Report rep;
  RouteResult failed;
  failed.route = Route::Heat;
  failed.ok = false;
  rep.routes.push_back(failed);
  CHECK(rep.exit_code() == kExitRouteFailure);
  CrossEntry c;
  c.property = "feller";
  c.a = Route::Integral;
  c.b = Route::Exterior;
  c.va = Truth::Holds;
  c.vb = Truth::Fails;
  REQUIRE(c.conflict());
  rep.cross.push_back(c);
  CHECK(rep.exit_code() == kExitConflict);
}

TEST_CASE("subcommands") {
  const Run iso = run("isoperimetry --Lambda 's^(-2/3)' --json");
  CHECK(iso.rc == 0);
  const Run ends = run("ends --f 'exp(t^3)' --json");
  CHECK(ends.rc == 0);
  CHECK(ends.out.find("\"Fails\"") != std::string::npos);
  const Run presets = run("presets");
  CHECK(presets.rc == 0);
  CHECK(presets.out.find("ex_versus1") != std::string::npos);
}

TEST_CASE("profile dumps") {
  const fs::path dir = fs::temp_directory_path() / "feller_cli_dump";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const Run r = run("exterior --g r --dim 3 --dump-profiles " + dir.string());
  CHECK(r.rc == 0);
  bool found = false;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".csv") continue;
    found = true;
    std::ifstream in(e.path());
    std::string header;
    std::getline(in, header);
    CHECK(header == "r,h");
  }
  CHECK(found);
  fs::remove_all(dir);
}
