#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "specq/scenario.hpp"

using namespace specq;
namespace fs = std::filesystem;

namespace {

const char* kKinds[] = {"triangular-nested", "diagonal", "shift", "random-invariant"};

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "specq-tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool has_issue(const ParseResult& result, const std::string& pointer) {
  for (const auto& issue : result.issues)
    if (issue.pointer == pointer) return true;
  return false;
}

bool numeric(const std::string& field, double& value) {
  const char* begin = field.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  return end != begin && *end == '\0';
}

bool close(double a, double b) {
  if (a == b) return true;
  return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
}

/// Structural JSON equality with a relative tolerance on numbers; everything
/// else must match exactly.
bool json_close(const Json& a, const Json& b, std::string& where) {
  if (a.is_number() && b.is_number()) {
    if (close(a.get<double>(), b.get<double>())) return true;
    where += " number " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.type() != b.type()) {
    where += " type mismatch " + a.dump() + " vs " + b.dump();
    return false;
  }
  if (a.is_object()) {
    if (a.size() != b.size()) {
      where += " object size";
      return false;
    }
    for (auto it = a.begin(); it != a.end(); ++it) {
      if (!b.contains(it.key())) {
        where += " missing key " + it.key();
        return false;
      }
      std::string sub = where + "/" + it.key();
      if (!json_close(it.value(), b.at(it.key()), sub)) {
        where = sub;
        return false;
      }
    }
    return true;
  }
  if (a.is_array()) {
    if (a.size() != b.size()) {
      where += " array size";
      return false;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      std::string sub = where + "/" + std::to_string(i);
      if (!json_close(a[i], b[i], sub)) {
        where = sub;
        return false;
      }
    }
    return true;
  }
  if (a == b) return true;
  where += " " + a.dump() + " vs " + b.dump();
  return false;
}

bool csv_close(const std::string& a, const std::string& b) {
  std::istringstream sa(a), sb(b);
  std::string la, lb;
  while (true) {
    bool ga = static_cast<bool>(std::getline(sa, la));
    bool gb = static_cast<bool>(std::getline(sb, lb));
    if (ga != gb) return false;
    if (!ga) return true;
    std::istringstream fa(la), fb(lb);
    std::string xa, xb;
    while (true) {
      bool ha = static_cast<bool>(std::getline(fa, xa, ','));
      bool hb = static_cast<bool>(std::getline(fb, xb, ','));
      if (ha != hb) return false;
      if (!ha) break;
      double va = 0.0, vb = 0.0;
      if (numeric(xa, va) && numeric(xb, vb)) {
        if (!close(va, vb)) return false;
      } else if (xa != xb) {
        return false;
      }
    }
  }
}

Json minimal_doc() {
  Json doc;
  doc["name"] = "minimal";
  doc["space"] = Json{{"dim", 2}};
  doc["calibrations"] = Json::array(
      {Json{{"name", "P"},
            {"seminorms", Json::array({Json{{"support", Json::array({1})},
                                            {"weights", Json::array({1.0})}},
                                       Json{{"support", Json::array({1, 2})},
                                            {"weights", Json::array({1.0, 1.0})}}})}}});
  doc["operators"] =
      Json::array({Json{{"name", "T"}, {"kind", "diagonal"}, {"entries", Json::array({2.0, 1.0})}}});
  doc["tasks"] = Json::array({Json{{"type", "classify"}, {"operator", "T"}, {"calibration", "P"}}});
  return doc;
}

}  // namespace

TEST_CASE("a minimal scenario parses into typed objects") {
  ParseResult result = parse_scenario(minimal_doc());
  REQUIRE(result.ok());
  REQUIRE(result.scenario.has_value());
  const Scenario& sc = *result.scenario;
  CHECK(sc.name == "minimal");
  CHECK(sc.dim == 2);
  REQUIRE(sc.calibrations.size() == 1);
  REQUIRE(sc.operators.size() == 1);
  REQUIRE(sc.tasks.size() == 1);
  CHECK(sc.find_calibration("P") != nullptr);
  CHECK(sc.find_calibration("Q") == nullptr);
  CHECK(sc.find_operator("T") != nullptr);
  CHECK(sc.tasks[0].type == "classify");

  // Defaults in effect, no override block.
  CHECK(sc.tolerances.spec == 1e-8);
  CHECK(sc.tolerances.radius == 1e-4);
  CHECK(sc.tolerances.terms == 200);
  CHECK(sc.tolerance_overrides.empty());
}

TEST_CASE("scenario tolerance blocks override the defaults") {
  Json doc = minimal_doc();
  doc["tolerances"] = Json{{"radius", 1e-3}, {"terms", 50}};
  ParseResult result = parse_scenario(doc);
  REQUIRE(result.ok());
  CHECK(result.scenario->tolerances.radius == 1e-3);
  CHECK(result.scenario->tolerances.terms == 50);
  CHECK(result.scenario->tolerances.spec == 1e-8);
  CHECK(result.scenario->tolerance_overrides == doc["tolerances"]);

  Json bad = minimal_doc();
  bad["tolerances"] = Json{{"bogus", 1.0}};
  ParseResult rejected = parse_scenario(bad);
  CHECK(has_issue(rejected, "/tolerances/bogus"));
}

TEST_CASE("validation walks the whole document and reports precise pointers") {
  Json doc;
  doc["name"] = "bad";
  doc["space"] = Json{{"dim", 2}};
  doc["calibrations"] = Json::array(
      {Json{{"name", "P"},
            {"seminorms", Json::array({Json{{"support", Json::array({1, 5})},
                                            {"weights", Json::array({1.0, 1.0})}}})}},
       Json{{"name", "P"},
            {"seminorms", Json::array({Json{{"support", Json::array({1})},
                                            {"weights", Json::array({1.0})}}})}}});
  doc["operators"] = Json::array(
      {Json{{"name", "T"}, {"kind", "dense"}, {"re", Json::array({Json::array({1.0, 0.0})})}}});
  doc["tasks"] = Json::array(
      {Json{{"type", "radius"}, {"operator", "T"}, {"calibration", "missing"}},
       Json{{"type", "bogus"}, {"operator", "T"}, {"calibration", "P"}},
       Json{{"type", "resolvent"}, {"operator", "T"}, {"calibration", "P"},
            {"lambdas", Json::array({0.0})}}});

  ParseResult result = parse_scenario(doc);
  CHECK_FALSE(result.ok());
  CHECK_FALSE(result.scenario.has_value());
  CHECK(has_issue(result, "/calibrations/0/seminorms/0/support/1"));
  CHECK(has_issue(result, "/calibrations/1/name"));
  CHECK(has_issue(result, "/operators/0/re"));
  CHECK(has_issue(result, "/tasks/0/calibration"));
  CHECK(has_issue(result, "/tasks/1/type"));
  CHECK(has_issue(result, "/tasks/2/lambdas/0"));
}

TEST_CASE("dim annotations must agree with the space") {
  Json doc = minimal_doc();
  doc["operators"][0]["dim"] = 3;
  doc["calibrations"][0]["dim"] = 3;
  ParseResult result = parse_scenario(doc);
  CHECK(has_issue(result, "/operators/0/dim"));
  CHECK(has_issue(result, "/calibrations/0/dim"));
}

TEST_CASE("load_scenario surfaces file problems as issues") {
  ParseResult missing = load_scenario("/nonexistent/specq-no-such-file.json");
  CHECK_FALSE(missing.ok());
  REQUIRE_FALSE(missing.issues.empty());
  CHECK(missing.issues[0].message.find("cannot open") != std::string::npos);

  fs::path dir = fresh_dir("parse");
  fs::path broken = dir / "broken.json";
  std::ofstream(broken) << "{ this is not json";
  ParseResult syntax = load_scenario(broken.string());
  CHECK_FALSE(syntax.ok());

  ParseResult good = load_scenario(std::string(SPECQ_SCENARIO_DIR) + "/fixture_a.json");
  CHECK(good.ok());
}

TEST_CASE("generated scenarios are deterministic and parse cleanly") {
  for (const char* kind : kKinds) {
    Json first = generate_scenario(kind, 12, 99);
    Json second = generate_scenario(kind, 12, 99);
    CHECK(first.dump() == second.dump());
    Json other_seed = generate_scenario(kind, 12, 100);
    CHECK(first.dump() != other_seed.dump());

    ParseResult parsed = parse_scenario(first);
    REQUIRE_MESSAGE(parsed.ok(), kind);
    CHECK(parsed.scenario->name == std::string(kind) + "-n12-s99");
    CHECK(parsed.scenario->dim == 12);
    CHECK_FALSE(parsed.scenario->tasks.empty());
  }
  CHECK_THROWS_AS(generate_scenario("unknown-kind", 4, 1), std::invalid_argument);
  CHECK_THROWS_AS(generate_scenario("diagonal", 0, 1), std::invalid_argument);
}

TEST_CASE("generated scenarios run end to end across sizes") {
  for (const char* kind : kKinds) {
    for (int n : {1, 5, 12}) {
      Json doc = generate_scenario(kind, n, 3);
      ParseResult parsed = parse_scenario(doc);
      REQUIRE_MESSAGE(parsed.ok(), kind << " n=" << n);
      fs::path out = fresh_dir(std::string("run-") + kind + "-" + std::to_string(n));
      RunResult run = run_scenario(*parsed.scenario, out.string(), {});
      CHECK_MESSAGE(run.exit_code == 0, kind << " n=" << n);
      CHECK(run.outcomes.size() == parsed.scenario->tasks.size());
      for (const TaskOutcome& outcome : run.outcomes) {
        CHECK_MESSAGE(outcome.error.empty(), kind << " task " << outcome.index);
        CHECK(outcome.ok);
        for (const std::string& file : outcome.files) CHECK(fs::exists(out / file));
      }
      CHECK(fs::exists(out / "summary.json"));
    }
  }
}

TEST_CASE("replaying a run produces byte-identical artifacts") {
  Json doc = generate_scenario("random-invariant", 12, 42);
  ParseResult parsed = parse_scenario(doc);
  REQUIRE(parsed.ok());
  fs::path out1 = fresh_dir("replay-1");
  fs::path out2 = fresh_dir("replay-2");
  run_scenario(*parsed.scenario, out1.string(), {});
  run_scenario(*parsed.scenario, out2.string(), {});

  std::set<std::string> names1, names2;
  for (const auto& entry : fs::directory_iterator(out1)) names1.insert(entry.path().filename());
  for (const auto& entry : fs::directory_iterator(out2)) names2.insert(entry.path().filename());
  REQUIRE(names1 == names2);
  REQUIRE_FALSE(names1.empty());
  for (const std::string& name : names1) CHECK(slurp(out1 / name) == slurp(out2 / name));
}

TEST_CASE("command line overrides land in the report echo") {
  ParseResult parsed = load_scenario(std::string(SPECQ_SCENARIO_DIR) + "/fixture_diag.json");
  REQUIRE(parsed.ok());
  RunOptions options;
  options.tol_radius = 5e-3;
  fs::path out = fresh_dir("override");
  RunResult run = run_scenario(*parsed.scenario, out.string(), options);
  CHECK(run.exit_code == 0);

  Json report = Json::parse(slurp(out / "002_radius.json"));
  CHECK(report.at("tolerances").at("radius").get<double>() == 5e-3);
  CHECK(report.at("overrides").at("cli").at("radius").get<double>() == 5e-3);
  CHECK(report.at("overrides").at("scenario").empty());
  CHECK(report.at("ok").get<bool>());
}

TEST_CASE("fixture runs match the golden outputs") {
  for (const std::string name : {"fixture_a", "fixture_shift", "fixture_diag"}) {
    ParseResult parsed = load_scenario(std::string(SPECQ_SCENARIO_DIR) + "/" + name + ".json");
    REQUIRE_MESSAGE(parsed.ok(), name);
    fs::path out = fresh_dir("golden-" + name);
    RunResult run = run_scenario(*parsed.scenario, out.string(), {});
    CHECK_MESSAGE(run.exit_code == 0, name);

    fs::path golden = fs::path(SPECQ_GOLDEN_DIR) / name;
    REQUIRE_MESSAGE(fs::is_directory(golden), "golden directory missing for " << name);

    std::set<std::string> expected, produced;
    for (const auto& entry : fs::directory_iterator(golden)) expected.insert(entry.path().filename());
    for (const auto& entry : fs::directory_iterator(out)) produced.insert(entry.path().filename());
    CHECK_MESSAGE(expected == produced, name << ": file set changed");

    for (const std::string& file : expected) {
      if (!fs::exists(out / file)) continue;
      std::string got = slurp(out / file);
      std::string want = slurp(golden / file);
      if (file.size() > 5 && file.substr(file.size() - 5) == ".json") {
        std::string where;
        bool same = json_close(Json::parse(want), Json::parse(got), where);
        CHECK_MESSAGE(same, name << "/" << file << ":" << where);
      } else {
        CHECK_MESSAGE(csv_close(want, got), name << "/" << file);
      }
    }
  }
}
