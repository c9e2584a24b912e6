#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "bbgkz/errors.hpp"
#include "bbgkz/run.hpp"
#include "helpers.hpp"

using namespace bbgkz;
using testing::fixture_path;

namespace {

Json fixture_json(const std::string& name) {
  std::ifstream in(fixture_path(name));
  return Json::parse(in);
}

RunResult run(const std::string& name, RunOptions options = {}) {
  options.timings = false;
  return run_problem(load_problem(fixture_path(name)), options);
}

int shell(const std::string& command) {
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("scalar JSON round trip") {
  for (const auto& v : {GaussianRational(0), testing::q("-7/3"), GaussianRational::parse("1/2", "-5"),
                        GaussianRational::parse("0", "1")}) {
    CHECK(scalar_from_json(scalar_to_json(v)) == v);
    CHECK(scalar_from_json(Json::parse(scalar_to_json(v).dump())) == v);
  }
  CHECK(scalar_to_json(testing::q("4/6")) == Json("2/3"));
  CHECK_THROWS_AS(scalar_from_json(Json(1.5)), SchemaError);
  CHECK_THROWS_AS(scalar_from_json(Json("1/0")), SchemaError);
  CHECK(scalar_from_json(Json{{"re", "1"}}) == GaussianRational(1));
  CHECK_THROWS_AS(scalar_from_json(Json{{"im", "1"}}), SchemaError);
  CHECK_THROWS_AS(scalar_from_json(Json{{"re", "1"}, {"imag", "1"}}), SchemaError);
}

TEST_CASE("problem files round trip") {
  for (const auto& name : testing::all_fixtures()) {
    CAPTURE(name);
    const ProblemSpec p = load_problem(fixture_path(name));
    const ProblemSpec again = parse_problem(problem_to_json(p));
    CHECK(problem_to_json(again) == problem_to_json(p));
  }
}

TEST_CASE("schema violations are rejected") {
  const Json good = fixture_json("z2_pair");
  CHECK_NOTHROW(parse_problem(good));
  auto broken = [&](auto edit) {
    Json j = good;
    edit(j);
    return j;
  };
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["schema_version"] = 2; })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j.erase("beta"); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["unexpected"] = 1; })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["beta"] = Json::array({"1", "2"}); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["vectors"][0]["free"] = Json::array({1, 2}); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["vectors"][0]["torsion"] = Json::array({"1"}); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["x"]["values"] = Json::array({"1"}); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["x"]["policy"] = "guess"; })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["tasks"] = Json::array({"analyse"}); })), SchemaError);
  CHECK_THROWS_AS(parse_problem(broken([](Json& j) { j["group"]["torsion"] = Json::array({4, 2}); })), Error);
  CHECK_THROWS_AS(parse_problem(Json::array()), SchemaError);
  CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), SchemaError);
  CHECK_THROWS_AS(parse_task_list("solve,bogus"), SchemaError);
  CHECK(parse_task_list("solve,analyze") == std::set<Task>{Task::analyze, Task::solve});
}

TEST_CASE("run_problem on the Z + Z/2 pair") {
  const RunResult r = run("z2_pair");
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["passed"] == true);
  CHECK(r.report["solve"]["dimension"] == 2);
  CHECK(r.report["analyze"]["expected_dimension"] == 2);
  CHECK(r.report["lift"]["rank"] == 2);
  CHECK(r.report["lift"]["arithmetic"] == "exact");
  CHECK_FALSE(r.report.contains("timings_ms"));
  CHECK_FALSE(r.report.contains("error"));
}

TEST_CASE("task selection and overrides") {
  RunOptions o;
  o.tasks = std::set<Task>{Task::restrict};
  const RunResult r = run("ray", o);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.report["restrict"]["solution_rank"] == 0);
  CHECK(r.report["restrict"]["r1"]["total"] == 0);
  CHECK_FALSE(r.report.contains("solve"));
  CHECK_FALSE(r.report.contains("lift"));

  RunOptions t;
  t.tasks = std::set<Task>{Task::solve};
  t.truncation = 6;
  CHECK(run("p1", t).report["solve"]["filtration"]["per_degree"].size() == 7);
  t.truncation = 1;
  CHECK(run("p1", t).exit_code == kExitValidation);
}

TEST_CASE("invalid data exits with the validation code") {
  const RunResult r = run("malformed_degree");
  CHECK(r.exit_code == kExitValidation);
  CHECK(r.report["passed"] == false);
  CHECK(r.report["error"]["kind"] == "NoDegreeFunctional");
}

TEST_CASE("reports are deterministic given the seed") {
  for (const auto& name : {"p2", "z3_lift"}) {
    CAPTURE(name);
    CHECK(run(name).report.dump() == run(name).report.dump());
  }
  RunOptions a;
  a.seed = 5;
  RunOptions b;
  b.seed = 6;
  a.tasks = b.tasks = std::set<Task>{Task::lift};
  CHECK(run("z3_lift", a).report["lift"]["base_point"] != run("z3_lift", b).report["lift"]["base_point"]);
}

TEST_CASE("command line binary") {
  const std::filesystem::path dir = std::filesystem::temp_directory_path() / "bbgkz_cli_test";
  std::filesystem::create_directories(dir);
  const std::string exe = BBGKZ_CLI_PATH;
  const std::string out = (dir / "z2.json").string();
  std::filesystem::remove(out);

  CHECK(shell(exe + " run " + fixture_path("z2_pair") + " --no-timings --out " + out) == 0);
  std::ifstream in(out);
  const Json report = Json::parse(in);
  CHECK(report["solve"]["dimension"] == 2);
  CHECK(report == run("z2_pair").report);

  CHECK(shell(exe + " run " + fixture_path("malformed_degree") + " --out " + (dir / "bad.json").string() + " 2>/dev/null") == 2);
  CHECK(shell(exe + " run " + fixture_path("ray") + " --tasks nope > /dev/null 2>&1") == 2);
  CHECK(shell(exe + " run /nonexistent.json > /dev/null 2>&1") == 2);
  CHECK(shell(exe + " > /dev/null 2>&1") != 0);
  std::filesystem::remove_all(dir);
}
