#include <CLI11.hpp>

#include <iostream>

#include "bbgkz/errors.hpp"
#include "bbgkz/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"GKZ systems over finitely generated abelian groups: Jacobian rings, series solutions, torsion lifts"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Analyse one problem file and write a JSON report");
  std::string problem_path;
  std::string tasks;
  std::uint64_t seed = 0;
  bbgkz::Index truncation = 0;
  bool no_timings = false;
  std::string out_path;
  run->add_option("problem", problem_path, "Problem JSON file")->required();
  auto* tasks_opt = run->add_option("--tasks", tasks, "Comma list of analyze,solve,restrict,lift,residuals");
  auto* seed_opt = run->add_option("--seed", seed, "Seed for random x, the lift base point and residual directions");
  auto* trunc_opt = run->add_option("--truncation", truncation, "Truncation degree D (default rank + 3)");
  run->add_flag("--no-timings", no_timings, "Omit the timings block");
  run->add_option("--out", out_path, "Report path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  bbgkz::RunOptions options;
  options.timings = !no_timings;
  bbgkz::RunResult result;
  try {
    const bbgkz::ProblemSpec problem = bbgkz::load_problem(problem_path);
    if (*tasks_opt) options.tasks = bbgkz::parse_task_list(tasks);
    if (*seed_opt) options.seed = seed;
    if (*trunc_opt) options.truncation = truncation;
    result = bbgkz::run_problem(problem, options);
  } catch (const bbgkz::Error& e) {
    result.report = {{"schema_version", bbgkz::kSchemaVersion},
                     {"passed", false},
                     {"error", {{"kind", e.kind()}, {"message", e.what()}}}};
    result.exit_code = bbgkz::kExitValidation;
  }
  if (result.report.contains("error"))
    std::cerr << result.report["error"]["kind"].get<std::string>() << ": "
              << result.report["error"]["message"].get<std::string>() << "\n";

  const std::string text = result.report.dump(2) + "\n";
  try {
    if (out_path.empty()) {
      std::cout << text;
    } else {
      bbgkz::write_file_atomically(out_path, text);
    }
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return bbgkz::kExitValidation;
  }
  return result.exit_code;
}
