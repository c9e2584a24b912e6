#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bbgkz/abelian.hpp"

namespace bbgkz {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class Task { analyze, solve, restrict, lift, residuals };

const std::vector<Task>& all_tasks();
std::string task_name(Task t);
/// Throws SchemaError on an unknown name.
Task parse_task(const std::string& name);
/// Comma separated list such as "analyze,solve".
std::set<Task> parse_task_list(const std::string& list);

struct XPolicy {
  enum class Kind { explicit_values, random } kind = Kind::random;
  std::vector<GaussianRational> values;  // explicit_values
  std::uint64_t seed = 0;                // random
  std::uint64_t denominator_bound = 7;   // random
};

struct ProblemSpec {
  std::string name;
  AbelianGroup group;
  std::vector<GroupElement> vectors;
  std::vector<GaussianRational> beta;
  XPolicy x;
  std::optional<Index> truncation;
  std::optional<std::set<Task>> tasks;
  // log|z_j| window for the torsion lift; defaults to [-1, 2] per coordinate
  std::optional<std::pair<std::vector<double>, std::vector<double>>> log_box;
};

/// Exact scalars travel as "p/q" strings (real) or {"re": "p/q", "im": "p/q"}.
GaussianRational scalar_from_json(const Json& j);
Json scalar_to_json(const GaussianRational& v);
Json element_to_json(const GroupElement& c);

/// Structural validation against the problem schema. Mathematical validation
/// (degree functional, spanning) happens when the semigroup is built.
/// Throws SchemaError.
ProblemSpec parse_problem(const Json& j);
ProblemSpec load_problem(const std::string& path);
Json problem_to_json(const ProblemSpec& p);

}  // namespace bbgkz
