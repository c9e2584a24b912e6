#include "bbgkz/problem.hpp"

#include <fstream>
#include <sstream>

#include "bbgkz/errors.hpp"

namespace bbgkz {

namespace {

const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(where + ": missing \"" + key + "\"");
  return j.at(key);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || item.key() == a;
    if (!known) throw SchemaError(where + ": unknown key \"" + item.key() + "\"");
  }
}

Int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) throw SchemaError(where + ": expected an integer");
  return j.get<Int>();
}

IntVector int_vector(const Json& j, Index length, const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != length)
    throw SchemaError(where + ": expected " + std::to_string(length) + " integers");
  IntVector v(length);
  for (Index i = 0; i < length; ++i) v(i) = integer(j[static_cast<std::size_t>(i)], where);
  return v;
}

std::vector<double> double_vector(const Json& j, std::size_t length, const std::string& where) {
  if (!j.is_array() || j.size() != length) throw SchemaError(where + ": expected " + std::to_string(length) + " numbers");
  std::vector<double> out;
  for (const auto& e : j) {
    if (!e.is_number()) throw SchemaError(where + ": expected a number");
    out.push_back(e.get<double>());
  }
  return out;
}

std::uint64_t unsigned_integer(const Json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<Int>() >= 0))
    throw SchemaError(where + ": expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

}  // namespace

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks{Task::analyze, Task::solve, Task::restrict, Task::lift, Task::residuals};
  return tasks;
}

std::string task_name(Task t) {
  switch (t) {
    case Task::analyze: return "analyze";
    case Task::solve: return "solve";
    case Task::restrict: return "restrict";
    case Task::lift: return "lift";
    case Task::residuals: return "residuals";
  }
  return "";
}

Task parse_task(const std::string& name) {
  for (Task t : all_tasks())
    if (task_name(t) == name) return t;
  throw SchemaError("unknown task \"" + name + "\"");
}

std::set<Task> parse_task_list(const std::string& list) {
  std::set<Task> out;
  std::stringstream in(list);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.insert(parse_task(item));
  if (out.empty()) throw SchemaError("empty task list");
  return out;
}

GaussianRational scalar_from_json(const Json& j) {
  try {
    if (j.is_string()) return GaussianRational(GaussianRational::parse_rational(j.get<std::string>()));
    if (j.is_object()) {
      check_keys(j, {"re", "im"}, "scalar");
      const Json& re = require(j, "re", "scalar");
      const Json im = j.contains("im") ? j.at("im") : Json("0");
      if (!re.is_string() || !im.is_string()) throw SchemaError("scalar parts must be \"p/q\" strings");
      return GaussianRational::parse(re.get<std::string>(), im.get<std::string>());
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(std::string("bad rational: ") + e.what());
  }
  throw SchemaError("scalars must be \"p/q\" strings or {\"re\", \"im\"} objects");
}

Json scalar_to_json(const GaussianRational& v) {
  if (v.is_real()) return v.real().get_str();
  return Json{{"re", v.real().get_str()}, {"im", v.imag().get_str()}};
}

Json element_to_json(const GroupElement& c) {
  return Json{{"free", std::vector<Int>(c.free.begin(), c.free.end())},
              {"torsion", std::vector<Int>(c.torsion.begin(), c.torsion.end())}};
}

ProblemSpec parse_problem(const Json& j) {
  check_keys(j, {"schema_version", "name", "group", "vectors", "beta", "x", "truncation", "tasks", "lift"}, "problem");
  if (integer(require(j, "schema_version", "problem"), "schema_version") != kSchemaVersion)
    throw SchemaError("unsupported schema_version");
  ProblemSpec p;
  const Json& name = require(j, "name", "problem");
  if (!name.is_string()) throw SchemaError("name must be a string");
  p.name = name.get<std::string>();

  const Json& group = require(j, "group", "problem");
  check_keys(group, {"rank", "torsion"}, "group");
  const Int rank = integer(require(group, "rank", "group"), "group.rank");
  std::vector<Int> torsion;
  if (group.contains("torsion")) {
    if (!group.at("torsion").is_array()) throw SchemaError("group.torsion must be an array");
    for (const auto& d : group.at("torsion")) torsion.push_back(integer(d, "group.torsion"));
  }
  try {
    p.group = AbelianGroup(static_cast<Index>(rank), torsion);
  } catch (const InvalidGroup& e) {
    throw SchemaError(std::string("group: ") + e.what());
  }

  const Json& vectors = require(j, "vectors", "problem");
  if (!vectors.is_array() || vectors.empty()) throw SchemaError("vectors must be a nonempty array");
  for (const auto& v : vectors) {
    check_keys(v, {"free", "torsion"}, "vector");
    const IntVector free = int_vector(require(v, "free", "vector"), p.group.rank(), "vector.free");
    IntVector tors = IntVector::Zero(p.group.torsion_length());
    if (v.contains("torsion")) tors = int_vector(v.at("torsion"), p.group.torsion_length(), "vector.torsion");
    p.vectors.push_back(p.group.element(free, tors));
  }

  const Json& beta = require(j, "beta", "problem");
  if (!beta.is_array() || static_cast<Index>(beta.size()) != p.group.rank())
    throw SchemaError("beta must list rank-many scalars");
  for (const auto& b : beta) p.beta.push_back(scalar_from_json(b));

  const Json& x = require(j, "x", "problem");
  check_keys(x, {"policy", "values", "seed", "denominator_bound"}, "x");
  const Json& policy = require(x, "policy", "x");
  if (policy == "explicit") {
    p.x.kind = XPolicy::Kind::explicit_values;
    const Json& values = require(x, "values", "x");
    if (!values.is_array() || values.size() != p.vectors.size()) throw SchemaError("x.values must list one scalar per vector");
    for (const auto& v : values) p.x.values.push_back(scalar_from_json(v));
  } else if (policy == "random") {
    p.x.kind = XPolicy::Kind::random;
    if (x.contains("seed")) p.x.seed = unsigned_integer(x.at("seed"), "x.seed");
    if (x.contains("denominator_bound")) p.x.denominator_bound = unsigned_integer(x.at("denominator_bound"), "x.denominator_bound");
    if (p.x.denominator_bound == 0) throw SchemaError("x.denominator_bound must be positive");
  } else {
    throw SchemaError("x.policy must be \"explicit\" or \"random\"");
  }

  if (j.contains("truncation")) p.truncation = static_cast<Index>(integer(j.at("truncation"), "truncation"));
  if (j.contains("tasks")) {
    if (!j.at("tasks").is_array()) throw SchemaError("tasks must be an array");
    std::set<Task> tasks;
    for (const auto& t : j.at("tasks")) {
      if (!t.is_string()) throw SchemaError("tasks must be strings");
      tasks.insert(parse_task(t.get<std::string>()));
    }
    p.tasks = tasks;
  }
  if (j.contains("lift")) {
    const Json& lift = j.at("lift");
    check_keys(lift, {"log_box"}, "lift");
    const Json& box = require(lift, "log_box", "lift");
    check_keys(box, {"lo", "hi"}, "lift.log_box");
    const std::size_t m = static_cast<std::size_t>(require(box, "lo", "lift.log_box").size());
    p.log_box.emplace(double_vector(box.at("lo"), m, "lift.log_box.lo"),
                      double_vector(require(box, "hi", "lift.log_box"), m, "lift.log_box.hi"));
  }
  return p;
}

ProblemSpec load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("invalid JSON: ") + e.what());
  }
  return parse_problem(j);
}

Json problem_to_json(const ProblemSpec& p) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = p.name;
  j["group"] = {{"rank", p.group.rank()}, {"torsion", p.group.torsion_invariants()}};
  Json vectors = Json::array();
  for (const auto& v : p.vectors) vectors.push_back(element_to_json(v));
  j["vectors"] = vectors;
  Json beta = Json::array();
  for (const auto& b : p.beta) beta.push_back(scalar_to_json(b));
  j["beta"] = beta;
  if (p.x.kind == XPolicy::Kind::explicit_values) {
    Json values = Json::array();
    for (const auto& v : p.x.values) values.push_back(scalar_to_json(v));
    j["x"] = {{"policy", "explicit"}, {"values", values}};
  } else {
    j["x"] = {{"policy", "random"}, {"seed", p.x.seed}, {"denominator_bound", p.x.denominator_bound}};
  }
  if (p.truncation) j["truncation"] = *p.truncation;
  if (p.tasks) {
    Json tasks = Json::array();
    for (Task t : *p.tasks) tasks.push_back(task_name(t));
    j["tasks"] = tasks;
  }
  if (p.log_box) j["lift"] = {{"log_box", {{"lo", p.log_box->first}, {"hi", p.log_box->second}}}};
  return j;
}

}  // namespace bbgkz
