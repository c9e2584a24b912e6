#include "bbgkz/run.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>

#include "bbgkz/errors.hpp"
#include "bbgkz/torsion.hpp"

namespace bbgkz {

namespace {

Json dims_to_json(const DimReport& d) { return Json{{"per_degree", d.per_degree}, {"total", d.total}}; }

// Pads both reports with zeros to a common length before comparing.
bool same_dims(DimReport a, DimReport b) {
  const std::size_t n = std::max(a.per_degree.size(), b.per_degree.size());
  a.per_degree.resize(n, 0);
  b.per_degree.resize(n, 0);
  return a.per_degree == b.per_degree && a.total == b.total;
}

bool is_validation_error(const Error& e) {
  return dynamic_cast<const InvalidGroup*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
         dynamic_cast<const NoDegreeFunctional*>(&e) || dynamic_cast<const NotSpanning*>(&e) ||
         dynamic_cast<const NotPointed*>(&e) || dynamic_cast<const DegeneratePolytope*>(&e) ||
         dynamic_cast<const NondegeneracyRetriesExhausted*>(&e) || dynamic_cast<const DegenerateCoefficients*>(&e) ||
         dynamic_cast<const SchemaError*>(&e);
}

Json certificate_to_json(const NondegeneracyCertificate& c) {
  return Json{{"nondegenerate", c.nondegenerate},
              {"expected_total", c.expected_total},
              {"total_matches", c.total_matches},
              {"vanishes_above_rank", c.vanishes_above_rank},
              {"max_degree", c.max_degree},
              {"jacobian", dims_to_json(c.jacobian)}};
}

Json vector_to_json(const FVector<GaussianRational>& x) {
  Json out = Json::array();
  for (Index i = 0; i < x.size(); ++i) out.push_back(scalar_to_json(x(i)));
  return out;
}

class Checks {
 public:
  explicit Checks(Json& sink) : sink_(sink) {}
  bool add(const std::string& name, bool value) {
    sink_[name] = value;
    all_ = all_ && value;
    return value;
  }
  bool all() const { return all_; }

 private:
  Json& sink_;
  bool all_ = true;
};

struct Context {
  const ProblemSpec& problem;
  std::shared_ptr<const GradedSemigroup> s;
  FVector<GaussianRational> x;
  ExactVector beta;
  Index truncation = 0;
  std::uint64_t seed = 0;
  Int expected = 0;
  DimReport jacobian;
  std::optional<SolutionBasis<GaussianRational>> basis;

  const SolutionBasis<GaussianRational>& solution_basis() {
    if (!basis) basis = solve_recursion(s, x, beta, truncation);
    return *basis;
  }
};

bool run_analyze(Context& ctx, Json& out) {
  const GradedSemigroup& s = *ctx.s;
  const Index d = ctx.truncation;
  out["volume"] = normalized_volume(s.group(), s.vectors());
  out["torsion_order"] = s.group().torsion_order();
  out["expected_dimension"] = ctx.expected;
  Json kp = Json::array();
  for (const auto& c : k_prim(s)) kp.push_back(element_to_json(c));
  out["k_prim"] = kp;

  const DimReport jac_interior = jacobian_dims(ctx.x, s, d, Region::interior);
  const DimReport dual = dual_kernel_dims(ctx.x, s, d);
  const DimReport hat = hat_quotient_dims(ctx.x, ctx.beta, s, Region::full, d);
  const DimReport hat_wide = hat_quotient_dims(ctx.x, ctx.beta, s, Region::full, d + 2);
  const DimReport hat_zero = hat_quotient_dims(ctx.x, ExactVector::Zero(s.rank()).eval(), s, Region::full, d);
  const DimReport hat_interior = hat_quotient_dims(ctx.x, ctx.beta, s, Region::interior, d);
  out["jacobian"] = {{"full", dims_to_json(ctx.jacobian)}, {"interior", dims_to_json(jac_interior)}};
  out["dual_kernel"] = dims_to_json(dual);
  out["hat_quotient"] = {{"full", dims_to_json(hat)},
                         {"full_bound_plus_2", dims_to_json(hat_wide)},
                         {"full_beta_zero", dims_to_json(hat_zero)},
                         {"interior", dims_to_json(hat_interior)}};

  bool vanishes = true;
  for (Index k = s.rank() + 1; k <= d; ++k)
    vanishes = vanishes && dual.per_degree[static_cast<std::size_t>(k)] == 0;
  Json& checks = out["checks"];
  Checks c(checks);
  c.add("dimension_formula", ctx.jacobian.total == ctx.expected);
  c.add("dual_kernel_matches_jacobian", same_dims(dual, ctx.jacobian));
  c.add("dual_kernel_vanishes_above_rank", vanishes);
  c.add("hat_total_matches_jacobian", hat.total == ctx.jacobian.total);
  c.add("hat_graded_matches_jacobian", same_dims(hat, ctx.jacobian));
  c.add("hat_beta_independent", same_dims(hat, hat_zero));
  c.add("hat_stable_under_larger_bound", same_dims(hat, hat_wide));
  c.add("hat_interior_matches_jacobian_interior", same_dims(hat_interior, jac_interior));
  return c.all();
}

bool run_solve(Context& ctx, Json& out) {
  const auto& basis = ctx.solution_basis();
  const DimReport filtration = filtration_dims(basis);
  out["dimension"] = basis.size();
  out["filtration"] = dims_to_json(filtration);
  Json leading = Json::array();
  for (std::size_t t = 0; t < basis.tables.size(); ++t) {
    const auto& table = basis.tables[t];
    const Index k = basis.leading_degree[t];
    const Layer& layer = ctx.s->layer(k);
    for (Index i = 0; i < layer.size(); ++i) {
      if (table.layer(k)(i).is_zero()) continue;
      leading.push_back(Json{{"degree", k},
                             {"element", element_to_json(layer.elements[static_cast<std::size_t>(i)])},
                             {"value", scalar_to_json(table.layer(k)(i))}});
      break;
    }
  }
  out["leading_entries"] = leading;
  Checks c(out["checks"]);
  c.add("dimension_matches_expected", basis.size() == ctx.expected);
  c.add("filtration_matches_jacobian", same_dims(filtration, ctx.jacobian));
  return c.all();
}

bool run_restrict(Context& ctx, Json& out) {
  const GradedSemigroup& s = *ctx.s;
  const ExactVector zero = ExactVector::Zero(s.rank());
  const bool beta_is_zero = ctx.beta == zero;
  const SolutionBasis<GaussianRational> basis0 =
      beta_is_zero ? ctx.solution_basis() : solve_recursion(ctx.s, ctx.x, zero, ctx.truncation);
  const Index solution_rank = restricted_solution_rank(basis0);
  const Index hat_rank = hat_restriction_rank(ctx.x, s, ctx.truncation);
  const DimReport r1 = r1_dims(ctx.x, s, ctx.truncation);
  const DimReport jac_interior = jacobian_dims(ctx.x, s, ctx.truncation, Region::interior);
  out["solution_rank"] = solution_rank;
  out["hat_rank"] = hat_rank;
  out["r1"] = dims_to_json(r1);
  bool bounded = true;
  for (std::size_t k = 0; k < r1.per_degree.size(); ++k)
    bounded = bounded && r1.per_degree[k] <= std::min(ctx.jacobian.per_degree[k], jac_interior.per_degree[k]);
  Checks c(out["checks"]);
  c.add("solution_rank_equals_r1", solution_rank == r1.total);
  c.add("hat_rank_equals_r1", hat_rank == r1.total);
  c.add("rank_bounded_by_dimension", solution_rank <= std::min<Index>(basis0.size(), ctx.expected));
  c.add("r1_bounded_per_degree", bounded);
  return c.all();
}

bool run_lift(Context& ctx, Json& out) {
  const QuotientProblem q = build_quotient(*ctx.s);
  LogBox box = LogBox::uniform(q.m(), -1.0, 2.0);
  if (ctx.problem.log_box) {
    if (static_cast<Index>(ctx.problem.log_box->first.size()) != q.m())
      throw SchemaError("lift.log_box needs one window per distinct free part");
    box = LogBox{ctx.problem.log_box->first, ctx.problem.log_box->second};
  }
  const LiftReport r = lift_solutions(ctx.s, ctx.beta, ctx.truncation, box, ctx.seed);
  Json images = Json::array();
  for (std::size_t j = 0; j < q.images.size(); ++j)
    images.push_back(Json{{"free", std::vector<Int>(q.images[j].begin(), q.images[j].end())},
                          {"indices", q.index_sets[j]}});
  out["quotient"] = images;
  out["arithmetic"] = r.exact ? "exact" : "float";
  out["base_point"] = vector_to_json(r.x);
  out["base_point_attempts"] = r.attempts;
  out["group_order"] = r.group_order;
  out["quotient_dimension"] = r.quotient_dimension;
  out["lifted_tables"] = r.lifted_count;
  out["rank"] = r.rank;
  out["expected"] = r.expected;
  out["max_residual"] = r.max_residual;
  out["orthogonality_defect"] = r.orthogonality_defect;
  Checks c(out["checks"]);
  c.add("character_orthogonality", r.orthogonality_pass());
  c.add("rank_equals_quotient_times_group", r.rank == r.quotient_dimension * r.group_order);
  c.add("rank_equals_expected", r.rank == r.expected);
  c.add("residuals_within_tolerance", r.max_residual <= 1e-9);
  return c.all();
}

bool run_residuals(Context& ctx, Json& out) {
  const ResidualReport r = check_residuals(ctx.solution_basis(), ctx.seed);
  out["shift_identity_checks"] = r.shift_identity_checks;
  out["base_point_residual"] = r.base_point_residual;
  out["step"] = r.step;
  out["euler_checks"] = static_cast<Index>(r.euler.size());
  double worst_margin = std::numeric_limits<double>::infinity();
  Index exact_zero = 0;
  Json failures = Json::array();
  for (const auto& e : r.euler) {
    if (e.exact_zero) {
      ++exact_zero;
    } else {
      worst_margin = std::min(worst_margin, e.observed_order - static_cast<double>(e.required_order));
    }
    if (!e.pass)
      failures.push_back(Json{{"table", e.table},
                              {"element", element_to_json(e.c)},
                              {"functional", std::vector<Int>(r.functionals[static_cast<std::size_t>(e.functional)].covector.begin(),
                                                              r.functionals[static_cast<std::size_t>(e.functional)].covector.end())},
                              {"observed_order", e.observed_order},
                              {"required_order", e.required_order}});
  }
  out["euler_exact_zero"] = exact_zero;
  out["euler_worst_order_margin"] = std::isfinite(worst_margin) ? Json(worst_margin) : Json(nullptr);
  out["euler_failures"] = failures;
  Checks c(out["checks"]);
  c.add("shift_identity_exact", r.shift_identity_pass);
  c.add("euler_exact_at_base_point", r.base_point_pass);
  c.add("euler_convergence_order", r.euler_pass);
  return c.all();
}

}  // namespace

RunResult run_problem(const ProblemSpec& problem, const RunOptions& options) {
  using Clock = std::chrono::steady_clock;
  RunResult result;
  Json& report = result.report;
  report["schema_version"] = kSchemaVersion;
  report["problem"] = problem_to_json(problem);
  Json timings = Json::object();
  const auto total_start = Clock::now();

  const std::set<Task> tasks = options.tasks ? *options.tasks
                               : problem.tasks ? *problem.tasks
                                               : std::set<Task>(all_tasks().begin(), all_tasks().end());
  Json task_names = Json::array();
  for (Task t : tasks) task_names.push_back(task_name(t));
  report["tasks"] = task_names;

  try {
    auto s = std::make_shared<const GradedSemigroup>(problem.group, problem.vectors);
    Context ctx{problem, s, {}, {}, 0, 0, 0, {}, std::nullopt};
    ctx.truncation = options.truncation ? *options.truncation
                     : problem.truncation ? *problem.truncation
                                          : s->rank() + 3;
    if (ctx.truncation < s->rank() + 1) throw SchemaError("truncation must be at least rank + 1");
    ctx.seed = options.seed ? *options.seed : problem.x.seed;
    ctx.beta.resize(s->rank());
    for (Index j = 0; j < s->rank(); ++j) ctx.beta(j) = problem.beta[static_cast<std::size_t>(j)];
    report["seed"] = ctx.seed;
    report["truncation"] = ctx.truncation;

    Json& x_report = report["x"];
    if (problem.x.kind == XPolicy::Kind::explicit_values) {
      ctx.x.resize(s->n());
      for (Index i = 0; i < s->n(); ++i) ctx.x(i) = problem.x.values[static_cast<std::size_t>(i)];
      const auto cert = is_nondegenerate(ctx.x, *s);
      x_report = {{"policy", "explicit"}, {"values", vector_to_json(ctx.x)}, {"certificate", certificate_to_json(cert)}};
      if (!cert.nondegenerate) throw DegenerateCoefficients("explicit x fails the nondegeneracy certificate");
    } else {
      const GenericPoint g = generic_fvector(*s, ctx.seed, problem.x.denominator_bound);
      ctx.x = g.x;
      x_report = {{"policy", "random"},
                  {"values", vector_to_json(ctx.x)},
                  {"attempts", g.attempts},
                  {"certificate", certificate_to_json(g.certificate)}};
    }
    ctx.expected = normalized_volume(s->group(), s->vectors()) * s->group().torsion_order();
    ctx.jacobian = jacobian_dims(ctx.x, *s, ctx.truncation);

    bool passed = true;
    const std::vector<std::pair<Task, std::function<bool(Context&, Json&)>>> steps{
        {Task::analyze, run_analyze}, {Task::solve, run_solve},         {Task::restrict, run_restrict},
        {Task::lift, run_lift},       {Task::residuals, run_residuals},
    };
    for (const auto& [task, fn] : steps) {
      if (!tasks.count(task)) continue;
      const auto start = Clock::now();
      Json section = Json::object();
      passed = fn(ctx, section) && passed;
      report[task_name(task)] = section;
      timings[task_name(task)] = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    }
    report["passed"] = passed;
    result.exit_code = passed ? kExitOk : kExitCheckFailed;
  } catch (const Error& e) {
    report["passed"] = false;
    report["error"] = {{"kind", e.kind()}, {"message", e.what()}};
    result.exit_code = is_validation_error(e) ? kExitValidation : kExitCheckFailed;
  }
  timings["total"] = std::chrono::duration<double, std::milli>(Clock::now() - total_start).count();
  if (options.timings) report["timings_ms"] = timings;
  return result;
}

void write_file_atomically(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace bbgkz
