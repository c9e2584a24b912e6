#include <doctest.h>

#include <random>

#include "bbgkz/errors.hpp"
#include "helpers.hpp"

using namespace bbgkz;
using testing::el;
using testing::load_fixture;
using testing::q;

namespace {

ExactMatrix stacked(const SolutionBasis<GaussianRational>& basis) {
  ExactMatrix m(basis.size(), basis.tables.front().flatten().size());
  for (Index t = 0; t < basis.size(); ++t) m.row(t) = basis.tables[static_cast<std::size_t>(t)].flatten().transpose();
  return m;
}

ExactVector random_beta(std::mt19937_64& engine, Index r) {
  ExactVector beta(r);
  for (Index j = 0; j < r; ++j)
    beta(j) = GaussianRational(mpq_class(static_cast<long>(engine() % 41) - 20, static_cast<long>(1 + engine() % 6)),
                               mpq_class(static_cast<long>(engine() % 5) - 2, 3L));
  return beta;
}

// prod_{j<k} (beta - j)
GaussianRational falling(const GaussianRational& beta, Index k) {
  GaussianRational out(1);
  for (Index j = 0; j < k; ++j) out *= beta - GaussianRational(static_cast<long>(j));
  return out;
}

GaussianRational power(const GaussianRational& z, Index k) {
  GaussianRational out(1);
  for (Index j = 0; j < k; ++j) out *= z;
  return out;
}

}  // namespace

TEST_CASE("Z + Z/2 pair: two tables with leading degree zero") {
  const auto f = load_fixture("z2_pair");
  const auto basis = solve_recursion(f.s, f.x, f.beta, 4);
  CHECK(basis.size() == 2);
  CHECK(basis.leading_degree == std::vector<Index>{0, 0});
  CHECK(filtration_dims(basis).per_degree == std::vector<Index>{2, 0, 0, 0, 0});
}

TEST_CASE("ray: tables are falling factorials over powers of x") {
  const auto f = load_fixture("ray");
  for (const char* b : {"0", "3/2", "-5/3", "7"}) {
    CAPTURE(b);
    const ExactVector beta = ExactVector::Constant(1, q(b));
    const auto basis = solve_recursion(f.s, f.x, beta, 6);
    REQUIRE(basis.size() == 1);
    const auto& t = basis.tables[0];
    for (Index k = 0; k <= 6; ++k) CHECK(t.at(el(f.s->group(), {k})) == falling(beta(0), k) / power(f.x(0), k));
  }
}

TEST_CASE("unit square at beta = 0: constants and the logarithm") {
  const auto f = load_fixture("unit_square");
  const Index d = 5;
  const auto basis = solve_recursion(f.s, f.x, f.beta, d);
  REQUIRE(basis.size() == 2);
  CHECK(basis.leading_degree == std::vector<Index>{0, 1});

  // Germ data of ln(x1 x3 / (x2 x4)): pure derivatives only, with
  // d^k/dx^k ln x = (-1)^(k-1) (k-1)! / x^k.
  const AbelianGroup& g = f.s->group();
  const std::vector<GaussianRational> sign{GaussianRational(1), GaussianRational(-1), GaussianRational(1), GaussianRational(-1)};
  LambdaTable<GaussianRational> log_table(f.s, f.x, f.beta, d);
  for (Index k = 1; k <= d; ++k) {
    GaussianRational fact(1);
    for (Index j = 1; j < k; ++j) fact *= GaussianRational(static_cast<long>(j));
    for (Index i = 0; i < 4; ++i) {
      GroupElement c = g.zero();
      for (Index j = 0; j < k; ++j) c = g.add(c, f.s->vectors()[static_cast<std::size_t>(i)]);
      const Index idx = *f.s->layer(k).find(c);
      const GaussianRational s = (k % 2 == 1) ? GaussianRational(1) : GaussianRational(-1);
      log_table.layer(k)(idx) = sign[static_cast<std::size_t>(i)] * s * fact / power(f.x(i), k);
    }
  }
  CHECK(gkz_residual(log_table).exact_zero);
  ExactMatrix with_log(3, stacked(basis).cols());
  with_log << stacked(basis), log_table.flatten().transpose();
  CHECK(rank(with_log) == 2);

  // The constant solution is the unit table at 0.
  LambdaTable<GaussianRational> constant(f.s, f.x, f.beta, d);
  constant.layer(0)(0) = GaussianRational(1);
  CHECK(gkz_residual(constant).exact_zero);
  with_log.row(2) = constant.flatten().transpose();
  CHECK(rank(with_log) == 2);
}

TEST_CASE("dimension and filtration theorems across fixtures and seeded beta") {
  std::mt19937_64 engine(2024);
  for (const auto& name : testing::all_fixtures()) {
    CAPTURE(name);
    const auto f = load_fixture(name);
    const Index d = f.s->rank() + 3;
    const Int expected = normalized_volume(f.s->group(), f.s->vectors()) * f.s->group().torsion_order();
    const DimReport jac = jacobian_dims(f.x, *f.s, d);
    for (int trial = 0; trial < 5; ++trial) {
      const ExactVector beta = trial == 0 ? f.beta : random_beta(engine, f.s->rank());
      const auto basis = solve_recursion(f.s, f.x, beta, d);
      CHECK(basis.size() == expected);
      CHECK(filtration_dims(basis) == jac);
      CHECK(rank(stacked(basis)) == basis.size());
      for (const auto& t : basis.tables) CHECK(gkz_residual(t).exact_zero);
      for (std::size_t t = 0; t < basis.tables.size(); ++t) CHECK(basis.tables[t].leading_degree() == basis.leading_degree[t]);
    }
  }
}

TEST_CASE("P2 at beta = 0 has filtration (1,1,1)") {
  const auto f = load_fixture("p2");
  const auto basis = solve_recursion(f.s, f.x, f.beta, 5);
  CHECK(filtration_dims(basis).per_degree == std::vector<Index>{1, 1, 1, 0, 0, 0});
}

TEST_CASE("degenerate coefficients surface as an inconsistent system") {
  const auto f = load_fixture("z2_pair");
  FVector<GaussianRational> bad(2);
  bad << GaussianRational(1), GaussianRational(1);
  CHECK_THROWS_AS(solve_recursion(f.s, bad, f.beta, 3), InconsistentSystem);
  CHECK_THROWS_AS(solve_recursion(f.s, f.x, f.beta, 1), std::invalid_argument);
  CHECK_THROWS_AS(solve_recursion(f.s, f.x, ExactVector::Zero(2).eval(), 3), DimensionMismatch);
}

TEST_CASE("series evaluation") {
  SUBCASE("at the base point it returns the table entry") {
    const auto f = load_fixture("p1");
    const auto basis = solve_recursion(f.s, f.x, f.beta, 4);
    for (const auto& t : basis.tables)
      for (Index k = 0; k <= 2; ++k)
        for (const auto& c : f.s->layer(k).elements) CHECK(evaluate_series(t, c, f.x) == t.at(c));
  }
  SUBCASE("ray with beta = 2 reproduces x^2") {
    const auto f = load_fixture("ray");
    FVector<GaussianRational> one(1);
    one << GaussianRational(1);
    const auto basis = solve_recursion(f.s, one, ExactVector::Constant(1, GaussianRational(2)).eval(), 4);
    FVector<GaussianRational> z(1);
    z << q("11/10");
    CHECK(evaluate_series(basis.tables[0], f.s->group().zero(), z) == q("121/100"));
  }
  SUBCASE("ray with beta = 1/2 converges at the Taylor rate") {
    const auto f = load_fixture("ray");
    FVector<GaussianRational> one(1);
    one << GaussianRational(1);
    const Index d = 12;
    const auto basis = solve_recursion(f.s, one, ExactVector::Constant(1, q("1/2")).eval(), d);
    Vector<Complex> z(1);
    z << Complex(1.1, 0.0);
    const Complex value = evaluate_series(basis.tables[0], f.s->group().zero(), z);
    CHECK(std::abs(value - std::sqrt(Complex(1.1))) <= std::pow(0.1, d + 1));
  }
  SUBCASE("Z + Z/2 pair with beta = 1 is linear in z1 + z2 and z1 - z2") {
    const auto f = load_fixture("z2_pair");
    const auto basis = solve_recursion(f.s, f.x, ExactVector::Constant(1, GaussianRational(1)).eval(), 4);
    const GaussianRational s = f.x(0) + f.x(1);
    const GaussianRational dd = f.x(0) - f.x(1);
    const AbelianGroup& g = f.s->group();
    FVector<GaussianRational> z(2);
    z << q("17/8"), q("7/8");
    for (const auto& t : basis.tables) {
      const GaussianRational l0 = t.at(el(g, {0}, {0}));
      const GaussianRational l1 = t.at(el(g, {0}, {1}));
      const GaussianRational a = (l0 + l1) / (GaussianRational(2) * s);
      const GaussianRational b = (l0 - l1) / (GaussianRational(2) * dd);
      CHECK(evaluate_series(t, g.zero(), z) == a * (z(0) + z(1)) + b * (z(0) - z(1)));
    }
  }
}

TEST_CASE("PDE residual checks pass on every fixture") {
  for (const auto& name : testing::all_fixtures()) {
    CAPTURE(name);
    const auto f = load_fixture(name);
    const auto basis = solve_recursion(f.s, f.x, f.beta, f.s->rank() + 3);
    const ResidualReport r = check_residuals(basis, 7);
    CHECK(r.shift_identity_pass);
    CHECK(r.shift_identity_checks > 0);
    CHECK(r.base_point_pass);
    CHECK(r.euler_pass);
    for (const auto& e : r.euler) CHECK((e.exact_zero || e.observed_order >= static_cast<double>(e.required_order)));
  }
}

TEST_CASE("Z + Z/2 pair: Euler residual for deg at c = 0 shrinks by 2^(D-1) per halving") {
  const auto f = load_fixture("z2_pair");
  const Index d = 5;
  const auto basis = solve_recursion(f.s, f.x, f.beta, d);
  const ResidualReport r = check_residuals(basis);
  Index seen = 0;
  for (const auto& e : r.euler) {
    if (!(e.c == f.s->group().zero()) || r.functionals[static_cast<std::size_t>(e.functional)].covector != f.s->deg().covector) continue;
    ++seen;
    REQUIRE_FALSE(e.exact_zero);
    CHECK(e.residual[0] / e.residual[1] >= std::pow(2.0, d - 1));
    CHECK(e.residual[1] / e.residual[2] >= std::pow(2.0, d - 1));
  }
  CHECK(seen == 2);
}

TEST_CASE("restricted solution rank") {
  const auto ray = load_fixture("ray");
  CHECK(restricted_solution_rank(solve_recursion(ray.s, ray.x, ray.beta, 4)) == 0);
  const auto sq = load_fixture("unit_square");
  CHECK(restricted_solution_rank(solve_recursion(sq.s, sq.x, sq.beta, 6)) == 0);
  for (const auto& name : testing::all_fixtures()) {
    CAPTURE(name);
    const auto f = load_fixture(name);
    const Index d = f.s->rank() + 3;
    const auto basis = solve_recursion(f.s, f.x, ExactVector::Zero(f.s->rank()).eval(), d);
    const Index rank0 = restricted_solution_rank(basis);
    CHECK(rank0 == r1_dims(f.x, *f.s, d).total);
    CHECK(rank0 <= basis.size());
  }
}

TEST_CASE("repeated vectors: tables depend on x_1 + x_2 only") {
  const auto f = load_fixture("repeated");
  const Index d = f.s->rank() + 3;
  const auto base = solve_recursion(f.s, f.x, f.beta, d);
  for (const char* delta : {"1/3", "-5/7", "2"}) {
    CAPTURE(delta);
    FVector<GaussianRational> moved = f.x;
    moved(0) += q(delta);
    moved(1) -= q(delta);
    const auto other = solve_recursion(f.s, moved, f.beta, d);
    REQUIRE(other.size() == base.size());
    for (Index t = 0; t < base.size(); ++t)
      CHECK(other.tables[static_cast<std::size_t>(t)].flatten() == base.tables[static_cast<std::size_t>(t)].flatten());
  }
}
