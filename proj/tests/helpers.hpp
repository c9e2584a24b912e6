#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bbgkz/problem.hpp"
#include "bbgkz/torsion.hpp"

namespace testing {

using namespace bbgkz;

inline GroupElement el(const AbelianGroup& g, std::vector<Int> free, std::vector<Int> torsion = {}) {
  IntVector f(static_cast<Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) f(static_cast<Index>(i)) = free[i];
  IntVector t = IntVector::Zero(g.torsion_length());
  for (std::size_t i = 0; i < torsion.size(); ++i) t(static_cast<Index>(i)) = torsion[i];
  return g.element(f, t);
}

inline GaussianRational q(const char* text) { return GaussianRational(GaussianRational::parse_rational(text)); }

template <class... T>
ExactVector vec(T... values) {
  ExactVector v(static_cast<Index>(sizeof...(T)));
  Index i = 0;
  ((v(i++) = GaussianRational(values)), ...);
  return v;
}

template <class Derived>
bool all_zero(const Eigen::MatrixBase<Derived>& m) {
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (!m(i, j).is_zero()) return false;
  return true;
}

inline std::string fixture_path(const std::string& name) { return std::string(BBGKZ_FIXTURE_DIR) + "/" + name + ".json"; }

struct Fixture {
  ProblemSpec spec;
  std::shared_ptr<const GradedSemigroup> s;
  FVector<GaussianRational> x;
  ExactVector beta;
};

inline Fixture load_fixture(const std::string& name) {
  Fixture f;
  f.spec = load_problem(fixture_path(name));
  f.s = std::make_shared<const GradedSemigroup>(f.spec.group, f.spec.vectors);
  if (f.spec.x.kind == XPolicy::Kind::explicit_values) {
    f.x.resize(f.s->n());
    for (Index i = 0; i < f.s->n(); ++i) f.x(i) = f.spec.x.values[static_cast<std::size_t>(i)];
  } else {
    f.x = generic_fvector(*f.s, f.spec.x.seed, f.spec.x.denominator_bound).x;
  }
  f.beta.resize(f.s->rank());
  for (Index j = 0; j < f.s->rank(); ++j) f.beta(j) = f.spec.beta[static_cast<std::size_t>(j)];
  return f;
}

inline const std::vector<std::string>& dimension_fixtures() {
  static const std::vector<std::string> names{"z2_pair", "ray", "unit_square", "p1", "p2", "square_z2"};
  return names;
}

inline const std::vector<std::string>& all_fixtures() {
  static const std::vector<std::string> names{"z2_pair", "ray", "unit_square", "p1", "p2", "square_z2", "repeated", "z3_lift"};
  return names;
}

}  // namespace testing
