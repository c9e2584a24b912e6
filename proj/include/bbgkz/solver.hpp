#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "bbgkz/ring.hpp"

namespace bbgkz {

/// Truncated germ data lambda_c = Phi_c(x) of one solution, c in K with
/// deg c <= truncation, stored layer by layer in the semigroup's order.
template <class S>
class LambdaTable {
 public:
  LambdaTable(std::shared_ptr<const GradedSemigroup> semigroup, FVector<S> base_x, Vector<S> beta, Index truncation)
      : semigroup_(std::move(semigroup)), base_x_(std::move(base_x)), beta_(std::move(beta)), truncation_(truncation) {
    for (Index k = 0; k <= truncation_; ++k) layers_.push_back(Vector<S>::Zero(semigroup_->layer(k).size()));
  }

  const GradedSemigroup& semigroup() const { return *semigroup_; }
  const std::shared_ptr<const GradedSemigroup>& semigroup_ptr() const { return semigroup_; }
  const FVector<S>& base_x() const { return base_x_; }
  const Vector<S>& beta() const { return beta_; }
  Index truncation() const { return truncation_; }

  Vector<S>& layer(Index k) { return layers_.at(static_cast<std::size_t>(k)); }
  const Vector<S>& layer(Index k) const { return layers_.at(static_cast<std::size_t>(k)); }

  /// Throws std::out_of_range outside K or above the truncation.
  const S& at(const GroupElement& c) const {
    const Index k = semigroup_->degree(c);
    if (k < 0 || k > truncation_) throw std::out_of_range("degree outside the table");
    const auto idx = semigroup_->layer(k).find(c);
    if (!idx) throw std::out_of_range("element not in K");
    return layers_[static_cast<std::size_t>(k)](*idx);
  }

  /// Smallest k with a nonzero entry in layer k.
  std::optional<Index> leading_degree() const {
    for (Index k = 0; k <= truncation_; ++k)
      for (Index i = 0; i < layer(k).size(); ++i)
        if (!FieldTraits<S>::is_zero(layer(k)(i), 0.0)) return k;
    return std::nullopt;
  }

  /// All entries concatenated in degree order.
  Vector<S> flatten() const {
    Index total = 0;
    for (const auto& l : layers_) total += l.size();
    Vector<S> out(total);
    Index at = 0;
    for (const auto& l : layers_) {
      out.segment(at, l.size()) = l;
      at += l.size();
    }
    return out;
  }

 private:
  std::shared_ptr<const GradedSemigroup> semigroup_;
  FVector<S> base_x_;
  Vector<S> beta_;
  Index truncation_;
  std::vector<Vector<S>> layers_;
};

template <class S>
struct SolutionBasis {
  std::vector<LambdaTable<S>> tables;
  std::vector<Index> leading_degree;

  Index size() const { return static_cast<Index>(tables.size()); }
  Index truncation() const { return tables.empty() ? 0 : tables.front().truncation(); }
};

/// Right-hand side lambda_c mu_j(beta - c), ordered like recursion_matrix rows.
template <class S>
Vector<S> recursion_rhs(const LambdaTable<S>& table, Index k) {
  const GradedSemigroup& s = table.semigroup();
  const Layer& layer = s.layer(k);
  Vector<S> rhs(s.rank() * layer.size());
  for (Index j = 0; j < s.rank(); ++j)
    for (Index c = 0; c < layer.size(); ++c)
      rhs(j * layer.size() + c) =
          table.layer(k)(c) * (table.beta()(j) - S(static_cast<long>(layer.elements[static_cast<std::size_t>(c)].free(j))));
  return rhs;
}

/// Basis of all solutions of sum_i x_i lambda_{c+v_i} v_i = lambda_c (beta - c)
/// for deg c < truncation, built degree by degree. Each step extends every
/// partial solution (consistency is checked, not assumed) and adds the echelon
/// kernel basis of that degree as new solutions.
/// Throws InconsistentSystem if an extension fails to exist.
template <class S>
SolutionBasis<S> solve_recursion(std::shared_ptr<const GradedSemigroup> s, const FVector<S>& x, const Vector<S>& beta,
                                 Index truncation) {
  detail::check_coefficients(x, *s);
  if (beta.size() != s->rank()) throw DimensionMismatch("beta has the wrong rank");
  if (truncation < s->rank() + 1) throw std::invalid_argument("truncation must be at least rk N + 1");

  SolutionBasis<S> basis;
  const Index l0 = s->layer(0).size();
  for (Index c = 0; c < l0; ++c) {
    LambdaTable<S> t(s, x, beta, truncation);
    t.layer(0)(c) = S(1);
    basis.tables.push_back(std::move(t));
    basis.leading_degree.push_back(0);
  }
  for (Index k = 0; k < truncation; ++k) {
    const Matrix<S> system = recursion_matrix(x, *s, k);
    Matrix<S> rhs(system.rows(), basis.size());
    for (Index t = 0; t < basis.size(); ++t) rhs.col(t) = recursion_rhs(basis.tables[static_cast<std::size_t>(t)], k);
    const auto sol = solve(system, rhs);
    if (!sol.consistent)
      throw InconsistentSystem("no extension to degree " + std::to_string(k + 1) + "; coefficients are degenerate");
    for (Index t = 0; t < basis.size(); ++t) basis.tables[static_cast<std::size_t>(t)].layer(k + 1) = sol.particular.col(t);
    for (Index v = 0; v < sol.kernel.cols(); ++v) {
      LambdaTable<S> t(s, x, beta, truncation);
      t.layer(k + 1) = sol.kernel.col(v);
      basis.tables.push_back(std::move(t));
      basis.leading_degree.push_back(k + 1);
    }
  }
  return basis;
}

/// Number of basis solutions with each leading degree, i.e. dim F_k / F_{k+1}.
template <class S>
DimReport filtration_dims(const SolutionBasis<S>& basis) {
  std::vector<Index> dims(static_cast<std::size_t>(basis.truncation() + 1), 0);
  for (Index d : basis.leading_degree) ++dims[static_cast<std::size_t>(d)];
  return DimReport::from(std::move(dims));
}

struct TableResidual {
  double max_relative = 0.0;
  bool exact_zero = true;  // meaningful only for exact fields
};

/// Residual of sum_i x_i lambda_{c+v_i} v_i - lambda_c (beta - c) over every c
/// with deg c < truncation, relative to the largest term sum (normwise, so
/// entries that vanish up to rounding do not count as failures).
template <class S>
TableResidual gkz_residual(const LambdaTable<S>& table) {
  const GradedSemigroup& s = table.semigroup();
  TableResidual out;
  double max_residual = 0.0;
  double max_scale = 0.0;
  for (Index k = 0; k < table.truncation(); ++k) {
    const Layer& layer = s.layer(k);
    for (Index ci = 0; ci < layer.size(); ++ci) {
      const GroupElement& c = layer.elements[static_cast<std::size_t>(ci)];
      for (Index j = 0; j < s.rank(); ++j) {
        S residual = -table.layer(k)(ci) * (table.beta()(j) - S(static_cast<long>(c.free(j))));
        double scale = FieldTraits<S>::magnitude(residual);
        for (Index i = 0; i < s.n(); ++i) {
          const GroupElement& v = s.vectors()[static_cast<std::size_t>(i)];
          if (v.free(j) == 0) continue;
          const S term = table.base_x()(i) * S(static_cast<long>(v.free(j))) * table.at(s.group().add(c, v));
          scale += FieldTraits<S>::magnitude(term);
          residual += term;
        }
        if (!FieldTraits<S>::is_zero(residual, 0.0)) out.exact_zero = false;
        max_residual = std::max(max_residual, FieldTraits<S>::magnitude(residual));
        max_scale = std::max(max_scale, scale);
      }
    }
  }
  if (max_residual > 0.0) out.max_relative = max_residual / std::max(max_scale, 1e-300);
  return out;
}

namespace detail {

template <class T, class S>
T cast_to(const S& v) {
  if constexpr (std::is_same_v<T, S>) return v;
  else return from_exact<T>(v);
}

}  // namespace detail

/// Truncated Taylor sum of Phi_c at z:
///   sum over l in Z_{>=0}^n with deg c + |l| <= truncation of
///   lambda_{c + sum l_i v_i} prod_i (z_i - x_i)^{l_i} / l_i!.
/// T is the evaluation field; it may differ from the table's field.
template <class S, class T>
T evaluate_series(const LambdaTable<S>& table, const GroupElement& c, const Vector<T>& z) {
  const GradedSemigroup& s = table.semigroup();
  if (z.size() != s.n()) throw DimensionMismatch("evaluation point has the wrong length");
  const Index budget = table.truncation() - s.degree(c);
  if (budget < 0) throw std::out_of_range("element above the truncation degree");
  Vector<T> offset(s.n());
  for (Index i = 0; i < s.n(); ++i) offset(i) = z(i) - detail::cast_to<T>(table.base_x()(i));

  T total(0);
  std::function<void(Index, Index, const GroupElement&, const T&)> walk = [&](Index i, Index remaining,
                                                                              const GroupElement& at, const T& coeff) {
    if (i == s.n()) {
      total += coeff * detail::cast_to<T>(table.at(at));
      return;
    }
    GroupElement e = at;
    T w = coeff;
    for (Index l = 0; l <= remaining; ++l) {
      if (l > 0) {
        e = s.group().add(e, s.vectors()[static_cast<std::size_t>(i)]);
        w = w * offset(i) / T(static_cast<long>(l));
      }
      walk(i + 1, remaining - l, e, w);
    }
  };
  walk(0, budget, c, T(1));
  return total;
}

/// Per-(table, c) outcome of the Euler-equation check at z = x + h u.
struct EulerCheck {
  Index table = 0;
  GroupElement c;
  Index functional = 0;            // index into ResidualReport::functionals
  std::array<double, 3> residual;  // |residual| at h0, h0/2, h0/4
  double observed_order = 0.0;     // min over the two halvings
  Index required_order = 0;        // truncation - deg c - 1
  bool exact_zero = false;
  bool pass = false;
};

struct ResidualReport {
  bool shift_identity_pass = true;  // d_i Phi_c = Phi_{c+v_i} on coefficient arrays
  Index shift_identity_checks = 0;
  bool base_point_pass = true;      // the Euler equation holds at h = 0
  double base_point_residual = 0.0;
  std::vector<DualElement> functionals;
  std::vector<EulerCheck> euler;
  double step = 0.0;
  bool euler_pass = true;
  bool pass() const { return shift_identity_pass && base_point_pass && euler_pass; }
};

namespace detail {

// Coefficient array of the truncated Taylor series of Phi_c keyed by the
// multi-index l, for |l| <= budget.
template <class S>
std::map<std::vector<Index>, S> taylor_coefficients(const LambdaTable<S>& table, const GroupElement& c, Index budget) {
  const GradedSemigroup& s = table.semigroup();
  std::map<std::vector<Index>, S> out;
  std::vector<Index> l(static_cast<std::size_t>(s.n()), 0);
  std::function<void(Index, Index, const GroupElement&)> walk = [&](Index i, Index remaining, const GroupElement& at) {
    if (i == s.n()) {
      out.emplace(l, table.at(at));
      return;
    }
    GroupElement e = at;
    for (Index k = 0; k <= remaining; ++k) {
      if (k > 0) e = s.group().add(e, s.vectors()[static_cast<std::size_t>(i)]);
      l[static_cast<std::size_t>(i)] = k;
      walk(i + 1, remaining - k, e);
    }
    l[static_cast<std::size_t>(i)] = 0;
  };
  walk(0, budget, c);
  return out;
}

inline GaussianRational dyadic_floor(double value, int bits) {
  const double scaled = std::floor(std::ldexp(value, bits));
  return GaussianRational(mpq_class(static_cast<long>(scaled), 1L) / mpq_class(mpz_class(1) << bits));
}

}  // namespace detail

/// Elements where the Euler equation is checked: K_prim and degrees 0, 1,
/// keeping those below the truncation degree.
inline std::vector<GroupElement> residual_test_points(const GradedSemigroup& s, Index truncation) {
  std::set<GroupElement> points;
  for (const auto& c : k_prim(s)) points.insert(c);
  for (Index k = 0; k <= 1; ++k)
    for (const auto& c : s.layer(k).elements) points.insert(c);
  std::vector<GroupElement> out;
  for (const auto& c : points)
    if (s.degree(c) < truncation) out.push_back(c);
  return out;
}

/// Checks the defining PDEs on truncated germs. The shift identity is checked
/// exactly on Taylor coefficient arrays. The Euler equation
/// sum_i mu(v_i) z_i d_i Phi_c = mu(beta - c) Phi_c is evaluated at
/// z = x + h u for h in {h0, h0/2, h0/4} with |u| <= 1 and h0 the comparison
/// radius min|x_i| / (4n); the truncated residual must shrink with order at
/// least truncation - deg c - 1. Exact tables are evaluated exactly, so the
/// observed order is free of rounding.
template <class S>
ResidualReport check_residuals(const SolutionBasis<S>& basis, std::uint64_t seed = 0) {
  using Traits = FieldTraits<S>;
  ResidualReport report;
  if (basis.tables.empty()) return report;
  const GradedSemigroup& s = basis.tables.front().semigroup();
  const Index n = s.n();
  const Index trunc = basis.truncation();
  const FVector<S>& x = basis.tables.front().base_x();
  const Vector<S>& beta = basis.tables.front().beta();

  report.functionals = standard_dual_basis(s.rank());
  if (std::none_of(report.functionals.begin(), report.functionals.end(),
                   [&](const DualElement& m) { return m.covector == s.deg().covector; }))
    report.functionals.push_back(s.deg());

  const std::vector<GroupElement> points = residual_test_points(s, trunc);

  // Shift identity on coefficient arrays.
  for (std::size_t t = 0; t < basis.tables.size(); ++t) {
    const auto& table = basis.tables[t];
    for (const auto& c : points) {
      const Index budget = trunc - s.degree(c);
      if (budget < 1) continue;
      const auto own = detail::taylor_coefficients(table, c, budget);
      for (Index i = 0; i < n; ++i) {
        const auto shifted = detail::taylor_coefficients(table, s.group().add(c, s.vectors()[static_cast<std::size_t>(i)]), budget - 1);
        for (const auto& [l, value] : shifted) {
          auto li = l;
          ++li[static_cast<std::size_t>(i)];
          ++report.shift_identity_checks;
          if (!Traits::is_zero(own.at(li) - value, 0.0)) report.shift_identity_pass = false;
        }
      }
    }
  }

  // Base point: the Euler equation at h = 0 is the lambda recursion itself.
  for (const auto& table : basis.tables) {
    const TableResidual r = gkz_residual(table);
    report.base_point_residual = std::max(report.base_point_residual, r.max_relative);
    if (Traits::exact ? !r.exact_zero : r.max_relative > 1e-9) report.base_point_pass = false;
  }

  // Direction u with Euclidean norm <= 1 and dyadic step h0 below the radius.
  std::mt19937_64 engine(seed ^ 0x5eed5eedULL);
  Vector<GaussianRational> u(n);
  double norm2 = 0.0;
  for (Index i = 0; i < n; ++i) {
    const long a = static_cast<long>(engine() % 33) - 16;
    const long b = static_cast<long>(engine() % 33) - 16;
    u(i) = GaussianRational(mpq_class(a, 16L), mpq_class(b, 16L));
    norm2 += u(i).norm().get_d();
  }
  if (norm2 == 0.0) u(0) = GaussianRational(1);
  const GaussianRational u_scale = GaussianRational(mpq_class(static_cast<long>(std::ceil(std::sqrt(std::max(norm2, 1e-300)) * 16.0)), 16L));
  for (Index i = 0; i < n; ++i) u(i) /= u_scale;
  double min_abs = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) min_abs = std::min(min_abs, Traits::magnitude(x(i)));
  const double radius = min_abs / (4.0 * static_cast<double>(n));
  GaussianRational h0 = detail::dyadic_floor(radius, 20);
  if (h0.is_zero()) h0 = GaussianRational(mpq_class(1, 1L << 20));
  report.step = h0.real().get_d();

  std::array<Vector<S>, 3> z;
  for (int level = 0; level < 3; ++level) {
    const GaussianRational h = h0 / GaussianRational(1L << level);
    z[level].resize(n);
    for (Index i = 0; i < n; ++i) z[level](i) = x(i) + from_exact<S>(h * u(i));
  }

  for (std::size_t t = 0; t < basis.tables.size(); ++t) {
    const auto& table = basis.tables[t];
    for (const auto& c : points) {
      const Index budget = trunc - s.degree(c);
      if (budget < 1) continue;
      // Phi_c and its derivatives Phi_{c+v_i} at the three points.
      std::array<S, 3> phi;
      std::array<std::vector<S>, 3> dphi;
      for (int level = 0; level < 3; ++level) {
        phi[level] = evaluate_series(table, c, z[level]);
        for (Index i = 0; i < n; ++i)
          dphi[level].push_back(evaluate_series(table, s.group().add(c, s.vectors()[static_cast<std::size_t>(i)]), z[level]));
      }
      for (std::size_t f = 0; f < report.functionals.size(); ++f) {
        const DualElement& mu = report.functionals[f];
        EulerCheck check;
        check.table = static_cast<Index>(t);
        check.c = c;
        check.functional = static_cast<Index>(f);
        check.required_order = budget - 1;
        double scale = 0.0;
        for (int level = 0; level < 3; ++level) {
          S shift(0);
          for (Index j = 0; j < s.rank(); ++j) shift += S(static_cast<long>(mu.covector(j))) * (beta(j) - S(static_cast<long>(c.free(j))));
          S residual = -shift * phi[level];
          scale = std::max(scale, Traits::magnitude(residual));
          for (Index i = 0; i < n; ++i) {
            const Int w = pair(mu, s.vectors()[static_cast<std::size_t>(i)]);
            if (w == 0) continue;
            const S term = S(static_cast<long>(w)) * z[level](i) * dphi[level][static_cast<std::size_t>(i)];
            scale = std::max(scale, Traits::magnitude(term));
            residual += term;
          }
          check.residual[static_cast<std::size_t>(level)] = Traits::magnitude(residual);
        }
        const double floor = Traits::exact ? 0.0 : 1e-12 * std::max(scale, 1e-300);
        check.exact_zero = std::all_of(check.residual.begin(), check.residual.end(), [&](double r) { return r <= floor; });
        if (check.exact_zero) {
          check.observed_order = std::numeric_limits<double>::infinity();
          check.pass = true;
        } else {
          const double p1 = std::log2(check.residual[0] / check.residual[1]);
          const double p2 = std::log2(check.residual[1] / check.residual[2]);
          check.observed_order = std::min(p1, p2);
          check.pass = check.observed_order >= static_cast<double>(check.required_order) - 1e-9;
        }
        if (!check.pass) report.euler_pass = false;
        report.euler.push_back(std::move(check));
      }
    }
  }
  return report;
}

/// Rank of the restriction of the solution space to GKZ on the interior: rows
/// are tables, columns lambda_c for c in K° with deg c <= rk N.
template <class S>
Index restricted_solution_rank(const SolutionBasis<S>& basis) {
  if (basis.tables.empty()) return 0;
  const GradedSemigroup& s = basis.tables.front().semigroup();
  std::vector<const GroupElement*> columns;
  for (Index k = 0; k <= std::min(s.rank(), basis.truncation()); ++k)
    for (const auto& c : s.layer(k, Region::interior).elements) columns.push_back(&c);
  Matrix<S> m(basis.size(), static_cast<Index>(columns.size()));
  for (Index t = 0; t < basis.size(); ++t)
    for (std::size_t j = 0; j < columns.size(); ++j)
      m(t, static_cast<Index>(j)) = basis.tables[static_cast<std::size_t>(t)].at(*columns[j]);
  return rank(m);
}

}  // namespace bbgkz
