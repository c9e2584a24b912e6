#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "bbgkz/solver.hpp"

namespace bbgkz {

/// The problem over pi(N) = Z^r obtained by collapsing the v_i to their free parts.
struct QuotientProblem {
  AbelianGroup group;                        // the original N
  std::vector<GroupElement> vectors;         // the original v_i
  std::vector<IntVector> images;             // distinct w_j, in order of first appearance
  std::vector<std::vector<Index>> index_sets;  // I_j, 0-based
  std::shared_ptr<const GradedSemigroup> semigroup;  // over Z^r with the w_j

  Index m() const { return static_cast<Index>(images.size()); }
  GroupElement image_of(const GroupElement& c) const { return semigroup->group().free_element(c.free); }
};

QuotientProblem build_quotient(const GradedSemigroup& s);

/// True when every character value lies in Q(i), i.e. the exponent of the
/// torsion subgroup divides 4.
bool characters_exact(const AbelianGroup& group);

template <class T>
T character_value(const AbelianGroup& group, const Character& rho, const GroupElement& c) {
  const RootOfUnity root = char_value(group, rho, c);
  if constexpr (FieldTraits<T>::exact) {
    const auto exact = root.to_exact();
    if (!exact) throw std::domain_error("character value is not a Gaussian rational");
    return *exact;
  } else {
    return root.to_complex();
  }
}

/// (sum_{i in I_1} rho(v_i) x_i, ..., sum_{i in I_m} rho(v_i) x_i)
template <class T>
FVector<T> p_rho(const Character& rho, const FVector<T>& x, const QuotientProblem& q) {
  if (x.size() != static_cast<Index>(q.vectors.size())) throw DimensionMismatch("x has the wrong length");
  FVector<T> z(q.m());
  for (Index j = 0; j < q.m(); ++j) {
    T sum(0);
    for (Index i : q.index_sets[static_cast<std::size_t>(j)])
      sum += character_value<T>(q.group, rho, q.vectors[static_cast<std::size_t>(i)]) * x(i);
    z(j) = sum;
  }
  return z;
}

/// Per-coordinate box for log|z_j|; arguments are restricted to (-pi, pi).
struct LogBox {
  std::vector<double> lo;
  std::vector<double> hi;

  static LogBox uniform(Index m, double lo, double hi) {
    return {std::vector<double>(static_cast<std::size_t>(m), lo), std::vector<double>(static_cast<std::size_t>(m), hi)};
  }
  bool contains(const std::vector<Complex>& z) const;
};

/// Rational x with p_g(x) in the region for every character g. One index i_j
/// per I_j carries a modulus inside the box and argument -pi + pi/|G|; the
/// other coordinates are shrunk towards 0 until every image checks out.
/// Throws RegionTooTight if that never happens.
FVector<GaussianRational> find_common_basepoint(const QuotientProblem& q, const LogBox& box, std::uint64_t seed);

/// Max |X X^H - |G| I| for the character table X(g, h) = rho_g(t_h).
double character_orthogonality_defect(const AbelianGroup& group);

template <class S>
struct LiftedTable {
  LambdaTable<S> table;
  double residual = 0.0;
};

/// lambda_c = rho(c) psi_{pi(c)} for c in K up to the truncation degree.
/// psi must be a quotient table based at p_rho(x). Throws ResidualTooLarge if
/// the lifted table violates the recursion of the original problem by more
/// than 1e-9 relative, or if x does not map to psi's base point.
template <class S>
LiftedTable<S> lift_and_verify(const LambdaTable<S>& psi, const Character& rho, const FVector<S>& x,
                               const QuotientProblem& q, std::shared_ptr<const GradedSemigroup> s) {
  const FVector<S> z = p_rho(rho, x, q);
  double gap = 0.0;
  double scale = 1.0;
  for (Index j = 0; j < z.size(); ++j) {
    gap = std::max(gap, FieldTraits<S>::magnitude(z(j) - psi.base_x()(j)));
    scale = std::max(scale, FieldTraits<S>::magnitude(z(j)));
  }
  if (gap > 1e-12 * scale) throw ResidualTooLarge("x does not map to the quotient base point");

  LambdaTable<S> lifted(s, x, psi.beta(), psi.truncation());
  for (Index k = 0; k <= psi.truncation(); ++k) {
    const Layer& layer = s->layer(k);
    for (Index ci = 0; ci < layer.size(); ++ci) {
      const GroupElement& c = layer.elements[static_cast<std::size_t>(ci)];
      lifted.layer(k)(ci) = character_value<S>(q.group, rho, c) * psi.at(q.image_of(c));
    }
  }
  const TableResidual r = gkz_residual(lifted);
  const bool ok = FieldTraits<S>::exact ? r.exact_zero : r.max_relative <= 1e-9;
  if (!ok) throw ResidualTooLarge("lifted table residual " + std::to_string(r.max_relative));
  return {std::move(lifted), r.max_relative};
}

/// Numeric rank of the stacked lifted tables (rows scaled to unit max-norm,
/// singular values above 1e-9 times the largest).
template <class S>
Index independence_count(const std::vector<LambdaTable<S>>& tables) {
  if (tables.empty()) return 0;
  const Index cols = tables.front().flatten().size();
  Matrix<Complex> m(static_cast<Index>(tables.size()), cols);
  for (std::size_t t = 0; t < tables.size(); ++t) {
    const Vector<S> flat = tables[t].flatten();
    double top = 0.0;
    for (Index j = 0; j < cols; ++j) {
      m(static_cast<Index>(t), j) = FieldTraits<S>::to_complex(flat(j));
      top = std::max(top, std::abs(m(static_cast<Index>(t), j)));
    }
    if (top > 0.0) m.row(static_cast<Index>(t)) /= top;
  }
  return numeric_rank(m, 1e-9);
}

struct LiftReport {
  bool exact = true;
  Int group_order = 1;
  Index quotient_dimension = 0;
  Int expected = 0;  // vol(Delta) |tors N|
  Index lifted_count = 0;
  Index rank = 0;
  double max_residual = 0.0;
  double orthogonality_defect = 0.0;
  FVector<GaussianRational> x;
  Index attempts = 0;

  bool orthogonality_pass() const { return orthogonality_defect <= 1e-12; }
  bool pass() const {
    return orthogonality_pass() && rank == quotient_dimension * group_order && rank == expected && max_residual <= 1e-9;
  }
};

namespace detail {

template <class S>
LiftReport lift_all(std::shared_ptr<const GradedSemigroup> s, const QuotientProblem& q, const ExactVector& beta_exact,
                    Index truncation, const LogBox& box, std::uint64_t seed) {
  LiftReport report;
  report.exact = FieldTraits<S>::exact;
  report.group_order = s->group().torsion_order();
  report.expected = normalized_volume(s->group(), s->vectors()) * report.group_order;
  report.orthogonality_defect = character_orthogonality_defect(s->group());
  const std::vector<Character> chars = s->group().characters();
  Vector<S> beta(beta_exact.size());
  for (Index j = 0; j < beta.size(); ++j) beta(j) = from_exact<S>(beta_exact(j));

  constexpr Index kMaxAttempts = 16;
  FVector<S> x;
  std::vector<FVector<S>> bases;
  bool found = false;
  for (Index attempt = 0; attempt < kMaxAttempts && !found; ++attempt) {
    report.attempts = attempt + 1;
    report.x = find_common_basepoint(q, box, seed + static_cast<std::uint64_t>(attempt));
    x.resize(report.x.size());
    for (Index i = 0; i < x.size(); ++i) x(i) = from_exact<S>(report.x(i));
    bases.clear();
    found = true;
    for (const auto& rho : chars) {
      bases.push_back(p_rho(rho, x, q));
      if (!is_nondegenerate(bases.back(), *q.semigroup).nondegenerate) {
        found = false;
        break;
      }
    }
  }
  if (!found) throw NondegeneracyRetriesExhausted("no common base point with nondegenerate quotient images");

  std::vector<LambdaTable<S>> lifted;
  for (std::size_t g = 0; g < chars.size(); ++g) {
    const SolutionBasis<S> psi = solve_recursion(q.semigroup, bases[g], beta, truncation);
    if (g == 0) report.quotient_dimension = psi.size();
    for (const auto& table : psi.tables) {
      LiftedTable<S> l = lift_and_verify(table, chars[g], x, q, s);
      report.max_residual = std::max(report.max_residual, l.residual);
      lifted.push_back(std::move(l.table));
    }
  }
  report.lifted_count = static_cast<Index>(lifted.size());
  report.rank = independence_count(lifted);
  return report;
}

}  // namespace detail

/// Lifts a full quotient solution basis through every character at a common
/// base point and measures the rank of the result. Exact arithmetic is used
/// when the character values are Gaussian rationals, complex floats otherwise.
inline LiftReport lift_solutions(std::shared_ptr<const GradedSemigroup> s, const ExactVector& beta, Index truncation,
                                 const LogBox& box, std::uint64_t seed) {
  const QuotientProblem q = build_quotient(*s);
  if (characters_exact(s->group())) return detail::lift_all<GaussianRational>(s, q, beta, truncation, box, seed);
  return detail::lift_all<Complex>(s, q, beta, truncation, box, seed);
}

}  // namespace bbgkz
