#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "bbgkz/errors.hpp"
#include "bbgkz/linalg.hpp"
#include "bbgkz/polyhedral.hpp"

namespace bbgkz {

/// Coefficients x_i of f = sum_i x_i [v_i].
template <class S>
using FVector = Vector<S>;

/// Dimensions indexed by degree (or by filtration level).
struct DimReport {
  std::vector<Index> per_degree;
  Index total = 0;

  static DimReport from(std::vector<Index> dims) {
    DimReport r;
    r.per_degree = std::move(dims);
    for (Index d : r.per_degree) r.total += d;
    return r;
  }
  bool operator==(const DimReport& o) const { return per_degree == o.per_degree && total == o.total; }
};

/// The coordinate functionals e_1, ..., e_r of M.
inline std::vector<DualElement> standard_dual_basis(Index rank) {
  std::vector<DualElement> out;
  for (Index j = 0; j < rank; ++j) out.push_back({IntVector::Unit(rank, j)});
  return out;
}

namespace detail {

template <class S>
void check_coefficients(const FVector<S>& x, const GradedSemigroup& s) {
  if (x.size() != s.n()) throw DimensionMismatch("coefficient vector length differs from the number of vectors");
}

// [A_1 | A_2 | ... ] for equally tall blocks.
template <class S>
Matrix<S> hstack(const std::vector<Matrix<S>>& blocks, Index rows) {
  Index cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  Matrix<S> out(rows, cols);
  Index at = 0;
  for (const auto& b : blocks) {
    out.middleCols(at, b.cols()) = b;
    at += b.cols();
  }
  return out;
}

}  // namespace detail

/// Matrix j sends [c], c in layer k, to sum_i x_i mu_j(v_i) [c + v_i] in
/// layer k + 1. Columns follow the layer-k order, rows the layer-(k+1) order.
template <class S>
std::vector<Matrix<S>> log_derivative_matrices(const FVector<S>& x, const GradedSemigroup& s,
                                               const std::vector<DualElement>& basis, Index k,
                                               Region region = Region::full) {
  detail::check_coefficients(x, s);
  const Layer& from = s.layer(k, region);
  const Layer& to = s.layer(k + 1, region);
  std::vector<Matrix<S>> out;
  for (const DualElement& mu : basis) {
    Matrix<S> m = Matrix<S>::Zero(to.size(), from.size());
    for (Index c = 0; c < from.size(); ++c) {
      for (Index i = 0; i < s.n(); ++i) {
        const Int weight = pair(mu, s.vectors()[static_cast<std::size_t>(i)]);
        if (weight == 0) continue;
        const auto d = to.find(s.group().add(from.elements[static_cast<std::size_t>(c)], s.vectors()[static_cast<std::size_t>(i)]));
        if (!d) continue;  // cannot happen for K or its interior, both closed under +v_i
        m(*d, c) += x(i) * S(static_cast<long>(weight));
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

template <class S>
std::vector<Matrix<S>> log_derivative_matrices(const FVector<S>& x, const GradedSemigroup& s, Index k,
                                               Region region = Region::full) {
  return log_derivative_matrices(x, s, standard_dual_basis(s.rank()), k, region);
}

/// Span of sum_j f_j C[S]_{k-1} inside C[S]_k, as columns.
template <class S>
Matrix<S> ideal_generators(const FVector<S>& x, const GradedSemigroup& s, Index k, Region region = Region::full) {
  const Index rows = s.layer(k, region).size();
  if (k == 0) return Matrix<S>::Zero(rows, 0);
  return detail::hstack(log_derivative_matrices(x, s, k - 1, region), rows);
}

/// Graded dimensions of the logarithmic Jacobian ring C[S]/(f_1..f_r) for
/// S = K or its interior, degrees 0..max_degree.
template <class S>
DimReport jacobian_dims(const FVector<S>& x, const GradedSemigroup& s, Index max_degree,
                        Region region = Region::full) {
  std::vector<Index> dims;
  for (Index k = 0; k <= max_degree; ++k) {
    const Index size = s.layer(k, region).size();
    dims.push_back(k == 0 ? size : size - rank(ideal_generators(x, s, k, region)));
  }
  return DimReport::from(std::move(dims));
}

struct NondegeneracyCertificate {
  bool nondegenerate = false;
  Index expected_total = 0;  // vol(Delta) * |tors N|
  bool total_matches = false;
  bool vanishes_above_rank = false;
  Index max_degree = 0;
  DimReport jacobian;
};

/// Dimension criterion: the Jacobian ring has the expected total dimension
/// and nothing in degrees (rk N, max_degree]. Equivalent to regularity of the
/// log-derivatives because C[K] is Cohen-Macaulay.
template <class S>
NondegeneracyCertificate is_nondegenerate(const FVector<S>& x, const GradedSemigroup& s, Index max_degree = -1) {
  NondegeneracyCertificate cert;
  cert.max_degree = max_degree < 0 ? s.rank() + 1 : std::max(max_degree, s.rank() + 1);
  cert.jacobian = jacobian_dims(x, s, cert.max_degree);
  cert.expected_total = normalized_volume(s.group(), s.vectors()) * s.group().torsion_order();
  cert.total_matches = cert.jacobian.total == cert.expected_total;
  cert.vanishes_above_rank = true;
  for (Index k = s.rank() + 1; k <= cert.max_degree; ++k)
    if (cert.jacobian.per_degree[static_cast<std::size_t>(k)] != 0) cert.vanishes_above_rank = false;
  cert.nondegenerate = cert.total_matches && cert.vanishes_above_rank;
  return cert;
}

/// Draws x_i = +-p/q with 1 <= q <= denominator_bound, 1 <= p <= 2 q_max from
/// a seeded engine, retrying until the nondegeneracy certificate passes.
/// Throws NondegeneracyRetriesExhausted after `max_attempts` failures.
struct GenericPoint {
  FVector<GaussianRational> x;
  NondegeneracyCertificate certificate;
  int attempts = 0;
};

inline GaussianRational random_rational(std::mt19937_64& engine, std::uint64_t denominator_bound) {
  const auto den = static_cast<long>(1 + engine() % denominator_bound);
  const auto num = static_cast<long>(1 + engine() % (2 * denominator_bound));
  const long sign = (engine() & 1U) ? -1 : 1;
  return GaussianRational::from_fraction(sign * num, den);
}

inline GenericPoint generic_fvector(const GradedSemigroup& s, std::uint64_t seed, std::uint64_t denominator_bound = 7,
                                    int max_attempts = 16) {
  if (denominator_bound == 0) throw std::invalid_argument("denominator bound must be positive");
  std::mt19937_64 engine(seed);
  GenericPoint out;
  for (out.attempts = 1; out.attempts <= max_attempts; ++out.attempts) {
    out.x.resize(s.n());
    for (Index i = 0; i < s.n(); ++i) out.x(i) = random_rational(engine, denominator_bound);
    out.certificate = is_nondegenerate(out.x, s);
    if (out.certificate.nondegenerate) return out;
  }
  throw NondegeneracyRetriesExhausted("no nondegenerate coefficients after " + std::to_string(max_attempts) +
                                      " attempts");
}

/// Constraint matrix of sum_i x_i lambda_{c+v_i} v_i over c in layer k: rows
/// (j, c) for basis functional j and c in layer k, columns layer k + 1.
template <class S>
Matrix<S> recursion_matrix(const FVector<S>& x, const GradedSemigroup& s, Index k, Region region = Region::full) {
  const auto mats = log_derivative_matrices(x, s, k, region);
  const Index lk = s.layer(k, region).size();
  Matrix<S> out(s.rank() * lk, s.layer(k + 1, region).size());
  for (Index j = 0; j < s.rank(); ++j) out.middleRows(j * lk, lk) = mats[static_cast<std::size_t>(j)].transpose();
  return out;
}

/// Basis (columns) of the degree-k part of the graded dual R(f,S)^vee: the
/// lambda on layer k with sum_i x_i lambda_{c+v_i} v_i = 0 for deg c = k - 1.
template <class S>
Matrix<S> dual_kernel_basis(const FVector<S>& x, const GradedSemigroup& s, Index k, Region region = Region::full) {
  const Index size = s.layer(k, region).size();
  if (k == 0) return Matrix<S>::Identity(size, size);
  return kernel_basis(recursion_matrix(x, s, k - 1, region));
}

template <class S>
DimReport dual_kernel_dims(const FVector<S>& x, const GradedSemigroup& s, Index max_degree,
                           Region region = Region::full) {
  std::vector<Index> dims;
  for (Index k = 0; k <= max_degree; ++k) dims.push_back(dual_kernel_basis(x, s, k, region).cols());
  return DimReport::from(std::move(dims));
}

namespace detail {

// Column layout for the filtered (hat) systems: degree D first, degree 0 last,
// so the leading term of a row is its highest-degree monomial.
struct FilteredColumns {
  std::vector<Index> offset;  // offset[k] = first column of layer k
  Index count = 0;

  FilteredColumns(const GradedSemigroup& s, Index bound, Region region) : offset(static_cast<std::size_t>(bound + 1)) {
    for (Index k = bound; k >= 0; --k) {
      offset[static_cast<std::size_t>(k)] = count;
      count += s.layer(k, region).size();
    }
  }
  Index column(const GradedSemigroup& s, const GroupElement& c, Region region) const {
    const Index k = s.degree(c);
    return offset[static_cast<std::size_t>(k)] + *s.layer(k, region).find(c);
  }
};

// mu_j . hat[n] = sum_i x_i mu_j(v_i) hat[n + v_i] + mu_j(n - beta) hat[n].
template <class S>
typename SparseEchelon<S>::Row hat_action_row(const FVector<S>& x, const Vector<S>& beta, const GradedSemigroup& s,
                                              const FilteredColumns& cols, Region region, const GroupElement& n,
                                              Index j) {
  std::map<Index, S> acc;
  for (Index i = 0; i < s.n(); ++i) {
    const GroupElement& v = s.vectors()[static_cast<std::size_t>(i)];
    const Int weight = v.free(j);
    if (weight == 0) continue;
    acc[cols.column(s, s.group().add(n, v), region)] += x(i) * S(static_cast<long>(weight));
  }
  acc[cols.column(s, n, region)] += S(static_cast<long>(n.free(j))) - beta(j);
  typename SparseEchelon<S>::Row row;
  for (auto& [c, v] : acc)
    if (!FieldTraits<S>::is_zero(v, 0.0)) row.emplace_back(c, std::move(v));
  return row;
}

template <class S>
SparseEchelon<S> hat_relations(const FVector<S>& x, const Vector<S>& beta, const GradedSemigroup& s,
                               const FilteredColumns& cols, Region region, Index bound) {
  SparseEchelon<S> ech(cols.count);
  for (Index k = 0; k < bound; ++k)
    for (const GroupElement& n : s.layer(k, region).elements)
      for (Index j = 0; j < s.rank(); ++j) ech.insert(hat_action_row(x, beta, s, cols, region, n, j));
  return ech;
}

}  // namespace detail

/// dim of hat C[S]_{<=D} / span{mu_j hat[n] : deg n <= D - 1}, reported by the
/// graded pieces of the filtration induced from the degree filtration.
template <class S>
DimReport hat_quotient_dims(const FVector<S>& x, const Vector<S>& beta, const GradedSemigroup& s, Region region,
                            Index bound) {
  detail::check_coefficients(x, s);
  if (beta.size() != s.rank()) throw DimensionMismatch("beta has the wrong rank");
  const detail::FilteredColumns cols(s, bound, region);
  const auto ech = detail::hat_relations(x, beta, s, cols, region, bound);
  std::vector<Index> graded;
  for (Index k = 0; k <= bound; ++k) {
    const Index size = s.layer(k, region).size();
    Index pivots = 0;
    for (Index c = 0; c < size; ++c)
      if (ech.has_pivot(cols.offset[static_cast<std::size_t>(k)] + c)) ++pivots;
    graded.push_back(size - pivots);
  }
  return DimReport::from(std::move(graded));
}

/// Rank of hat C[K°]/I hat C[K°] -> hat C[K]/I hat C[K] at beta = 0.
template <class S>
Index hat_restriction_rank(const FVector<S>& x, const GradedSemigroup& s, Index bound) {
  detail::check_coefficients(x, s);
  const Vector<S> beta = Vector<S>::Zero(s.rank());
  const detail::FilteredColumns cols(s, bound, Region::full);
  auto ech = detail::hat_relations(x, beta, s, cols, Region::full, bound);
  Index image = 0;
  for (Index k = 0; k <= bound; ++k)
    for (const GroupElement& c : s.layer(k, Region::interior).elements)
      if (ech.insert({{cols.column(s, c, Region::full), S(1)}})) ++image;
  return image;
}

/// Graded dimensions of R_1(f,K), the image of C[K°]/IC[K°] in C[K]/IC[K].
template <class S>
DimReport r1_dims(const FVector<S>& x, const GradedSemigroup& s, Index max_degree) {
  std::vector<Index> dims;
  for (Index k = 0; k <= max_degree; ++k) {
    const Layer& full = s.layer(k);
    const Layer& interior = s.layer(k, Region::interior);
    const Matrix<S> ideal = ideal_generators(x, s, k);
    Matrix<S> both(full.size(), ideal.cols() + interior.size());
    both.setZero();
    both.leftCols(ideal.cols()) = ideal;
    for (Index c = 0; c < interior.size(); ++c)
      both(*full.find(interior.elements[static_cast<std::size_t>(c)]), ideal.cols() + c) = S(1);
    dims.push_back(rank(both) - rank(ideal));
  }
  return DimReport::from(std::move(dims));
}

}  // namespace bbgkz
