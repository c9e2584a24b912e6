#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SVD>

#include "bbgkz/scalar.hpp"

namespace bbgkz {

/// Reduced row echelon form of a matrix together with its pivot columns.
template <class S>
struct RowEchelon {
  Matrix<S> reduced;
  std::vector<Index> pivots;  // pivot column of row r, for r < rank()
  Index rank() const { return static_cast<Index>(pivots.size()); }
};

namespace detail {

template <class S>
double max_magnitude(const Matrix<S>& m, Index col_begin, Index col_end) {
  double scale = 0.0;
  for (Index j = col_begin; j < col_end; ++j)
    for (Index i = 0; i < m.rows(); ++i) scale = std::max(scale, FieldTraits<S>::magnitude(m(i, j)));
  return scale;
}

}  // namespace detail

/// Gauss-Jordan elimination. Pivots are only taken in the first `pivot_limit`
/// columns (all columns when negative), which is how augmented systems are
/// reduced. Exact fields pivot on the first nonzero entry so the result is
/// deterministic; floating fields use partial pivoting with a relative cutoff.
template <class Derived>
RowEchelon<typename Derived::Scalar> row_reduce(const Eigen::MatrixBase<Derived>& input,
                                                Index pivot_limit = -1) {
  using S = typename Derived::Scalar;
  using Traits = FieldTraits<S>;
  RowEchelon<S> out;
  out.reduced = input;
  Matrix<S>& m = out.reduced;
  const Index rows = m.rows();
  const Index cols = m.cols();
  const Index limit = pivot_limit < 0 ? cols : std::min(pivot_limit, cols);
  const double scale = Traits::exact ? 0.0 : detail::max_magnitude(m, 0, limit);

  std::vector<Index> support;
  Index row = 0;
  for (Index col = 0; col < limit && row < rows; ++col) {
    Index pivot = -1;
    if constexpr (Traits::exact) {
      for (Index i = row; i < rows; ++i) {
        if (!Traits::is_zero(m(i, col), scale)) {
          pivot = i;
          break;
        }
      }
    } else {
      double best = 0.0;
      for (Index i = row; i < rows; ++i) {
        double mag = Traits::magnitude(m(i, col));
        if (mag > best) {
          best = mag;
          pivot = i;
        }
      }
      if (pivot >= 0 && Traits::is_zero(m(pivot, col), scale)) pivot = -1;
    }
    if (pivot < 0) continue;
    if (pivot != row) m.row(pivot).swap(m.row(row));

    const S inv = S(1) / m(row, col);
    support.clear();
    for (Index j = col; j < cols; ++j) {
      if (!Traits::is_zero(m(row, j), 0.0)) {
        m(row, j) *= inv;
        support.push_back(j);
      }
    }
    m(row, col) = S(1);
    for (Index i = 0; i < rows; ++i) {
      if (i == row || Traits::is_zero(m(i, col), 0.0)) continue;
      const S factor = m(i, col);
      for (Index j : support) Traits::sub_mul(m(i, j), factor, m(row, j));
      m(i, col) = S(0);
    }
    out.pivots.push_back(col);
    ++row;
  }
  return out;
}

template <class Derived>
Index rank(const Eigen::MatrixBase<Derived>& m) {
  return row_reduce(m).rank();
}

/// Basis of the right kernel, one vector per column, normalised so each free
/// column carries a single 1.
template <class Derived>
Matrix<typename Derived::Scalar> kernel_basis(const Eigen::MatrixBase<Derived>& m) {
  using S = typename Derived::Scalar;
  const auto ech = row_reduce(m);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols()), false);
  for (Index p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  Matrix<S> basis = Matrix<S>::Zero(m.cols(), m.cols() - ech.rank());
  Index k = 0;
  for (Index f = 0; f < m.cols(); ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    basis(f, k) = S(1);
    for (Index r = 0; r < ech.rank(); ++r) basis(ech.pivots[static_cast<std::size_t>(r)], k) = -ech.reduced(r, f);
    ++k;
  }
  return basis;
}

/// Result of solving A X = B for several right-hand sides at once.
template <class S>
struct LinearSolve {
  bool consistent = false;
  Matrix<S> particular;  // free variables set to zero
  Matrix<S> kernel;      // columns span ker A
};

template <class DerivedA, class DerivedB>
LinearSolve<typename DerivedA::Scalar> solve(const Eigen::MatrixBase<DerivedA>& a,
                                             const Eigen::MatrixBase<DerivedB>& b) {
  using S = typename DerivedA::Scalar;
  using Traits = FieldTraits<S>;
  Matrix<S> augmented(a.rows(), a.cols() + b.cols());
  augmented << a, b;
  const double b_scale = Traits::exact ? 0.0 : detail::max_magnitude(augmented, a.cols(), augmented.cols());
  auto ech = row_reduce(augmented, a.cols());

  LinearSolve<S> out;
  out.consistent = true;
  double reduced_scale = 0.0;
  if constexpr (!Traits::exact) {
    reduced_scale = std::max(b_scale, detail::max_magnitude(ech.reduced, a.cols(), augmented.cols()));
  }
  for (Index r = ech.rank(); r < a.rows() && out.consistent; ++r) {
    for (Index t = 0; t < b.cols(); ++t) {
      if (!Traits::is_zero(ech.reduced(r, a.cols() + t), reduced_scale)) {
        out.consistent = false;
        break;
      }
    }
  }
  out.particular = Matrix<S>::Zero(a.cols(), b.cols());
  for (Index r = 0; r < ech.rank(); ++r)
    for (Index t = 0; t < b.cols(); ++t)
      out.particular(ech.pivots[static_cast<std::size_t>(r)], t) = ech.reduced(r, a.cols() + t);

  std::vector<bool> is_pivot(static_cast<std::size_t>(a.cols()), false);
  for (Index p : ech.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  out.kernel = Matrix<S>::Zero(a.cols(), a.cols() - ech.rank());
  Index k = 0;
  for (Index f = 0; f < a.cols(); ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    out.kernel(f, k) = S(1);
    for (Index r = 0; r < ech.rank(); ++r)
      out.kernel(ech.pivots[static_cast<std::size_t>(r)], k) = -ech.reduced(r, f);
    ++k;
  }
  return out;
}

/// Incremental row echelon basis over sparse rows. Column indices double as
/// priorities: the smallest column of a row is its leading term. Used for
/// the large filtered systems where the dense route is too slow.
template <class S>
class SparseEchelon {
 public:
  using Entry = std::pair<Index, S>;
  using Row = std::vector<Entry>;  // strictly increasing columns, no zeros

  explicit SparseEchelon(Index columns) : columns_(columns) {}

  /// Reduces `row` against the basis; returns true when it enlarged the span.
  bool insert(Row row) {
    using Traits = FieldTraits<S>;
    if constexpr (!Traits::exact) {
      for (const auto& e : row) scale_ = std::max(scale_, Traits::magnitude(e.second));
    }
    prune(row);
    Row scratch;
    while (!row.empty()) {
      auto it = pivots_.find(row.front().first);
      if (it == pivots_.end()) {
        const S inv = S(1) / row.front().second;
        for (auto& e : row) e.second *= inv;
        row.front().second = S(1);
        pivots_.emplace(row.front().first, std::move(row));
        return true;
      }
      const Row& pivot = it->second;
      const S factor = row.front().second;
      scratch.clear();
      scratch.reserve(row.size() + pivot.size());
      std::size_t a = 1;
      std::size_t b = 1;
      while (a < row.size() || b < pivot.size()) {
        if (b >= pivot.size() || (a < row.size() && row[a].first < pivot[b].first)) {
          scratch.push_back(std::move(row[a++]));
        } else if (a >= row.size() || pivot[b].first < row[a].first) {
          S v(0);
          Traits::sub_mul(v, factor, pivot[b].second);
          scratch.emplace_back(pivot[b].first, std::move(v));
          ++b;
        } else {
          Traits::sub_mul(row[a].second, factor, pivot[b].second);
          scratch.push_back(std::move(row[a]));
          ++a;
          ++b;
        }
      }
      row.swap(scratch);
      prune(row);
    }
    return false;
  }

  Index rank() const { return static_cast<Index>(pivots_.size()); }
  Index columns() const { return columns_; }
  bool has_pivot(Index column) const { return pivots_.count(column) != 0; }

 private:
  void prune(Row& row) const {
    row.erase(std::remove_if(row.begin(), row.end(),
                             [&](const Entry& e) { return FieldTraits<S>::is_zero(e.second, scale_); }),
              row.end());
  }

  Index columns_;
  double scale_ = 0.0;
  std::map<Index, Row> pivots_;
};

/// Singular values of a complex matrix above `relative_cutoff` times the
/// largest one.
inline Index numeric_rank(const Matrix<Complex>& m, double relative_cutoff) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix<Complex>> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  Index count = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > relative_cutoff * sv(0)) ++count;
  return count;
}

}  // namespace bbgkz
