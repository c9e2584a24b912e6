#pragma once

// Brute-force reference computations used to check the library. Nothing here
// calls into the routines being tested beyond basic data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

#include <gmpxx.h>

#include "bbgkz/abelian.hpp"

namespace oracle {

using bbgkz::Index;
using bbgkz::Int;
using bbgkz::IntMatrix;
using bbgkz::IntVector;

// Exact determinant by cofactor expansion.
inline mpz_class det(const std::vector<std::vector<mpz_class>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  if (n == 1) return m[0][0];
  mpz_class total = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m[0][c] == 0) continue;
    std::vector<std::vector<mpz_class>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<mpz_class> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    const mpz_class term = m[0][c] * det(minor);
    total += (c % 2 == 0) ? term : mpz_class(-term);
  }
  return total;
}

inline void choose(std::size_t n, std::size_t k, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (pick.size() == k) {
      fn(pick);
      return;
    }
    for (std::size_t i = start; i < n; ++i) {
      pick.push_back(i);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

// Smith invariants from determinantal divisors: d_k = gcd of k x k minors.
inline std::vector<Int> smith_invariants(const IntMatrix& a) {
  std::vector<Int> out;
  mpz_class previous = 1;
  const std::size_t rows = static_cast<std::size_t>(a.rows());
  const std::size_t cols = static_cast<std::size_t>(a.cols());
  for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
    mpz_class g = 0;
    choose(rows, k, [&](const std::vector<std::size_t>& r) {
      choose(cols, k, [&](const std::vector<std::size_t>& c) {
        std::vector<std::vector<mpz_class>> m(k, std::vector<mpz_class>(k));
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j)
            m[i][j] = static_cast<long>(a(static_cast<Index>(r[i]), static_cast<Index>(c[j])));
        mpz_class d = det(m);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
      });
    });
    if (g == 0) break;
    out.push_back(static_cast<Int>(mpz_class(g / previous).get_si()));
    previous = g;
  }
  return out;
}

// Twice the area of a lattice polygon given by its vertices in cyclic order.
inline Int shoelace2(const std::vector<std::pair<Int, Int>>& poly) {
  Int s = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& [x0, y0] = poly[i];
    const auto& [x1, y1] = poly[(i + 1) % poly.size()];
    s += x0 * y1 - x1 * y0;
  }
  return s < 0 ? -s : s;
}

// p in the cone over the columns of gens (full rank r <= 3): p is a
// nonnegative combination of some r independent columns (Caratheodory),
// tested with Cramer's rule.
inline bool in_cone(const IntMatrix& gens, const IntVector& p) {
  const std::size_t r = static_cast<std::size_t>(gens.rows());
  bool found = false;
  choose(static_cast<std::size_t>(gens.cols()), r, [&](const std::vector<std::size_t>& pick) {
    if (found) return;
    std::vector<std::vector<mpz_class>> m(r, std::vector<mpz_class>(r));
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < r; ++j) m[i][j] = static_cast<long>(gens(static_cast<Index>(i), static_cast<Index>(pick[j])));
    const mpz_class d = det(m);
    if (d == 0) return;
    for (std::size_t j = 0; j < r; ++j) {
      auto mj = m;
      for (std::size_t i = 0; i < r; ++i) mj[i][j] = static_cast<long>(p(static_cast<Index>(i)));
      const mpz_class dj = det(mj);
      if (sgn(dj) * sgn(d) < 0) return;
    }
    found = true;
  });
  return found;
}

// Interior test: p stays in the cone after a tiny step towards -sum(gens).
inline bool in_interior(const IntMatrix& gens, const IntVector& p) {
  const Int big = 1 << 20;
  const IntVector q = big * p - gens.rowwise().sum();
  return in_cone(gens, q);
}

// Number of c in N with deg c = k in the cone (or interior), counting all
// torsion copies, by scanning a generous box.
inline Index layer_count(const IntMatrix& gens, const IntVector& deg, Int torsion_order, Int k, bool interior) {
  const Index r = gens.rows();
  const Int bound = k * std::max<Int>(1, gens.cwiseAbs().maxCoeff()) + 1;
  Index count = 0;
  IntVector p = IntVector::Constant(r, -bound);
  while (true) {
    if (deg.dot(p) == k && (interior ? in_interior(gens, p) : in_cone(gens, p))) ++count;
    Index j = r - 1;
    while (j >= 0 && p(j) == bound) {
      p(j) = -bound;
      --j;
    }
    if (j < 0) break;
    ++p(j);
  }
  return count * torsion_order;
}

// dim R_k from the Hilbert identity sum_k R_k t^k = H(t) (1 - t)^r.
inline std::vector<Index> hilbert_jacobian(const std::vector<Index>& layer_counts, Index r) {
  std::vector<Index> out(layer_counts.size(), 0);
  for (std::size_t k = 0; k < layer_counts.size(); ++k) {
    Int acc = 0;
    Int binom = 1;
    for (Index i = 0; i <= r && static_cast<Index>(k) - i >= 0; ++i) {
      acc += ((i % 2) ? -binom : binom) * layer_counts[k - static_cast<std::size_t>(i)];
      binom = binom * (r - i) / (i + 1);
    }
    out[k] = acc;
  }
  return out;
}

using Rows = std::vector<std::vector<mpq_class>>;

// Plain Gaussian elimination over Q, separate from the library's echelon code.
inline Index rank(Rows m) {
  Index r = 0;
  const std::size_t cols = m.empty() ? 0 : m[0].size();
  for (std::size_t c = 0; c < cols && r < static_cast<Index>(m.size()); ++c) {
    std::size_t p = static_cast<std::size_t>(r);
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[static_cast<std::size_t>(r)]);
    for (std::size_t i = static_cast<std::size_t>(r) + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      const mpq_class f = m[i][c] / m[static_cast<std::size_t>(r)][c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * m[static_cast<std::size_t>(r)][j];
    }
    ++r;
  }
  return r;
}

// Basis of {y : y^T m = 0} for an a x b matrix m.
inline Rows left_kernel(const Rows& m, std::size_t a) {
  const std::size_t b = m.empty() ? 0 : m[0].size();
  // Reduce m^T (b x a) to RREF.
  Rows t(b, std::vector<mpq_class>(a));
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) t[j][i] = m[i][j];
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < a && row < b; ++c) {
    std::size_t p = row;
    while (p < b && t[p][c] == 0) ++p;
    if (p == b) continue;
    std::swap(t[p], t[row]);
    const mpq_class inv = 1 / t[row][c];
    for (auto& e : t[row]) e *= inv;
    for (std::size_t i = 0; i < b; ++i) {
      if (i == row || t[i][c] == 0) continue;
      const mpq_class f = t[i][c];
      for (std::size_t j = 0; j < a; ++j) t[i][j] -= f * t[row][j];
    }
    pivots.push_back(c);
    ++row;
  }
  Rows out;
  for (std::size_t f = 0; f < a; ++f) {
    if (std::find(pivots.begin(), pivots.end(), f) != pivots.end()) continue;
    std::vector<mpq_class> y(a, 0);
    y[f] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) y[pivots[r]] = -t[r][f];
    out.push_back(y);
  }
  return out;
}

}  // namespace oracle
