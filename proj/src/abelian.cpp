#include "bbgkz/abelian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "bbgkz/errors.hpp"
#include "bbgkz/linalg.hpp"

namespace bbgkz {

namespace {

Int floor_mod(Int a, Int m) {
  Int r = a % m;
  return r < 0 ? r + m : r;
}

bool lex_less(const IntVector& a, const IntVector& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

bool operator==(const GroupElement& a, const GroupElement& b) {
  return a.free.size() == b.free.size() && a.torsion.size() == b.torsion.size() && a.free == b.free &&
         a.torsion == b.torsion;
}

bool operator<(const GroupElement& a, const GroupElement& b) {
  if (a.free != b.free) return lex_less(a.free, b.free);
  return lex_less(a.torsion, b.torsion);
}

std::complex<double> RootOfUnity::to_complex() const {
  switch (denominator) {
    case 1: return {1.0, 0.0};
    case 2: return {-1.0, 0.0};
    case 4: return numerator == 1 ? std::complex<double>{0.0, 1.0} : std::complex<double>{0.0, -1.0};
    default: break;
  }
  const double angle = 2.0 * M_PI * static_cast<double>(numerator) / static_cast<double>(denominator);
  return std::polar(1.0, angle);
}

std::optional<GaussianRational> RootOfUnity::to_exact() const {
  switch (denominator) {
    case 1: return GaussianRational(1);
    case 2: return GaussianRational(-1);
    case 4: return GaussianRational(mpq_class(0), mpq_class(numerator == 1 ? 1 : -1));
    default: return std::nullopt;
  }
}

bool operator==(const RootOfUnity& a, const RootOfUnity& b) {
  return a.numerator == b.numerator && a.denominator == b.denominator;
}

AbelianGroup::AbelianGroup(Index rank, std::vector<Int> torsion_invariants)
    : rank_(rank), torsion_(std::move(torsion_invariants)) {
  if (rank_ < 0) throw InvalidGroup("negative rank");
  for (std::size_t j = 0; j < torsion_.size(); ++j) {
    if (torsion_[j] < 2) throw InvalidGroup("torsion invariant " + std::to_string(torsion_[j]) + " < 2");
    if (j + 1 < torsion_.size() && torsion_[j + 1] % torsion_[j] != 0)
      throw InvalidGroup("torsion invariants must form a divisibility chain");
  }
}

AbelianGroup AbelianGroup::from_presentation(const IntMatrix& relations) {
  const SmithForm snf = smith_normal_form(relations);
  std::vector<Int> torsion;
  Index nonzero = 0;
  for (Index i = 0; i < std::min(snf.d.rows(), snf.d.cols()); ++i) {
    Int d = snf.d(i, i);
    if (d == 0) continue;
    ++nonzero;
    if (d >= 2) torsion.push_back(d);
  }
  return AbelianGroup(relations.rows() - nonzero, std::move(torsion));
}

Int AbelianGroup::torsion_order() const {
  return std::accumulate(torsion_.begin(), torsion_.end(), Int{1}, std::multiplies<>());
}

void AbelianGroup::check(const GroupElement& a) const {
  if (a.free.size() != rank_ || a.torsion.size() != torsion_length())
    throw DimensionMismatch("element does not belong to this group");
}

GroupElement AbelianGroup::element(IntVector free, IntVector torsion) const {
  GroupElement e{std::move(free), std::move(torsion)};
  check(e);
  for (Index j = 0; j < torsion_length(); ++j) e.torsion(j) = floor_mod(e.torsion(j), torsion_[static_cast<std::size_t>(j)]);
  return e;
}

GroupElement AbelianGroup::free_element(IntVector free) const {
  return element(std::move(free), IntVector::Zero(torsion_length()));
}

GroupElement AbelianGroup::zero() const { return {IntVector::Zero(rank_), IntVector::Zero(torsion_length())}; }

GroupElement AbelianGroup::add(const GroupElement& a, const GroupElement& b) const {
  check(a);
  check(b);
  return element(a.free + b.free, a.torsion + b.torsion);
}

GroupElement AbelianGroup::subtract(const GroupElement& a, const GroupElement& b) const {
  check(a);
  check(b);
  return element(a.free - b.free, a.torsion - b.torsion);
}

GroupElement AbelianGroup::negate(const GroupElement& a) const {
  check(a);
  return element(-a.free, -a.torsion);
}

std::vector<GroupElement> AbelianGroup::torsion_elements() const {
  std::vector<GroupElement> out;
  IntVector t = IntVector::Zero(torsion_length());
  while (true) {
    out.push_back({IntVector::Zero(rank_), t});
    Index j = torsion_length() - 1;
    while (j >= 0 && ++t(j) == torsion_[static_cast<std::size_t>(j)]) t(j--) = 0;
    if (j < 0) break;
  }
  return out;
}

std::vector<Character> AbelianGroup::characters() const {
  std::vector<Character> out;
  for (const auto& g : torsion_elements()) out.push_back({g.torsion});
  return out;
}

std::vector<Int> SmithForm::invariants() const {
  std::vector<Int> out;
  for (Index i = 0; i < std::min(d.rows(), d.cols()); ++i)
    if (d(i, i) != 0) out.push_back(d(i, i));
  return out;
}

SmithForm smith_normal_form(const IntMatrix& a) {
  const Index m = a.rows();
  const Index n = a.cols();
  SmithForm s{IntMatrix::Identity(m, m), a, IntMatrix::Identity(n, n)};
  IntMatrix& d = s.d;

  auto swap_rows = [&](Index i, Index j) {
    if (i == j) return;
    d.row(i).swap(d.row(j));
    s.u.row(i).swap(s.u.row(j));
  };
  auto swap_cols = [&](Index i, Index j) {
    if (i == j) return;
    d.col(i).swap(d.col(j));
    s.v.col(i).swap(s.v.col(j));
  };
  // row_i -= q row_t
  auto row_axpy = [&](Index i, Index t, Int q) {
    d.row(i) -= q * d.row(t);
    s.u.row(i) -= q * s.u.row(t);
  };
  auto col_axpy = [&](Index j, Index t, Int q) {
    d.col(j) -= q * d.col(t);
    s.v.col(j) -= q * s.v.col(t);
  };

  for (Index t = 0; t < std::min(m, n); ++t) {
    // Smallest nonzero entry of the trailing block goes to (t, t).
    Index pi = -1;
    Index pj = -1;
    for (Index i = t; i < m; ++i)
      for (Index j = t; j < n; ++j)
        if (d(i, j) != 0 && (pi < 0 || std::llabs(d(i, j)) < std::llabs(d(pi, pj)))) {
          pi = i;
          pj = j;
        }
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);

    while (true) {
      bool clean = true;
      for (Index i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        row_axpy(i, t, d(i, t) / d(t, t));
        if (d(i, t) != 0) clean = false;
      }
      for (Index j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        col_axpy(j, t, d(t, j) / d(t, t));
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) {
        // A remainder is now smaller than the pivot; bring it up and retry.
        Index bi = t;
        Index bj = t;
        for (Index i = t + 1; i < m; ++i)
          if (d(i, t) != 0 && std::llabs(d(i, t)) < std::llabs(d(bi, bj))) {
            bi = i;
            bj = t;
          }
        for (Index j = t + 1; j < n; ++j)
          if (d(t, j) != 0 && std::llabs(d(t, j)) < std::llabs(d(bi, bj))) {
            bi = t;
            bj = j;
          }
        swap_rows(t, bi);
        swap_cols(t, bj);
        continue;
      }
      Index bad = -1;
      for (Index i = t + 1; i < m && bad < 0; ++i)
        for (Index j = t + 1; j < n; ++j)
          if (d(i, j) % d(t, t) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      row_axpy(t, bad, -1);
    }
    if (d(t, t) < 0) {
      d.row(t) *= -1;
      s.u.row(t) *= -1;
    }
  }
  return s;
}

Int determinant(IntMatrix m) {
  const Index n = m.rows();
  if (n != m.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  // Bareiss fraction-free elimination.
  Int sign = 1;
  Int prev = 1;
  for (Index k = 0; k < n; ++k) {
    if (m(k, k) == 0) {
      Index swap = -1;
      for (Index i = k + 1; i < n; ++i)
        if (m(i, k) != 0) {
          swap = i;
          break;
        }
      if (swap < 0) return 0;
      m.row(k).swap(m.row(swap));
      sign = -sign;
    }
    for (Index i = k + 1; i < n; ++i)
      for (Index j = k + 1; j < n; ++j) m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
    prev = m(k, k);
  }
  return n == 0 ? 1 : sign * m(n - 1, n - 1);
}

Int pair(const DualElement& mu, const GroupElement& v) {
  if (mu.covector.size() != v.free.size()) throw DimensionMismatch("covector and element ranks differ");
  return mu.covector.dot(v.free);
}

RootOfUnity char_value(const AbelianGroup& group, const Character& rho, const GroupElement& v) {
  const auto& inv = group.torsion_invariants();
  if (rho.exponents.size() != group.torsion_length() || v.torsion.size() != group.torsion_length())
    throw DimensionMismatch("character and element do not match the group");
  if (inv.empty()) return {};
  const Int top = inv.back();
  Int num = 0;
  for (std::size_t j = 0; j < inv.size(); ++j) {
    const Index jj = static_cast<Index>(j);
    num = floor_mod(num + (rho.exponents(jj) * v.torsion(jj) % inv[j]) * (top / inv[j]), top);
  }
  const Int g = std::gcd(num, top);
  return {num / g, top / g};
}

IntMatrix free_part_matrix(const std::vector<GroupElement>& vectors, Index rank) {
  IntMatrix m(static_cast<Index>(vectors.size()), rank);
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].free.size() != rank) throw DimensionMismatch("vector rank mismatch");
    m.row(static_cast<Index>(i)) = vectors[i].free.transpose();
  }
  return m;
}

DualElement validate_data(const AbelianGroup& group, const std::vector<GroupElement>& vectors, bool require_spanning) {
  if (vectors.empty()) throw NoDegreeFunctional("the tuple of vectors is empty");
  for (const auto& v : vectors)
    if (v.free.size() != group.rank() || v.torsion.size() != group.torsion_length())
      throw DimensionMismatch("vector does not belong to the group");
  const Index r = group.rank();
  const Index n = static_cast<Index>(vectors.size());
  if (r == 0) throw NoDegreeFunctional("Hom(N, Z) is zero for a finite group");

  const IntMatrix v = free_part_matrix(vectors, r);
  ExactMatrix a(n, r);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < r; ++j) a(i, j) = GaussianRational(static_cast<long>(v(i, j)));
  const ExactMatrix ones = ExactMatrix::Constant(n, 1, GaussianRational(1));
  const auto sol = solve(a, ones);
  if (!sol.consistent) throw NoDegreeFunctional("no functional takes the value 1 on every vector");

  const std::vector<Int> inv = smith_normal_form(v).invariants();
  if (static_cast<Index>(inv.size()) != r) throw NotSpanning("free parts of the vectors do not span a full-rank sublattice");
  if (require_spanning && std::any_of(inv.begin(), inv.end(), [](Int d) { return d != 1; }))
    throw NotSpanning("free parts of the vectors do not generate the lattice");

  // Full column rank, so the rational solution is unique; spanning makes it integral.
  DualElement deg{IntVector(r)};
  for (Index j = 0; j < r; ++j) {
    const mpq_class& q = sol.particular(j, 0).real();
    if (q.get_den() != 1) throw NoDegreeFunctional("the degree functional is not integral");
    deg.covector(j) = q.get_num().get_si();
  }
  return deg;
}

}  // namespace bbgkz
