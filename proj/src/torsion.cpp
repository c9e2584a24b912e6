#include "bbgkz/torsion.hpp"

#include <numbers>
#include <random>

namespace bbgkz {

QuotientProblem build_quotient(const GradedSemigroup& s) {
  QuotientProblem q;
  q.group = s.group();
  q.vectors = s.vectors();
  for (Index i = 0; i < s.n(); ++i) {
    const IntVector& w = q.vectors[static_cast<std::size_t>(i)].free;
    auto it = std::find(q.images.begin(), q.images.end(), w);
    if (it == q.images.end()) {
      q.images.push_back(w);
      q.index_sets.push_back({i});
    } else {
      q.index_sets[static_cast<std::size_t>(it - q.images.begin())].push_back(i);
    }
  }
  const AbelianGroup lattice(s.rank(), {});
  std::vector<GroupElement> ws;
  for (const auto& w : q.images) ws.push_back(lattice.free_element(w));
  q.semigroup = std::make_shared<GradedSemigroup>(lattice, std::move(ws));
  return q;
}

bool characters_exact(const AbelianGroup& group) {
  const auto& d = group.torsion_invariants();
  return d.empty() || 4 % d.back() == 0;
}

bool LogBox::contains(const std::vector<Complex>& z) const {
  if (z.size() != lo.size() || z.size() != hi.size()) return false;
  for (std::size_t j = 0; j < z.size(); ++j) {
    const double m = std::abs(z[j]);
    if (m == 0.0) return false;
    const double l = std::log(m);
    if (!(l > lo[j] && l < hi[j])) return false;
    if (!(std::abs(std::arg(z[j])) < std::numbers::pi - 1e-9)) return false;
  }
  return true;
}

FVector<GaussianRational> find_common_basepoint(const QuotientProblem& q, const LogBox& box, std::uint64_t seed) {
  const Index n = static_cast<Index>(q.vectors.size());
  const Index m = q.m();
  if (static_cast<Index>(box.lo.size()) != m || static_cast<Index>(box.hi.size()) != m)
    throw DimensionMismatch("log box has the wrong number of coordinates");
  for (Index j = 0; j < m; ++j)
    if (!(box.lo[static_cast<std::size_t>(j)] < box.hi[static_cast<std::size_t>(j)]))
      throw RegionTooTight("empty log box");

  const Int order = q.group.torsion_order();
  GaussianRational direction(1);
  if (order == 2) {
    direction = GaussianRational(mpq_class(0), mpq_class(-1));
  } else if (order > 2) {
    const double theta = -std::numbers::pi + std::numbers::pi / static_cast<double>(order);
    direction = GaussianRational(detail::dyadic_floor(std::cos(theta), 16).real(), detail::dyadic_floor(std::sin(theta), 16).real());
  }

  std::mt19937_64 engine(seed);
  FVector<GaussianRational> x(n);
  std::vector<bool> distinguished(static_cast<std::size_t>(n), false);
  double min_modulus = std::numeric_limits<double>::infinity();
  for (Index j = 0; j < m; ++j) {
    const double lo = box.lo[static_cast<std::size_t>(j)];
    const double hi = box.hi[static_cast<std::size_t>(j)];
    const double u = static_cast<double>(engine() % 1024) / 1024.0;
    const double t = lo + (hi - lo) * (0.25 + 0.5 * u);
    GaussianRational modulus = detail::dyadic_floor(std::exp(t), 16);
    if (modulus.is_zero()) modulus = GaussianRational(mpq_class(1, 1L << 16));
    const Index i = q.index_sets[static_cast<std::size_t>(j)].front();
    x(i) = modulus * direction;
    distinguished[static_cast<std::size_t>(i)] = true;
    min_modulus = std::min(min_modulus, modulus.real().get_d());
  }
  std::vector<GaussianRational> small(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    if (distinguished[static_cast<std::size_t>(i)]) continue;
    long a = 0;
    long b = 0;
    while (a == 0 && b == 0) {
      a = static_cast<long>(engine() % 33) - 16;
      b = static_cast<long>(engine() % 33) - 16;
    }
    small[static_cast<std::size_t>(i)] = GaussianRational(mpq_class(a, 16L), mpq_class(b, 16L));
  }

  const std::vector<Character> chars = q.group.characters();
  GaussianRational eps = detail::dyadic_floor(min_modulus / (4.0 * static_cast<double>(n)), 20);
  if (eps.is_zero()) eps = GaussianRational(mpq_class(1, 1L << 20));
  for (int halving = 0; halving < 40; ++halving) {
    for (Index i = 0; i < n; ++i)
      if (!distinguished[static_cast<std::size_t>(i)]) x(i) = eps * small[static_cast<std::size_t>(i)];
    bool ok = true;
    for (const auto& rho : chars) {
      FVector<Complex> xc(n);
      for (Index i = 0; i < n; ++i) xc(i) = x(i).to_complex();
      const FVector<Complex> z = p_rho(rho, xc, q);
      if (!box.contains(std::vector<Complex>(z.begin(), z.end()))) {
        ok = false;
        break;
      }
    }
    if (ok) return x;
    eps /= GaussianRational(2);
  }
  throw RegionTooTight("no common base point found inside the region");
}

double character_orthogonality_defect(const AbelianGroup& group) {
  const std::vector<Character> chars = group.characters();
  const std::vector<GroupElement> reps = group.torsion_elements();
  const Index g = static_cast<Index>(chars.size());
  Matrix<Complex> table(g, g);
  for (Index a = 0; a < g; ++a)
    for (Index h = 0; h < g; ++h)
      table(a, h) = char_value(group, chars[static_cast<std::size_t>(a)], reps[static_cast<std::size_t>(h)]).to_complex();
  const Matrix<Complex> gram = table * table.adjoint() - static_cast<double>(g) * Matrix<Complex>::Identity(g, g);
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace bbgkz
