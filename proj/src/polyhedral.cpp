#include "bbgkz/polyhedral.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <set>
#include <string>

#include "bbgkz/errors.hpp"
#include "bbgkz/linalg.hpp"

namespace bbgkz {

namespace {

ExactMatrix to_exact(const IntMatrix& m) {
  ExactMatrix out(m.rows(), m.cols());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) out(i, j) = GaussianRational(static_cast<long>(m(i, j)));
  return out;
}

Index integer_rank(const IntMatrix& m) {
  if (m.size() == 0) return 0;
  return rank(to_exact(m));
}

IntMatrix columns_of(const IntMatrix& gens, std::uint64_t mask) {
  IntMatrix out(gens.rows(), std::popcount(mask));
  Index k = 0;
  for (Index g = 0; g < gens.cols(); ++g)
    if ((mask >> g) & 1U) out.col(k++) = gens.col(g);
  return out;
}

// Primitive integer normal to the r-1 independent rows of `rows`.
IntVector primitive_normal(const IntMatrix& rows) {
  const SmithForm snf = smith_normal_form(rows);
  return snf.v.col(snf.v.cols() - 1);
}

void for_each_combination(Index n, Index k, const std::function<void(const std::vector<Index>&)>& fn) {
  std::vector<Index> idx(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  if (k > n) return;
  while (true) {
    fn(idx);
    Index i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

}  // namespace

bool Cone::contains(const IntVector& p) const {
  return ((facet_normals * p).array() >= 0).all();
}

bool Cone::in_interior(const IntVector& p) const {
  return ((facet_normals * p).array() > 0).all();
}

std::vector<Index> Cone::facets_of(const Face& face) const {
  std::vector<Index> out;
  for (std::size_t i = 0; i < faces.size(); ++i) {
    const Face& g = faces[i];
    if (g.dim + 1 == face.dim && (g.generators & ~face.generators) == 0) out.push_back(static_cast<Index>(i));
  }
  return out;
}

Cone facets_and_faces(const IntMatrix& input) {
  const Index r = input.rows();
  if (r < 1) throw DegeneratePolytope("cone in a rank-0 lattice");

  std::vector<IntVector> cols;
  for (Index j = 0; j < input.cols(); ++j) cols.emplace_back(input.col(j));
  std::sort(cols.begin(), cols.end(), [](const IntVector& a, const IntVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  cols.erase(std::remove_if(cols.begin(), cols.end(), [](const IntVector& v) { return v.isZero(); }), cols.end());
  if (cols.size() > 64) throw DegeneratePolytope("more than 64 distinct generators");

  Cone cone;
  const Index g = static_cast<Index>(cols.size());
  cone.generators.resize(r, g);
  for (Index j = 0; j < g; ++j) cone.generators.col(j) = cols[static_cast<std::size_t>(j)];
  if (integer_rank(cone.generators) != r) throw DegeneratePolytope("generators do not span the ambient space");

  std::set<std::vector<Int>> seen;
  std::vector<IntVector> normals;
  for_each_combination(g, r - 1, [&](const std::vector<Index>& pick) {
    IntMatrix rows(r - 1, r);
    for (Index i = 0; i < r - 1; ++i) rows.row(i) = cone.generators.col(pick[static_cast<std::size_t>(i)]).transpose();
    if (integer_rank(rows) != r - 1) return;
    IntVector h = primitive_normal(rows);
    const IntVector values = cone.generators.transpose() * h;
    if ((values.array() <= 0).all()) h = -h;
    else if (!(values.array() >= 0).all()) return;
    std::vector<Int> key(h.begin(), h.end());
    if (seen.insert(key).second) normals.push_back(h);
  });
  std::sort(normals.begin(), normals.end(), [](const IntVector& a, const IntVector& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  });
  cone.facet_normals.resize(static_cast<Index>(normals.size()), r);
  for (std::size_t i = 0; i < normals.size(); ++i) cone.facet_normals.row(static_cast<Index>(i)) = normals[i].transpose();
  if (integer_rank(cone.facet_normals) != r) throw NotPointed("the cone contains a line");

  std::vector<std::uint64_t> facet_masks;
  for (Index f = 0; f < cone.facet_normals.rows(); ++f) {
    std::uint64_t mask = 0;
    for (Index j = 0; j < g; ++j)
      if (cone.facet_normals.row(f).dot(cone.generators.col(j)) == 0) mask |= std::uint64_t{1} << j;
    facet_masks.push_back(mask);
  }
  const std::uint64_t all = g == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << g) - 1;
  std::set<std::uint64_t> masks{all};
  std::vector<std::uint64_t> queue{all};
  while (!queue.empty()) {
    const std::uint64_t m = queue.back();
    queue.pop_back();
    for (std::uint64_t fm : facet_masks) {
      const std::uint64_t next = m & fm;
      if (masks.insert(next).second) queue.push_back(next);
    }
  }
  for (std::uint64_t m : masks) cone.faces.push_back({m, integer_rank(columns_of(cone.generators, m))});
  std::sort(cone.faces.begin(), cone.faces.end(), [](const Face& a, const Face& b) {
    return a.dim != b.dim ? a.dim < b.dim : a.generators < b.generators;
  });
  return cone;
}

Int normalized_volume(const AbelianGroup& group, const std::vector<GroupElement>& vectors) {
  const IntMatrix rows = free_part_matrix(vectors, group.rank());
  const Cone cone = facets_and_faces(rows.transpose());
  const Index r = cone.ambient_rank();

  // Pulling triangulation: cone the lexicographically first generator over
  // the triangulations of the facets that avoid it.
  std::function<std::vector<std::vector<Index>>(const Face&)> triangulate = [&](const Face& face) {
    std::vector<std::vector<Index>> out;
    const Index apex = std::countr_zero(face.generators);
    if (face.dim == 1) {
      out.push_back({apex});
      return out;
    }
    for (Index fi : cone.facets_of(face)) {
      const Face& facet = cone.faces[static_cast<std::size_t>(fi)];
      if (facet.contains(apex)) continue;
      for (auto simplex : triangulate(facet)) {
        simplex.push_back(apex);
        out.push_back(std::move(simplex));
      }
    }
    return out;
  };

  Int volume = 0;
  for (const auto& simplex : triangulate(cone.faces.back())) {
    IntMatrix m(r, r);
    for (Index k = 0; k < r; ++k) m.col(k) = cone.generators.col(simplex[static_cast<std::size_t>(k)]);
    volume += std::llabs(determinant(m));
  }
  return volume;
}

GradedSemigroup::GradedSemigroup(AbelianGroup group, std::vector<GroupElement> vectors, bool require_spanning)
    : group_(std::move(group)), vectors_(std::move(vectors)) {
  for (auto& v : vectors_) v = group_.element(v.free, v.torsion);
  deg_ = validate_data(group_, vectors_, require_spanning);
  cone_ = facets_and_faces(free_part_matrix(vectors_, group_.rank()).transpose());
  box_lo_ = cone_.generators.rowwise().minCoeff();
  box_hi_ = cone_.generators.rowwise().maxCoeff();
}

bool GradedSemigroup::contains(const GroupElement& c, Region region) const {
  return region == Region::full ? cone_.contains(c.free) : cone_.in_interior(c.free);
}

const Layer& GradedSemigroup::layer(Index k, Region region) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto key = std::make_pair(k, static_cast<int>(region));
  auto it = layers_.find(key);
  if (it != layers_.end()) return *it->second;

  auto layer = std::make_unique<Layer>();
  if (k >= 0) {
    const Index r = rank();
    const IntVector lo = k * box_lo_;
    const IntVector hi = k * box_hi_;
    const std::vector<GroupElement> torsion = group_.torsion_elements();
    IntVector p = lo;
    while (true) {
      if (deg_.covector.dot(p) == k &&
          (region == Region::full ? cone_.contains(p) : cone_.in_interior(p))) {
        for (const auto& t : torsion) layer->elements.push_back({p, t.torsion});
      }
      Index j = r - 1;
      while (j >= 0 && p(j) == hi(j)) {
        p(j) = lo(j);
        --j;
      }
      if (j < 0) break;
      ++p(j);
    }
  }
  for (std::size_t i = 0; i < layer->elements.size(); ++i)
    layer->index.emplace(layer->elements[i], static_cast<Index>(i));
  return *layers_.emplace(key, std::move(layer)).first->second;
}

std::vector<GroupElement> enumerate_layer(const GradedSemigroup& s, Index k, Region region) {
  return s.layer(k, region).elements;
}

std::vector<GroupElement> k_prim(const GradedSemigroup& s) {
  const auto primitive = [&](const GroupElement& c) {
    return std::none_of(s.vectors().begin(), s.vectors().end(), [&](const GroupElement& v) {
      return s.contains(s.group().subtract(c, v));
    });
  };
  std::vector<GroupElement> out;
  const Index r = s.rank();
  for (Index k = 0; k <= r; ++k)
    for (const auto& c : s.layer(k).elements)
      if (primitive(c)) out.push_back(c);
  for (Index k = r + 1; k <= r + 2; ++k)
    for (const auto& c : s.layer(k).elements)
      if (primitive(c))
        throw KPrimBoundExceeded("primitive element found in degree " + std::to_string(k));
  return out;
}

}  // namespace bbgkz
