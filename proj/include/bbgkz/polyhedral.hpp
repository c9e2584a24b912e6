#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "bbgkz/abelian.hpp"

namespace bbgkz {

enum class Region { full, interior };

/// A face of a cone, recorded by which (deduplicated) generators it contains.
struct Face {
  std::uint64_t generators = 0;  // bit g set iff generator g lies on the face
  Index dim = 0;
  bool contains(Index g) const { return (generators >> g) & 1U; }
};

/// Rational polyhedral cone spanned by integer generators in Z^r.
struct Cone {
  IntMatrix generators;     // r x g, deduplicated and lexicographically sorted columns
  IntMatrix facet_normals;  // f x r, primitive, nonnegative on the cone
  std::vector<Face> faces;  // sorted by (dim, generator mask); {0} first, the cone last

  Index ambient_rank() const { return generators.rows(); }
  bool contains(const IntVector& p) const;
  bool in_interior(const IntVector& p) const;
  std::vector<Index> facets_of(const Face& face) const;  // indices into `faces`
};

/// Facet normals and full face lattice of the cone over the given columns.
/// Throws NotPointed if the cone contains a line and DegeneratePolytope if the
/// generators do not span R^r.
Cone facets_and_faces(const IntMatrix& generators);

/// Normalised volume (dim Delta)! vol(Delta) of the convex hull of the free
/// parts, computed from a pulling triangulation.
Int normalized_volume(const AbelianGroup& group, const std::vector<GroupElement>& vectors);

/// One graded piece of K or its interior in a fixed deterministic order.
struct Layer {
  std::vector<GroupElement> elements;
  std::map<GroupElement, Index> index;

  Index size() const { return static_cast<Index>(elements.size()); }
  std::optional<Index> find(const GroupElement& c) const {
    auto it = index.find(c);
    if (it == index.end()) return std::nullopt;
    return it->second;
  }
};

/// K = preimage of the cone R_{>=0} Delta, graded by the degree functional.
/// Layers are enumerated lazily and cached; the object is safe to share.
class GradedSemigroup {
 public:
  /// Validates the data (see validate_data) and builds the cone. Turning off
  /// require_spanning admits free parts generating a proper sublattice; the
  /// cone and K_prim still make sense, the dimension formulas do not apply.
  GradedSemigroup(AbelianGroup group, std::vector<GroupElement> vectors, bool require_spanning = true);

  const AbelianGroup& group() const { return group_; }
  const std::vector<GroupElement>& vectors() const { return vectors_; }
  Index n() const { return static_cast<Index>(vectors_.size()); }
  Index rank() const { return group_.rank(); }
  const DualElement& deg() const { return deg_; }
  const Cone& cone() const { return cone_; }

  Index degree(const GroupElement& c) const { return static_cast<Index>(pair(deg_, c)); }
  bool contains(const GroupElement& c, Region region = Region::full) const;

  /// All c with deg c = k in the region, ordered lexicographically on (free, torsion).
  const Layer& layer(Index k, Region region = Region::full) const;

 private:
  AbelianGroup group_;
  std::vector<GroupElement> vectors_;
  DualElement deg_;
  Cone cone_;
  IntVector box_lo_;
  IntVector box_hi_;

  mutable std::mutex mutex_;
  mutable std::map<std::pair<Index, int>, std::unique_ptr<Layer>> layers_;
};

std::vector<GroupElement> enumerate_layer(const GradedSemigroup& s, Index k, Region region);

/// Elements c of K with c - v_i outside K for every i. Throws
/// KPrimBoundExceeded if a primitive element shows up above degree rk N.
std::vector<GroupElement> k_prim(const GradedSemigroup& s);

}  // namespace bbgkz
