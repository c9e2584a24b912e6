#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "bbgkz/scalar.hpp"

namespace bbgkz {

/// Element of Z^r + Z/d_1 + ... + Z/d_s. Torsion entries are always reduced
/// into [0, d_j) by the owning group.
struct GroupElement {
  IntVector free;
  IntVector torsion;

  Index degree_under(const IntVector& covector) const { return static_cast<Index>(covector.dot(free)); }
};

bool operator==(const GroupElement& a, const GroupElement& b);
inline bool operator!=(const GroupElement& a, const GroupElement& b) { return !(a == b); }
/// Lexicographic on (free, torsion).
bool operator<(const GroupElement& a, const GroupElement& b);

/// Element of M = Hom(N, Z); it only sees the free coordinates.
struct DualElement {
  IntVector covector;
};

/// Character of N that is trivial on the stored free basis.
struct Character {
  IntVector exponents;  // entry j in [0, d_j)
  bool is_trivial() const { return (exponents.array() == 0).all(); }
};

/// exp(2 pi i numerator / denominator) with 0 <= numerator < denominator and
/// the fraction reduced.
struct RootOfUnity {
  Int numerator = 0;
  Int denominator = 1;

  std::complex<double> to_complex() const;
  /// Exact value when it lies in Q(i), i.e. the order divides 4.
  std::optional<GaussianRational> to_exact() const;
};

bool operator==(const RootOfUnity& a, const RootOfUnity& b);

/// Finitely generated abelian group in invariant-factor form.
class AbelianGroup {
 public:
  AbelianGroup() = default;
  /// Throws InvalidGroup unless every invariant is >= 2 and each divides the next.
  AbelianGroup(Index rank, std::vector<Int> torsion_invariants);

  /// Cokernel of the integer matrix whose columns are relations among
  /// `relations.rows()` generators.
  static AbelianGroup from_presentation(const IntMatrix& relations);

  Index rank() const { return rank_; }
  const std::vector<Int>& torsion_invariants() const { return torsion_; }
  Index torsion_length() const { return static_cast<Index>(torsion_.size()); }
  Int torsion_order() const;

  GroupElement element(IntVector free, IntVector torsion) const;
  GroupElement free_element(IntVector free) const;
  GroupElement zero() const;

  GroupElement add(const GroupElement& a, const GroupElement& b) const;
  GroupElement subtract(const GroupElement& a, const GroupElement& b) const;
  GroupElement negate(const GroupElement& a) const;

  /// All pure-torsion elements, lexicographically ordered.
  std::vector<GroupElement> torsion_elements() const;
  /// All |tors N| characters, ordered lexicographically by exponent vector.
  std::vector<Character> characters() const;

  bool operator==(const AbelianGroup& o) const { return rank_ == o.rank_ && torsion_ == o.torsion_; }

 private:
  void check(const GroupElement& a) const;

  Index rank_ = 0;
  std::vector<Int> torsion_;
};

/// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ...
struct SmithForm {
  IntMatrix u;
  IntMatrix d;
  IntMatrix v;
  std::vector<Int> invariants() const;  // nonzero diagonal entries
};

SmithForm smith_normal_form(const IntMatrix& a);

/// Determinant of a small integer matrix by fraction-free elimination.
Int determinant(IntMatrix m);

/// mu(v); torsion is invisible. Throws DimensionMismatch.
Int pair(const DualElement& mu, const GroupElement& v);

RootOfUnity char_value(const AbelianGroup& group, const Character& rho, const GroupElement& v);

/// Checks the standing hypotheses on (N, A) and returns the degree functional.
/// Throws NoDegreeFunctional when no mu in M has mu(v_i) = 1 for all i and
/// NotSpanning when the free parts of the v_i do not generate Z^r. With
/// require_spanning off, a full-rank sublattice is accepted.
DualElement validate_data(const AbelianGroup& group, const std::vector<GroupElement>& vectors,
                          bool require_spanning = true);

/// Rows are the free parts of the given elements.
IntMatrix free_part_matrix(const std::vector<GroupElement>& vectors, Index rank);

}  // namespace bbgkz
