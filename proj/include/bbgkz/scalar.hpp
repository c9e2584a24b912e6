#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>

#include <Eigen/Core>
#include <gmpxx.h>

namespace bbgkz {

/// Exact element of Q(i). Both parts are canonical GMP rationals, so equality
/// is structural.
class GaussianRational {
 public:
  GaussianRational() = default;
  GaussianRational(int v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  GaussianRational(long v) : re_(v) {}  // NOLINT(google-explicit-constructor)
  explicit GaussianRational(mpq_class re, mpq_class im = 0)
      : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  /// Parses "p", "p/q" or "-p/q". Throws std::invalid_argument.
  static mpq_class parse_rational(std::string_view text);
  static GaussianRational parse(std::string_view re, std::string_view im = "0") {
    return GaussianRational(parse_rational(re), parse_rational(im));
  }
  static GaussianRational from_fraction(long num, long den) {
    return GaussianRational(mpq_class(num, den));
  }

  const mpq_class& real() const { return re_; }
  const mpq_class& imag() const { return im_; }
  bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  bool is_real() const { return sgn(im_) == 0; }

  GaussianRational conj() const { return GaussianRational(re_, -im_); }
  /// |z|^2, exact.
  mpq_class norm() const { return re_ * re_ + im_ * im_; }
  double abs() const;
  std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

  /// "p/q" for real values, "p/q+r/si" style otherwise. Diagnostics only; the
  /// JSON layer writes the two parts separately.
  std::string to_string() const;

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    if (sgn(o.im_) != 0) im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    if (sgn(o.im_) != 0) im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o);
  GaussianRational& operator/=(const GaussianRational& o);

  /// this -= a * b without materialising the product.
  void sub_mul(const GaussianRational& a, const GaussianRational& b);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return GaussianRational(-a.re_, -a.im_); }
  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

 private:
  mpq_class re_{0};
  mpq_class im_{0};
};

std::ostream& operator<<(std::ostream& os, const GaussianRational& z);

using Complex = std::complex<double>;

/// Field-specific policy used by the templated linear algebra: exact fields
/// compare against zero structurally, floating fields against a relative
/// tolerance.
template <class S>
struct FieldTraits;

template <>
struct FieldTraits<GaussianRational> {
  static constexpr bool exact = true;
  static bool is_zero(const GaussianRational& v, double /*scale*/) { return v.is_zero(); }
  static double magnitude(const GaussianRational& v) { return v.abs(); }
  static Complex to_complex(const GaussianRational& v) { return v.to_complex(); }
  static void sub_mul(GaussianRational& acc, const GaussianRational& a, const GaussianRational& b) {
    acc.sub_mul(a, b);
  }
};

template <>
struct FieldTraits<Complex> {
  static constexpr bool exact = false;
  static constexpr double tolerance = 1e-10;
  static bool is_zero(const Complex& v, double scale) { return std::abs(v) <= tolerance * scale; }
  static double magnitude(const Complex& v) { return std::abs(v); }
  static Complex to_complex(const Complex& v) { return v; }
  static void sub_mul(Complex& acc, const Complex& a, const Complex& b) { acc -= a * b; }
};

/// Converts an exact value into the working field of a computation.
template <class S>
S from_exact(const GaussianRational& v) {
  if constexpr (std::is_same_v<S, GaussianRational>) {
    return v;
  } else {
    return v.to_complex();
  }
}

template <class S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

using Index = Eigen::Index;
using Int = std::int64_t;
using IntVector = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using IntMatrix = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;

using ExactMatrix = Matrix<GaussianRational>;
using ExactVector = Vector<GaussianRational>;

}  // namespace bbgkz

namespace Eigen {

template <>
struct NumTraits<bbgkz::GaussianRational> : GenericNumTraits<bbgkz::GaussianRational> {
  using Real = bbgkz::GaussianRational;
  using NonInteger = bbgkz::GaussianRational;
  using Literal = bbgkz::GaussianRational;
  using Nested = bbgkz::GaussianRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 4,
    AddCost = 32,
    MulCost = 64
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen
