#include "bbgkz/scalar.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace bbgkz {

mpq_class GaussianRational::parse_rational(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw std::invalid_argument("empty rational");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool seen_slash = false;
  bool digits_before = false;
  bool digits_after = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char ch = s[i];
    if (ch == '/') {
      if (seen_slash) throw std::invalid_argument("malformed rational: " + s);
      seen_slash = true;
    } else if (ch >= '0' && ch <= '9') {
      (seen_slash ? digits_after : digits_before) = true;
    } else {
      throw std::invalid_argument("malformed rational: " + s);
    }
  }
  if (!digits_before || (seen_slash && !digits_after)) {
    throw std::invalid_argument("malformed rational: " + s);
  }
  if (s[0] == '+') s.erase(0, 1);
  mpq_class q;
  if (q.set_str(s, 10) != 0) throw std::invalid_argument("malformed rational: " + s);
  if (sgn(q.get_den()) == 0) throw std::invalid_argument("zero denominator: " + s);
  q.canonicalize();
  return q;
}

double GaussianRational::abs() const {
  if (is_real()) return std::fabs(re_.get_d());
  return std::hypot(re_.get_d(), im_.get_d());
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (is_real() && o.is_real()) {
    re_ *= o.re_;
    return *this;
  }
  mpq_class re = re_ * o.re_ - im_ * o.im_;
  mpq_class im = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (o.is_zero()) throw std::domain_error("division by zero");
  if (o.is_real()) {
    re_ /= o.re_;
    if (sgn(im_) != 0) im_ /= o.re_;
    return *this;
  }
  mpq_class n = o.norm();
  mpq_class re = (re_ * o.re_ + im_ * o.im_) / n;
  mpq_class im = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(re);
  im_ = std::move(im);
  return *this;
}

void GaussianRational::sub_mul(const GaussianRational& a, const GaussianRational& b) {
  if (a.is_real() && b.is_real()) {
    re_ -= a.re_ * b.re_;
    return;
  }
  re_ -= a.re_ * b.re_ - a.im_ * b.im_;
  im_ -= a.re_ * b.im_ + a.im_ * b.re_;
}

std::string GaussianRational::to_string() const {
  if (is_real()) return re_.get_str();
  std::ostringstream os;
  if (sgn(re_) != 0) {
    os << re_.get_str();
    if (sgn(im_) > 0) os << '+';
  }
  os << im_.get_str() << 'i';
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << z.to_string(); }

}  // namespace bbgkz
