#include "vdpkit/gaussian_rational.hpp"

#include <ostream>

#include "vdpkit/errors.hpp"

namespace vdpkit {

namespace {

std::string rational_text(const Rational& q) {
  // mpq_class::get_str prints "p/q" or "p" for integers.
  return q.get_str();
}

Rational parse_rational(const std::string& text) {
  Rational q;
  if (q.set_str(text, 10) != 0) throw ContractViolation("not a rational literal: " + text);
  if (q.get_den() == 0) throw ContractViolation("zero denominator: " + text);
  q.canonicalize();
  return q;
}

}  // namespace

GaussianRational::GaussianRational(Rational re, Rational im) : re_(std::move(re)), im_(std::move(im)) {
  re_.canonicalize();
  im_.canonicalize();
}

GaussianRational GaussianRational::from_string(const std::string& real, const std::string& imag) {
  return {parse_rational(real), parse_rational(imag)};
}

GaussianRational GaussianRational::inverse() const {
  if (is_zero()) throw ContractViolation("division by zero");
  Rational n = norm2();
  return {re_ / n, -im_ / n};
}

GaussianRational& GaussianRational::operator+=(const GaussianRational& o) {
  re_ += o.re_;
  im_ += o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator-=(const GaussianRational& o) {
  re_ -= o.re_;
  im_ -= o.im_;
  return *this;
}

GaussianRational& GaussianRational::operator*=(const GaussianRational& o) {
  if (sgn(im_) == 0 && sgn(o.im_) == 0) {
    re_ *= o.re_;
    return *this;
  }
  Rational r = re_ * o.re_ - im_ * o.im_;
  Rational i = re_ * o.im_ + im_ * o.re_;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  if (sgn(o.im_) == 0) {
    if (sgn(o.re_) == 0) throw ContractViolation("division by zero");
    re_ /= o.re_;
    im_ /= o.re_;
    return *this;
  }
  return *this *= o.inverse();
}

std::string GaussianRational::to_string() const {
  const bool has_re = sgn(re_) != 0;
  const bool has_im = sgn(im_) != 0;
  if (!has_im) return rational_text(re_);
  auto imag_text = [](const Rational& q) {
    if (q == 1) return std::string("i");
    if (q == -1) return std::string("-i");
    return rational_text(q) + "i";
  };
  if (!has_re) return imag_text(im_);
  std::string out = "(" + rational_text(re_);
  if (sgn(im_) < 0) {
    out += " - " + imag_text(Rational(-im_));
  } else {
    out += " + " + imag_text(im_);
  }
  return out + ")";
}

std::size_t GaussianRational::hash() const {
  std::hash<std::string> h;
  return h(re_.get_str()) * 31u ^ h(im_.get_str());
}

std::ostream& operator<<(std::ostream& os, const GaussianRational& x) { return os << x.to_string(); }

}  // namespace vdpkit
