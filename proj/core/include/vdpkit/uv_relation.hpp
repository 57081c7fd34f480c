#pragma once

#include "vdpkit/poly.hpp"

namespace vdpkit {

/// Reduction modulo the single relation uv = f, with u and v the first two
/// variables of the space and f free of both.
///
/// Rewriting uv -> f terminates (the u,v-degree drops) and is confluent, so
/// the normal form is the unique representative with no monomial divisible
/// by uv.
class UvRelation {
 public:
  /// f must live in a space whose variables 0 and 1 are named u and v.
  explicit UvRelation(Poly f);

  const Poly& f() const noexcept { return f_; }
  /// uv - f
  const Poly& defining() const noexcept { return defining_; }

  Poly normal_form(const Poly& p) const;

  struct Division {
    Poly quotient;
    Poly remainder;
  };
  /// p = quotient * (uv - f) + remainder with remainder in normal form.
  Division divide(const Poly& p) const;

 private:
  Poly f_;
  Poly defining_;
};

}  // namespace vdpkit
