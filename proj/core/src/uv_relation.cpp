#include "vdpkit/uv_relation.hpp"

#include <algorithm>

#include "vdpkit/errors.hpp"

namespace vdpkit {

UvRelation::UvRelation(Poly f) : f_(std::move(f)), defining_(f_.space_ptr()) {
  const VarSpace& s = f_.space();
  if (s.size() < 2 || s.name(0) != "u" || s.name(1) != "v") {
    throw ContractViolation("uv relation needs a space starting with (u, v)");
  }
  if (f_.depends_on(0) || f_.depends_on(1)) throw ContractViolation("f must not involve u or v");
  Exponents uv(s.size(), 0);
  uv[0] = 1;
  uv[1] = 1;
  defining_ = Poly::monomial(f_.space_ptr(), uv) - f_;
}

Poly UvRelation::normal_form(const Poly& p) const { return divide(p).remainder; }

UvRelation::Division UvRelation::divide(const Poly& p) const {
  if (!(p.space() == f_.space())) throw ContextMismatch("normal form across variable spaces");
  const SpacePtr& space = f_.space_ptr();
  Division out{Poly(space), Poly(space)};
  Exponents uv(space->size(), 0);
  uv[0] = 1;
  uv[1] = 1;
  const Poly uv_poly = Poly::monomial(space, uv);
  std::vector<Poly> f_pow{Poly::constant(space, 1)};
  auto f_power = [&](unsigned k) -> const Poly& {
    while (f_pow.size() <= k) f_pow.push_back(f_pow.back() * f_);
    return f_pow[k];
  };
  for (const auto& [e, c] : p.terms()) {
    const unsigned k = std::min(e[0], e[1]);
    if (k == 0) {
      out.remainder.add_term(e, c);
      continue;
    }
    Exponents rest = e;
    rest[0] = static_cast<std::uint16_t>(rest[0] - k);
    rest[1] = static_cast<std::uint16_t>(rest[1] - k);
    const Poly mono = Poly::monomial(space, rest, c);
    // (uv)^k - f^k = (uv - f) * sum_{j<k} (uv)^j f^(k-1-j)
    Poly geometric(space);
    Poly uv_pow = Poly::constant(space, 1);
    for (unsigned j = 0; j < k; ++j) {
      geometric += uv_pow * f_power(k - 1 - j);
      uv_pow *= uv_poly;
    }
    out.quotient += mono * geometric;
    out.remainder += mono * f_power(k);
  }
  return out;
}

}  // namespace vdpkit
