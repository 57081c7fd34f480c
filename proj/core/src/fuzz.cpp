#include "vdpkit/fuzz.hpp"

#include <numeric>

namespace vdpkit {

GaussianRational FuzzSource::coefficient() {
  switch (rng_() % 7) {
    case 0:
      return 0;
    case 1:
      return 1;
    case 2:
      return -1;
    case 3:
      return GaussianRational::i();
    case 4:
      return -GaussianRational::i();
    case 5:
      return GaussianRational(Rational(1, 2));
    default:
      return GaussianRational(Rational(-1, 2));
  }
}

GaussianRational FuzzSource::nonzero_coefficient() {
  for (;;) {
    GaussianRational c = coefficient();
    if (!c.is_zero()) return c;
  }
}

Poly FuzzSource::poly(const SpacePtr& space, std::span<const std::size_t> vars, int max_degree,
                      std::size_t max_terms) {
  Poly p(space);
  const std::size_t terms = 1 + below(max_terms);
  for (std::size_t t = 0; t < terms; ++t) {
    Exponents e(space->size(), 0);
    const int degree = static_cast<int>(below(static_cast<std::size_t>(max_degree) + 1));
    for (int d = 0; d < degree && !vars.empty(); ++d) ++e[vars[below(vars.size())]];
    p.add_term(e, coefficient());
  }
  return p;
}

Poly FuzzSource::poly(const SpacePtr& space, int max_degree, std::size_t max_terms) {
  std::vector<std::size_t> vars(space->size());
  std::iota(vars.begin(), vars.end(), 0);
  return poly(space, vars, max_degree, max_terms);
}

VectorField FuzzSource::field(const SpacePtr& space, int max_degree, std::size_t max_terms) {
  VectorField x(space);
  for (std::size_t k = 0; k < space->size(); ++k) x.set(k, poly(space, max_degree, max_terms));
  return x;
}

VectorField FuzzSource::hamiltonian_field(const SpacePtr& space, std::span<const std::size_t> vars, int max_degree,
                                          std::size_t summands) {
  VectorField x(space);
  if (vars.size() < 2) return x;
  for (std::size_t s = 0; s < summands; ++s) {
    std::size_t j = vars[below(vars.size())];
    std::size_t k = vars[below(vars.size())];
    while (k == j) k = vars[below(vars.size())];
    const Poly h = poly(space, vars, max_degree + 1);
    x.set(j, x[j] + h.derivative(k));
    x.set(k, x[k] - h.derivative(j));
  }
  return x;
}

DiffForm FuzzSource::form(const SpacePtr& space, int degree, int max_degree, std::size_t max_components) {
  DiffForm a(space, degree);
  const std::size_t m = space->size();
  if (static_cast<std::size_t>(degree) > m) return a;
  const std::size_t components = 1 + below(max_components);
  for (std::size_t c = 0; c < components; ++c) {
    std::vector<std::size_t> all(m);
    std::iota(all.begin(), all.end(), 0);
    DiffForm::Index idx;
    for (int d = 0; d < degree; ++d) {
      const std::size_t pick = below(all.size());
      idx.push_back(all[pick]);
      all.erase(all.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    a.add(idx, poly(space, max_degree));
  }
  return a;
}

}  // namespace vdpkit
