#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

#include "vdpkit/field_calculus.hpp"
#include "vdpkit/poly.hpp"

namespace vdpkit {

/// Deterministic random polynomials, fields and forms with coefficients in
/// {0, +-1, +-i, +-1/2}.
class FuzzSource {
 public:
  explicit FuzzSource(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t next() { return rng_(); }
  /// Uniform in [0, bound).
  std::size_t below(std::size_t bound) { return bound == 0 ? 0 : static_cast<std::size_t>(rng_() % bound); }

  GaussianRational coefficient();
  GaussianRational nonzero_coefficient();

  /// Up to `max_terms` terms of total degree <= max_degree in the given variables.
  Poly poly(const SpacePtr& space, std::span<const std::size_t> vars, int max_degree, std::size_t max_terms = 4);
  Poly poly(const SpacePtr& space, int max_degree, std::size_t max_terms = 4);

  VectorField field(const SpacePtr& space, int max_degree, std::size_t max_terms = 3);

  /// Sum of fields dH/dx_k d/dx_j - dH/dx_j d/dx_k over random pairs j < k
  /// of `vars`, with H of degree <= max_degree + 1. Divergence-free for the
  /// standard volume form.
  VectorField hamiltonian_field(const SpacePtr& space, std::span<const std::size_t> vars, int max_degree,
                                std::size_t summands = 2);

  DiffForm form(const SpacePtr& space, int degree, int max_degree, std::size_t max_components = 3);

 private:
  std::mt19937_64 rng_;
};

}  // namespace vdpkit
