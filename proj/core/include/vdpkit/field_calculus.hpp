#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/poly.hpp"

namespace vdpkit {

/// Polynomial derivation: coefficient k multiplies the partial derivative in variable k.
class VectorField {
 public:
  explicit VectorField(SpacePtr space);
  explicit VectorField(std::vector<Poly> coeffs);

  /// The coordinate derivation d/dx_index.
  static VectorField coordinate(SpacePtr space, std::size_t index);

  const VarSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  std::size_t dimension() const noexcept { return coeffs_.size(); }
  const Poly& operator[](std::size_t k) const { return coeffs_.at(k); }
  const std::vector<Poly>& coefficients() const noexcept { return coeffs_; }
  void set(std::size_t k, Poly p);

  /// Action on functions: sum_k coeff_k * dp/dx_k.
  Poly apply(const Poly& p) const;

  bool is_zero() const;

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  VectorField operator-() const;
  /// Multiplication by a function.
  friend VectorField operator*(const Poly& h, const VectorField& x);
  friend VectorField operator*(const GaussianRational& c, const VectorField& x);

  ExactVector evaluate(std::span<const GaussianRational> point) const;
  std::vector<std::complex<double>> evaluate(std::span<const std::complex<double>> point) const;

  /// "[c_0, c_1, ...]" in the polynomial grammar.
  std::string to_string() const;

  friend bool operator==(const VectorField& a, const VectorField& b);
  friend bool operator!=(const VectorField& a, const VectorField& b) { return !(a == b); }

 private:
  SpacePtr space_;
  std::vector<Poly> coeffs_;
};

/// Parses "[p_1, ..., p_m]" with one polynomial per variable of `space`.
VectorField parse_vector_field(std::string_view text, SpacePtr space, std::size_t line = 1);

/// [X, Y], acting as X(Y(p)) - Y(X(p)).
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// Alternating form of fixed degree. Coefficients are stored only on strictly
/// increasing index tuples.
class DiffForm {
 public:
  using Index = std::vector<std::size_t>;
  using Coefficients = std::map<Index, Poly>;

  DiffForm(SpacePtr space, int degree);

  /// The 0-form p.
  static DiffForm function(const Poly& p);
  /// dx_index
  static DiffForm differential(SpacePtr space, std::size_t index);
  /// dp
  static DiffForm exact(const Poly& p);

  const VarSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  int degree() const noexcept { return degree_; }
  const Coefficients& coefficients() const noexcept { return coeffs_; }
  bool is_zero() const noexcept { return coeffs_.empty(); }

  /// Adds p * dx_{index[0]} ^ ... for an arbitrary (not necessarily sorted)
  /// index tuple; repeated indices contribute nothing.
  void add(const Index& index, const Poly& p);
  /// Coefficient on an arbitrary index tuple, including the permutation sign.
  Poly component(const Index& index) const;

  DiffForm& operator+=(const DiffForm& o);
  DiffForm& operator-=(const DiffForm& o);
  friend DiffForm operator+(DiffForm a, const DiffForm& b) { return a += b; }
  friend DiffForm operator-(DiffForm a, const DiffForm& b) { return a -= b; }
  DiffForm operator-() const;
  friend DiffForm operator*(const Poly& h, const DiffForm& a);

  std::string to_string() const;

  friend bool operator==(const DiffForm& a, const DiffForm& b);
  friend bool operator!=(const DiffForm& a, const DiffForm& b) { return !(a == b); }

 private:
  void require_compatible(const DiffForm& o) const;

  SpacePtr space_;
  int degree_;
  Coefficients coeffs_;
};

DiffForm wedge(const DiffForm& a, const DiffForm& b);

/// Contraction into the first slot. Throws ContractViolation on 0-forms.
DiffForm interior_product(const VectorField& x, const DiffForm& a);

/// d, prepending the new differential.
DiffForm exterior_derivative(const DiffForm& a);

/// L_X a = d(i_X a) + i_X(d a). Defined for 0-forms too (i_X of a 0-form is 0).
DiffForm lie_derivative(const VectorField& x, const DiffForm& a);

/// Non-degenerate top-degree form with polynomial density.
class VolumeForm {
 public:
  /// Checks top degree and a nonzero density.
  explicit VolumeForm(DiffForm form);
  /// dx_0 ^ dx_1 ^ ... ^ dx_{m-1}
  static VolumeForm standard(SpacePtr space);

  const DiffForm& form() const noexcept { return form_; }
  /// Coefficient on (0, 1, ..., m-1).
  const Poly& density() const;

 private:
  DiffForm form_;
};

/// The multiplier with (div X) w = L_X w. Throws ContractViolation when the
/// quotient by the density is not a polynomial.
Poly divergence(const VectorField& x, const VolumeForm& w);

/// i_X w for a divergence-free X; throws ContractViolation otherwise. The
/// result is d-closed.
DiffForm field_to_closed_form(const VectorField& x, const VolumeForm& w);

/// i_nu i_mu w, of degree (top - 2). For divergence-free nu, mu its
/// exterior derivative equals i_[nu,mu] w.
DiffForm pair_to_form(const VectorField& nu, const VectorField& mu, const VolumeForm& w);

}  // namespace vdpkit
