#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vdpkit/gaussian_rational.hpp"

namespace vdpkit {

/// Ordered list of variable names a polynomial is written in.
///
/// The suspension convention is u = index 0, v = index 1, z1..zn = indices
/// 2..n+1; a time variable t, when present, is appended last.
class VarSpace {
 public:
  explicit VarSpace(std::vector<std::string> names);

  static std::shared_ptr<const VarSpace> make(std::vector<std::string> names);
  /// (u, v, z1, ..., zn)
  static std::shared_ptr<const VarSpace> suspension(int n);
  /// (z1, ..., zn)
  static std::shared_ptr<const VarSpace> base(int n);
  /// Same names with "t" appended.
  static std::shared_ptr<const VarSpace> with_time(const VarSpace& space);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<std::size_t> index_of(std::string_view name) const;

  friend bool operator==(const VarSpace& a, const VarSpace& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
};

using SpacePtr = std::shared_ptr<const VarSpace>;

/// Dense exponent vector, one entry per variable of the space.
using Exponents = std::vector<std::uint16_t>;

/// Graded order, larger total degree first, ties broken lexicographically
/// (larger exponent of the earlier variable first).
struct GradedOrder {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

int total_degree(const Exponents& e);

/// Multivariate polynomial with Gaussian-rational coefficients.
/// Zero coefficients are never stored.
class Poly {
 public:
  using Terms = std::map<Exponents, GaussianRational, GradedOrder>;

  explicit Poly(SpacePtr space);

  static Poly constant(SpacePtr space, const GaussianRational& c);
  static Poly variable(SpacePtr space, std::size_t index);
  static Poly variable(SpacePtr space, std::string_view name);
  static Poly monomial(SpacePtr space, Exponents exps, const GaussianRational& c = 1);

  const VarSpace& space() const noexcept { return *space_; }
  const SpacePtr& space_ptr() const noexcept { return space_; }
  const Terms& terms() const noexcept { return terms_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_constant() const;
  /// -1 for the zero polynomial.
  int total_degree() const;
  int degree_in(std::size_t var) const;
  bool depends_on(std::size_t var) const;
  GaussianRational coefficient(const Exponents& e) const;
  GaussianRational constant_term() const;

  /// Adds c * x^e in place.
  void add_term(const Exponents& e, const GaussianRational& c);

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  Poly& operator*=(const GaussianRational& c);

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  friend Poly operator*(Poly a, const GaussianRational& c) { return a *= c; }
  friend Poly operator*(const GaussianRational& c, Poly a) { return a *= c; }
  Poly operator-() const;

  Poly pow(unsigned k) const;

  /// Formal partial derivative with respect to variable `var`.
  Poly derivative(std::size_t var) const;
  /// Antiderivative in `var` with zero constant of integration.
  Poly antiderivative(std::size_t var) const;

  GaussianRational evaluate(std::span<const GaussianRational> point) const;
  std::complex<double> evaluate(std::span<const std::complex<double>> point) const;

  /// Replaces variable k by images[k]; all images share one target space.
  Poly substitute(std::span<const Poly> images) const;
  /// Re-expresses the polynomial in `target`, variable k going to index_map[k].
  Poly embed(SpacePtr target, std::span<const std::size_t> index_map) const;
  /// Re-expresses in `target` by matching variable names.
  Poly embed_by_name(SpacePtr target) const;

  /// Text in the grammar accepted by parse_poly.
  std::string to_string() const;

  friend bool operator==(const Poly& a, const Poly& b);
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

 private:
  void require_same_space(const Poly& o) const;

  SpacePtr space_;
  Terms terms_;
};

/// Free-function spelling of the derivative, matching the exterior-calculus code.
inline Poly partial_derivative(const Poly& p, std::size_t var) { return p.derivative(var); }

/// Exact quotient p / d when d divides p, otherwise nullopt.
std::optional<Poly> divide_exact(const Poly& p, const Poly& d);

/// Parses the polynomial grammar: variables of `space`, integer and a/b
/// literals, the imaginary unit i (also as a suffix, "3i", "1/2i"),
/// operators + - * ^ and parentheses. Unicode minus (U+2212) is accepted.
/// Throws ParseError with 1-based column (line is `line`).
Poly parse_poly(std::string_view text, SpacePtr space, std::size_t line = 1);

/// Monomials of total degree <= max_degree over the listed variables, ascending degree.
std::vector<Exponents> monomials_up_to(std::size_t nvars, std::span<const std::size_t> vars, int max_degree);

}  // namespace vdpkit
