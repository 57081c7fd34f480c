#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/field_calculus.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/uv_relation.hpp"

namespace vdpkit {

/// The hypersurface {uv = f(z)} in C^2 x C^n together with its reducer and
/// the ambient volume form du ^ dv ^ dz1 ^ ... ^ dzn.
class SuspensionContext {
 public:
  SuspensionContext(int n, const Poly& f);

  int n() const noexcept { return n_; }
  const SpacePtr& space() const noexcept { return space_; }
  const SpacePtr& base_space() const noexcept { return base_space_; }
  /// f written over (u, v, z1..zn).
  const Poly& f() const noexcept { return relation_.f(); }
  /// f written over (z1..zn).
  const Poly& f_base() const noexcept { return f_base_; }
  /// uv - f
  const Poly& defining() const noexcept { return relation_.defining(); }
  const UvRelation& relation() const noexcept { return relation_; }
  const VolumeForm& ambient_volume() const noexcept { return volume_; }

  Poly normal_form(const Poly& p) const { return relation_.normal_form(p); }

  /// Ambient index of z_j (j is 1-based).
  std::size_t z_index(int j) const { return static_cast<std::size_t>(j) + 1; }
  /// Moves a polynomial in z1..zn into the ambient space.
  Poly from_base(const Poly& p) const;
  /// Inverse of from_base; throws ContractViolation if p involves u or v.
  Poly to_base(const Poly& p) const;

 private:
  int n_;
  SpacePtr space_;
  SpacePtr base_space_;
  Poly f_base_;
  UvRelation relation_;
  VolumeForm volume_;
};

/// Builds the context. f may be written over (z1..zn) or over (u, v, z1..zn).
/// Throws ContractViolation for constant f or f involving u, v.
SuspensionContext make_suspension(int n, const Poly& f);

/// Ambient field with Theta(uv - f) = multiplier * (uv - f).
struct SuspensionField {
  VectorField ambient;
  Poly multiplier;
};

/// Decides tangency by division by uv - f; throws NotTangent otherwise.
SuspensionField is_tangent(const VectorField& theta, const SuspensionContext& ctx);

/// normal_form(div Theta - q); the divergence for the volume form induced on
/// the hypersurface.
Poly divergence_on_suspension(const SuspensionField& theta, const SuspensionContext& ctx);
/// Checks tangency first.
Poly divergence_on_suspension(const VectorField& theta, const SuspensionContext& ctx);

/// A point of the hypersurface. `coords` is always filled; `exact` holds the
/// Gaussian-rational coordinates when the point was generated exactly.
struct SurfacePoint {
  std::vector<std::complex<double>> coords;
  std::optional<ExactVector> exact;

  static SurfacePoint from_exact(ExactVector x);
  static SurfacePoint from_numeric(std::vector<std::complex<double>> x);
};

/// |uv - f| for numeric points, exact zero test for exact ones.
bool on_surface(const SurfacePoint& p, const SuspensionContext& ctx, double tol = 1e-12);

/// Gradient of uv - f at an exact point.
ExactVector defining_gradient(const SuspensionContext& ctx, std::span<const GaussianRational> p);

/// Exact basis of ker d_p(uv - f); throws SingularPoint where the gradient vanishes.
std::vector<ExactVector> tangent_basis(const SuspensionContext& ctx, const SurfacePoint& p);

enum class Exactness { exact, floating };

struct SamplingSpec {
  std::size_t count = 50;
  std::uint64_t seed = 1;
  Rational region_lo = -2;
  Rational region_hi = 2;
  /// Number of grid cells per unit interval of the region (exact mode).
  int grid = 4;
  Exactness exactness = Exactness::exact;
  /// Points on the u = 0 branch, added after the u != 0 points.
  std::size_t u_zero_count = 0;
  /// 1-based z variable to solve f = 0 for; chosen automatically if unset.
  std::optional<int> u_zero_variable;
};

struct SampleSet {
  std::vector<SurfacePoint> points;
  std::vector<std::string> notes;
};

/// Deterministic given the sampling settings. z is drawn from the region grid, u from the
/// nonzero grid values and v = f(z)/u. The u = 0 branch solves f = 0 for a
/// variable of degree one in f; if none exists the branch is skipped with a note.
SampleSet sample_points(const SuspensionContext& ctx, const SamplingSpec& spec);

/// Exact check that f and all df/dz_j do not vanish together at the given points.
/// Returns descriptions of the offending points (empty on success).
std::vector<std::string> smoothness_failures(const SuspensionContext& ctx, const std::vector<SurfacePoint>& points);

/// Polynomials c_0, c_1..c_n of degree <= degree_bound with
/// c_0 f + sum_j c_j df/dz_j = 1, over (z1..zn); nullopt if none exists at that bound.
std::optional<std::vector<Poly>> smoothness_certificate(const SuspensionContext& ctx, int degree_bound);

}  // namespace vdpkit
