#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/field_calculus.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/suspension.hpp"

namespace vdpkit {

enum class FlowKind { shear_chain, generic };

/// A vector field on the base (z1..zn).
///
/// Shear-chain fields are those whose coefficient of d/dz_j never involves
/// z_j and whose variable dependencies can be ordered without cycles. Their
/// flow is polynomial in t and is computed at construction.
class BaseField {
 public:
  explicit BaseField(VectorField field);

  const VectorField& field() const noexcept { return field_; }
  FlowKind flow_kind() const noexcept { return kind_; }
  /// phi^t over (z1..zn, t); throws ContractViolation for generic fields.
  const std::vector<Poly>& flow() const;

 private:
  VectorField field_;
  FlowKind kind_ = FlowKind::generic;
  std::vector<Poly> flow_;
};

enum class Side { u, v };

const char* to_string(Side side);

/// The ambient field with zero u, v components and the same z components.
VectorField extend_trivially(const VectorField& base_field, const SuspensionContext& ctx);

/// Side u: v*Theta~ + Theta(f) d/du.  Side v: u*Theta~ + Theta(f) d/dv.
/// The multiplier is always zero.
SuspensionField lift(const VectorField& base_field, const SuspensionContext& ctx, Side side);

/// g over (z1..zn, t) with f(phi^t(z)) = f(z) + t g(z, t).
struct FlowRemainder {
  Poly g;
};

FlowRemainder flow_remainder(const BaseField& theta, const Poly& f_base);

/// Closed-form flow of lift(theta, side) as polynomials over (u, v, z1..zn, t):
/// side u maps (u, v, z) to (u + t g(z, tv), v, phi^{tv}(z)).
std::vector<Poly> lifted_flow(const BaseField& theta, const SuspensionContext& ctx, Side side);

/// Evaluates a flow over (x..., t) at a point and time.
ExactVector apply_flow(std::span<const Poly> flow, std::span<const GaussianRational> point, const GaussianRational& t);
std::vector<std::complex<double>> apply_flow(std::span<const Poly> flow, std::span<const std::complex<double>> point,
                                             std::complex<double> t);

/// Classical fourth-order Runge-Kutta with a fixed number of steps, real time.
std::vector<std::complex<double>> rk4_flow(const VectorField& field, std::span<const std::complex<double>> start,
                                           double t, int steps);

struct IntegrationResult {
  std::vector<std::complex<double>> end;
  /// False when the solution left the ball of radius `max_norm` before time t.
  bool completed = true;
  double reached = 0;
};

/// RK4 with step-doubling error control.
IntegrationResult integrate_flow(const VectorField& field, std::span<const std::complex<double>> start, double t,
                                 double tol = 1e-11, double max_norm = 1e8);

/// Time-t flow of lift(theta, side) at a point: closed form for shear-chain
/// fields, numeric otherwise. Throws ContractViolation if the numeric solution
/// blows up before time t.
std::vector<std::complex<double>> lifted_flow_at(const BaseField& theta, const SuspensionContext& ctx, Side side,
                                                 std::span<const std::complex<double>> point, double t);

/// Jacobian of the flow map against the induced volume form, in the chart
/// (u, z) of {u != 0} as det(DF) * u / F_u, or in the chart (v, z) when v
/// stays further from zero. Equal to 1 for volume-preserving flows. Throws
/// ContractViolation when neither chart holds the point and its image.
std::complex<double> chart_volume_ratio(std::span<const Poly> flow, const SuspensionContext& ctx,
                                        std::span<const std::complex<double>> point, double t);

/// mu(p) + mu(g)(p) * theta(p), the pushforward of mu under the shear
/// p -> Flow_theta^{g(p)}(p) at a point with g(p) = 0. Requires theta(g) = 0
/// on the surface; throws ContractViolation otherwise.
ExactVector shear_pullback(const VectorField& mu, const VectorField& theta, const Poly& g,
                           const SuspensionContext& ctx, const SurfacePoint& p);

/// Base fields alpha, beta with proposed kernel generators and ideal generators,
/// all over (z1..zn).
struct BasePair {
  VectorField alpha;
  VectorField beta;
  std::vector<Poly> kernel_alpha;
  std::vector<Poly> kernel_beta;
  std::vector<Poly> ideal;
};

/// {h~ * u^i v^j : h in ideal, i + j <= bound}, normal-formed, zeros dropped.
std::vector<Poly> lift_ideal(std::span<const Poly> ideal, const SuspensionContext& ctx, int bound = 1);

/// One of (alpha_u, beta_v) or (alpha_v, beta_u).
struct LiftedPair {
  std::string label;
  std::size_t source = 0;
  SuspensionField first;
  SuspensionField second;
  std::vector<Poly> kernel_first;
  std::vector<Poly> kernel_second;
  std::vector<Poly> ideal;
};

/// Both lifted pairs of a base pair. Kernels: Ker alpha_u contains the lifted
/// Ker alpha and v, Ker beta_v contains the lifted Ker beta and u; the other
/// pair swaps u and v.
std::vector<LiftedPair> lift_pair(const BasePair& pair, std::size_t source, const SuspensionContext& ctx,
                                  int lift_bound = 1);

enum class PullbackKind { shear, twist };

/// A lifted pair pulled back by a shear or twist automorphism fixing the
/// basepoint, evaluated at the basepoint.
struct PullbackPair {
  std::string label;
  std::size_t source = 0;
  PullbackKind kind;
  Poly g;
  ExactVector first;
  ExactVector second;
};

struct SpanningFamily {
  std::vector<LiftedPair> lifted;
  std::vector<PullbackPair> pullbacks;
  std::size_t rank = 0;
  std::size_t full_rank = 0;
};

/// Conditions on the basepoint and the base pairs; empty when all hold.
std::vector<std::string> basepoint_failures(std::span<const BasePair> pairs, const SuspensionContext& ctx,
                                            const SurfacePoint& x0, const std::optional<Poly>& g_twist);

/// Lifts every base pair, adds shear pullbacks for orientations with
/// alpha(f)(x0) != 0 and twist pullbacks for those with alpha(f)(x0) = 0,
/// and computes the exact rank of the wedges at x0. Throws ConditionsFailed
/// listing every failed basepoint condition.
SpanningFamily spanning_family(std::span<const BasePair> pairs, const SuspensionContext& ctx, const SurfacePoint& x0,
                   const std::optional<Poly>& g_twist = std::nullopt);

/// Coordinates of each a_k ^ b_k in the basis e_i ^ e_j (i < j) of the second
/// exterior power of span(basis). Throws NotTangent if a factor is outside that span.
std::vector<ExactVector> wedge_coordinates(std::span<const ExactVector> basis,
                                           std::span<const std::pair<ExactVector, ExactVector>> wedges);

/// Rank of the span of a_k ^ b_k inside the second exterior power of span(basis).
std::size_t wedge_rank(std::span<const ExactVector> basis, std::span<const std::pair<ExactVector, ExactVector>> wedges);

/// Drops the v component, identifying the tangent space at a point with
/// u != 0 with C_u x T_x X.
ExactVector drop_v(std::span<const GaussianRational> w);

/// Both sides of P(alpha_u) ^ P(beta_v) = uv alpha^beta - u alpha(f) beta^du at
/// a point, in coordinates of the second exterior power of (u, z1..zn).
std::pair<ExactVector, ExactVector> wedge_expansion_sides(const BasePair& pair, const SuspensionContext& ctx,
                                                  const SurfacePoint& p);

}  // namespace vdpkit
