#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/fuzz.hpp"
#include "vdpkit/lifting.hpp"
#include "vdpkit/suspension.hpp"

using namespace vdpkit;
using oracle::F;
using oracle::P;

namespace {

SuspensionContext context(int n, const std::string& f) { return make_suspension(n, P(f, VarSpace::base(n))); }

// Sum of h_jk (dF/dx_k d/dx_j - dF/dx_j d/dx_k) for F = uv - f plus (uv - f) Y.
VectorField random_tangent(const SuspensionContext& ctx, FuzzSource& rng, bool with_multiplier) {
  const auto& s = ctx.space();
  const Poly& defining = ctx.defining();
  VectorField x(s);
  for (int r = 0; r < 2; ++r) {
    const std::size_t j = rng.below(s->size());
    std::size_t k = rng.below(s->size());
    while (k == j) k = rng.below(s->size());
    const Poly h = rng.poly(s, 2);
    x.set(j, x[j] + h * defining.derivative(k));
    x.set(k, x[k] - h * defining.derivative(j));
  }
  if (with_multiplier) x += defining * rng.field(s, 1, 2);
  return x;
}

}  // namespace

TEST_CASE("contexts") {
  const auto danielewski = context(1, "z1");
  CHECK(danielewski.space()->size() == 3);
  CHECK(danielewski.defining() == P("u*v - z1", danielewski.space()));
  const auto plane = context(2, "z1");
  CHECK(plane.defining() == P("u*v - z1", plane.space()));
  CHECK(plane.z_index(2) == 3);
  CHECK_THROWS_AS(context(1, "5"), ContractViolation);
  CHECK_THROWS_AS(make_suspension(1, P("u + z1", VarSpace::suspension(1))), ContractViolation);
}

TEST_CASE("tangency examples") {
  const auto ctx = context(1, "z1");
  const auto& s = ctx.space();
  const SuspensionField lifted = is_tangent(F("[1, 0, v]", s), ctx);
  CHECK(lifted.multiplier.is_zero());
  CHECK(is_tangent(F("[u, -v, 0]", s), ctx).multiplier.is_zero());
  CHECK_THROWS_AS(is_tangent(F("[1, 0, 0]", s), ctx), NotTangent);
  CHECK(is_tangent(F("[u, 0, z1]", s), ctx).multiplier == P("1", s));
}

TEST_CASE("every generated tangent field satisfies its multiplier identity") {
  const auto ctx = context(2, "z1^2 + z2^2 - 1");
  FuzzSource rng(31);
  for (int k = 0; k < 100; ++k) {
    const VectorField x = random_tangent(ctx, rng, k % 2 == 0);
    const SuspensionField t = is_tangent(x, ctx);
    CHECK((x.apply(ctx.defining()) - t.multiplier * ctx.defining()).is_zero());
  }
}

TEST_CASE("divergence on the suspension examples") {
  const auto ctx = context(2, "z1");
  const auto& s = ctx.space();
  CHECK(divergence_on_suspension(lift(F("[1, 0]", ctx.base_space()), ctx, Side::u), ctx).is_zero());
  const Poly h = P("z1^2*z2 - 3", s);
  CHECK(divergence_on_suspension(h * F("[u, -v, 0, 0]", s), ctx).is_zero());
  // u d/du alone is not tangent; adding z1 d/dz1 makes it tangent with q = 1.
  CHECK_THROWS_AS(divergence_on_suspension(F("[u, 0, 0, 0]", s), ctx), NotTangent);
  CHECK(divergence_on_suspension(F("[u, 0, z1, 0]", s), ctx) == P("1", s));
}

TEST_CASE("divergence on the suspension is linear with a Leibniz correction") {
  const auto ctx = context(2, "z1*z2 - 1");
  FuzzSource rng(32);
  for (int k = 0; k < 100; ++k) {
    const SuspensionField a = is_tangent(random_tangent(ctx, rng, true), ctx);
    const SuspensionField b = is_tangent(random_tangent(ctx, rng, true), ctx);
    const Poly div_a = divergence_on_suspension(a, ctx);
    const Poly div_b = divergence_on_suspension(b, ctx);
    CHECK(divergence_on_suspension(a.ambient + b.ambient, ctx) == ctx.normal_form(div_a + div_b));
    std::vector<std::size_t> zs{2, 3};
    const Poly h = rng.poly(ctx.space(), zs, 3);
    CHECK(divergence_on_suspension(h * a.ambient, ctx) == ctx.normal_form(h * div_a + a.ambient.apply(h)));
  }
}

TEST_CASE("tangent basis examples") {
  const auto ctx = context(2, "z1");
  const auto p = SurfacePoint::from_exact({1, 1, 1, 0});
  const auto basis = tangent_basis(ctx, p);
  CHECK(basis.size() == 3);
  CHECK(exact_rank(ExactMatrix::from_rows(basis, 4)) == 3);
  for (const auto& w : basis) CHECK(w[0] + w[1] - w[2] == GaussianRational(0));

  const GaussianRational c(Rational(3, 2), Rational(-1));
  const auto q = SurfacePoint::from_exact({0, 0, 0, c});
  const auto at_origin = tangent_basis(ctx, q);
  CHECK(at_origin.size() == 3);
  for (const auto& w : at_origin) CHECK(w[2].is_zero());

  const auto cone = context(1, "z1^2");
  CHECK_THROWS_AS(tangent_basis(cone, SurfacePoint::from_exact({0, 0, 0})), SingularPoint);
}

TEST_CASE("tangent basis annihilates the differential at random points") {
  const auto ctx = context(2, "z1^2 + z2^2 - 1");
  std::mt19937_64 rng(33);
  for (int k = 0; k < 50; ++k) {
    const ExactVector x = oracle::surface_point(ctx, rng);
    const ExactVector grad{x[1], x[0], -2 * x[2], -2 * x[3]};
    const auto basis = tangent_basis(ctx, SurfacePoint::from_exact(x));
    CHECK(basis.size() == 3);
    for (const auto& w : basis) {
      GaussianRational dot = 0;
      for (std::size_t i = 0; i < 4; ++i) dot += grad[i] * w[i];
      CHECK(dot.is_zero());
    }
  }
}

TEST_CASE("sampling") {
  const auto ctx = context(2, "z1");
  SamplingSpec spec;
  spec.count = 40;
  spec.u_zero_count = 5;
  const SampleSet set = sample_points(ctx, spec);
  CHECK(set.points.size() == 45);
  for (std::size_t k = 0; k < set.points.size(); ++k) {
    const auto& p = set.points[k];
    REQUIRE(p.exact);
    const ExactVector& x = *p.exact;
    CHECK(x[0] * x[1] == x[2]);
    CHECK(on_surface(p, ctx));
    if (k >= 40) {
      CHECK(x[0].is_zero());
      CHECK(x[2].is_zero());
    } else {
      CHECK(!x[0].is_zero());
    }
  }
  CHECK(sample_points(ctx, spec).points.size() == set.points.size());
  const auto again = sample_points(ctx, spec);
  for (std::size_t k = 0; k < set.points.size(); ++k) CHECK(*again.points[k].exact == *set.points[k].exact);

  spec.exactness = Exactness::floating;
  spec.u_zero_count = 0;
  for (const auto& p : sample_points(ctx, spec).points) {
    CHECK(!p.exact);
    CHECK(on_surface(p, ctx, 1e-12));
  }

  const auto circle = context(2, "z1^2 + z2^2 - 1");
  SamplingSpec with_branch;
  with_branch.count = 5;
  with_branch.u_zero_count = 3;
  const SampleSet skipped = sample_points(circle, with_branch);
  CHECK(skipped.points.size() == 5);
  CHECK(!skipped.notes.empty());
}

TEST_CASE("smoothness checks") {
  const auto ctx = context(2, "z1^2 + z2^2 - 1");
  SamplingSpec spec;
  spec.count = 20;
  CHECK(smoothness_failures(ctx, sample_points(ctx, spec).points).empty());
  const auto cert = smoothness_certificate(ctx, 2);
  REQUIRE(cert);
  const auto& b = ctx.base_space();
  Poly combo = (*cert)[0] * ctx.f_base();
  for (std::size_t j = 0; j < 2; ++j) combo += (*cert)[j + 1] * ctx.f_base().derivative(j);
  CHECK(combo == Poly::constant(b, 1));

  const auto cone = context(1, "z1^2");
  CHECK(!smoothness_failures(cone, {SurfacePoint::from_exact({0, 0, 0})}).empty());
  CHECK(!smoothness_certificate(cone, 3));
}

TEST_CASE("flow of a tangent field scales the induced volume by exp of the integrated divergence") {
  const auto ctx = context(2, "z1");
  const auto& s = ctx.space();
  const VectorField theta = F("[u, 0, z1, z2^2 + v]", s);
  const SuspensionField t = is_tangent(theta, ctx);
  CHECK(t.multiplier == P("1", s));
  const Poly div = divergence_on_suspension(t, ctx);
  CHECK(div == P("1 + 2*z2", s));
  std::mt19937_64 rng(34);
  for (int k = 0; k < 10; ++k) {
    const auto start = oracle::to_complex(oracle::surface_point(ctx, rng));
    for (double time : {0.05, 0.125, 0.25}) {
      const auto r = oracle::integrate_variational(theta, div, start, time, 400);
      const auto ratio = oracle::chart_ratio_u(ctx, start, r.end, r.jacobian);
      CHECK(std::abs(ratio - std::exp(r.integral)) <= 1e-6 * std::abs(std::exp(r.integral)));
    }
  }
}
