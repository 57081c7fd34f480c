#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/suspension.hpp"
#include "vdpkit/uv_relation.hpp"

using namespace vdpkit;
using oracle::P;

TEST_CASE("polynomial arithmetic examples") {
  const auto s = VarSpace::suspension(2);
  CHECK(P("z1+1", s) * P("z1-1", s) == P("z1^2-1", s));
  const Poly p = P("3*u*z2^2 - 1/2i*v + 7", s);
  CHECK(p + Poly(s) == p);
  CHECK(P("i", s) * P("i", s) == P("-1", s));
}

TEST_CASE("ring laws on random polynomials") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(11);
  for (int k = 0; k < 100; ++k) {
    const Poly a = rng.poly(s, 4), b = rng.poly(s, 4), c = rng.poly(s, 4);
    CHECK(a * b == b * a);
    CHECK((a + b) * c == a * c + b * c);
    CHECK((a * b) * c == a * (b * c));
    CHECK(a - a == Poly(s));
  }
}

TEST_CASE("partial derivatives") {
  const auto s = VarSpace::suspension(2);
  CHECK(P("z1^2*z2", s).derivative(2) == P("2*z1*z2", s));
  CHECK(P("z1", s).derivative(0).is_zero());
  CHECK(P("u*v", s).derivative(1) == P("u", s));
}

TEST_CASE("derivative obeys the product rule") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(12);
  for (int k = 0; k < 100; ++k) {
    const Poly a = rng.poly(s, 4), b = rng.poly(s, 4);
    const std::size_t var = rng.below(s->size());
    CHECK((a * b).derivative(var) == a.derivative(var) * b + a * b.derivative(var));
    CHECK(a.antiderivative(var).derivative(var) == a);
  }
}

TEST_CASE("parsing and printing") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(13);
  for (int k = 0; k < 100; ++k) {
    const Poly a = rng.poly(s, 5);
    CHECK(parse_poly(a.to_string(), s) == a);
  }
  CHECK(P("2*(z1 + 1)", s) == P("2*z1 + 2", s));
  CHECK_THROWS_AS(parse_poly("2(z1 + 1)", s), ParseError);
  CHECK_THROWS_AS(parse_poly("z1^", s), ParseError);
  CHECK_THROWS_AS(parse_poly("z3", s), ParseError);
  CHECK_THROWS_AS(parse_poly("(u + 1", s), ParseError);
  try {
    parse_poly("u + * v", s, 7);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(e.column() == 5);
  }
}

TEST_CASE("mixing variable spaces is rejected") {
  const Poly a = P("z1", VarSpace::suspension(1));
  const Poly b = P("z1", VarSpace::base(1));
  CHECK_THROWS_AS(a + b, ContextMismatch);
}

TEST_CASE("normal form examples") {
  const auto ctx = make_suspension(1, P("z1", VarSpace::base(1)));
  const auto s = ctx.space();
  CHECK(ctx.normal_form(P("u*v*z1", s)) == P("z1^2", s));
  CHECK(ctx.normal_form(P("u^2*v", s)) == P("u*z1", s));
  const auto ctx2 = make_suspension(2, P("z1^2 + z2", VarSpace::base(2)));
  CHECK(ctx2.normal_form(P("u^2*v^2", ctx2.space())) == P("(z1^2 + z2)^2", ctx2.space()));
}

TEST_CASE("normal form agrees with stepwise rewriting and is a ring map") {
  const auto ctx = make_suspension(2, P("z1^2 + z1*z2 - 1", VarSpace::base(2)));
  const auto s = ctx.space();
  FuzzSource rng(14);
  for (int k = 0; k < 100; ++k) {
    const Poly p = rng.poly(s, 6, 5), q = rng.poly(s, 4);
    const Poly np = ctx.normal_form(p);
    CHECK(np == oracle::stepwise_normal_form(p, ctx.f()));
    CHECK(ctx.normal_form(np) == np);
    CHECK(ctx.normal_form(p * q) == ctx.normal_form(np * ctx.normal_form(q)));
    const auto division = ctx.relation().divide(p);
    CHECK(division.quotient * ctx.defining() + division.remainder == p);
    CHECK(division.remainder == np);
  }
}

TEST_CASE("normal form preserves values on the surface") {
  const auto ctx = make_suspension(2, P("z1*z2 - 1", VarSpace::base(2)));
  FuzzSource rng(15);
  std::mt19937_64 points(15);
  for (int k = 0; k < 100; ++k) {
    const Poly p = rng.poly(ctx.space(), 6, 5);
    const ExactVector x = oracle::surface_point(ctx, points);
    CHECK(p.evaluate(x) == ctx.normal_form(p).evaluate(x));
  }
}

TEST_CASE("exact rank examples") {
  CHECK(exact_rank(ExactMatrix::identity(3)) == 3);
  CHECK(exact_rank(ExactMatrix(3, 3)) == 0);
  const GaussianRational i = GaussianRational::i();
  CHECK(exact_rank(ExactMatrix{{1, i}, {i, -1}}) == 1);
}

TEST_CASE("exact rank agrees with minors") {
  const GaussianRational values[] = {0, 1, -1, GaussianRational::i(), -GaussianRational::i()};
  std::mt19937_64 rng(16);
  for (int k = 0; k < 400; ++k) {
    const std::size_t rows = 1 + rng() % 4, cols = 1 + rng() % 4;
    ExactMatrix m(rows, cols);
    const bool sparse = rng() % 2;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = values[sparse ? (rng() % 3 == 0 ? rng() % 5 : 0) : rng() % 5];
    if (rows > 1 && rng() % 3 == 0)
      for (std::size_t c = 0; c < cols; ++c) m(rows - 1, c) = m(0, c) * GaussianRational::i();
    CHECK(exact_rank(m) == oracle::minor_rank(m));
  }
}

TEST_CASE("nullspace and solve") {
  const ExactMatrix m{{1, 1, -1, 0}};
  const auto basis = nullspace(m);
  CHECK(basis.size() == 3);
  for (const auto& w : basis) CHECK(w[0] + w[1] - w[2] == GaussianRational(0));
  const ExactMatrix a{{1, 2}, {3, 4}};
  const std::vector<ExactVector> rhs{{5, 6}, {0, 0}};
  const auto sol = solve_many(a, rhs);
  REQUIRE(sol[0]);
  CHECK((*sol[0])[0] + 2 * (*sol[0])[1] == GaussianRational(5));
  CHECK(3 * (*sol[0])[0] + 4 * (*sol[0])[1] == GaussianRational(6));
  const ExactMatrix singular{{1, 1}, {1, 1}};
  const std::vector<ExactVector> bad{{1, 2}};
  CHECK(!solve_many(singular, bad)[0]);
}
