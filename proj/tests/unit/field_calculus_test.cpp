#include <doctest.h>

#include <numeric>

#include "oracles.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/field_calculus.hpp"
#include "vdpkit/fuzz.hpp"

using namespace vdpkit;
using oracle::F;
using oracle::P;

namespace {

const SpacePtr& ambient() {
  static const SpacePtr s = VarSpace::suspension(1);  // u, v, z1
  return s;
}

DiffForm dx(std::size_t k) { return DiffForm::differential(ambient(), k); }

std::vector<std::size_t> all_vars(const SpacePtr& s) {
  std::vector<std::size_t> v(s->size());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

TEST_CASE("lie bracket examples") {
  const auto& s = ambient();
  CHECK(lie_bracket(F("[1, 0, 0]", s), F("[0, u, 0]", s)) == F("[0, 1, 0]", s));
  const VectorField theta = F("[u*z1, v^2, 1 + u]", s);
  CHECK(lie_bracket(theta, theta).is_zero());
  CHECK(lie_bracket(F("[0, 0, z1]", s), F("[0, 0, 1]", s)) == F("[0, 0, -1]", s));
}

TEST_CASE("interior product examples") {
  const auto& s = ambient();
  CHECK(interior_product(F("[1, 0, 0]", s), wedge(dx(0), dx(1))) == dx(1));
  CHECK(interior_product(F("[v, 0, 0]", s), wedge(wedge(dx(0), dx(1)), dx(2))) == P("v", s) * wedge(dx(1), dx(2)));
  CHECK(interior_product(F("[0, 1, 0]", s), wedge(dx(0), dx(1))) == -dx(0));
  CHECK_THROWS_AS(interior_product(F("[1, 0, 0]", s), DiffForm::function(P("u", s))), ContractViolation);
}

TEST_CASE("exterior derivative examples") {
  const auto& s = ambient();
  CHECK(exterior_derivative(P("z1", s) * dx(1)) == wedge(dx(2), dx(1)));
  CHECK(exterior_derivative(P("u", s) * dx(1) + P("v", s) * dx(0)).is_zero());
  CHECK(exterior_derivative(P("3", s) * wedge(dx(0), dx(2))).is_zero());
}

TEST_CASE("lie derivative examples") {
  const auto& s = ambient();
  const DiffForm dudv = wedge(dx(0), dx(1));
  CHECK(lie_derivative(F("[1, 0, 0]", s), P("u", s) * dudv) == dudv);
  CHECK(lie_derivative(F("[u, 0, 0]", s), dx(0)) == dx(0));
  FuzzSource rng(21);
  for (int k = 0; k < 50; ++k) {
    const VectorField theta = rng.field(s, 4);
    const Poly g = rng.poly(s, 4);
    CHECK(lie_derivative(theta, DiffForm::exact(g)) == DiffForm::exact(theta.apply(g)));
  }
}

TEST_CASE("divergence examples") {
  const auto& s = ambient();
  const VolumeForm omega = VolumeForm::standard(s);
  CHECK(divergence(F("[u, 0, 0]", s), omega) == P("1", s));
  CHECK(divergence(F("[u, -v, 0]", s), omega).is_zero());
  // (u du^dv^dz1): L_{u d/du} gives 2u du^dv^dz1, so the divergence is 2.
  const VolumeForm weighted(P("u", s) * omega.form());
  CHECK(divergence(F("[u, 0, 0]", s), weighted) == P("2", s));
  // d/du against (1 + u^2) du^dv^dz1 has divergence 2u/(1 + u^2).
  const VolumeForm rational(P("1 + u^2", s) * omega.form());
  CHECK_THROWS_AS(divergence(F("[1, 0, 0]", s), rational), ContractViolation);
  CHECK_THROWS_AS(VolumeForm(wedge(dx(0), dx(1))), ContractViolation);
}

TEST_CASE("divergence Leibniz rule") {
  const auto s = VarSpace::suspension(2);
  const VolumeForm omega = VolumeForm::standard(s);
  FuzzSource rng(22);
  for (int k = 0; k < 200; ++k) {
    const VectorField theta = rng.field(s, 4);
    const Poly h = rng.poly(s, 4);
    CHECK(divergence(h * theta, omega) == h * divergence(theta, omega) + theta.apply(h));
  }
}

TEST_CASE("closed forms of divergence-free fields") {
  const auto& s = ambient();
  const VolumeForm omega = VolumeForm::standard(s);
  CHECK(field_to_closed_form(F("[1, 0, 0]", s), omega) == wedge(dx(1), dx(2)));
  const auto plane = VarSpace::make({"u", "v"});
  const VolumeForm area = VolumeForm::standard(plane);
  const DiffForm closed = field_to_closed_form(F("[u, -v]", plane), area);
  CHECK(closed == P("u", plane) * DiffForm::differential(plane, 1) + P("v", plane) * DiffForm::differential(plane, 0));
  CHECK(exterior_derivative(closed).is_zero());
  CHECK_THROWS_AS(field_to_closed_form(F("[u, 0]", plane), area), ContractViolation);
}

TEST_CASE("pair to form examples") {
  const auto& s = ambient();
  const VolumeForm omega = VolumeForm::standard(s);
  CHECK(pair_to_form(F("[1, 0, 0]", s), F("[0, 1, 0]", s), omega) == -dx(2));
  const VectorField nu = F("[v, z1, u]", s);
  CHECK(pair_to_form(nu, nu, omega).is_zero());
}

TEST_CASE("Cartan formula against the coordinate formula") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(23);
  for (int k = 0; k < 200; ++k) {
    const VectorField theta = rng.field(s, 4);
    const DiffForm a = rng.form(s, static_cast<int>(rng.below(s->size() + 1)), 4);
    const DiffForm cartan = a.degree() == 0
                                ? interior_product(theta, exterior_derivative(a))
                                : exterior_derivative(interior_product(theta, a)) +
                                      interior_product(theta, exterior_derivative(a));
    CHECK(cartan == oracle::lie_derivative_by_coordinates(theta, a));
    CHECK(lie_derivative(theta, a) == cartan);
  }
}

TEST_CASE("d squared and iota squared vanish") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(24);
  for (int k = 0; k < 200; ++k) {
    const DiffForm a = rng.form(s, static_cast<int>(rng.below(s->size() + 1)), 4);
    CHECK(exterior_derivative(exterior_derivative(a)).is_zero());
    if (a.degree() >= 2) {
      const VectorField theta = rng.field(s, 3);
      CHECK(interior_product(theta, interior_product(theta, a)).is_zero());
    }
  }
}

TEST_CASE("antiderivation laws") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(25);
  for (int k = 0; k < 200; ++k) {
    const int p = 1 + static_cast<int>(rng.below(3));
    const int q = 1 + static_cast<int>(rng.below(2));
    const DiffForm a = rng.form(s, p, 4);
    const DiffForm b = rng.form(s, q, 4);
    const VectorField theta = rng.field(s, 3);
    const DiffForm ia = wedge(interior_product(theta, a), b);
    const DiffForm ib = wedge(a, interior_product(theta, b));
    CHECK(interior_product(theta, wedge(a, b)) == (p % 2 == 0 ? ia + ib : ia - ib));
    const DiffForm da = wedge(exterior_derivative(a), b);
    const DiffForm db = wedge(a, exterior_derivative(b));
    CHECK(exterior_derivative(wedge(a, b)) == (p % 2 == 0 ? da + db : da - db));
  }
}

TEST_CASE("Jacobi identity") {
  const auto s = VarSpace::suspension(2);
  FuzzSource rng(26);
  for (int k = 0; k < 200; ++k) {
    const VectorField x = rng.field(s, 4), y = rng.field(s, 4), z = rng.field(s, 4);
    CHECK((lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y)))
              .is_zero());
    CHECK(lie_bracket(x, y) == -lie_bracket(y, x));
  }
}

TEST_CASE("bracket of divergence-free fields is the derivative of the pair form") {
  const auto s = VarSpace::suspension(2);
  const VolumeForm omega = VolumeForm::standard(s);
  const auto vars = all_vars(s);
  FuzzSource rng(27);
  for (int k = 0; k < 200; ++k) {
    const VectorField nu = rng.hamiltonian_field(s, vars, 3);
    const VectorField mu = rng.hamiltonian_field(s, vars, 3);
    REQUIRE(divergence(nu, omega).is_zero());
    REQUIRE(divergence(mu, omega).is_zero());
    const VectorField bracket = lie_bracket(nu, mu);
    CHECK(divergence(bracket, omega).is_zero());
    CHECK(exterior_derivative(pair_to_form(nu, mu, omega)) == field_to_closed_form(bracket, omega));
  }
}

TEST_CASE("parsing vector fields") {
  const auto& s = ambient();
  CHECK(F("[u, -v, 0]", s).to_string() == "[u, -v, 0]");
  CHECK_THROWS_AS(F("[u, v]", s), ParseError);
  CHECK_THROWS_AS(F("u, v, z1", s), ParseError);
  try {
    parse_vector_field("[u, v^, 0]", s, 3);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 7);
  }
}
