#include <chrono>
#include <functional>
#include <numeric>

#include "commands.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/fuzz.hpp"
#include "vdpkit/lifting.hpp"

namespace vdpkit::cli {

DiffForm coordinate_lie_derivative(const VectorField& x, const DiffForm& a) {
  DiffForm out(a.space_ptr(), a.degree());
  const std::size_t m = a.space().size();
  for (const auto& [index, coeff] : a.coefficients()) {
    out.add(index, x.apply(coeff));
    for (std::size_t s = 0; s < index.size(); ++s) {
      for (std::size_t k = 0; k < m; ++k) {
        const Poly dxk = x[index[s]].derivative(k);
        if (dxk.is_zero()) continue;
        DiffForm::Index replaced = index;
        replaced[s] = k;
        out.add(replaced, coeff * dxk);
      }
    }
  }
  return out;
}

namespace {

struct Suite {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::size_t skipped = 0;
  std::optional<std::string> first_failure;
  std::vector<std::string> notes;

  void check(bool ok, const std::function<std::string()>& describe) {
    ++cases;
    if (ok) return;
    ++failures;
    if (!first_failure) first_failure = describe();
  }

  nlohmann::json to_json() const {
    nlohmann::json j{{"cases", cases}, {"failures", failures}, {"skipped", skipped}, {"notes", notes}};
    j["first_failure"] = first_failure ? nlohmann::json(*first_failure) : nlohmann::json(nullptr);
    return j;
  }
};

std::vector<std::size_t> all_indices(std::size_t m) {
  std::vector<std::size_t> v(m);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<std::size_t> all_but(std::size_t m, std::initializer_list<std::size_t> skip) {
  std::vector<std::size_t> v;
  for (std::size_t k = 0; k < m; ++k)
    if (std::find(skip.begin(), skip.end(), k) == skip.end()) v.push_back(k);
  return v;
}

Suite cartan_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const std::size_t m = space->size();
  for (std::size_t c = 0; c < count; ++c) {
    const VectorField x = rng.field(space, degree);
    const int p = static_cast<int>(rng.below(m + 1));
    const DiffForm a = rng.form(space, p, degree);
    const DiffForm cartan = lie_derivative(x, a);
    s.check(cartan == coordinate_lie_derivative(x, a), [&] { return "X = " + x.to_string() + ", a = " + a.to_string(); });
  }
  return s;
}

Suite dd_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const std::size_t m = space->size();
  for (std::size_t c = 0; c < count; ++c) {
    const int p = static_cast<int>(rng.below(m + 1));
    const DiffForm a = rng.form(space, p, degree);
    const DiffForm dd = exterior_derivative(exterior_derivative(a));
    s.check(dd.is_zero(), [&] { return "a = " + a.to_string(); });
  }
  return s;
}

Suite antiderivation_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const std::size_t m = space->size();
  for (std::size_t c = 0; c < count; ++c) {
    const int p = static_cast<int>(rng.below(m + 1));
    const int q = static_cast<int>(rng.below(m - static_cast<std::size_t>(p) + 1));
    const DiffForm a = rng.form(space, p, degree);
    const DiffForm b = rng.form(space, q, degree);
    DiffForm rhs = wedge(exterior_derivative(a), b);
    const DiffForm second = wedge(a, exterior_derivative(b));
    rhs = p % 2 == 0 ? rhs + second : rhs - second;
    s.check(exterior_derivative(wedge(a, b)) == rhs,
            [&] { return "a = " + a.to_string() + ", b = " + b.to_string(); });
  }
  return s;
}

Suite jacobi_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  for (std::size_t c = 0; c < count; ++c) {
    const VectorField x = rng.field(space, degree);
    const VectorField y = rng.field(space, degree);
    const VectorField z = rng.field(space, degree);
    const VectorField sum =
        lie_bracket(x, lie_bracket(y, z)) + lie_bracket(y, lie_bracket(z, x)) + lie_bracket(z, lie_bracket(x, y));
    s.check(sum.is_zero(), [&] { return "X = " + x.to_string() + ", Y = " + y.to_string() + ", Z = " + z.to_string(); });
  }
  return s;
}

Suite leibniz_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const VolumeForm w = VolumeForm::standard(space);
  for (std::size_t c = 0; c < count; ++c) {
    const VectorField x = rng.field(space, degree);
    const Poly h = rng.poly(space, degree);
    const Poly lhs = divergence(h * x, w);
    const Poly rhs = h * divergence(x, w) + x.apply(h);
    s.check(lhs == rhs, [&] { return "X = " + x.to_string() + ", h = " + h.to_string(); });
  }
  return s;
}

Suite bracket_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const VolumeForm w = VolumeForm::standard(space);
  const auto vars = all_indices(space->size());
  for (std::size_t c = 0; c < count; ++c) {
    const VectorField nu = rng.hamiltonian_field(space, vars, degree - 1);
    const VectorField mu = rng.hamiltonian_field(space, vars, degree - 1);
    const DiffForm lhs = interior_product(lie_bracket(nu, mu), w.form());
    const DiffForm rhs = exterior_derivative(pair_to_form(nu, mu, w));
    s.check(lhs == rhs, [&] { return "nu = " + nu.to_string() + ", mu = " + mu.to_string(); });
  }
  return s;
}

Suite compatible_suite(FuzzSource& rng, const SpacePtr& space, std::size_t count, int degree) {
  Suite s;
  const std::size_t m = space->size();
  for (std::size_t c = 0; c < count; ++c) {
    const std::size_t i = rng.below(m);
    std::size_t j = rng.below(m);
    while (j == i) j = rng.below(m);
    const auto not_i = all_but(m, {i});
    const auto not_j = all_but(m, {j});
    const auto neither = all_but(m, {i, j});
    const VectorField nu = rng.poly(space, not_i, degree) * VectorField::coordinate(space, i);
    const VectorField mu = rng.poly(space, not_j, degree) * VectorField::coordinate(space, j);
    const Poly h = rng.poly(space, neither, degree - 1) * Poly::variable(space, i) + rng.poly(space, neither, degree);
    const Poly f = rng.poly(space, not_i, degree);
    const Poly g = rng.poly(space, not_j, degree);
    try {
      const BracketCheck r = compatible_bracket_check(nu, mu, h, f, g);
      s.check(r.holds, [&] { return "nu = " + nu.to_string() + ", mu = " + mu.to_string() + ", h = " + h.to_string(); });
    } catch (const ConditionsFailed& e) {
      s.check(false, [&] { return std::string("generator produced an invalid instance: ") + e.what(); });
    }
  }
  return s;
}

Suite lift_divergence_suite(FuzzSource& rng, const Scenario& scenario, const SuspensionContext& ctx, std::size_t count,
                            int degree) {
  Suite s;
  const SpacePtr& base = ctx.base_space();
  std::vector<VectorField> fields;
  for (const auto& p : scenario.pairs) {
    fields.push_back(p.alpha);
    fields.push_back(p.beta);
  }
  const auto vars = all_indices(base->size());
  for (std::size_t c = 0; c < count; ++c) {
    if (base->size() >= 2) {
      fields.push_back(rng.hamiltonian_field(base, vars, degree - 1));
    } else {
      fields.push_back(rng.nonzero_coefficient() * VectorField::coordinate(base, 0));
    }
  }
  const VolumeForm base_volume = VolumeForm::standard(base);
  for (const auto& theta : fields) {
    if (!divergence(theta, base_volume).is_zero()) {
      ++s.skipped;
      s.notes.push_back("skipped base field with nonzero divergence: " + theta.to_string());
      continue;
    }
    for (Side side : {Side::u, Side::v}) {
      const SuspensionField lifted = lift(theta, ctx, side);
      const SuspensionField checked = is_tangent(lifted.ambient, ctx);
      const Poly div = divergence_on_suspension(checked, ctx);
      s.check(checked.multiplier.is_zero() && div.is_zero(), [&] {
        return "theta = " + theta.to_string() + ", side " + to_string(side) + ", divergence " + div.to_string();
      });
    }
  }
  return s;
}

Suite wedge_expansion_suite(const Scenario& scenario, const SuspensionContext& ctx, std::span<const SurfacePoint> points) {
  Suite s;
  for (const auto& p : points) {
    if (!p.exact || (*p.exact)[0].is_zero()) {
      ++s.skipped;
      continue;
    }
    for (const auto& pair : scenario.pairs) {
      const auto [lhs, rhs] = wedge_expansion_sides(pair, ctx, p);
      s.check(lhs == rhs, [&] { return "alpha = " + pair.alpha.to_string() + ", beta = " + pair.beta.to_string(); });
    }
  }
  return s;
}

ExactVector jacobian_times(std::span<const Poly> map, std::span<const GaussianRational> p,
                           std::span<const GaussianRational> w) {
  ExactVector out(map.size());
  for (std::size_t i = 0; i < map.size(); ++i)
    for (std::size_t k = 0; k < w.size(); ++k)
      if (!w[k].is_zero()) out[i] += map[i].derivative(k).evaluate(p) * w[k];
  return out;
}

// Pullbacks of spanning_family recomputed without shear_pullback: shears through the
// Jacobian of p -> F(p, g(p)) with F the closed-form lifted flow, twists
// through the explicit formulas v alpha + uv alpha(g) du - v^2 alpha(g) dv and
// u beta + beta(f) dv + u beta(g) (u du - v dv).
Suite pullback_suite(const Scenario& scenario, const SuspensionContext& ctx, std::span<const SurfacePoint> points) {
  Suite s;
  const SpacePtr& space = ctx.space();
  const std::size_t m = space->size();
  for (const auto& p : points) {
    if (!p.exact) {
      ++s.skipped;
      continue;
    }
    // The scenario's twist function only serves points where it vanishes;
    // elsewhere the coordinate default is used.
    std::optional<SpanningFamily> family;
    for (const auto& g_twist : {scenario.g_twist, std::optional<Poly>()}) {
      try {
        family = spanning_family(scenario.pairs, ctx, p, g_twist);
        break;
      } catch (const ConditionsFailed&) {
      }
    }
    if (!family) {
      ++s.skipped;
      continue;
    }
    const ExactVector& x = *p.exact;
    const ExactVector z(x.begin() + 2, x.end());
    for (const auto& pb : family->pullbacks) {
      const BasePair& pair = scenario.pairs[pb.source];
      const bool alpha_first = pb.label.find("(alpha_u") != std::string::npos;
      const VectorField& a = alpha_first ? pair.alpha : pair.beta;
      const VectorField& b = alpha_first ? pair.beta : pair.alpha;
      ExactVector first(m), second(m);
      if (pb.kind == PullbackKind::shear) {
        const BaseField theta(a);
        if (theta.flow_kind() != FlowKind::shear_chain) {
          ++s.skipped;
          s.notes.push_back("no closed-form flow for " + a.to_string());
          continue;
        }
        const std::vector<Poly> flow = lifted_flow(theta, ctx, Side::v);
        std::vector<Poly> images;
        for (std::size_t k = 0; k < m; ++k) images.push_back(Poly::variable(space, k));
        images.push_back(pb.g);
        std::vector<Poly> shear;
        for (const auto& component : flow) shear.push_back(component.substitute(images));
        first = jacobian_times(shear, x, lift(a, ctx, Side::u).ambient.evaluate(x));
        second = jacobian_times(shear, x, lift(b, ctx, Side::v).ambient.evaluate(x));
      } else {
        const Poly g = ctx.to_base(pb.g);
        const GaussianRational u = x[0], v = x[1];
        const GaussianRational ag = a.apply(g).evaluate(z);
        const GaussianRational bg = b.apply(g).evaluate(z);
        const GaussianRational bf = b.apply(ctx.f_base()).evaluate(z);
        const ExactVector av = a.evaluate(z);
        const ExactVector bv = b.evaluate(z);
        first[0] = u * v * ag;
        first[1] = -v * v * ag;
        second[0] = u * u * bg;
        second[1] = bf - u * v * bg;
        for (std::size_t k = 0; k < av.size(); ++k) {
          first[k + 2] = v * av[k];
          second[k + 2] = u * bv[k];
        }
      }
      s.check(first == pb.first && second == pb.second, [&] { return pb.label; });
    }
  }
  return s;
}

}  // namespace

CommandResult run_verify(const Scenario& scenario, const RunOptions& options) {
  using clock = std::chrono::steady_clock;
  const SuspensionContext ctx = scenario.context();
  const std::size_t count = options.samples.value_or(200);
  const int degree = options.degree_bound.value_or(4);
  if (degree < 1) throw ContractViolation("verify needs a degree bound of at least 1");
  const std::uint64_t seed = options.seed.value_or(scenario.sampling.seed);

  SamplingSpec spec = scenario.sampling;
  spec.seed = seed;
  spec.exactness = Exactness::exact;
  spec.count = std::min<std::size_t>(count, 20);
  const SampleSet samples = sample_points(ctx, spec);

  CommandResult result;
  nlohmann::json suites = nlohmann::json::object();
  std::uint64_t suite_seed = seed;
  auto run = [&](const std::string& name, const std::function<Suite(FuzzSource&)>& body) {
    FuzzSource rng(suite_seed++);
    const auto start = clock::now();
    const Suite s = body(rng);
    result.timings[name] = std::chrono::duration<double>(clock::now() - start).count();
    suites[name] = s.to_json();
    if (s.failures > 0) result.exit_code = 1;
    result.summary.push_back(name + ": " + std::to_string(s.cases - s.failures) + "/" + std::to_string(s.cases) +
                             " passed" + (s.skipped ? ", " + std::to_string(s.skipped) + " skipped" : ""));
  };
  const SpacePtr& space = ctx.space();
  run("cartan", [&](FuzzSource& r) { return cartan_suite(r, space, count, degree); });
  run("d_squared", [&](FuzzSource& r) { return dd_suite(r, space, count, degree); });
  run("antiderivation", [&](FuzzSource& r) { return antiderivation_suite(r, space, count, degree); });
  run("jacobi", [&](FuzzSource& r) { return jacobi_suite(r, space, count, degree); });
  run("divergence_leibniz", [&](FuzzSource& r) { return leibniz_suite(r, space, count, degree); });
  run("bracket_form", [&](FuzzSource& r) { return bracket_suite(r, space, count, degree); });
  run("compatible_bracket", [&](FuzzSource& r) { return compatible_suite(r, space, count, degree); });
  run("lift_divergence", [&](FuzzSource& r) { return lift_divergence_suite(r, scenario, ctx, 20, degree); });
  run("wedge_expansion", [&](FuzzSource&) { return wedge_expansion_suite(scenario, ctx, samples.points); });
  run("pullback_formulas", [&](FuzzSource&) { return pullback_suite(scenario, ctx, samples.points); });

  result.report = {{"command", "verify"},
                   {"scenario", scenario.name},
                   {"n", scenario.n},
                   {"f", scenario.f.to_string()},
                   {"seed", seed},
                   {"cases_per_suite", count},
                   {"max_degree", degree},
                   {"sample_points", samples.points.size()},
                   {"sampling_notes", samples.notes},
                   {"suites", suites},
                   {"success", result.exit_code == 0}};
  return result;
}

}  // namespace vdpkit::cli
