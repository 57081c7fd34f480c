#include "vdpkit/suspension.hpp"

#include <cmath>
#include <random>

#include "vdpkit/errors.hpp"
#include "vdpkit/poly_span.hpp"

namespace vdpkit {

namespace {

Poly base_form_of(int n, const Poly& f) {
  if (n < 1) throw ContractViolation("base dimension must be positive");
  SpacePtr base = VarSpace::base(n);
  if (f.space() == *base) return f;
  for (std::size_t k = 0; k < f.space().size(); ++k) {
    const std::string& name = f.space().name(k);
    if ((name == "u" || name == "v") && f.depends_on(k)) throw ContractViolation("f must not involve u or v");
  }
  Poly out(base);
  for (const auto& [e, c] : f.terms()) {
    Exponents be(base->size(), 0);
    for (std::size_t k = 0; k < e.size(); ++k) {
      if (e[k] == 0) continue;
      auto idx = base->index_of(f.space().name(k));
      if (!idx) throw ContractViolation("f uses variable " + f.space().name(k) + " outside z1..z" + std::to_string(n));
      be[*idx] = e[k];
    }
    out.add_term(be, c);
  }
  return out;
}

}  // namespace

SuspensionContext::SuspensionContext(int n, const Poly& f)
    : n_(n),
      space_(VarSpace::suspension(n)),
      base_space_(VarSpace::base(n)),
      f_base_(base_form_of(n, f)),
      relation_(f_base_.embed_by_name(space_)),
      volume_(VolumeForm::standard(space_)) {
  if (f_base_.is_constant()) throw ContractViolation("f must be nonconstant");
}

SuspensionContext make_suspension(int n, const Poly& f) { return SuspensionContext(n, f); }

Poly SuspensionContext::from_base(const Poly& p) const { return p.embed_by_name(space_); }

Poly SuspensionContext::to_base(const Poly& p) const { return base_form_of(n_, p); }

SuspensionField is_tangent(const VectorField& theta, const SuspensionContext& ctx) {
  if (!(theta.space() == *ctx.space())) throw ContextMismatch("field is not over (u, v, z)");
  const auto division = ctx.relation().divide(theta.apply(ctx.defining()));
  if (!division.remainder.is_zero()) {
    throw NotTangent("field is not tangent: remainder " + division.remainder.to_string());
  }
  return {theta, division.quotient};
}

Poly divergence_on_suspension(const SuspensionField& theta, const SuspensionContext& ctx) {
  const Poly check = theta.ambient.apply(ctx.defining()) - theta.multiplier * ctx.defining();
  if (!check.is_zero()) throw NotTangent("multiplier does not match the field");
  return ctx.normal_form(divergence(theta.ambient, ctx.ambient_volume()) - theta.multiplier);
}

Poly divergence_on_suspension(const VectorField& theta, const SuspensionContext& ctx) {
  return divergence_on_suspension(is_tangent(theta, ctx), ctx);
}

SurfacePoint SurfacePoint::from_exact(ExactVector x) {
  SurfacePoint p;
  p.coords.reserve(x.size());
  for (const auto& c : x) p.coords.push_back(c.to_complex());
  p.exact = std::move(x);
  return p;
}

SurfacePoint SurfacePoint::from_numeric(std::vector<std::complex<double>> x) {
  SurfacePoint p;
  p.coords = std::move(x);
  return p;
}

bool on_surface(const SurfacePoint& p, const SuspensionContext& ctx, double tol) {
  if (p.exact) return ctx.defining().evaluate(std::span<const GaussianRational>(*p.exact)).is_zero();
  return std::abs(ctx.defining().evaluate(std::span<const std::complex<double>>(p.coords))) <= tol;
}

ExactVector defining_gradient(const SuspensionContext& ctx, std::span<const GaussianRational> p) {
  ExactVector grad;
  grad.reserve(ctx.space()->size());
  for (std::size_t k = 0; k < ctx.space()->size(); ++k) grad.push_back(ctx.defining().derivative(k).evaluate(p));
  return grad;
}

std::vector<ExactVector> tangent_basis(const SuspensionContext& ctx, const SurfacePoint& p) {
  if (!p.exact) throw ContractViolation("exact tangent basis needs an exact point");
  ExactVector grad = defining_gradient(ctx, *p.exact);
  bool all_zero = true;
  for (const auto& g : grad) all_zero = all_zero && g.is_zero();
  if (all_zero) throw SingularPoint("d(uv - f) vanishes at the point");
  ExactMatrix row(0, grad.size());
  row.append_row(grad);
  return nullspace(row);
}

namespace {

class GridDraw {
 public:
  GridDraw(const SamplingSpec& spec) : spec_(spec), rng_(spec.seed) {
    if (spec.region_hi < spec.region_lo) throw ContractViolation("empty sampling region");
    if (spec.grid < 1) throw ContractViolation("grid must be positive");
    const Rational span = (spec.region_hi - spec.region_lo) * spec.grid;
    mpz_class cells = span.get_num() / span.get_den();
    cells_ = cells.get_ui();
  }

  GaussianRational exact_value() {
    const std::uint64_t k = rng_() % (cells_ + 1);
    return GaussianRational(spec_.region_lo + Rational(static_cast<long>(k), spec_.grid));
  }

  double float_value() {
    const double unit = static_cast<double>(rng_() >> 11) * 0x1p-53;
    const double lo = spec_.region_lo.get_d();
    const double hi = spec_.region_hi.get_d();
    return lo + (hi - lo) * unit;
  }

  std::complex<double> value(ExactVector* exact_out) {
    if (spec_.exactness == Exactness::exact) {
      GaussianRational x = exact_value();
      exact_out->push_back(x);
      return x.to_complex();
    }
    return float_value();
  }

 private:
  const SamplingSpec& spec_;
  std::mt19937_64 rng_;
  std::uint64_t cells_ = 0;
};

constexpr int kMaxDraws = 1000;

}  // namespace

SampleSet sample_points(const SuspensionContext& ctx, const SamplingSpec& spec) {
  GridDraw draw(spec);
  const bool exact = spec.exactness == Exactness::exact;
  SampleSet out;

  auto nonzero = [&](ExactVector* ex) {
    for (int attempt = 0; attempt < kMaxDraws; ++attempt) {
      ExactVector tmp;
      const std::complex<double> x = draw.value(&tmp);
      if (exact ? !tmp.front().is_zero() : std::abs(x) > 1e-3) {
        if (exact) ex->push_back(tmp.front());
        return x;
      }
    }
    throw ContractViolation("sampling region has no nonzero values");
  };

  for (std::size_t s = 0; s < spec.count; ++s) {
    ExactVector ex_u, ex_z;
    const std::complex<double> u = nonzero(&ex_u);
    std::vector<std::complex<double>> z;
    for (int j = 0; j < ctx.n(); ++j) z.push_back(draw.value(&ex_z));
    if (exact) {
      const GaussianRational fz = ctx.f_base().evaluate(std::span<const GaussianRational>(ex_z));
      ExactVector pt{ex_u.front(), fz / ex_u.front()};
      pt.insert(pt.end(), ex_z.begin(), ex_z.end());
      out.points.push_back(SurfacePoint::from_exact(std::move(pt)));
    } else {
      const std::complex<double> fz = ctx.f_base().evaluate(std::span<const std::complex<double>>(z));
      std::vector<std::complex<double>> pt{u, fz / u};
      pt.insert(pt.end(), z.begin(), z.end());
      out.points.push_back(SurfacePoint::from_numeric(std::move(pt)));
    }
  }

  if (spec.u_zero_count == 0) return out;

  std::optional<int> solve_for = spec.u_zero_variable;
  if (!solve_for) {
    for (int j = 1; j <= ctx.n() && !solve_for; ++j) {
      if (ctx.f_base().degree_in(static_cast<std::size_t>(j - 1)) == 1) solve_for = j;
    }
  }
  if (!solve_for) {
    out.notes.push_back("u = 0 branch skipped: f has no variable of degree one");
    return out;
  }
  if (*solve_for < 1 || *solve_for > ctx.n() || ctx.f_base().degree_in(static_cast<std::size_t>(*solve_for - 1)) != 1) {
    throw ContractViolation("u = 0 branch: f is not of degree one in z" + std::to_string(*solve_for));
  }
  const std::size_t k = static_cast<std::size_t>(*solve_for - 1);
  const Poly slope = ctx.f_base().derivative(k);
  std::vector<Poly> zero_k;
  for (std::size_t j = 0; j < ctx.f_base().space().size(); ++j) {
    zero_k.push_back(j == k ? Poly(ctx.base_space()) : Poly::variable(ctx.base_space(), j));
  }
  const Poly offset = ctx.f_base().substitute(zero_k);

  std::size_t produced = 0;
  for (int attempt = 0; attempt < kMaxDraws && produced < spec.u_zero_count; ++attempt) {
    ExactVector ex_v, ex_z;
    const std::complex<double> v = nonzero(&ex_v);
    std::vector<std::complex<double>> z;
    for (int j = 0; j < ctx.n(); ++j) z.push_back(draw.value(&ex_z));
    if (exact) {
      const GaussianRational a = slope.evaluate(std::span<const GaussianRational>(ex_z));
      if (a.is_zero()) continue;
      ex_z[k] = -offset.evaluate(std::span<const GaussianRational>(ex_z)) / a;
      ExactVector pt{GaussianRational(0), ex_v.front()};
      pt.insert(pt.end(), ex_z.begin(), ex_z.end());
      out.points.push_back(SurfacePoint::from_exact(std::move(pt)));
    } else {
      const std::complex<double> a = slope.evaluate(std::span<const std::complex<double>>(z));
      if (std::abs(a) < 1e-3) continue;
      z[k] = -offset.evaluate(std::span<const std::complex<double>>(z)) / a;
      std::vector<std::complex<double>> pt{0.0, v};
      pt.insert(pt.end(), z.begin(), z.end());
      out.points.push_back(SurfacePoint::from_numeric(std::move(pt)));
    }
    ++produced;
  }
  if (produced < spec.u_zero_count) out.notes.push_back("u = 0 branch: fewer points than requested");
  return out;
}

std::vector<std::string> smoothness_failures(const SuspensionContext& ctx, const std::vector<SurfacePoint>& points) {
  std::vector<std::string> failures;
  const std::size_t n = static_cast<std::size_t>(ctx.n());
  for (std::size_t s = 0; s < points.size(); ++s) {
    const SurfacePoint& p = points[s];
    if (p.exact) {
      std::span<const GaussianRational> z(p.exact->data() + 2, n);
      if (!ctx.f_base().evaluate(z).is_zero()) continue;
      bool any = false;
      for (std::size_t j = 0; j < n && !any; ++j) any = !ctx.f_base().derivative(j).evaluate(z).is_zero();
      if (!any) failures.push_back("sample " + std::to_string(s) + ": f and df vanish together");
    } else {
      std::span<const std::complex<double>> z(p.coords.data() + 2, n);
      if (std::abs(ctx.f_base().evaluate(z)) > 1e-9) continue;
      double grad = 0;
      for (std::size_t j = 0; j < n; ++j) grad += std::abs(ctx.f_base().derivative(j).evaluate(z));
      if (grad < 1e-9) failures.push_back("sample " + std::to_string(s) + ": f and df vanish together");
    }
  }
  return failures;
}

std::optional<std::vector<Poly>> smoothness_certificate(const SuspensionContext& ctx, int degree_bound) {
  const SpacePtr& base = ctx.base_space();
  std::vector<Poly> generators{ctx.f_base()};
  for (std::size_t j = 0; j < base->size(); ++j) generators.push_back(ctx.f_base().derivative(j));

  std::vector<std::size_t> vars(base->size());
  for (std::size_t j = 0; j < vars.size(); ++j) vars[j] = j;
  const auto monos = monomials_up_to(base->size(), vars, degree_bound);

  std::vector<Poly> columns;
  for (const auto& g : generators) {
    for (const auto& m : monos) columns.push_back(Poly::monomial(base, m) * g);
  }
  const Poly one = Poly::constant(base, 1);
  const auto sol = solve_in_span(columns, std::span<const Poly>(&one, 1)).front();
  if (!sol) return std::nullopt;

  std::vector<Poly> multipliers;
  for (std::size_t g = 0; g < generators.size(); ++g) {
    Poly c(base);
    for (std::size_t m = 0; m < monos.size(); ++m) c.add_term(monos[m], (*sol)[g * monos.size() + m]);
    multipliers.push_back(std::move(c));
  }
  return multipliers;
}

}  // namespace vdpkit
