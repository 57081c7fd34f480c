#include "vdpkit/lifting.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "vdpkit/errors.hpp"

namespace vdpkit {

namespace {

// Images of the base variables under their flow, in topological order of the
// dependency graph, or nothing if the field is not a shear chain.
std::optional<std::vector<Poly>> shear_chain_flow(const VectorField& x) {
  const SpacePtr time_space = VarSpace::with_time(x.space());
  const std::size_t n = x.dimension();
  const std::size_t t = n;
  std::vector<Poly> images;
  for (std::size_t j = 0; j < n; ++j) images.push_back(Poly::variable(time_space, j));
  std::vector<bool> solved(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j].is_zero()) solved[j] = true;
    if (x[j].depends_on(j)) return std::nullopt;
  }
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (solved[j]) continue;
      bool ready = true;
      for (std::size_t k = 0; k < n && ready; ++k) ready = !x[j].depends_on(k) || solved[k];
      if (!ready) continue;
      // z_j(t) = z_j + int_0^t c_j(z(s)) ds, the antiderivative vanishing at t = 0.
      const Poly along = x[j].substitute(images);
      images[j] = Poly::variable(time_space, j) + along.antiderivative(t);
      solved[j] = true;
      progress = true;
    }
  }
  if (std::find(solved.begin(), solved.end(), false) != solved.end()) return std::nullopt;
  return images;
}

// P(z, t) over (z.., t) rewritten as P(z, t * s) over (u, v, z.., t) with s = u or v.
Poly rescale_time(const Poly& p, const SpacePtr& ambient_time, std::size_t scale_var) {
  const std::size_t n = p.space().size() - 1;
  std::vector<Poly> images;
  for (std::size_t j = 0; j < n; ++j) images.push_back(Poly::variable(ambient_time, j + 2));
  images.push_back(Poly::variable(ambient_time, n + 2) * Poly::variable(ambient_time, scale_var));
  return p.substitute(images);
}

std::vector<std::complex<double>> field_at(const VectorField& x, std::span<const std::complex<double>> p) {
  return x.evaluate(p);
}

double max_abs(std::span<const std::complex<double>> v) {
  double m = 0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

std::vector<std::complex<double>> rk4_step(const VectorField& x, std::span<const std::complex<double>> y, double h) {
  const std::size_t m = y.size();
  std::vector<std::complex<double>> tmp(m);
  const auto k1 = field_at(x, y);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
  const auto k2 = field_at(x, tmp);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
  const auto k3 = field_at(x, tmp);
  for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
  const auto k4 = field_at(x, tmp);
  std::vector<std::complex<double>> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

BaseField::BaseField(VectorField field) : field_(std::move(field)) {
  if (auto flow = shear_chain_flow(field_)) {
    kind_ = FlowKind::shear_chain;
    flow_ = std::move(*flow);
  }
}

const std::vector<Poly>& BaseField::flow() const {
  if (kind_ != FlowKind::shear_chain) throw ContractViolation("no closed-form flow for a generic field");
  return flow_;
}

const char* to_string(Side side) { return side == Side::u ? "u" : "v"; }

VectorField extend_trivially(const VectorField& base_field, const SuspensionContext& ctx) {
  if (!(base_field.space() == *ctx.base_space())) throw ContextMismatch("base field is not over (z1..zn)");
  VectorField out(ctx.space());
  for (int j = 1; j <= ctx.n(); ++j) {
    out.set(ctx.z_index(j), ctx.from_base(base_field[static_cast<std::size_t>(j - 1)]));
  }
  return out;
}

SuspensionField lift(const VectorField& base_field, const SuspensionContext& ctx, Side side) {
  const VectorField ext = extend_trivially(base_field, ctx);
  const Poly theta_f = ext.apply(ctx.f());
  const std::size_t scale = side == Side::u ? 1 : 0;
  VectorField out = Poly::variable(ctx.space(), scale) * ext;
  out.set(side == Side::u ? 0 : 1, theta_f);
  return {out, Poly(ctx.space())};
}

FlowRemainder flow_remainder(const BaseField& theta, const Poly& f_base) {
  const std::vector<Poly>& flow = theta.flow();
  const SpacePtr& time_space = flow.front().space_ptr();
  const Poly f_t = f_base.embed_by_name(time_space);
  const Poly t = Poly::variable(time_space, time_space->size() - 1);
  auto g = divide_exact(f_base.substitute(flow) - f_t, t);
  if (!g) throw ContractViolation("flow does not start at the identity");
  return {*g};
}

std::vector<Poly> lifted_flow(const BaseField& theta, const SuspensionContext& ctx, Side side) {
  const SpacePtr time_space = VarSpace::with_time(*ctx.space());
  const std::size_t t_index = time_space->size() - 1;
  const std::size_t scale = side == Side::u ? 1 : 0;
  const std::size_t moved = side == Side::u ? 0 : 1;
  const Poly t = Poly::variable(time_space, t_index);
  const Poly g = rescale_time(flow_remainder(theta, ctx.f_base()).g, time_space, scale);

  std::vector<Poly> out;
  out.push_back(Poly::variable(time_space, 0));
  out.push_back(Poly::variable(time_space, 1));
  out[moved] += t * g;
  for (const auto& phi : theta.flow()) out.push_back(rescale_time(phi, time_space, scale));
  return out;
}

ExactVector apply_flow(std::span<const Poly> flow, std::span<const GaussianRational> point, const GaussianRational& t) {
  ExactVector args(point.begin(), point.end());
  args.push_back(t);
  ExactVector out;
  for (const auto& p : flow) out.push_back(p.evaluate(args));
  return out;
}

std::vector<std::complex<double>> apply_flow(std::span<const Poly> flow, std::span<const std::complex<double>> point,
                                             std::complex<double> t) {
  std::vector<std::complex<double>> args(point.begin(), point.end());
  args.push_back(t);
  std::vector<std::complex<double>> out;
  for (const auto& p : flow) out.push_back(p.evaluate(args));
  return out;
}

std::vector<std::complex<double>> rk4_flow(const VectorField& field, std::span<const std::complex<double>> start,
                                           double t, int steps) {
  if (steps < 1) throw ContractViolation("rk4 needs at least one step");
  std::vector<std::complex<double>> y(start.begin(), start.end());
  const double h = t / steps;
  for (int s = 0; s < steps; ++s) y = rk4_step(field, y, h);
  return y;
}

IntegrationResult integrate_flow(const VectorField& field, std::span<const std::complex<double>> start, double t,
                                 double tol, double max_norm) {
  IntegrationResult out;
  out.end.assign(start.begin(), start.end());
  const double direction = t < 0 ? -1.0 : 1.0;
  const double total = std::abs(t);
  double h = std::min(0.01, total);
  double s = 0;
  while (s < total) {
    h = std::min(h, total - s);
    const auto full = rk4_step(field, out.end, direction * h);
    const auto half = rk4_step(field, rk4_step(field, out.end, direction * h / 2), direction * h / 2);
    double err = 0;
    for (std::size_t i = 0; i < full.size(); ++i) err = std::max(err, std::abs(full[i] - half[i]));
    const double scale = 1.0 + max_abs(half);
    if (err <= tol * scale || h < 1e-12) {
      out.end = half;
      s += h;
      if (!std::isfinite(max_abs(out.end)) || max_abs(out.end) > max_norm) {
        out.completed = false;
        out.reached = direction * s;
        return out;
      }
      if (err < tol * scale / 64) h *= 2;
    } else {
      h /= 2;
    }
  }
  out.reached = t;
  return out;
}

std::vector<std::complex<double>> lifted_flow_at(const BaseField& theta, const SuspensionContext& ctx, Side side,
                                                 std::span<const std::complex<double>> point, double t) {
  if (theta.flow_kind() == FlowKind::shear_chain) return apply_flow(lifted_flow(theta, ctx, side), point, t);
  const SuspensionField lifted = lift(theta.field(), ctx, side);
  IntegrationResult r = integrate_flow(lifted.ambient, point, t);
  if (!r.completed) {
    throw ContractViolation("numeric flow blows up near time " + std::to_string(r.reached));
  }
  return r.end;
}

std::complex<double> chart_volume_ratio(std::span<const Poly> flow, const SuspensionContext& ctx,
                                        std::span<const std::complex<double>> point, double t) {
  const std::size_t m = ctx.space()->size();
  const std::size_t n = m - 2;
  if (flow.size() != m) throw ContractViolation("flow has the wrong number of components");
  std::vector<std::complex<double>> args(point.begin(), point.end());
  args.push_back(t);

  // Chart index c (0 for u, 1 for v) whose coordinate stays away from zero
  // at the point and its image.
  const std::complex<double> image[2] = {flow[0].evaluate(args), flow[1].evaluate(args)};
  const double reach_u = std::min(std::abs(point[0]), std::abs(image[0]));
  const double reach_v = std::min(std::abs(point[1]), std::abs(image[1]));
  const std::size_t c = reach_u >= reach_v ? 0 : 1;
  const std::size_t other = 1 - c;
  const std::complex<double> w = point[c];
  if (std::max(reach_u, reach_v) < 1e-12) throw ContractViolation("no chart contains the point and its image");

  Eigen::MatrixXcd jac(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) jac(i, k) = flow[i].derivative(k).evaluate(args);
  }
  // Derivative of the chart inverse (w, z) -> (w, f(z)/w, z), in the order of
  // the chart coordinate.
  std::span<const std::complex<double>> z(point.data() + 2, n);
  Eigen::MatrixXcd embed = Eigen::MatrixXcd::Zero(m, n + 1);
  embed(static_cast<Eigen::Index>(c), 0) = 1.0;
  embed(static_cast<Eigen::Index>(other), 0) = -ctx.f_base().evaluate(z) / (w * w);
  for (std::size_t j = 0; j < n; ++j) {
    embed(static_cast<Eigen::Index>(other), static_cast<Eigen::Index>(j + 1)) =
        ctx.f_base().derivative(j).evaluate(z) / w;
    embed(static_cast<Eigen::Index>(j + 2), static_cast<Eigen::Index>(j + 1)) = 1.0;
  }
  const Eigen::MatrixXcd full = jac * embed;
  Eigen::MatrixXcd chart(n + 1, n + 1);
  chart.row(0) = full.row(static_cast<Eigen::Index>(c));
  for (std::size_t j = 0; j < n; ++j) chart.row(static_cast<Eigen::Index>(j + 1)) = full.row(static_cast<Eigen::Index>(j + 2));
  return chart.determinant() * w / image[c];
}

ExactVector shear_pullback(const VectorField& mu, const VectorField& theta, const Poly& g,
                           const SuspensionContext& ctx, const SurfacePoint& p) {
  if (!p.exact) throw ContractViolation("shear pullback needs an exact point");
  const std::span<const GaussianRational> x(*p.exact);
  if (!g.evaluate(x).is_zero()) throw ContractViolation("g does not vanish at the point");
  if (!ctx.normal_form(theta.apply(g)).is_zero()) throw ContractViolation("g is not in the kernel of the field");
  ExactVector out = mu.evaluate(x);
  const GaussianRational mu_g = mu.apply(g).evaluate(x);
  if (!mu_g.is_zero()) {
    const ExactVector th = theta.evaluate(x);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += mu_g * th[k];
  }
  return out;
}

std::vector<Poly> lift_ideal(std::span<const Poly> ideal, const SuspensionContext& ctx, int bound) {
  std::vector<Poly> out;
  const Poly u = Poly::variable(ctx.space(), 0);
  const Poly v = Poly::variable(ctx.space(), 1);
  for (const auto& h : ideal) {
    const Poly lifted = h.space() == *ctx.space() ? h : ctx.from_base(h);
    for (int total = 0; total <= bound; ++total) {
      for (int i = total; i >= 0; --i) {
        Poly p = ctx.normal_form(lifted * u.pow(static_cast<unsigned>(i)) * v.pow(static_cast<unsigned>(total - i)));
        if (!p.is_zero()) out.push_back(std::move(p));
      }
    }
  }
  return out;
}

std::vector<LiftedPair> lift_pair(const BasePair& pair, std::size_t source, const SuspensionContext& ctx,
                                  int lift_bound) {
  const Poly u = Poly::variable(ctx.space(), 0);
  const Poly v = Poly::variable(ctx.space(), 1);
  auto lifted_kernel = [&](const std::vector<Poly>& base, const Poly& extra) {
    std::vector<Poly> out;
    for (const auto& k : base) out.push_back(ctx.from_base(k));
    out.push_back(extra);
    return out;
  };
  const std::vector<Poly> ideal = lift_ideal(pair.ideal, ctx, lift_bound);
  std::vector<LiftedPair> out;
  out.push_back({"(alpha_u, beta_v)", source, lift(pair.alpha, ctx, Side::u), lift(pair.beta, ctx, Side::v),
                 lifted_kernel(pair.kernel_alpha, v), lifted_kernel(pair.kernel_beta, u), ideal});
  out.push_back({"(alpha_v, beta_u)", source, lift(pair.alpha, ctx, Side::v), lift(pair.beta, ctx, Side::u),
                 lifted_kernel(pair.kernel_alpha, u), lifted_kernel(pair.kernel_beta, v), ideal});
  return out;
}

namespace {

ExactVector base_part(const SurfacePoint& p) { return {p.exact->begin() + 2, p.exact->end()}; }

bool all_zero(std::span<const GaussianRational> v) {
  return std::all_of(v.begin(), v.end(), [](const GaussianRational& c) { return c.is_zero(); });
}

bool ideal_nonvanishing(const std::vector<Poly>& ideal, std::span<const GaussianRational> x) {
  return std::any_of(ideal.begin(), ideal.end(), [&](const Poly& h) { return !h.evaluate(x).is_zero(); });
}

std::vector<ExactVector> identity_basis(std::size_t n) {
  std::vector<ExactVector> basis;
  for (std::size_t k = 0; k < n; ++k) {
    ExactVector e(n);
    e[k] = 1;
    basis.push_back(std::move(e));
  }
  return basis;
}

}  // namespace

std::vector<ExactVector> wedge_coordinates(std::span<const ExactVector> basis,
                                           std::span<const std::pair<ExactVector, ExactVector>> wedges) {
  if (basis.empty() || wedges.empty()) return {};
  const std::size_t m = basis.front().size();
  ExactMatrix b(m, basis.size());
  for (std::size_t c = 0; c < basis.size(); ++c) {
    for (std::size_t r = 0; r < m; ++r) b(r, c) = basis[c][r];
  }
  std::vector<ExactVector> rhs;
  for (const auto& [x, y] : wedges) {
    rhs.push_back(x);
    rhs.push_back(y);
  }
  const auto coords = solve_many(b, rhs);
  std::vector<ExactVector> out;
  for (std::size_t k = 0; k < wedges.size(); ++k) {
    if (!coords[2 * k] || !coords[2 * k + 1]) throw NotTangent("wedge factor outside the tangent space");
    out.push_back(wedge2(*coords[2 * k], *coords[2 * k + 1]));
  }
  return out;
}

std::size_t wedge_rank(std::span<const ExactVector> basis, std::span<const std::pair<ExactVector, ExactVector>> wedges) {
  const auto rows = wedge_coordinates(basis, wedges);
  if (rows.empty()) return 0;
  return exact_rank(ExactMatrix::from_rows(rows, rows.front().size()));
}

std::vector<std::string> basepoint_failures(std::span<const BasePair> pairs, const SuspensionContext& ctx,
                                            const SurfacePoint& x0, const std::optional<Poly>& g_twist) {
  std::vector<std::string> failures;
  if (!x0.exact) return {"basepoint is not exact"};
  const ExactVector& p = *x0.exact;
  if (p.size() != ctx.space()->size()) return {"basepoint has the wrong dimension"};
  if (!on_surface(x0, ctx)) failures.push_back("basepoint is not on uv = f");
  if (p[0].is_zero()) failures.push_back("u0 = 0");
  if (p[1].is_zero()) failures.push_back("v0 = 0");
  const ExactVector x = base_part(x0);
  ExactVector df;
  for (std::size_t j = 0; j < x.size(); ++j) df.push_back(ctx.f_base().derivative(j).evaluate(x));
  if (all_zero(df)) failures.push_back("df(x0) = 0");
  std::vector<std::pair<ExactVector, ExactVector>> base_wedges;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (!ideal_nonvanishing(pairs[k].ideal, x)) {
      failures.push_back("pair " + std::to_string(k) + ": ideal vanishes at x0");
      continue;
    }
    base_wedges.emplace_back(pairs[k].alpha.evaluate(x), pairs[k].beta.evaluate(x));
  }
  const std::size_t n = x.size();
  const auto basis = identity_basis(n);
  if (wedge_rank(basis, base_wedges) != binomial(n, 2)) failures.push_back("base pairs do not span at x0");
  if (g_twist && !ctx.from_base(ctx.to_base(*g_twist)).evaluate(std::span<const GaussianRational>(p)).is_zero()) {
    failures.push_back("g_twist(x0) != 0");
  }
  return failures;
}

SpanningFamily spanning_family(std::span<const BasePair> pairs, const SuspensionContext& ctx, const SurfacePoint& x0,
                   const std::optional<Poly>& g_twist) {
  auto failures = basepoint_failures(pairs, ctx, x0, g_twist);
  if (!failures.empty()) throw ConditionsFailed("basepoint rejected", std::move(failures));
  const ExactVector& p = *x0.exact;
  const ExactVector x = base_part(x0);
  const std::span<const GaussianRational> ps(p);

  SpanningFamily out;
  out.full_rank = binomial(static_cast<std::size_t>(ctx.n()) + 1, 2);
  std::vector<std::pair<ExactVector, ExactVector>> wedges;

  VectorField twist(ctx.space());
  twist.set(0, Poly::variable(ctx.space(), 0));
  twist.set(1, -Poly::variable(ctx.space(), 1));
  const Poly u_shift = Poly::variable(ctx.space(), 0) - Poly::constant(ctx.space(), p[0]);

  for (std::size_t s = 0; s < pairs.size(); ++s) {
    for (auto& lp : lift_pair(pairs[s], s, ctx)) {
      wedges.emplace_back(lp.first.ambient.evaluate(ps), lp.second.ambient.evaluate(ps));
      out.lifted.push_back(std::move(lp));
    }
    for (int orient = 0; orient < 2; ++orient) {
      const VectorField& a = orient == 0 ? pairs[s].alpha : pairs[s].beta;
      const VectorField& b = orient == 0 ? pairs[s].beta : pairs[s].alpha;
      const std::string name = orient == 0 ? "alpha" : "beta";
      const std::string other = orient == 0 ? "beta" : "alpha";
      const VectorField a_u = lift(a, ctx, Side::u).ambient;
      const VectorField b_v = lift(b, ctx, Side::v).ambient;
      const GaussianRational af = a.apply(ctx.f_base()).evaluate(x);
      if (!af.is_zero()) {
        const Poly& g = u_shift;
        const VectorField a_v = lift(a, ctx, Side::v).ambient;
        out.pullbacks.push_back({"shear by " + name + "_v: (" + name + "_u, " + other + "_v)", s,
                                 PullbackKind::shear, g, shear_pullback(a_u, a_v, g, ctx, x0),
                                 shear_pullback(b_v, a_v, g, ctx, x0)});
      } else {
        const ExactVector ax = a.evaluate(x);
        if (all_zero(ax)) continue;
        std::optional<Poly> g;
        if (g_twist) {
          const Poly gb = ctx.to_base(*g_twist);
          if (!a.apply(gb).evaluate(x).is_zero()) g = ctx.from_base(gb);
        }
        if (!g) {
          const std::size_t j = static_cast<std::size_t>(
              std::find_if(ax.begin(), ax.end(), [](const GaussianRational& c) { return !c.is_zero(); }) - ax.begin());
          g = ctx.from_base(Poly::variable(ctx.base_space(), j) - Poly::constant(ctx.base_space(), x[j]));
        }
        out.pullbacks.push_back({"twist by g = " + g->to_string() + ": (" + name + "_u, " + other + "_v)", s,
                                 PullbackKind::twist, *g, shear_pullback(a_u, twist, *g, ctx, x0),
                                 shear_pullback(b_v, twist, *g, ctx, x0)});
      }
      wedges.emplace_back(out.pullbacks.back().first, out.pullbacks.back().second);
    }
  }
  out.rank = wedge_rank(tangent_basis(ctx, x0), wedges);
  return out;
}

ExactVector drop_v(std::span<const GaussianRational> w) {
  ExactVector out{w[0]};
  out.insert(out.end(), w.begin() + 2, w.end());
  return out;
}

std::pair<ExactVector, ExactVector> wedge_expansion_sides(const BasePair& pair, const SuspensionContext& ctx,
                                                  const SurfacePoint& p) {
  if (!p.exact) throw ContractViolation("exact point required");
  const std::span<const GaussianRational> ps(*p.exact);
  const ExactVector x = base_part(p);
  const ExactVector lhs = wedge2(drop_v(lift(pair.alpha, ctx, Side::u).ambient.evaluate(ps)),
                                 drop_v(lift(pair.beta, ctx, Side::v).ambient.evaluate(ps)));
  auto in_chart = [&](const ExactVector& base) {
    ExactVector out{GaussianRational(0)};
    out.insert(out.end(), base.begin(), base.end());
    return out;
  };
  const ExactVector a = in_chart(pair.alpha.evaluate(x));
  const ExactVector b = in_chart(pair.beta.evaluate(x));
  ExactVector du(a.size());
  du[0] = 1;
  const GaussianRational u = ps[0];
  const GaussianRational uv = ps[0] * ps[1];
  const GaussianRational af = pair.alpha.apply(ctx.f_base()).evaluate(x);
  const ExactVector ab = wedge2(a, b);
  const ExactVector bdu = wedge2(b, du);
  ExactVector rhs(ab.size());
  for (std::size_t k = 0; k < ab.size(); ++k) rhs[k] = uv * ab[k] - u * af * bdu[k];
  return {lhs, rhs};
}

}  // namespace vdpkit
