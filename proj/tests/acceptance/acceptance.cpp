// One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "oracles.hpp"
#include "vdpkit/approx.hpp"
#include "vdpkit/criterion.hpp"
#include "vdpkit/fuzz.hpp"
#include "vdpkit/lifting.hpp"
#include "vdpkit/scenario.hpp"

using namespace vdpkit;
using oracle::F;
using oracle::P;

namespace {

const std::filesystem::path kScenarios = VDPKIT_SCENARIO_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& what) {
    if (!condition && pass) detail << "first failure: " << what << "; ";
    pass = pass && condition;
  }
};

std::vector<std::filesystem::path> bundled() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(kScenarios))
    if (e.path().extension() == ".scn") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

BasePair coordinate_pair(const SpacePtr& b) {
  return BasePair{VectorField::coordinate(b, 0), VectorField::coordinate(b, 1), {P("z2", b)}, {P("z1", b)}, {P("1", b)}};
}

// Sum of partial derivatives, coefficient by coefficient.
Poly coordinate_divergence(const VectorField& x) {
  Poly sum(x.space_ptr());
  for (std::size_t k = 0; k < x.space().size(); ++k) sum += x[k].derivative(k);
  return sum;
}

Outcome identity_suite() {
  Outcome o;
  const auto start = Clock::now();
  const auto result = cli::run_verify(load_scenario(kScenarios / "b_plane_linear.scn"), {});
  const double elapsed = seconds_since(start);
  for (const char* name : {"cartan", "d_squared", "antiderivation", "jacobi", "divergence_leibniz", "bracket_form"}) {
    const auto& suite = result.report["suites"][name];
    const std::size_t cases = suite["cases"], failures = suite["failures"];
    o.require(cases >= 200, std::string(name) + " ran " + std::to_string(cases) + " cases");
    o.require(failures == 0, std::string(name) + " has " + std::to_string(failures) + " failures");
    o.detail << name << " " << cases - failures << "/" << cases << ", ";
  }
  o.require(elapsed < 60, "runtime over 60 s");
  o.detail << elapsed << " s";
  return o;
}

Outcome lift_divergence() {
  Outcome o;
  FuzzSource rng(2024);
  const auto b = VarSpace::base(2);
  const std::vector<std::size_t> vars{0, 1};
  std::size_t checked = 0;
  for (const char* f : {"z1", "z1^2", "z1*z2 - 1"}) {
    const auto ctx = make_suspension(2, P(f, b));
    for (int k = 0; k < 20; ++k) {
      VectorField theta = rng.hamiltonian_field(b, vars, 3);
      while (theta.is_zero()) theta = rng.hamiltonian_field(b, vars, 3);
      o.require(coordinate_divergence(theta).is_zero(), "base field not divergence-free");
      for (Side side : {Side::u, Side::v}) {
        const Poly div = divergence_on_suspension(lift(theta, ctx, side), ctx);
        o.require(div.is_zero(), std::string("nonzero divergence over f = ") + f);
        ++checked;
      }
    }
  }
  o.detail << checked << " lifts exactly divergence-free";
  return o;
}

Outcome flow_audit_closed_form() {
  Outcome o;
  std::mt19937_64 rng(2025);
  double worst_flow = 0, worst_volume = 0;
  std::size_t volume_checks = 0;
  for (const char* f : {"z1", "z1*z2 - 1"}) {
    const auto ctx = make_suspension(2, P(f, VarSpace::base(2)));
    for (const char* field : {"[1, 0]", "[z2^2, 0]", "[z2, 1]"}) {
      const BaseField theta(F(field, ctx.base_space()));
      for (Side side : {Side::u, Side::v}) {
        const auto flow = lifted_flow(theta, ctx, side);
        const VectorField lifted = lift(theta.field(), ctx, side).ambient;
        for (int k = 0; k < 20; ++k) {
          const auto start = oracle::to_complex(oracle::surface_point(ctx, rng));
          for (double t : {0.25, 0.5, 0.75, 1.0}) {
            const auto numeric = oracle::integrate_variational(lifted, Poly(ctx.space()), start, t, 500);
            const auto closed = apply_flow(flow, start, t);
            double scale = 1;
            for (const auto& c : closed) scale = std::max(scale, std::abs(c));
            const double deviation = oracle::max_abs_diff(numeric.end, closed) / scale;
            worst_flow = std::max(worst_flow, deviation);
            if (std::abs(closed[0]) > 1e-3) {
              const double det = std::abs(oracle::chart_ratio_u(ctx, start, numeric.end, numeric.jacobian) - 1.0);
              const double lib = std::abs(chart_volume_ratio(flow, ctx, start, t) - 1.0);
              worst_volume = std::max({worst_volume, det, lib});
              ++volume_checks;
            }
          }
        }
      }
    }
  }
  o.require(worst_flow <= 1e-9, "flow deviation above 1e-9");
  o.require(worst_volume <= 1e-8, "volume ratio off by more than 1e-8");
  o.detail << "max flow deviation " << worst_flow << ", max |det - 1| " << worst_volume << " over " << volume_checks
           << " checks";
  return o;
}

Outcome kernels_and_certificate() {
  Outcome o;
  const auto ctx = make_suspension(2, P("z1", VarSpace::base(2)));
  const auto lifted = lift_pair(coordinate_pair(ctx.base_space()), 0, ctx);
  std::size_t memberships = 0;
  for (const auto& lp : lifted) {
    for (const auto& k : lp.kernel_first) {
      o.require(ctx.normal_form(lp.first.ambient.apply(k)).is_zero(), lp.label + " first kernel");
      ++memberships;
    }
    for (const auto& k : lp.kernel_second) {
      o.require(ctx.normal_form(lp.second.ambient.apply(k)).is_zero(), lp.label + " second kernel");
      ++memberships;
    }
    const KernelFamily first = verify_kernel(lp.first.ambient, lp.kernel_first, &ctx.relation());
    const KernelFamily second = verify_kernel(lp.second.ambient, lp.kernel_second, &ctx.relation());
    const auto cert = semicompat_certificate(first, second, lp.ideal, 3, std::nullopt, &ctx.relation());
    o.require(cert.success(), lp.label + " certificate");
    o.require(reverify(cert, &ctx.relation()), lp.label + " reverification");
    o.detail << lp.label << " " << cert.targets.size() << " targets reached, ";
  }
  o.detail << memberships << " kernel memberships exact";
  return o;
}

Outcome spanning_family_check() {
  Outcome o;
  const auto ctx = make_suspension(2, P("z1", VarSpace::base(2)));
  const BasePair pair = coordinate_pair(ctx.base_space());
  const std::vector<BasePair> pairs{pair};
  const auto x0 = SurfacePoint::from_exact({1, 1, 1, 0});
  o.require(basepoint_failures(pairs, ctx, x0, P("z2", ctx.base_space())).empty(), "basepoint conditions");
  const SpanningFamily family = spanning_family(pairs, ctx, x0, P("z2", ctx.base_space()));
  o.require(family.rank == 3 && family.full_rank == 3, "rank " + std::to_string(family.rank));

  std::mt19937_64 rng(2026);
  std::size_t identities = 0;
  for (int k = 0; k < 40; ++k) {
    const ExactVector x = oracle::surface_point(ctx, rng);
    if (x[1].is_zero()) continue;
    const auto p = SurfacePoint::from_exact(x);
    const auto [lhs, rhs] = wedge_expansion_sides(pair, ctx, p);
    o.require(lhs == rhs, "wedge expansion");
    ++identities;
    for (const auto& pb : spanning_family(pairs, ctx, p).pullbacks) {
      if (pb.kind != PullbackKind::twist) continue;
      // phi*(beta_u) = v beta + uv beta(g) du - v^2 beta(g) dv
      const Poly g = ctx.to_base(pb.g);
      const std::span<const GaussianRational> z(x.data() + 2, 2);
      const GaussianRational bg = pair.beta.apply(g).evaluate(z);
      const ExactVector bz = pair.beta.evaluate(z);
      const GaussianRational u = x[0], v = x[1];
      o.require(pb.first == ExactVector{u * v * bg, -v * v * bg, v * bz[0], v * bz[1]}, "twisted pullback formula");
      ++identities;
    }
  }
  o.detail << "rank " << family.rank << " of " << family.full_rank << " at (1, 1, 1, 0), " << identities
           << " exact identities";
  return o;
}

Outcome criterion_end_to_end() {
  Outcome o;
  const auto ctx = make_suspension(2, P("z1", VarSpace::base(2)));
  const std::vector<BasePair> pairs{coordinate_pair(ctx.base_space())};
  CriterionOptions options;
  options.degree_bound = 3;
  options.cohomology = Cohomology::asserted;
  options.g_twist = P("z2", ctx.base_space());
  options.sampling.count = 50;
  const auto start = Clock::now();
  const CriterionReport report = run_vdp_criterion(ctx, pairs, options);
  const double elapsed = seconds_since(start);
  o.require(report.verdict == Verdict::certified_at_samples, std::string("verdict ") + to_string(report.verdict));
  o.require(report.points.size() >= 50, "fewer than 50 sample points");
  std::size_t full = 0;
  for (const auto& p : report.points) full += p.rank == 3 && p.full_rank == 3;
  o.require(full == report.points.size(), "rank deficient sample");
  o.require(elapsed < 300, "runtime over 5 min");
  o.detail << to_string(report.verdict) << ", full rank at " << full << "/" << report.points.size() << " points, "
           << elapsed << " s";
  return o;
}

Outcome approximation() {
  Outcome o;
  for (const auto& path : bundled()) {
    const auto result = cli::run_approx(load_scenario(path), {});
    const auto& curve = result.report["curve"];
    double previous = INFINITY, last = INFINITY;
    for (const auto& p : curve) {
      const double sup = p["sup_residual"];
      o.require(sup <= previous, path.filename().string() + " curve increases");
      previous = last = sup;
    }
    o.require(result.report["in_span"] == true && last <= 1e-10,
              path.filename().string() + " target not recovered");
    o.require(result.exit_code == 0, path.filename().string() + " approx sub-check failed");
    o.detail << path.stem().string() << " sup " << last << ", ";
  }
  return o;
}

Outcome determinism() {
  Outcome o;
  std::size_t compared = 0;
  for (const auto& path : bundled()) {
    const Scenario s = load_scenario(path);
    for (auto run : {cli::run_verify, cli::run_criterion, cli::run_flow, cli::run_approx}) {
      cli::RunOptions options;
      options.seed = 17;
      if (run == cli::run_verify) options.samples = 20;
      const auto first = run(s, options);
      const auto second = run(s, options);
      o.require(first.report.dump(2) == second.report.dump(2), path.filename().string() + " report differs");
      o.require(first.files == second.files, path.filename().string() + " extra files differ");
      ++compared;
    }
  }
  o.detail << compared << " report pairs byte-identical";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exact identity suite", identity_suite},
      {"lifts of divergence-free fields are divergence-free", lift_divergence},
      {"closed-form flow audit", flow_audit_closed_form},
      {"lifted kernels and certificate at D=3", kernels_and_certificate},
      {"spanning family rank and pullback identities", spanning_family_check},
      {"criterion end to end over uv = z1", criterion_end_to_end},
      {"approximation harness", approximation},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "threw: " << e.what();
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << o.detail.str() << ")" << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
