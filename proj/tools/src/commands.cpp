#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "vdpkit/approx.hpp"
#include "vdpkit/criterion.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/lifting.hpp"

namespace vdpkit::cli {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

SamplingSpec sampling_for(const Scenario& scenario, const RunOptions& options, std::size_t count) {
  SamplingSpec spec = scenario.sampling;
  spec.count = count;
  if (options.seed) spec.seed = *options.seed;
  if (options.exactness) spec.exactness = *options.exactness;
  return spec;
}

double scaled_distance(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    worst = std::max(worst, std::abs(a[k] - b[k]) / std::max(1.0, std::abs(a[k])));
  return worst;
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// nlohmann prints non-finite doubles as null; keep them readable instead.
nlohmann::json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

}  // namespace

CommandResult run_criterion(const Scenario& scenario, const RunOptions& options) {
  const auto start = clock_type::now();
  const SuspensionContext ctx = scenario.context();
  CriterionOptions o = scenario.criterion_options();
  if (options.degree_bound) o.degree_bound = *options.degree_bound;
  o.sampling = sampling_for(scenario, options, options.samples.value_or(scenario.sampling.count));
  const CriterionReport report = run_vdp_criterion(ctx, scenario.pairs, o);

  CommandResult result;
  result.report = report.to_json();
  result.report["command"] = "criterion";
  result.report["scenario"] = scenario.name;
  result.report["seed"] = o.sampling.seed;
  result.exit_code = report.verdict == Verdict::certified_at_samples ? 0 : 1;
  std::size_t full = 0;
  for (const auto& p : report.points)
    if (p.rank == p.full_rank) ++full;
  result.summary.push_back(std::string("verdict: ") + to_string(report.verdict));
  result.summary.push_back("full rank at " + std::to_string(full) + "/" + std::to_string(report.points.size()) +
                           " sample points");
  for (const auto& e : report.explanations) result.summary.push_back("  " + e);
  result.timings["criterion"] = seconds_since(start);
  return result;
}

CommandResult run_flow(const Scenario& scenario, const RunOptions& options) {
  const auto start = clock_type::now();
  const SuspensionContext ctx = scenario.context();
  const double tol = options.tol.value_or(1e-9);
  const double volume_tol = 1e-8;
  const std::vector<double> times = {0.25, 0.5, 0.75, 1.0};
  SamplingSpec spec = sampling_for(scenario, options, options.samples.value_or(20));
  spec.u_zero_count = 0;
  const SampleSet samples = sample_points(ctx, spec);

  CommandResult result;
  nlohmann::json fields = nlohmann::json::array();
  double worst_flow = 0, worst_volume = 0;
  std::size_t surface_failures = 0;
  std::size_t chart_skips = 0;
  std::vector<std::string> notes = samples.notes;
  for (std::size_t s = 0; s < scenario.pairs.size(); ++s) {
    for (int which = 0; which < 2; ++which) {
      const VectorField& base = which == 0 ? scenario.pairs[s].alpha : scenario.pairs[s].beta;
      const BaseField theta(base);
      const std::string name = std::string(which == 0 ? "alpha" : "beta") + "#" + std::to_string(s);
      if (theta.flow_kind() != FlowKind::shear_chain) {
        notes.push_back(name + ": no closed-form flow, skipped");
        continue;
      }
      for (Side side : {Side::u, Side::v}) {
        const std::vector<Poly> flow = lifted_flow(theta, ctx, side);
        const SuspensionField lifted = lift(base, ctx, side);
        double flow_err = 0, volume_err = 0;
        for (const auto& p : samples.points) {
          for (double t : times) {
            const auto closed = apply_flow(flow, p.coords, t);
            const IntegrationResult numeric = integrate_flow(lifted.ambient, p.coords, t, 1e-12);
            flow_err = numeric.completed ? std::max(flow_err, scaled_distance(closed, numeric.end))
                                         : std::numeric_limits<double>::infinity();
            if (!on_surface(SurfacePoint::from_numeric(closed), ctx, 1e-9 * std::max(1.0, std::abs(closed[0] * closed[1]))))
              ++surface_failures;
            try {
              const double dev = std::abs(chart_volume_ratio(flow, ctx, p.coords, t) - 1.0);
              volume_err = std::isfinite(dev) ? std::max(volume_err, dev) : std::numeric_limits<double>::infinity();
            } catch (const ContractViolation&) {
              ++chart_skips;
            }
          }
          if (p.exact) {
            const GaussianRational t(Rational(1, 3));
            const ExactVector end = apply_flow(flow, *p.exact, t);
            if (!on_surface(SurfacePoint::from_exact(end), ctx)) ++surface_failures;
          }
        }
        worst_flow = std::max(worst_flow, flow_err);
        worst_volume = std::max(worst_volume, volume_err);
        fields.push_back({{"field", name},
                          {"base", base.to_string()},
                          {"side", to_string(side)},
                          {"max_flow_deviation", number(flow_err)},
                          {"max_volume_deviation", number(volume_err)},
                          {"flow_ok", flow_err <= tol},
                          {"volume_ok", volume_err <= volume_tol}});
      }
    }
  }
  const bool ok = worst_flow <= tol && worst_volume <= volume_tol && surface_failures == 0 && !fields.empty();
  result.exit_code = ok ? 0 : 1;
  result.report = {{"command", "flow"},
                   {"scenario", scenario.name},
                   {"seed", spec.seed},
                   {"sample_points", samples.points.size()},
                   {"times", times},
                   {"tolerance", tol},
                   {"volume_tolerance", volume_tol},
                   {"fields", fields},
                   {"max_flow_deviation", number(worst_flow)},
                   {"max_volume_deviation", number(worst_volume)},
                   {"surface_failures", surface_failures},
                   {"volume_chart_skips", chart_skips},
                   {"notes", notes},
                   {"success", ok}};
  result.summary.push_back("closed form vs RK4: max deviation " + sci(worst_flow));
  result.summary.push_back("volume ratio: max |ratio - 1| = " + sci(worst_volume));
  if (surface_failures) result.summary.push_back(std::to_string(surface_failures) + " flow images left the surface");
  if (fields.empty()) result.summary.push_back("no field with a closed-form flow");
  result.timings["flow"] = seconds_since(start);
  return result;
}

CommandResult run_approx(const Scenario& scenario, const RunOptions& options) {
  const auto start = clock_type::now();
  const SuspensionContext ctx = scenario.context();
  const double tol = options.tol.value_or(1e-10);
  const int degree_max = options.degree_bound.value_or(scenario.approx.degree_max);
  const int degree_min = std::min(scenario.approx.degree_min, degree_max);
  SamplingSpec spec = sampling_for(scenario, options, options.samples.value_or(scenario.approx.samples));
  const SampleSet samples = sample_points(ctx, spec);

  std::vector<LiftedPair> lifted;
  for (std::size_t s = 0; s < scenario.pairs.size(); ++s)
    for (auto& lp : lift_pair(scenario.pairs[s], s, ctx, scenario.lift_bound)) lifted.push_back(std::move(lp));

  const VectorField target_field = scenario.approx.target.value_or(twist_field(ctx));
  const SuspensionField target = is_tangent(target_field, ctx);
  DictionaryOptions dict_options;
  dict_options.include_twists = scenario.approx.twists;
  dict_options.include_brackets = scenario.approx.brackets;
  const ResidualCurve curve =
      residual_curve(target, ctx, lifted, samples.points, degree_min, degree_max, dict_options);

  bool monotone = true;
  for (std::size_t k = 1; k < curve.points.size(); ++k)
    if (curve.points[k].sup_residual > curve.points[k - 1].sup_residual) monotone = false;
  const double final_sup = curve.points.empty() ? std::numeric_limits<double>::infinity()
                                                : curve.points.back().sup_residual;
  const bool in_span = final_sup <= tol;

  const std::size_t starts = std::min<std::size_t>(samples.points.size(), 10);
  const std::vector<FlowAudit> audit =
      flow_audit(target, curve.best_dictionary, curve.best, std::span(samples.points).first(starts));
  bool audit_ok = true;
  nlohmann::json audit_json = nlohmann::json::array();
  for (const auto& a : audit) {
    audit_ok = audit_ok && a.within_bound;
    audit_json.push_back({{"time", a.time},
                          {"max_deviation", number(a.max_deviation)},
                          {"bound", number(a.bound)},
                          {"within_bound", a.within_bound}});
  }

  const bool ok = monotone && (!in_span || audit_ok);
  CommandResult result;
  result.exit_code = ok ? 0 : 1;
  result.report = {{"command", "approx"},
                   {"scenario", scenario.name},
                   {"seed", spec.seed},
                   {"target", target_field.to_string()},
                   {"sample_points", samples.points.size()},
                   {"sampling_notes", samples.notes},
                   {"curve", curve.to_json()},
                   {"monotone", monotone},
                   {"tolerance", tol},
                   {"in_span", in_span},
                   {"flow_audit", audit_json},
                   {"flow_audit_ok", audit_ok},
                   {"success", ok}};
  result.files.emplace_back("residual_curve.csv", curve.to_csv());
  for (const auto& p : curve.points)
    result.summary.push_back("D = " + std::to_string(p.degree) + ": " + std::to_string(p.dictionary_size) +
                             " fields, sup residual " + sci(p.sup_residual));
  result.summary.push_back(in_span ? "target recovered within tolerance"
                                   : "target not recovered within tolerance (exploratory)");
  result.summary.push_back(std::string("flow audit: ") + (audit_ok ? "within bound" : "outside bound"));
  result.timings["approx"] = seconds_since(start);
  return result;
}

void write_reports(const std::string& command, const CommandResult& result, const std::filesystem::path& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out.string() + ": " + ec.message());
  auto write = [&](const std::string& name, const std::string& content) {
    std::ofstream file(out / name, std::ios::binary);
    if (!file) throw Error("cannot write " + (out / name).string());
    file << content;
    if (!file) throw Error("cannot write " + (out / name).string());
  };
  write(command + ".json", result.report.dump(2) + "\n");
  write(command + ".timings.json", result.timings.dump(2) + "\n");
  for (const auto& [name, content] : result.files) write(name, content);
}

}  // namespace vdpkit::cli
