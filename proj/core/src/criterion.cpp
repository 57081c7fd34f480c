#include "vdpkit/criterion.hpp"

#include <algorithm>
#include <set>

#include "vdpkit/errors.hpp"
#include "vdpkit/poly_span.hpp"

namespace vdpkit {

namespace {

Poly reduce(const Poly& p, const UvRelation* relation) { return relation ? relation->normal_form(p) : p; }

}  // namespace

KernelFamily verify_kernel(const VectorField& owner, std::vector<Poly> family, const UvRelation* relation) {
  for (std::size_t k = 0; k < family.size(); ++k) {
    if (!reduce(owner.apply(family[k]), relation).is_zero()) throw KernelViolation(k, family[k].to_string());
  }
  return {owner, std::move(family)};
}

std::vector<Poly> kernel_closure(std::span<const Poly> generators, int degree_bound, const UvRelation* relation) {
  if (generators.empty() && degree_bound < 0) return {};
  std::vector<const Poly*> gens;
  for (const auto& g : generators) {
    if (!g.is_constant()) gens.push_back(&g);
  }
  const SpacePtr space = generators.empty() ? nullptr : generators.front().space_ptr();

  struct Node {
    Poly value;
    int degree;
    std::size_t last;
  };
  std::vector<Poly> out;
  if (!space) return out;
  std::set<std::string> seen;
  std::vector<Node> frontier{{Poly::constant(space, 1), 0, 0}};
  out.push_back(frontier.front().value);
  seen.insert(out.front().to_string());
  // Multisets of generators, enumerated with non-decreasing generator index.
  while (!frontier.empty()) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      for (std::size_t k = node.last; k < gens.size(); ++k) {
        const int d = node.degree + gens[k]->total_degree();
        if (d > degree_bound) continue;
        Poly prod = reduce(node.value * *gens[k], relation);
        if (prod.is_zero()) continue;
        next.push_back({prod, d, k});
        if (seen.insert(prod.to_string()).second) out.push_back(std::move(prod));
      }
    }
    frontier = std::move(next);
  }
  return out;
}

SemiCompatCertificate semicompat_certificate(const KernelFamily& nu_kernel, const KernelFamily& mu_kernel,
                                             std::span<const Poly> ideal, int degree_bound,
                                             std::optional<int> target_degree, const UvRelation* relation) {
  const bool any_nonzero = std::any_of(ideal.begin(), ideal.end(), [](const Poly& h) { return !h.is_zero(); });
  if (!any_nonzero) throw ContractViolation("ideal proposal has no nonzero generator");
  const SpacePtr& space = nu_kernel.owner.space_ptr();

  SemiCompatCertificate cert;
  cert.degree_bound = degree_bound;
  cert.target_degree = target_degree.value_or(degree_bound);
  cert.ideal.assign(ideal.begin(), ideal.end());

  std::vector<Poly> left_gens = nu_kernel.generators;
  std::vector<Poly> right_gens = mu_kernel.generators;
  left_gens.push_back(Poly::constant(space, 1));
  right_gens.push_back(Poly::constant(space, 1));
  cert.left_closure = kernel_closure(left_gens, degree_bound, relation);
  cert.right_closure = kernel_closure(right_gens, degree_bound, relation);

  std::vector<Poly> columns;
  std::vector<std::pair<std::size_t, std::size_t>> origin;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < cert.left_closure.size(); ++i) {
    for (std::size_t j = 0; j < cert.right_closure.size(); ++j) {
      Poly prod = reduce(cert.left_closure[i] * cert.right_closure[j], relation);
      if (prod.is_zero() || !seen.insert(prod.to_string()).second) continue;
      columns.push_back(std::move(prod));
      origin.emplace_back(i, j);
    }
  }

  std::vector<std::size_t> all_vars(space->size());
  for (std::size_t k = 0; k < all_vars.size(); ++k) all_vars[k] = k;
  seen.clear();
  for (const auto& h : cert.ideal) {
    if (h.is_zero()) continue;
    const int room = std::max(0, cert.target_degree - h.total_degree());
    for (const auto& m : monomials_up_to(space->size(), all_vars, room)) {
      Poly t = reduce(h * Poly::monomial(space, m), relation);
      if (t.is_zero() || !seen.insert(t.to_string()).second) continue;
      cert.targets.push_back(std::move(t));
    }
  }

  const auto solutions = solve_in_span(columns, cert.targets);
  for (std::size_t k = 0; k < cert.targets.size(); ++k) {
    std::vector<WitnessTerm> terms;
    if (solutions[k]) {
      for (std::size_t c = 0; c < columns.size(); ++c) {
        const GaussianRational& x = (*solutions[k])[c];
        if (!x.is_zero()) terms.push_back({x, origin[c].first, origin[c].second});
      }
    } else {
      cert.unreachable.push_back(cert.targets[k]);
    }
    cert.witnesses.push_back(std::move(terms));
  }
  return cert;
}

bool reverify(const SemiCompatCertificate& cert, const UvRelation* relation) {
  if (cert.witnesses.size() != cert.targets.size()) return false;
  std::size_t missing = 0;
  for (std::size_t k = 0; k < cert.targets.size(); ++k) {
    const auto& terms = cert.witnesses[k];
    if (terms.empty()) {
      ++missing;
      continue;
    }
    Poly sum(cert.targets[k].space_ptr());
    for (const auto& w : terms) {
      if (w.left >= cert.left_closure.size() || w.right >= cert.right_closure.size()) return false;
      sum += w.coefficient * (cert.left_closure[w.left] * cert.right_closure[w.right]);
    }
    if (reduce(sum, relation) != cert.targets[k]) return false;
  }
  return missing == cert.unreachable.size();
}

namespace {

bool ideal_nonvanishing(const std::vector<Poly>& ideal, std::span<const GaussianRational> p) {
  return std::any_of(ideal.begin(), ideal.end(), [&](const Poly& h) { return !h.evaluate(p).is_zero(); });
}

SpanningReport rank_in_basis(std::span<const SpanningPair> pairs, std::span<const GaussianRational> p,
                             const std::vector<ExactVector>& basis) {
  SpanningReport out;
  out.full_rank = binomial(basis.size(), 2);
  std::vector<std::pair<ExactVector, ExactVector>> wedges;
  for (const auto& pair : pairs) {
    if (!ideal_nonvanishing(pair.ideal, p)) continue;
    wedges.emplace_back(pair.first.evaluate(p), pair.second.evaluate(p));
  }
  out.contributing = wedges.size();
  out.coordinates = wedge_coordinates(basis, wedges);
  if (!out.coordinates.empty()) {
    out.rank = exact_rank(ExactMatrix::from_rows(out.coordinates, out.coordinates.front().size()));
  }
  return out;
}

}  // namespace

SpanningReport spanning_rank(std::span<const SpanningPair> pairs, const SurfacePoint& p, const SuspensionContext& ctx) {
  if (!p.exact) throw ContractViolation("spanning rank needs an exact point");
  if (!on_surface(p, ctx)) throw ContractViolation("point is not on uv = f");
  return rank_in_basis(pairs, *p.exact, tangent_basis(ctx, p));
}

SpanningReport base_spanning_rank(std::span<const SpanningPair> pairs, std::span<const GaussianRational> p) {
  std::vector<ExactVector> basis;
  for (std::size_t k = 0; k < p.size(); ++k) {
    ExactVector e(p.size());
    e[k] = 1;
    basis.push_back(std::move(e));
  }
  return rank_in_basis(pairs, p, basis);
}

BracketCheck compatible_bracket_check(const VectorField& nu, const VectorField& mu, const Poly& h, const Poly& f,
                                      const Poly& g) {
  std::vector<std::string> failures;
  if (!nu.apply(nu.apply(h)).is_zero()) failures.push_back("nu(h) is not in Ker nu");
  if (!mu.apply(h).is_zero()) failures.push_back("h is not in Ker mu");
  if (!nu.apply(f).is_zero()) failures.push_back("f is not in Ker nu");
  if (!mu.apply(g).is_zero()) failures.push_back("g is not in Ker mu");
  if (!failures.empty()) throw ConditionsFailed("compatible pair preconditions", std::move(failures));
  VectorField lhs = (f * g * nu.apply(h)) * mu;
  VectorField rhs = lie_bracket(f * nu, (g * h) * mu) - lie_bracket((f * h) * nu, g * mu);
  const bool holds = lhs == rhs;
  return {holds, std::move(lhs), std::move(rhs)};
}

const char* to_string(Cohomology c) {
  switch (c) {
    case Cohomology::asserted:
      return "asserted";
    case Cohomology::refuted:
      return "refuted";
    case Cohomology::unknown:
      return "unknown";
  }
  return "unknown";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::certified_at_samples:
      return "certified-at-samples";
    case Verdict::failed:
      return "failed";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "failed";
}

namespace {

FieldStatus field_status(const std::string& name, const SuspensionField& field, const SuspensionContext& ctx) {
  FieldStatus s;
  s.name = name;
  try {
    const SuspensionField checked = is_tangent(field.ambient, ctx);
    s.tangent = true;
    s.multiplier_zero = checked.multiplier.is_zero();
    s.divergence_free = divergence_on_suspension(checked, ctx).is_zero();
  } catch (const NotTangent&) {
    s.tangent = false;
  }
  return s;
}

std::vector<std::string> point_strings(const ExactVector& p) {
  std::vector<std::string> out;
  for (const auto& c : p) out.push_back(c.to_string());
  return out;
}

nlohmann::json field_json(const FieldStatus& s) {
  return {{"name", s.name},
          {"tangent", s.tangent},
          {"multiplier_zero", s.multiplier_zero},
          {"divergence_free", s.divergence_free}};
}

}  // namespace

CriterionReport run_vdp_criterion(const SuspensionContext& ctx, std::span<const BasePair> pairs,
                                  const CriterionOptions& options) {
  CriterionReport report;
  report.n = ctx.n();
  report.f = ctx.f_base().to_string();
  report.cohomology = options.cohomology;
  report.degree_bound = options.degree_bound;
  report.samples_requested = options.sampling.count;
  bool ok = true;

  if (pairs.empty()) {
    report.verdict = Verdict::failed;
    report.explanations.push_back("no base pairs given; nothing spans");
    return report;
  }

  // Smoothness of the zero fiber.
  SamplingSpec fiber = options.sampling;
  fiber.count = 0;
  fiber.u_zero_count = std::max<std::size_t>(options.sampling.u_zero_count, 10);
  SampleSet fiber_points = sample_points(ctx, fiber);
  report.notes.insert(report.notes.end(), fiber_points.notes.begin(), fiber_points.notes.end());
  report.smoothness_failures = smoothness_failures(ctx, fiber_points.points);
  report.smoothness_at_samples = report.smoothness_failures.empty();
  if (!report.smoothness_at_samples) {
    ok = false;
    report.explanations.push_back("zero fiber is singular at a sampled point");
  }
  if (auto cert = smoothness_certificate(ctx, options.smoothness_degree)) {
    std::vector<std::string> text;
    for (const auto& c : *cert) text.push_back(c.to_string());
    report.smoothness_certificate = std::move(text);
  } else {
    report.notes.push_back("no smoothness certificate up to degree " + std::to_string(options.smoothness_degree));
  }

  // Lifted fields and certificates.
  const VolumeForm base_volume = VolumeForm::standard(ctx.base_space());
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const bool base_free = divergence(pairs[s].alpha, base_volume).is_zero() &&
                           divergence(pairs[s].beta, base_volume).is_zero();
    for (const auto& lp : lift_pair(pairs[s], s, ctx, options.lift_bound)) {
      PairReport pr;
      pr.source = s;
      pr.label = lp.label;
      pr.base_divergence_free = base_free;
      const bool u_first = lp.label == "(alpha_u, beta_v)";
      pr.first = field_status(u_first ? "alpha_u" : "alpha_v", lp.first, ctx);
      pr.second = field_status(u_first ? "beta_v" : "beta_u", lp.second, ctx);
      try {
        const KernelFamily kf = verify_kernel(lp.first.ambient, lp.kernel_first, &ctx.relation());
        const KernelFamily ks = verify_kernel(lp.second.ambient, lp.kernel_second, &ctx.relation());
        for (int d = 0; d <= options.degree_bound; ++d) {
          const auto cert = semicompat_certificate(kf, ks, lp.ideal, d, options.degree_bound, &ctx.relation());
          pr.targets = cert.targets.size();
          if (cert.success()) {
            pr.certificate_ok = true;
            pr.certificate_reverified = reverify(cert, &ctx.relation());
            pr.smallest_degree = d;
            break;
          }
          if (d == options.degree_bound) {
            for (const auto& t : cert.unreachable) pr.unreachable.push_back(t.to_string());
          }
        }
      } catch (const KernelViolation& e) {
        pr.kernel_error = e.what();
      } catch (const ContractViolation& e) {
        pr.kernel_error = e.what();
      }
      const bool pair_ok = pr.base_divergence_free && pr.first.divergence_free && pr.second.divergence_free &&
                           pr.first.multiplier_zero && pr.second.multiplier_zero && !pr.kernel_error &&
                           pr.certificate_ok && pr.certificate_reverified;
      if (!pair_ok) {
        ok = false;
        report.explanations.push_back("pair " + std::to_string(s) + " " + pr.label + " failed a sub-check");
      }
      report.pairs.push_back(std::move(pr));
    }
  }

  // Spanning at sampled basepoints, with rejection sampling.
  SamplingSpec pool = options.sampling;
  pool.exactness = Exactness::exact;
  pool.u_zero_count = 0;
  pool.count = options.sampling.count * std::max<std::size_t>(options.attempts_per_sample, 1);
  const SampleSet candidates = sample_points(ctx, pool);
  for (const auto& p : candidates.points) {
    if (report.points.size() >= options.sampling.count) break;
    const auto failures = basepoint_failures(pairs, ctx, p, options.g_twist);
    if (!failures.empty()) {
      for (const auto& f : failures) ++report.rejections[f];
      continue;
    }
    const SpanningFamily family = spanning_family(pairs, ctx, p, options.g_twist);
    PointReport pt;
    pt.coordinates = point_strings(*p.exact);
    pt.family_size = family.lifted.size() + family.pullbacks.size();
    pt.rank = family.rank;
    pt.full_rank = family.full_rank;
    if (pt.rank != pt.full_rank) ok = false;
    report.points.push_back(std::move(pt));
  }
  const bool enough = report.points.size() == options.sampling.count;
  if (!enough) {
    report.explanations.push_back("only " + std::to_string(report.points.size()) + " of " +
                                  std::to_string(options.sampling.count) + " basepoints accepted");
  }
  const auto low = std::count_if(report.points.begin(), report.points.end(),
                                 [](const PointReport& p) { return p.rank != p.full_rank; });
  if (low > 0) report.explanations.push_back(std::to_string(low) + " sampled points below full rank");

  if (!ok) {
    report.verdict = Verdict::failed;
  } else if (!enough) {
    report.verdict = Verdict::inconclusive;
  } else if (options.cohomology != Cohomology::asserted) {
    report.verdict = Verdict::inconclusive;
    report.explanations.push_back(std::string("cohomological hypothesis is ") + to_string(options.cohomology) +
                                  "; finite checks passed but the criterion needs it asserted");
  } else {
    report.verdict = Verdict::certified_at_samples;
  }
  return report;
}

nlohmann::json CriterionReport::to_json() const {
  nlohmann::json pairs_json = nlohmann::json::array();
  for (const auto& p : pairs) {
    nlohmann::json j = {{"source", p.source},
                        {"label", p.label},
                        {"base_divergence_free", p.base_divergence_free},
                        {"first", field_json(p.first)},
                        {"second", field_json(p.second)},
                        {"certificate_ok", p.certificate_ok},
                        {"certificate_reverified", p.certificate_reverified},
                        {"targets", p.targets},
                        {"unreachable", p.unreachable}};
    j["kernel_error"] = p.kernel_error ? nlohmann::json(*p.kernel_error) : nlohmann::json(nullptr);
    j["smallest_degree"] = p.smallest_degree ? nlohmann::json(*p.smallest_degree) : nlohmann::json(nullptr);
    pairs_json.push_back(std::move(j));
  }
  nlohmann::json points_json = nlohmann::json::array();
  for (const auto& p : points) {
    points_json.push_back(
        {{"coordinates", p.coordinates}, {"family_size", p.family_size}, {"rank", p.rank}, {"full_rank", p.full_rank}});
  }
  nlohmann::json out;
  out["n"] = n;
  out["f"] = f;
  out["degree_bound"] = degree_bound;
  out["assumptions"] = {
      {"cohomology", to_string(cohomology)},
      {"smoothness_at_samples", smoothness_at_samples},
      {"smoothness_failures", smoothness_failures},
      {"smoothness_certificate",
       smoothness_certificate ? nlohmann::json(*smoothness_certificate) : nlohmann::json(nullptr)}};
  out["pairs"] = std::move(pairs_json);
  out["points"] = std::move(points_json);
  out["samples_requested"] = samples_requested;
  out["rejections"] = rejections;
  out["notes"] = notes;
  out["verdict"] = to_string(verdict);
  out["explanations"] = explanations;
  return out;
}

}  // namespace vdpkit
