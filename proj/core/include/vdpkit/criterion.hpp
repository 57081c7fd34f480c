#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpkit/field_calculus.hpp"
#include "vdpkit/lifting.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/suspension.hpp"
#include "vdpkit/uv_relation.hpp"

namespace vdpkit {

/// Generators annihilated by `owner`.
struct KernelFamily {
  VectorField owner;
  std::vector<Poly> generators;
};

/// Accepts iff owner(k) = 0 for each generator (modulo uv - f when a relation
/// is given). Throws KernelViolation naming the first offending generator.
KernelFamily verify_kernel(const VectorField& owner, std::vector<Poly> family, const UvRelation* relation = nullptr);

/// Products of generators whose degrees add up to at most `degree_bound`,
/// starting from 1, normal-formed and deduplicated.
std::vector<Poly> kernel_closure(std::span<const Poly> generators, int degree_bound,
                                 const UvRelation* relation = nullptr);

/// coefficient * left_closure[left] * right_closure[right]
struct WitnessTerm {
  GaussianRational coefficient;
  std::size_t left = 0;
  std::size_t right = 0;
};

/// Degree-truncated witness that span(Ker nu * Ker mu) contains the ideal
/// generated by H: every h * m with h in H and m a monomial of degree
/// <= target_degree - deg h is written as a combination of closure products.
struct SemiCompatCertificate {
  int degree_bound = 0;
  int target_degree = 0;
  std::vector<Poly> ideal;
  std::vector<Poly> left_closure;
  std::vector<Poly> right_closure;
  std::vector<Poly> targets;
  /// One entry per target; empty for unreachable targets.
  std::vector<std::vector<WitnessTerm>> witnesses;
  std::vector<Poly> unreachable;

  bool success() const { return unreachable.empty() && !targets.empty(); }
};

/// Throws ContractViolation when H has no nonzero element. An infeasible
/// system is reported through `unreachable`, not thrown. target_degree
/// defaults to degree_bound.
SemiCompatCertificate semicompat_certificate(const KernelFamily& nu_kernel, const KernelFamily& mu_kernel,
                                             std::span<const Poly> ideal, int degree_bound,
                                             std::optional<int> target_degree = std::nullopt,
                                             const UvRelation* relation = nullptr);

/// Re-expands every witness independently of the solver.
bool reverify(const SemiCompatCertificate& cert, const UvRelation* relation = nullptr);

/// A pair of fields with ideal generators, for rank checks.
struct SpanningPair {
  VectorField first;
  VectorField second;
  std::vector<Poly> ideal;
};

struct SpanningReport {
  std::size_t rank = 0;
  std::size_t full_rank = 0;
  /// Pairs whose ideal does not vanish at the point.
  std::size_t contributing = 0;
  /// Coordinates of each contributing wedge in the basis of the second
  /// exterior power of the tangent space.
  std::vector<ExactVector> coordinates;
};

/// Rank of {I_j(p) A_j(p) ^ B_j(p)} in the second exterior power of the
/// tangent space of uv = f at p. Throws SingularPoint at singular points.
SpanningReport spanning_rank(std::span<const SpanningPair> pairs, const SurfacePoint& p, const SuspensionContext& ctx);

/// Same check on the whole coordinate space of the fields.
SpanningReport base_spanning_rank(std::span<const SpanningPair> pairs, std::span<const GaussianRational> p);

struct BracketCheck {
  bool holds = false;
  VectorField lhs;
  VectorField rhs;
};

/// f g nu(h) mu == [f nu, g h mu] - [f h nu, g mu]. Preconditions
/// nu(nu(h)) = 0, mu(h) = 0, nu(f) = 0, mu(g) = 0 are checked and every
/// violation is listed in the thrown ConditionsFailed.
BracketCheck compatible_bracket_check(const VectorField& nu, const VectorField& mu, const Poly& h, const Poly& f,
                                      const Poly& g);

enum class Cohomology { asserted, refuted, unknown };
enum class Verdict { certified_at_samples, failed, inconclusive };

const char* to_string(Cohomology c);
const char* to_string(Verdict v);

struct CriterionOptions {
  int degree_bound = 4;
  int lift_bound = 1;
  int smoothness_degree = 2;
  SamplingSpec sampling;
  Cohomology cohomology = Cohomology::unknown;
  std::optional<Poly> g_twist;
  /// Candidate points drawn per requested sample before giving up.
  std::size_t attempts_per_sample = 20;
};

struct FieldStatus {
  std::string name;
  bool tangent = false;
  bool multiplier_zero = false;
  bool divergence_free = false;
};

struct PairReport {
  std::size_t source = 0;
  std::string label;
  bool base_divergence_free = false;
  FieldStatus first;
  FieldStatus second;
  std::optional<std::string> kernel_error;
  bool certificate_ok = false;
  bool certificate_reverified = false;
  /// Smallest closure degree reaching every target of degree <= degree_bound.
  std::optional<int> smallest_degree;
  std::size_t targets = 0;
  std::vector<std::string> unreachable;
};

struct PointReport {
  std::vector<std::string> coordinates;
  std::size_t family_size = 0;
  std::size_t rank = 0;
  std::size_t full_rank = 0;
};

struct CriterionReport {
  int n = 0;
  std::string f;
  Cohomology cohomology = Cohomology::unknown;
  int degree_bound = 0;
  bool smoothness_at_samples = false;
  std::vector<std::string> smoothness_failures;
  std::optional<std::vector<std::string>> smoothness_certificate;
  std::vector<PairReport> pairs;
  std::vector<PointReport> points;
  std::size_t samples_requested = 0;
  std::map<std::string, std::size_t> rejections;
  std::vector<std::string> notes;
  Verdict verdict = Verdict::failed;
  std::vector<std::string> explanations;

  nlohmann::json to_json() const;
};

/// Divergence and tangency of every lifted field, kernel checks and
/// certificates for every lifted pair, exact ranks at sampled basepoints.
/// Sub-check failures are recorded in the report, never thrown.
CriterionReport run_vdp_criterion(const SuspensionContext& ctx, std::span<const BasePair> pairs,
                                  const CriterionOptions& options);

}  // namespace vdpkit
