#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vdpkit/criterion.hpp"
#include "vdpkit/field_calculus.hpp"
#include "vdpkit/lifting.hpp"
#include "vdpkit/poly.hpp"
#include "vdpkit/suspension.hpp"

namespace vdpkit {

struct ApproxSpec {
  int degree_min = 0;
  int degree_max = 2;
  std::size_t samples = 80;
  bool twists = true;
  bool brackets = true;
  /// Field over (u, v, z1..zn); the twist field when unset.
  std::optional<VectorField> target;
};

/// A run description. Text form:
///
///     # comment
///     name = danielewski
///     n = 1
///     f = z1
///     cohomology = asserted
///     samples = 50
///     region = -2 2
///     [pair]
///     alpha = [1]
///     beta = [1]
///     kernel_alpha =
///     kernel_beta =
///     ideal = 1
///     [approx]
///     degree_max = 2
///     target = [u, -v, 0]
///
/// Top-level keys: name, n, f, cohomology (asserted|refuted|unknown), samples,
/// seed, region, grid, exactness (exact|float), u_zero, u_zero_variable,
/// degree_bound, lift_bound, smoothness_degree, g_twist. Each [pair] section
/// takes alpha, beta (base fields), kernel_alpha, kernel_beta, ideal (comma
/// separated polynomial lists). The [approx] section takes degree_min,
/// degree_max, samples, twists, brackets (true|false) and target.
struct Scenario {
  std::string name;
  int n = 1;
  Poly f{VarSpace::base(1)};
  Cohomology cohomology = Cohomology::unknown;
  SamplingSpec sampling;
  int degree_bound = 4;
  int lift_bound = 1;
  int smoothness_degree = 2;
  std::optional<Poly> g_twist;
  std::vector<BasePair> pairs;
  ApproxSpec approx;

  SuspensionContext context() const;
  CriterionOptions criterion_options() const;
};

/// Throws ParseError with the line and column of the offending text.
Scenario parse_scenario(std::string_view text);
/// Throws Error if the file cannot be read, ParseError on malformed content.
Scenario load_scenario(const std::filesystem::path& path);
/// Canonical text; parse_scenario(print_scenario(s)) == s.
std::string print_scenario(const Scenario& s);

bool operator==(const Scenario& a, const Scenario& b);

}  // namespace vdpkit
