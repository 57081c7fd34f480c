#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpkit/lifting.hpp"
#include "vdpkit/suspension.hpp"

namespace vdpkit {

enum class Provenance { complete_lift, kernel_multiple, twist_field, bracket };

const char* to_string(Provenance p);

struct DictionaryEntry {
  SuspensionField field;
  Provenance provenance;
  std::string description;
  /// Degree of the function multiplying the underlying complete field; for
  /// brackets, the sum over both parents.
  int degree = 0;
  /// Indices of the two parents for bracket entries.
  std::optional<std::pair<std::size_t, std::size_t>> parents;
};

struct DictionaryOptions {
  int degree_bound = 2;
  bool include_twists = true;
  bool include_brackets = true;
};

/// Tangent fields of zero divergence on uv = f:
///  - k * X for X in each lifted pair and k a product of its kernel
///    generators of degree <= D (k = 1 gives the complete lifts),
///  - h(z)(u du - v dv) for monomials h of degree <= D,
///  - [A, B] for generator entries with degree(A) + degree(B) <= D.
/// Coefficients are normal-formed; zero entries and entries proportional to an
/// earlier one are dropped. Every entry is divergence-checked exactly; a
/// failure throws Error.
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::vector<DictionaryEntry> entries, int degree_bound)
      : entries_(std::move(entries)), degree_bound_(degree_bound) {}

  const std::vector<DictionaryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const DictionaryEntry& operator[](std::size_t k) const { return entries_.at(k); }
  int degree_bound() const noexcept { return degree_bound_; }

  /// Index of an entry with exactly this ambient field, if any.
  std::optional<std::size_t> find(const VectorField& field) const;

 private:
  std::vector<DictionaryEntry> entries_;
  int degree_bound_ = 0;
};

Dictionary build_dictionary(const SuspensionContext& ctx, std::span<const LiftedPair> pairs,
                            const DictionaryOptions& options);

/// Field u du - v dv.
VectorField twist_field(const SuspensionContext& ctx);

struct FitResult {
  std::vector<std::complex<double>> coefficients;
  /// Per sample, the residual in an orthonormal basis of the tangent space.
  std::vector<std::vector<std::complex<double>>> residuals;
  double sup_residual = 0;
  std::size_t numeric_rank = 0;
};

/// Least squares over the tangent spaces at the samples, via the real
/// embedding with unit column scaling; minimum-norm (in scaled coordinates)
/// on rank deficiency. Throws ContractViolation for empty inputs or a target
/// with nonzero divergence.
FitResult fit_field(const SuspensionField& target, const Dictionary& dict, std::span<const SurfacePoint> samples,
                    const SuspensionContext& ctx);

/// sup over samples of the tangent-projected distance between target and
/// sum_k coefficients[k] * entry_k.
double sup_residual(const SuspensionField& target, const Dictionary& dict,
                    std::span<const std::complex<double>> coefficients, std::span<const SurfacePoint> samples,
                    const SuspensionContext& ctx);

/// Orthonormal basis (columns, Hermitian inner product) of ker d_p(uv - f).
std::vector<std::vector<std::complex<double>>> tangent_frame(const SuspensionContext& ctx,
                                                             std::span<const std::complex<double>> p);

struct CurvePoint {
  int degree = 0;
  std::size_t dictionary_size = 0;
  /// Residual of the least-squares fit with this dictionary alone.
  double fit_sup_residual = 0;
  /// Best residual among fits at degrees <= this one (dictionaries are nested).
  double sup_residual = 0;
};

struct FlowAudit {
  double time = 0;
  double max_deviation = 0;
  double bound = 0;
  bool within_bound = false;
};

struct ResidualCurve {
  std::vector<CurvePoint> points;
  /// The fit achieving the final sup_residual, and the dictionary it refers to.
  FitResult best;
  Dictionary best_dictionary;

  nlohmann::json to_json() const;
  /// "degree,dictionary_size,fit_sup_residual,sup_residual" rows.
  std::string to_csv() const;
};

ResidualCurve residual_curve(const SuspensionField& target, const SuspensionContext& ctx,
                             std::span<const LiftedPair> pairs, std::span<const SurfacePoint> samples, int degree_min,
                             int degree_max, const DictionaryOptions& base_options = {});

/// RK4 flows of the fitted combination and of the target from each start
/// point, compared at times step, 2 step, ..., t_max against
/// 10 * sup_residual * t + 1e-12.
std::vector<FlowAudit> flow_audit(const SuspensionField& target, const Dictionary& dict, const FitResult& fit,
                                  std::span<const SurfacePoint> starts, double t_max = 0.1, int checkpoints = 5);

}  // namespace vdpkit
