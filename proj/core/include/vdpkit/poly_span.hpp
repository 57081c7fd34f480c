#pragma once

#include <optional>
#include <span>
#include <vector>

#include "vdpkit/exact_matrix.hpp"
#include "vdpkit/poly.hpp"

namespace vdpkit {

/// For each target, coefficients x with sum_k x_k * columns[k] == target, or
/// nullopt when the target is outside the span. One elimination for all targets.
std::vector<std::optional<ExactVector>> solve_in_span(std::span<const Poly> columns, std::span<const Poly> targets);

}  // namespace vdpkit
