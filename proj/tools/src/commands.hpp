#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpkit/scenario.hpp"

namespace vdpkit::cli {

/// Command-line overrides of scenario settings.
struct RunOptions {
  std::optional<int> degree_bound;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<Exactness> exactness;
};

struct CommandResult {
  nlohmann::json report;
  nlohmann::json timings;
  /// 0 when every sub-check passed, 1 otherwise.
  int exit_code = 0;
  /// Extra report files: name and content.
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<std::string> summary;
};

CommandResult run_verify(const Scenario& scenario, const RunOptions& options);
CommandResult run_criterion(const Scenario& scenario, const RunOptions& options);
CommandResult run_flow(const Scenario& scenario, const RunOptions& options);
CommandResult run_approx(const Scenario& scenario, const RunOptions& options);

/// Writes <out>/<command>.json, <out>/<command>.timings.json and the extra
/// files. Throws Error when the directory cannot be written.
void write_reports(const std::string& command, const CommandResult& result, const std::filesystem::path& out);

/// L_X a from the coordinate formula
/// sum_I X(a_I) dx_I + sum_I a_I sum_s dx_i1 ^ .. ^ d(X_is) ^ .. ^ dx_ip.
DiffForm coordinate_lie_derivative(const VectorField& x, const DiffForm& a);

}  // namespace vdpkit::cli
