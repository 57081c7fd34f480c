#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "vdpkit/errors.hpp"

namespace {

constexpr int kParseOrInternalError = 2;

struct Flags {
  std::string scenario;
  std::string out = "vdpkit-out";
  std::optional<int> degree_bound;
  std::optional<std::size_t> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool exact = false;
  bool floating = false;
};

void add_flags(CLI::App* cmd, Flags& flags) {
  cmd->add_option("--scenario", flags.scenario, "Scenario file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--degree-bound", flags.degree_bound, "Degree bound D")->check(CLI::NonNegativeNumber);
  cmd->add_option("--samples", flags.samples, "Number of samples or random cases");
  cmd->add_option("--seed", flags.seed, "Random seed");
  cmd->add_option("--tol", flags.tol, "Numeric tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "Report directory")->capture_default_str();
  auto* exact = cmd->add_flag("--exact", flags.exact, "Sample exact Gaussian-rational points");
  auto* floating = cmd->add_flag("--float", flags.floating, "Sample floating-point points");
  exact->excludes(floating);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Volume density property toolkit"};
  app.require_subcommand(1);
  Flags flags;
  using Runner = vdpkit::cli::CommandResult (*)(const vdpkit::Scenario&, const vdpkit::cli::RunOptions&);
  const std::pair<const char*, Runner> commands[] = {
      {"verify", vdpkit::cli::run_verify},
      {"criterion", vdpkit::cli::run_criterion},
      {"flow", vdpkit::cli::run_flow},
      {"approx", vdpkit::cli::run_approx},
  };
  const char* descriptions[] = {"Run the exact identity suites", "Run the volume density criterion",
                                "Compare closed-form lifted flows with numeric integration",
                                "Fit a target field with a dictionary of complete fields"};
  std::vector<CLI::App*> subs;
  for (std::size_t k = 0; k < std::size(commands); ++k) {
    subs.push_back(app.add_subcommand(commands[k].first, descriptions[k]));
    add_flags(subs.back(), flags);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kParseOrInternalError;
  }

  try {
    for (std::size_t k = 0; k < subs.size(); ++k) {
      if (!subs[k]->parsed()) continue;
      const vdpkit::Scenario scenario = vdpkit::load_scenario(flags.scenario);
      vdpkit::cli::RunOptions options{flags.degree_bound, flags.samples, flags.seed, flags.tol, std::nullopt};
      if (flags.exact) options.exactness = vdpkit::Exactness::exact;
      if (flags.floating) options.exactness = vdpkit::Exactness::floating;
      const vdpkit::cli::CommandResult result = commands[k].second(scenario, options);
      vdpkit::cli::write_reports(commands[k].first, result, flags.out);
      for (const auto& line : result.summary) std::cout << line << '\n';
      std::cout << (result.exit_code == 0 ? "ok" : "FAILED") << '\n';
      return result.exit_code;
    }
  } catch (const vdpkit::ParseError& e) {
    std::cerr << flags.scenario << ": " << e.what() << '\n';
    return kParseOrInternalError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kParseOrInternalError;
  }
  return kParseOrInternalError;
}
