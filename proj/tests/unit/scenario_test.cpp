#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "oracles.hpp"
#include "vdpkit/errors.hpp"
#include "vdpkit/fuzz.hpp"
#include "vdpkit/scenario.hpp"

using namespace vdpkit;

namespace {

const std::filesystem::path kScenarios = VDPKIT_SCENARIO_DIR;

std::vector<std::filesystem::path> bundled() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(kScenarios))
    if (e.path().extension() == ".scn") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

void check_error(const std::string& text, std::size_t line, std::size_t column) {
  try {
    parse_scenario(text);
    FAIL("expected ParseError for: " << text);
  } catch (const ParseError& e) {
    CHECK_MESSAGE(e.line() == line, e.what());
    CHECK_MESSAGE(e.column() == column, e.what());
  }
}

}  // namespace

TEST_CASE("bundled scenarios parse and round-trip") {
  const auto files = bundled();
  CHECK(files.size() == 4);
  for (const auto& path : files) {
    const Scenario s = load_scenario(path);
    CHECK(!s.pairs.empty());
    CHECK(s.approx.target.has_value());
    const std::string printed = print_scenario(s);
    CHECK(parse_scenario(printed) == s);
    CHECK(print_scenario(parse_scenario(printed)) == printed);
  }
}

TEST_CASE("random scenarios round-trip") {
  FuzzSource rng(71);
  for (int k = 0; k < 50; ++k) {
    Scenario s;
    s.name = "random-" + std::to_string(k);
    s.n = 1 + static_cast<int>(rng.below(3));
    const auto b = VarSpace::base(s.n);
    do s.f = rng.poly(b, 3); while (s.f.is_constant());
    s.cohomology = static_cast<Cohomology>(rng.below(3));
    s.sampling.count = rng.below(100);
    s.sampling.seed = rng.next();
    s.sampling.region_lo = Rational(-static_cast<long>(rng.below(7)) - 1, 1 + static_cast<long>(rng.below(3)));
    s.sampling.region_hi = Rational(static_cast<long>(rng.below(7)) + 1, 1 + static_cast<long>(rng.below(3)));
    s.sampling.region_lo.canonicalize();
    s.sampling.region_hi.canonicalize();
    s.sampling.grid = 1 + static_cast<int>(rng.below(8));
    s.sampling.exactness = rng.below(2) ? Exactness::exact : Exactness::floating;
    s.sampling.u_zero_count = rng.below(4);
    if (rng.below(2)) s.sampling.u_zero_variable = 1 + static_cast<int>(rng.below(static_cast<std::size_t>(s.n)));
    s.degree_bound = static_cast<int>(rng.below(6));
    s.lift_bound = static_cast<int>(rng.below(3));
    s.smoothness_degree = static_cast<int>(rng.below(4));
    if (rng.below(2)) s.g_twist = rng.poly(b, 2);
    const std::size_t npairs = rng.below(3);
    for (std::size_t p = 0; p < npairs; ++p) {
      BasePair pair{rng.field(b, 2), rng.field(b, 2), {}, {}, {}};
      for (std::size_t g = rng.below(3); g > 0; --g) pair.kernel_alpha.push_back(rng.poly(b, 2));
      for (std::size_t g = rng.below(3); g > 0; --g) pair.kernel_beta.push_back(rng.poly(b, 2));
      for (std::size_t g = rng.below(3); g > 0; --g) pair.ideal.push_back(rng.poly(b, 2));
      s.pairs.push_back(pair);
    }
    s.approx.degree_min = static_cast<int>(rng.below(2));
    s.approx.degree_max = s.approx.degree_min + static_cast<int>(rng.below(3));
    s.approx.samples = 1 + rng.below(100);
    s.approx.twists = rng.below(2);
    s.approx.brackets = rng.below(2);
    if (rng.below(2)) s.approx.target = rng.field(VarSpace::suspension(s.n), 2);
    const std::string printed = print_scenario(s);
    CHECK(parse_scenario(printed) == s);
    CHECK(print_scenario(parse_scenario(printed)) == printed);
  }
}

TEST_CASE("scenario parse errors carry line and column") {
  check_error("n = 1\nf = z1^\n", 2, 8);
  check_error("n = 1\nf = z1 + z2\n", 2, 10);
  check_error("n = 1\nf = z1\nbogus = 2\n", 3, 1);
  check_error("n = 1\nf = z1\nn = 2\n", 3, 1);
  check_error("n = one\nf = z1\n", 1, 5);
  check_error("n = 1\n", 2, 1);
  check_error("n = 1\nf = 3\n", 2, 5);
  check_error("n = 1\nf = z1\n[pairs]\n", 3, 1);
  check_error("n = 1\nf = z1\n[pair]\nalpha = [1]\n", 3, 1);
  check_error("n = 1\nf = z1\n[pair]\nalpha = [1]\nbeta = [1]\nideal = 1, z1^ + 2\n", 6, 16);
  check_error("n = 2\nf = z1\n[pair]\nalpha = [1, 0]\nbeta = [0, 1, 2]\n", 5, 8);
  check_error("n = 1\nf = z1\nregion = 2 1\n", 3, 10);
  check_error("n = 1\nf = z1\nregion = -1 1/0\n", 3, 13);
  check_error("n = 1\nf = z1\ncohomology = maybe\n", 3, 14);
  check_error("n = 1\nf = z1\n  just text\n", 3, 3);
  check_error("n = 1\nf = z1\n[approx]\ntwists = yes\n", 4, 10);
  check_error("n = 1\nf = z1\n[approx]\ntarget = [u, v]\n", 4, 10);
  CHECK_NOTHROW(parse_scenario("# comment only line\nn = 1   # trailing\nf = z1\n\n"));
  CHECK_THROWS_AS(load_scenario(kScenarios / "missing.scn"), Error);
}

TEST_CASE("commands on bundled scenarios") {
  cli::RunOptions quick;
  quick.samples = 20;
  const Scenario a = load_scenario(kScenarios / "a_danielewski.scn");
  const auto verify = cli::run_verify(a, quick);
  CHECK(verify.exit_code == 0);
  for (const auto& [name, suite] : verify.report["suites"].items()) CHECK_MESSAGE(suite["failures"] == 0, name);

  const Scenario b = load_scenario(kScenarios / "b_plane_linear.scn");
  const auto criterion = cli::run_criterion(b, {});
  CHECK(criterion.exit_code == 0);
  CHECK(criterion.report["verdict"] == "certified-at-samples");
  for (const auto& p : criterion.report["points"]) CHECK(p["rank"] == 3);

  const auto flow = cli::run_flow(b, {});
  CHECK(flow.exit_code == 0);
  const auto approx = cli::run_approx(b, {});
  CHECK(approx.exit_code == 0);
  CHECK(approx.report["in_span"] == true);

  Scenario broken = b;
  broken.pairs.front().kernel_alpha = {oracle::P("z1", VarSpace::base(2))};
  CHECK(cli::run_criterion(broken, {}).exit_code == 1);
}

TEST_CASE("reports are deterministic and written to disk") {
  const Scenario c = load_scenario(kScenarios / "c_plane_circle.scn");
  cli::RunOptions options;
  options.seed = 9;
  options.samples = 10;
  for (auto run : {cli::run_verify, cli::run_criterion, cli::run_flow, cli::run_approx}) {
    const auto first = run(c, options);
    const auto second = run(c, options);
    CHECK(first.report.dump(2) == second.report.dump(2));
    CHECK(first.files == second.files);
  }
  const auto dir = std::filesystem::temp_directory_path() / "vdpkit-scenario-test";
  std::filesystem::remove_all(dir);
  const auto result = cli::run_approx(c, options);
  cli::write_reports("approx", result, dir);
  CHECK(std::filesystem::exists(dir / "approx.json"));
  CHECK(std::filesystem::exists(dir / "approx.timings.json"));
  std::ifstream csv(dir / "residual_curve.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "degree,dictionary_size,fit_sup_residual,sup_residual");
  std::filesystem::remove_all(dir);
}
