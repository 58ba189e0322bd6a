#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sisde/cli/config.hpp"
#include "sisde/cli/run.hpp"

using namespace sisde::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sisde_cli_tests_" + name);
  fs::remove_all(dir);
  return dir;
}

int run(std::string_view command, const std::string& config, const fs::path& out,
        std::ostringstream& stdout_text, std::ostringstream& stderr_text, unsigned workers = 1) {
  RunFlags flags;
  flags.out = out;
  flags.workers = workers;
  return run_subcommand(command, config, flags, stdout_text, stderr_text);
}

std::vector<std::string> messages_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.messages();
  }
  return {};
}

}  // namespace

TEST_CASE("minimal config takes the documented defaults") {
  const ScenarioConfig c = parse_config("# nothing but a comment\n\nmodel.kind = greenhalgh\n");
  CHECK(c.sim.rho == 0.0);
  CHECK(c.sim.absorb);
  CHECK(c.greenhalgh.mu == 0.01);
  CHECK(c.sim.levels == std::vector<int>{6, 7, 8, 9, 10});
}

TEST_CASE("config errors are all reported") {
  const auto m = messages_of("model.mu = -1\nsim.rho = 2\nsim.paths = many\nbogus = 1\n");
  REQUIRE(m.size() == 4);
  CHECK(m[0].find("bogus") != std::string::npos);
  bool mu_named = false;
  for (const auto& s : m) mu_named = mu_named || s.find("model.mu") != std::string::npos;
  CHECK(mu_named);
}

TEST_CASE("duplicate keys cite both lines") {
  const auto m = messages_of("sim.T = 1\n\nsim.T = 2\n");
  REQUIRE(m.size() == 1);
  CHECK(m[0].find("lines 1 and 3") != std::string::npos);
}

TEST_CASE("manifest parses back to the same values") {
  ScenarioConfig c = parse_config("sim.paths = 17\nmodel.mu = 0.02\n");
  override_seed(c, 99);
  const ScenarioConfig again = parse_config(manifest_text(c, "simulate"));
  CHECK(again.values == [&] {
    auto v = c.values;
    v["output.dir"] = ".";
    return v;
  }());
  CHECK(again.sim.seed == 99);
}

TEST_CASE("simulate is byte-identical on rerun and across workers") {
  const std::string cfg = "sim.paths = 600\nsim.level = 5\nsim.seed = 3\noutput.trajectories = 2\n";
  std::ostringstream o, e;
  const fs::path a = scratch("sim_a");
  const fs::path b = scratch("sim_b");
  CHECK(run("simulate", cfg, a, o, e, 1) == kOk);
  CHECK(run("simulate", cfg, b, o, e, 3) == kOk);
  for (const char* f : {"trajectories.csv", "moments.csv", "quantiles.csv", "histogram.csv", "manifest.cfg"}) {
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK(o.str().empty());
  const fs::path c = scratch("sim_c");
  CHECK(run("simulate", slurp(a / "manifest.cfg"), c, o, e) == kOk);
  CHECK(slurp(a / "moments.csv") == slurp(c / "moments.csv"));
  CHECK(slurp(a / "manifest.cfg") == slurp(c / "manifest.cfg"));
  CHECK(slurp(a / "trajectories.csv").rfind("path_id,t,X,Y\n", 0) == 0);
}

TEST_CASE("single path simulate reruns identically") {
  const std::string cfg = "sim.paths = 1\nsim.level = 6\nsim.seed = 42\n";
  std::ostringstream o, e;
  const fs::path a = scratch("one_a");
  const fs::path b = scratch("one_b");
  CHECK(run("simulate", cfg, a, o, e) == kOk);
  CHECK(run("simulate", cfg, b, o, e) == kOk);
  CHECK(slurp(a / "trajectories.csv") == slurp(b / "trajectories.csv"));
  CHECK(slurp(a / "trajectories.csv").size() > 100);
}

TEST_CASE("seed flag overrides the config") {
  std::ostringstream o, e;
  const fs::path a = scratch("seed_a");
  const fs::path b = scratch("seed_b");
  RunFlags flags;
  flags.out = a;
  flags.seed = 5;
  CHECK(run_subcommand("simulate", "sim.paths = 3\nsim.level = 3\n", flags, o, e) == kOk);
  CHECK(run("simulate", "sim.paths = 3\nsim.level = 3\nsim.seed = 5\n", b, o, e) == kOk);
  CHECK(slurp(a / "trajectories.csv") == slurp(b / "trajectories.csv"));
  CHECK(slurp(a / "manifest.cfg").find("sim.seed = 5\n") != std::string::npos);
}

TEST_CASE("converge on a vanishing model reports zero errors") {
  std::ostringstream o, e;
  const fs::path a = scratch("zero");
  CHECK(run("converge", "model.kind = custom\nsim.paths = 200\nsim.levels = 3,4,5\n", a, o, e) == kOk);
  std::istringstream in(slurp(a / "convergence.csv"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "level,mesh,l1_error,l1_se,sup_error,sup_se");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.substr(line.find(',', line.find(',') + 1)) == ",0,0,0,0");
  }
  CHECK(rows == 2);
  CHECK(fs::exists(a / "bounds.csv"));
}

TEST_CASE("validate flags an understated Hoelder constant") {
  std::ostringstream o, e;
  const fs::path a = scratch("validate");
  CHECK(run("validate", "model.H = 0.01\nvalidate.samples = 2000\n", a, o, e) == kAssumptionViolation);
  CHECK(e.str().find("model.H") != std::string::npos);
  CHECK(slurp(a / "assumptions.csv").find("holder_H,") != std::string::npos);
  std::ostringstream o2, e2;
  CHECK(run("validate", "validate.samples = 2000\n", scratch("validate_ok"), o2, e2) == kOk);
}

TEST_CASE("exit codes") {
  std::ostringstream o, e;
  CHECK(run("simulate", "sim.T = -1\n", scratch("bad"), o, e) == kConfigError);
  CHECK(run("jump", "model.kind = custom\n", scratch("custom_jump"), o, e) == kConfigError);
  CHECK(run("frobnicate", "", scratch("unknown"), o, e) == kConfigError);
  CHECK(run("fokker-planck", "fp.mode = fokker\nfp.dt = 1\nfp.n1 = 80\nfp.n2 = 40\n",
            scratch("unstable"), o, e) == kNumericalFailure);
  CHECK(run("jump", "sim.dt = 0.5\nsim.paths = 2\n", scratch("big_dt"), o, e) == kNumericalFailure);
  CHECK(run("simulate", "model.kind = custom\ncustom.beta0 = -1\nsim.paths = 2\n", scratch("roots"), o,
            e) == kAssumptionViolation);
  CHECK(o.str().empty());
}

TEST_CASE("jump writes the simulate schema") {
  std::ostringstream o, e;
  const fs::path a = scratch("jump");
  CHECK(run("jump", "sim.paths = 50\nsim.dt = 0.01\noutput.trajectories = 1\n", a, o, e) == kOk);
  const std::string t = slurp(a / "trajectories.csv");
  CHECK(t.rfind("path_id,t,X,Y\n0,0,30,100\n", 0) == 0);
  CHECK(slurp(a / "moments.csv").rfind("t,mean_X,var_X,se_mean_X,se_var_X,mean_Y,var_Y,se_mean_Y,se_var_Y\n", 0) == 0);
}

TEST_CASE("fokker-planck writes density snapshots") {
  std::ostringstream o, e;
  const fs::path a = scratch("fp");
  CHECK(run("fokker-planck", "fp.n1 = 110\nfp.n2 = 70\nfp.dt = 0.01\nfp.snapshots = 2\n", a, o, e) == kOk);
  const std::string d = slurp(a / "density.csv");
  CHECK(d.rfind("t,x1,x2,p\n", 0) == 0);
  CHECK(std::count(d.begin(), d.end(), '\n') == 1 + 2 * 110 * 70);
}

TEST_CASE("compare prints one distance line") {
  std::ostringstream o, e;
  const std::string cfg =
      "compare.kind = master_vs_jump\nsim.paths = 2000\nfp.dt = 0.01\nfp.n1 = 110\nfp.n2 = 70\n"
      "compare.threshold = 2\n";
  CHECK(run("compare", cfg, scratch("compare"), o, e) == kOk);
  const std::string line = o.str();
  CHECK(std::count(line.begin(), line.end(), '\n') == 1);
  CHECK(line.find(" pass\n") != std::string::npos);
  std::ostringstream o2, e2;
  CHECK(run("compare", cfg + "compare.threshold = 0\n", scratch("compare_fail"), o2, e2) == kConfigError);
  std::ostringstream o3, e3;
  const std::string strict =
      "compare.kind = master_vs_jump\nsim.paths = 200\nfp.dt = 0.01\nfp.n1 = 110\nfp.n2 = 70\n"
      "compare.threshold = 0\n";
  CHECK(run("compare", strict, scratch("compare_fail"), o3, e3) == kCompareFailed);
  CHECK(o3.str().find(" fail\n") != std::string::npos);
}
