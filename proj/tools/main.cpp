#include <fstream>
#include <iostream>
#include <sstream>
#include <utility>

#include "CLI11.hpp"
#include "sisde/cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"SIS diffusion simulator"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string out_dir;

  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "Monte Carlo paths of the diffusion, moments and quantiles"},
      {"jump", "Monte Carlo paths of the discrete jump chain"},
      {"converge", "inter-level errors and moment bounds across mesh levels"},
      {"validate", "check the declared growth and step constants by sampling"},
      {"fokker-planck", "evolve a density on a lattice (master or diffusion mode)"},
      {"compare", "distance between a lattice density and Monte Carlo samples"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "scenario file (key = value)")->required();
    sub->add_option("--seed", seed, "overrides sim.seed");
    sub->add_option("--workers", workers, "worker threads, 0 for all cores");
    sub->add_option("--out", out_dir, "output directory, overrides output.dir");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sisde::cli::kConfigError;
  }

  const CLI::App* sub = app.get_subcommands().front();
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << "\n";
    return sisde::cli::kConfigError;
  }
  std::ostringstream text;
  text << in.rdbuf();

  sisde::cli::RunFlags flags;
  if (sub->count("--seed") > 0) flags.seed = seed;
  flags.workers = workers;
  if (sub->count("--out") > 0) flags.out = out_dir;
  return sisde::cli::run_subcommand(sub->get_name(), text.str(), flags, std::cout, std::cerr);
}
