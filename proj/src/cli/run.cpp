#include "sisde/cli/run.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>

#include "sisde/cli/csv.hpp"
#include "sisde/cli/scenario.hpp"
#include "sisde/diagnostics.hpp"
#include "sisde/fokker_planck.hpp"
#include "sisde/parallel.hpp"

namespace sisde::cli {

namespace fs = std::filesystem;

namespace {

using ull = unsigned long long;

struct Context {
  const ScenarioConfig& config;
  fs::path dir;
  unsigned workers;
  std::ostream& out;
  std::ostream& err;
};

std::size_t steps_for(double horizon, double dt, const char* key) {
  const double n = std::round(horizon / dt);
  if (n < 1.0 || std::abs(n * dt - horizon) > 1e-9 * horizon) {
    throw ConfigError({std::string(key) + ": must divide sim.T into a whole number of steps"});
  }
  return static_cast<std::size_t>(n);
}

void write_trajectory_rows(CsvWriter& csv, std::size_t path_id, const std::vector<double>& t,
                           const std::vector<double>& x, const std::vector<double>& y) {
  for (std::size_t k = 0; k < t.size(); ++k) {
    csv.cell(static_cast<ull>(path_id)).cell(t[k]).cell(x[k]).cell(y[k]);
    csv.end_row();
  }
}

void write_moments(const fs::path& path, const std::vector<double>& t, const MomentSeries& x,
                   const MomentSeries& y) {
  CsvWriter csv(path, {"t", "mean_X", "var_X", "se_mean_X", "se_var_X", "mean_Y", "var_Y",
                       "se_mean_Y", "se_var_Y"});
  for (std::size_t k = 0; k < t.size(); ++k) {
    csv.cell(t[k]).cell(x.mean[k]).cell(x.var[k]).cell(x.se_mean[k]).cell(x.se_var[k]);
    csv.cell(y.mean[k]).cell(y.var[k]).cell(y.se_mean[k]).cell(y.se_var[k]);
    csv.end_row();
  }
}

int run_simulate(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  const PathSimulator sim = scenario_simulator(c);
  EnsembleOptions opts;
  opts.paths = c.sim.paths;
  opts.seed = c.sim.seed;
  opts.workers = ctx.workers;
  opts.histogram_bins = c.output.bins;
  const EnsembleStats stats = ensemble(sim, opts);

  {
    CsvWriter csv(ctx.dir / "trajectories.csv", {"path_id", "t", "X", "Y"});
    const std::size_t shown = std::min(c.output.trajectories, c.sim.paths);
    for (std::size_t i = 0; i < shown; ++i) {
      Rng rng = Rng::substream(c.sim.seed, i);
      const JointPath p = sim(i, rng);
      write_trajectory_rows(csv, i, stats.times, p.x, p.y);
    }
  }
  write_moments(ctx.dir / "moments.csv", stats.times, stats.x, stats.y);
  {
    CsvWriter csv(ctx.dir / "quantiles.csv", {"variable", "level", "value"});
    for (std::size_t q = 0; q < stats.quantile_levels.size(); ++q) {
      csv.cell("X").cell(stats.quantile_levels[q]).cell(stats.x_quantiles[q]);
      csv.end_row();
    }
    for (std::size_t q = 0; q < stats.quantile_levels.size(); ++q) {
      csv.cell("Y").cell(stats.quantile_levels[q]).cell(stats.y_quantiles[q]);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(ctx.dir / "histogram.csv", {"variable", "bin", "lo", "hi", "count"});
    const auto rows = [&](std::string_view name, const Histogram& h) {
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        const double lo = h.lo + static_cast<double>(b) * h.bin_width();
        const double hi = b + 1 == h.counts.size() ? h.hi : lo + h.bin_width();
        csv.cell(name).cell(static_cast<ull>(b)).cell(lo).cell(hi).cell(static_cast<ull>(h.counts[b]));
        csv.end_row();
      }
    };
    rows("X", stats.x_histogram);
    rows("Y", stats.y_histogram);
  }
  ctx.err << "simulate: " << stats.paths << " paths, " << stats.exits << " root-interval exits, "
          << stats.clamps << " clamped states\n";
  return kOk;
}

int run_jump(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  const TransitionTable table = scenario_table(c);
  const State2 s0 = scenario_state(c);
  const std::size_t steps = steps_for(c.sim.horizon, c.sim.dt, "sim.dt");
  std::vector<double> times(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) times[k] = static_cast<double>(k) * c.sim.dt;

  const auto run_path = [&](Rng& rng) {
    const auto states = simulate_jump_chain(table, s0, c.sim.dt, c.sim.horizon, rng);
    std::pair<std::vector<double>, std::vector<double>> xy;
    for (const auto& s : states) {
      xy.first.push_back(s.s2);
      xy.second.push_back(s.total());
    }
    return xy;
  };

  struct Acc {
    std::vector<RunningMoments> x;
    std::vector<RunningMoments> y;
    void merge(const Acc& o) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        x[k].merge(o.x[k]);
        y[k].merge(o.y[k]);
      }
    }
  };
  Acc zero{std::vector<RunningMoments>(steps + 1), std::vector<RunningMoments>(steps + 1)};
  const Acc acc = reduce_paths(c.sim.paths, c.sim.seed, ctx.workers, zero,
                               [&](std::size_t, Rng& rng, Acc& a) {
                                 const auto [x, y] = run_path(rng);
                                 for (std::size_t k = 0; k < x.size(); ++k) {
                                   a.x[k].add(x[k]);
                                   a.y[k].add(y[k]);
                                 }
                               });

  {
    CsvWriter csv(ctx.dir / "trajectories.csv", {"path_id", "t", "X", "Y"});
    const std::size_t shown = std::min(c.output.trajectories, c.sim.paths);
    for (std::size_t i = 0; i < shown; ++i) {
      Rng rng = Rng::substream(c.sim.seed, i);
      const auto [x, y] = run_path(rng);
      write_trajectory_rows(csv, i, times, x, y);
    }
  }
  const auto series = [](const std::vector<RunningMoments>& m) {
    MomentSeries s;
    for (const auto& r : m) {
      s.mean.push_back(r.mean);
      s.var.push_back(r.variance());
      s.se_mean.push_back(r.se_mean());
      s.se_var.push_back(r.se_variance());
    }
    return s;
  };
  write_moments(ctx.dir / "moments.csv", times, series(acc.x), series(acc.y));
  return kOk;
}

int run_converge(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  const TriangularModel model = scenario_model(c);
  const ConvergenceReport report =
      cauchy_errors(model, c.sim.levels, c.sim.paths, c.sim.seed, ctx.workers);
  const StepBoundReport step = step_bound_check(
      model, Partition(c.sim.horizon, c.sim.levels.back()), c.sim.paths, c.sim.seed, ctx.workers);

  {
    CsvWriter csv(ctx.dir / "convergence.csv",
                  {"level", "mesh", "l1_error", "l1_se", "sup_error", "sup_se"});
    for (const auto& p : report.pairs) {
      csv.cell(static_cast<long long>(p.level)).cell(p.mesh).cell(p.l1_error).cell(p.l1_se);
      csv.cell(p.sup_error).cell(p.sup_se);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(ctx.dir / "levels.csv",
                  {"level", "mesh", "gamma1", "max_mean_abs_X", "max_mean_abs_X_se"});
    for (const auto& s : report.levels) {
      csv.cell(static_cast<long long>(s.level)).cell(s.mesh).cell(s.gamma1);
      csv.cell(s.max_mean_abs_x).cell(s.max_mean_abs_x_se);
      csv.end_row();
    }
  }
  {
    CsvWriter csv(ctx.dir / "bounds.csv", {"quantity", "value"});
    const auto row = [&](std::string_view k, double v) {
      csv.cell(k).cell(v);
      csv.end_row();
    };
    const auto flag = [&](std::string_view k, bool v) {
      csv.cell(k).cell(v ? "true" : "false");
      csv.end_row();
    };
    row("M", report.M);
    row("horizon", report.horizon);
    row("sup_mean_1_plus_abs_Y", report.sup_mean_1_plus_abs_y);
    row("sup_mean_1_plus_abs_Y_sq", report.sup_mean_1_plus_abs_y_sq);
    row("G", report.G);
    row("uniform_bound", report.uniform_bound);
    flag("uniform_bound_holds", report.uniform_bound_holds());
    row("M1", report.M1);
    flag("M1_estimated", true);
    row("gamma2", report.gamma2);
    row("slope", report.slope);
    row("step_level", static_cast<double>(step.level));
    row("step_empirical", step.empirical);
    row("step_empirical_se", step.empirical_se);
    row("step_bound", step.bound);
    flag("step_bound_holds", step.pass);
  }
  if (!report.uniform_bound_holds()) ctx.err << "converge: uniform moment bound exceeded\n";
  if (!step.pass) ctx.err << "converge: step bound exceeded\n";
  return kOk;
}

int run_validate(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  const CoefficientPair coeffs = scenario_coefficients(c);
  Rng rng(c.sim.seed);
  const AssumptionReport report =
      validate_assumptions(coeffs.drift, coeffs.diffusion, c.validate.box, c.validate.samples, rng);

  struct Row {
    const char* name;
    const char* key;
    double estimate;
    double declared;
    bool flag;
  };
  const std::array<Row, 4> rows{{
      {"holder_H", "model.H", report.holder_estimate, c.declared.H, report.holder_flag},
      {"lipschitz_L", "model.L", report.lipschitz_estimate, c.declared.L, report.lipschitz_flag},
      {"drift_growth_M", "model.M", report.drift_growth_estimate, c.declared.M, report.drift_growth_flag},
      {"diffusion_growth_M", "model.M", report.diffusion_growth_estimate, c.declared.M,
       report.diffusion_growth_flag},
  }};
  CsvWriter csv(ctx.dir / "assumptions.csv", {"quantity", "estimate", "declared", "flag"});
  for (const Row& r : rows) {
    csv.cell(r.name).cell(r.estimate).cell(r.declared).cell(r.flag ? "true" : "false");
    csv.end_row();
    if (r.flag) {
      ctx.err << "validate: " << r.name << " estimate " << format_real(r.estimate)
              << " exceeds declared " << r.key << " = " << format_real(r.declared) << "\n";
    }
  }
  return report.any_flag() ? kAssumptionViolation : kOk;
}

struct MasterRun {
  DensityField field;
  std::vector<std::pair<double, DensityField>> snapshots;
};

MasterRun run_master(const ScenarioConfig& c, double dt, std::size_t snapshots) {
  const TransitionTable table = scenario_table(c);
  const State2 s0 = scenario_state(c);
  const LatticeGeometry geom = unit_lattice(c.fp.n1, c.fp.n2);
  if (s0.s1 != std::round(s0.s1) || s0.s2 != std::round(s0.s2) ||
      s0.s1 >= static_cast<double>(geom.n1) || s0.s2 >= static_cast<double>(geom.n2)) {
    throw ConfigError({"init: the master equation needs an integer start inside the fp lattice"});
  }
  const std::size_t steps = steps_for(c.sim.horizon, dt, "fp.dt");
  MasterRun run{point_mass(geom, static_cast<std::size_t>(s0.s1), static_cast<std::size_t>(s0.s2)), {}};
  std::size_t next = 1;
  for (std::size_t k = 1; k <= steps; ++k) {
    run.field = master_step(run.field, table, static_cast<double>(k - 1) * dt, dt);
    if (snapshots > 0 && k == next * steps / snapshots) {
      run.snapshots.emplace_back(static_cast<double>(k) * dt, run.field);
      ++next;
    }
  }
  return run;
}

void write_density(const fs::path& path, const std::vector<std::pair<double, DensityField>>& snaps) {
  CsvWriter csv(path, {"t", "x1", "x2", "p"});
  for (const auto& [t, f] : snaps) {
    const LatticeGeometry& g = f.geometry;
    for (std::size_t i = 0; i < g.n1; ++i) {
      for (std::size_t j = 0; j < g.n2; ++j) {
        csv.cell(t).cell(g.x1(i)).cell(g.x2(j)).cell(f.at(i, j));
        csv.end_row();
      }
    }
  }
}

int run_fokker_planck(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  if (c.fp.mode == FpMode::master) {
    const MasterRun run = run_master(c, c.fp.dt, c.fp.snapshots);
    write_density(ctx.dir / "density.csv", run.snapshots);
    ctx.err << "fokker-planck: master equation, boundary flux " << format_real(run.field.boundary_flux)
            << "\n";
    return kOk;
  }

  const TransitionTable table = scenario_table(c);
  const State2 s0 = scenario_state(c);
  const LatticeGeometry geom{c.fp.n1, c.fp.n2, 0.0, 0.0, c.fp.h, c.fp.h};
  const double i0 = std::round(s0.s1 / c.fp.h);
  const double j0 = std::round(s0.s2 / c.fp.h);
  if (i0 >= static_cast<double>(geom.n1) || j0 >= static_cast<double>(geom.n2)) {
    throw ConfigError({"init: the start lies outside the fp lattice"});
  }
  // the rates do not depend on time, so one sample serves every step
  const CoefficientField coeffs = sample_coefficients(geom, table, 0.0);
  const std::size_t steps = steps_for(c.sim.horizon, c.fp.dt, "fp.dt");
  DensityField field = point_mass(geom, static_cast<std::size_t>(i0), static_cast<std::size_t>(j0));
  std::vector<std::pair<double, DensityField>> snaps;
  bool reported = false;
  std::size_t next = 1;
  for (std::size_t k = 1; k <= steps; ++k) {
    FpStepResult r = fp_step(field, coeffs, c.fp.dt);
    if (r.first_negative && !reported) {
      ctx.err << "fokker-planck: negative density first at step " << k << ", cell ("
              << r.first_negative->first << ", " << r.first_negative->second << ")\n";
      reported = true;
    }
    field = std::move(r.field);
    if (k == next * steps / c.fp.snapshots) {
      snaps.emplace_back(static_cast<double>(k) * c.fp.dt, field);
      ++next;
    }
  }
  write_density(ctx.dir / "density.csv", snaps);
  ctx.err << "fokker-planck: total mass " << format_real(field.total_mass()) << "\n";
  return kOk;
}

int run_compare(const Context& ctx) {
  const ScenarioConfig& c = ctx.config;
  const MasterRun master = run_master(c, c.fp.dt, 0);
  double distance = 0.0;
  if (c.compare.kind == CompareKind::n_marginal) {
    const auto marginal = total_marginal(master.field);
    const TriangularModel model = scenario_model(c);
    const Partition partition(c.sim.horizon, c.sim.level);
    const auto finals = map_paths<double>(c.sim.paths, c.sim.seed, ctx.workers,
                                          [&](std::size_t, Rng& rng) {
                                            const BrownianGrid g = sample_brownian_grid(partition, rng);
                                            return simulate_driving(model.driving, model.y0, partition,
                                                                    g.dw1)
                                                .back();
                                          });
    distance = l1_distance(marginal, integer_histogram(finals, 0.0, marginal.size()));
  } else {
    const TransitionTable table = scenario_table(c);
    const State2 s0 = scenario_state(c);
    const auto finals = map_paths<State2>(c.sim.paths, c.sim.seed, ctx.workers,
                                          [&](std::size_t, Rng& rng) {
                                            return simulate_jump_chain(table, s0, c.fp.dt,
                                                                       c.sim.horizon, rng)
                                                .back();
                                          });
    std::vector<double> s1;
    std::vector<double> s2;
    for (const auto& s : finals) {
      s1.push_back(s.s1);
      s2.push_back(s.s2);
    }
    distance = compare_density(master.field, density_from_samples(master.field.geometry, s1, s2));
  }
  const bool pass = distance <= c.compare.threshold;
  ctx.out << format_real(distance) << (pass ? " pass" : " fail") << "\n";
  return pass ? kOk : kCompareFailed;
}

using Runner = int (*)(const Context&);

const std::map<std::string_view, Runner>& runners() {
  static const std::map<std::string_view, Runner> table = {
      {"simulate", run_simulate}, {"jump", run_jump},
      {"converge", run_converge}, {"validate", run_validate},
      {"fokker-planck", run_fokker_planck}, {"compare", run_compare},
  };
  return table;
}

int exit_code_for(std::exception_ptr e, std::ostream& err) {
  try {
    std::rethrow_exception(e);
  } catch (const PathFailure& f) {
    err << "error: path " << f.path() << " failed\n";
    try {
      f.rethrow_cause();
    } catch (...) {
      return exit_code_for(std::current_exception(), err);
    }
  } catch (const ConfigError& x) {
    err << "error: " << x.what() << "\n";
    return kConfigError;
  } catch (const RootConditionError& x) {
    err << "assumption violated: " << x.what() << "\n";
    return kAssumptionViolation;
  } catch (const AssumptionViolation& x) {
    err << "assumption violated: " << x.what() << "\n";
    return kAssumptionViolation;
  } catch (const DomainError& x) {
    err << "error: " << x.what() << "\n";
    return kConfigError;
  } catch (const std::exception& x) {
    err << "numerical failure: " << x.what() << "\n";
    return kNumericalFailure;
  }
  return kNumericalFailure;
}

}  // namespace

bool known_subcommand(std::string_view name) { return runners().contains(name); }

int run_subcommand(std::string_view name, const std::string& config_text, const RunFlags& flags,
                   std::ostream& out, std::ostream& err) {
  const auto it = runners().find(name);
  if (it == runners().end()) {
    err << "error: unknown subcommand '" << name << "'\n";
    return kConfigError;
  }
  try {
    ScenarioConfig config = parse_config(config_text);
    if (flags.seed) override_seed(config, *flags.seed);
    const fs::path dir = flags.out ? *flags.out : fs::path(config.output.dir);
    fs::create_directories(dir);
    write_text(dir / "manifest.cfg", manifest_text(config, name));
    return it->second(Context{config, dir, flags.workers, out, err});
  } catch (...) {
    return exit_code_for(std::current_exception(), err);
  }
}

}  // namespace sisde::cli
