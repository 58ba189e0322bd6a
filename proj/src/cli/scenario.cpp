#include "sisde/cli/scenario.hpp"

namespace sisde::cli {

namespace {

void require_greenhalgh(const ScenarioConfig& config, const char* what) {
  if (config.kind != ModelKind::greenhalgh) {
    throw ConfigError({std::string(what) + " needs model.kind = greenhalgh"});
  }
}

}  // namespace

TransitionTable scenario_table(const ScenarioConfig& config) {
  require_greenhalgh(config, "the jump model");
  config.greenhalgh.validate();
  return greenhalgh_table(config.greenhalgh);
}

CoefficientPair scenario_coefficients(const ScenarioConfig& config) {
  if (config.kind == ModelKind::greenhalgh) {
    config.greenhalgh.validate();
    return greenhalgh_coeffs(config.greenhalgh, config.declared);
  }
  const CustomModel m = config.custom;
  CoefficientPair out;
  out.drift.a = [m](double, double y, double x) { return m.a0 + m.ay * y + m.ax * x; };
  out.drift.growth_M = config.declared.M;
  out.drift.lipschitz_L = config.declared.L;
  out.diffusion.alpha = [m](double, double y) { return m.alpha0 + m.alpha1 * y; };
  out.diffusion.beta = [m](double, double y) { return m.beta0 + m.beta1 * y; };
  out.diffusion.scale = [m](double, double) { return m.scale; };
  out.diffusion.growth_M = config.declared.M;
  out.diffusion.holder_H = config.declared.H;
  return out;
}

TriangularModel scenario_model(const ScenarioConfig& config) {
  const CoefficientPair coeffs = scenario_coefficients(config);
  TriangularModel model;
  model.drift = coeffs.drift;
  model.diffusion = coeffs.diffusion;
  if (config.kind == ModelKind::custom && config.custom.driving == DrivingKind::general) {
    const CustomModel m = config.custom;
    model.driving = GeneralY{[m](double, double y) { return m.m0 + m.m1 * y; },
                             [m](double, double y) { return m.sigma0 + m.sigma1 * y; }};
  } else {
    model.driving = SquareRootY{config.greenhalgh.mu, config.sim.absorb};
  }
  model.x0 = config.x0;
  model.y0 = config.y0;
  model.horizon = config.sim.horizon;
  model.rho = config.sim.rho;
  return model;
}

State2 scenario_state(const ScenarioConfig& config) {
  if (!(config.x0 >= 0.0 && config.x0 <= config.y0)) {
    throw ConfigError({"init.x0: must lie in [0, init.y0] for the two-compartment model"});
  }
  return State2{config.y0 - config.x0, config.x0};
}

PathSimulator scenario_simulator(const ScenarioConfig& config) {
  const Partition partition(config.sim.horizon, config.sim.level);
  if (config.sim.scheme == Scheme::full2d) {
    const TransitionTable table = scenario_table(config);
    const State2 s0 = scenario_state(config);
    return [table, s0, partition](std::size_t, Rng& rng) {
      JointPath p = simulate_full_2d(table, s0, partition, rng);
      for (std::size_t k = 0; k < p.x.size(); ++k) {
        const double s1 = p.x[k];
        p.x[k] = p.y[k];
        p.y[k] = s1 + p.y[k];
      }
      return p;
    };
  }
  const TriangularModel model = scenario_model(config);
  return [model, partition](std::size_t, Rng& rng) {
    return simulate_triangular(model, partition, rng);
  };
}

}  // namespace sisde::cli
