#include "nagumo/validation.hpp"

#include <cmath>

#include "nagumo/experiment.hpp"
#include "nagumo/oracle.hpp"

namespace nagumo {

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& c : checks) {
    checks_json.push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"value", c.value},
                           {"comparison", c.comparison},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  }
  return {{"pass", all_pass()}, {"checks", checks_json}};
}

namespace {

constexpr int kResidualPoints = 1000;

double max_fp_residual(const LatticeSpec& spec, const NonlinearityParams& p, double D,
                       std::uint64_t seed, const NegativeControl& ctl) {
  NoiseConfig cfg;
  cfg.D = D;
  RngStream rng(seed, 101);
  double worst = 0.0;
  for (int i = 0; i < kResidualPoints; ++i) {
    const PhasePoint pt = sample_phase_point(rng, cfg, spec);
    worst = std::max(worst, std::abs(fp_residual_langevin(pt.u, D, spec, p, ctl)));
  }
  return worst;
}

double max_liouville_residual(const LatticeSpec& spec, const NonlinearityParams& p,
                              const NoiseConfig& cfg, std::uint64_t seed,
                              const NegativeControl& ctl) {
  RngStream rng(seed, 202);
  double worst = 0.0;
  for (int i = 0; i < kResidualPoints; ++i) {
    const PhasePoint pt = sample_phase_point(rng, cfg, spec);
    worst = std::max(worst, std::abs(liouville_residual_extended(pt, cfg, spec, p, ctl)));
  }
  return worst;
}

ExperimentConfig quiet_config() {
  ExperimentConfig cfg;
  cfg.output.emit_plot_script = false;
  return cfg;
}

}  // namespace

ValidationReport run_validation(std::uint64_t seed) {
  ValidationReport rep;
  auto below = [&rep](std::string name, double value, double threshold, std::string detail = {}) {
    rep.checks.push_back(
        {std::move(name), value < threshold, value, "<", threshold, std::move(detail)});
  };
  auto above = [&rep](std::string name, double value, double threshold, std::string detail = {}) {
    rep.checks.push_back(
        {std::move(name), value > threshold, value, ">", threshold, std::move(detail)});
  };
  auto flag = [&rep](std::string name, bool pass, std::string detail = {}) {
    rep.checks.push_back({std::move(name), pass, pass ? 1.0 : 0.0, "==", 1.0, std::move(detail)});
  };

  const NonlinearityParams p_asym{4.0, 0.25};
  const NonlinearityParams p_sym{4.0, 0.5};
  const LatticeSpec single{1, 0.0, BoundaryCondition::SingleCell};
  const LatticeSpec chain3{3, 1.0, BoundaryCondition::Neumann};
  const LatticeSpec chain4{4, 1.0, BoundaryCondition::Neumann};
  const LatticeSpec chain8{8, 1.0, BoundaryCondition::Neumann};

  // Stationarity of exp(-energy/D) under the additive-noise generator.
  below("fp_residual_single_cell", max_fp_residual(single, p_asym, 0.04, seed, {}), 1e-9,
        "1000 random points, D = 0.04");
  below("fp_residual_lattice_n4", max_fp_residual(chain4, p_asym, 0.04, seed, {}), 1e-9,
        "n = 4 Neumann chain, l = 1");

  // Stationarity of the augmented density under the extended generator.
  for (const double gamma : {0.0, 1.0}) {
    for (const EtaMode mode : {EtaMode::Independent, EtaMode::Synchronous}) {
      NoiseConfig cfg;
      cfg.D = 0.04;
      cfg.gamma = gamma;
      cfg.eta_mode = mode;
      const std::string tag =
          std::string(gamma == 0.0 ? "gamma0" : "gamma1") + "_" + to_string(mode);
      below("liouville_residual_single_" + tag,
            max_liouville_residual(single, p_asym, cfg, seed, {}), 1e-9);
      below("liouville_residual_lattice_" + tag,
            max_liouville_residual(chain3, p_asym, cfg, seed, {}), 1e-9, "n = 3 Neumann, l = 1");
    }
  }

  // Negative controls: the residuals must be able to fail loudly.
  {
    NoiseConfig cfg;
    cfg.D = 0.04;
    cfg.gamma = 0.0;
    above("negative_control_flipped_h",
          max_liouville_residual(single, p_asym, cfg, seed, NegativeControl::flipped_h()), 1e-2,
          "eta drift sign flipped inside the operator");
    above("negative_control_halved_measure_d_liouville",
          max_liouville_residual(single, p_asym, cfg, seed,
                                 NegativeControl::halved_exponent_d()),
          1e-2, "density exponent at D/2, dynamics at D");
    above("negative_control_halved_measure_d_fp",
          max_fp_residual(single, p_asym, 0.04, seed, NegativeControl::halved_exponent_d()),
          1e-2);
  }

  // Two independent routes to the single-cell stationary density.
  {
    double worst = 0.0;
    std::string worst_combo;
    for (const auto& p : {p_asym, p_sym}) {
      for (const double D : {0.02, 0.04, 0.1}) {
        const double l1 = l1_distance(steady_state_1d(p, D, -0.5, 1.5, 2001),
                                      exact_density(p, D, -0.5, 1.5, 2001));
        if (l1 > worst) {
          worst = l1;
          worst_combo = "alpha = " + std::to_string(p.alpha) + ", D = " + std::to_string(D);
        }
      }
    }
    below("steady_state_vs_exact_density", worst, 1e-3, "worst of six combos: " + worst_combo);
  }

  // Quadrature fluctuation-dissipation identity, on a domain wide enough
  // that the boundary density is numerically zero.
  {
    double worst = 0.0;
    for (const auto& p : {p_asym, p_sym})
      for (const double D : {0.02, 0.04, 0.1})
        worst = std::max(worst,
                         std::abs(stationary_fd_identity_residual(p, D, -1.5, 2.5, 20001)));
    below("quadrature_fd_identity", worst, 1e-8, "six (alpha, D) combos on [-1.5, 2.5]");
  }

  // First integral along the deterministic extended dynamics.
  for (const EtaMode mode : {EtaMode::Independent, EtaMode::Synchronous}) {
    for (const auto* spec : {&single, &chain8}) {
      ExperimentConfig cfg = quiet_config();
      cfg.reaction = p_asym;
      cfg.lattice = *spec;
      cfg.noise.D = 0.04;
      cfg.noise.gamma = 0.0;
      cfg.noise.eta_mode = mode;
      cfg.run.regime = Regime::Deterministic;
      cfg.run.t_total = 1e3;
      cfg.run.burn_in = 0.0;
      cfg.run.seed = seed;
      const RunResult r = run_experiment(cfg);
      below("first_integral_drift_n" + std::to_string(spec->n) + "_" + to_string(mode),
            r.first_integral_drift, 1e-6, "t = 1e3, dt = 1e-3");
    }
  }

  // A threshold start freezes u exactly, but the full extended state still
  // leaves the fixed point through the lambda drift.
  {
    NoiseConfig cfg;
    cfg.D = 0.04;
    cfg.gamma = 1.0;
    ExtendedStepper stepper(single, p_asym, cfg);
    ExtendedState x = ExtendedState::zero(single, cfg);
    x.u[0] = p_asym.alpha;
    RngStream rng(seed, 303);
    for (int s = 0; s < 10000; ++s) stepper.sdc(x, 1e-3, rng);
    above("equilibrium_escape", std::abs(x.lambda) + std::abs(x.u[0] - p_asym.alpha), 1e-2,
          "state distance from the threshold fixed point after t = 10");
  }

  // The Ornstein-Uhlenbeck half-steps alone sample N(0, D/Q_lambda).
  {
    NoiseConfig cfg;
    cfg.D = 0.04;
    cfg.gamma = 1.0;
    RngStream rng(seed, 404);
    MomentAccumulator acc;
    double lambda = 0.0;
    for (int i = 0; i < 1'000'000; ++i) {
      lambda = ou_halfstep(lambda, 2.0, cfg, rng);
      lambda = ou_halfstep(lambda, 2.0, cfg, rng);
      acc.add(lambda);
    }
    below("ou_marginal_variance", std::abs(acc.variance() / (cfg.D / cfg.Q_lambda) - 1.0), 0.02,
          "1e6 draws of the exact OU update with frozen drift");
  }

  // Trajectory-level relations on a desk-scale ergodized run.
  {
    ExperimentConfig cfg = quiet_config();
    cfg.reaction = p_asym;
    cfg.lattice = single;
    cfg.run.regime = Regime::Sdc;
    cfg.run.t_total = 4e4;
    cfg.run.burn_in = 1e3;
    cfg.run.seed = seed;
    const RunResult r = run_experiment(cfg);

    const auto fd = fd_residual(r.averages, cfg.noise.D);
    below("fd_residual_sdc_sigmas", std::abs(fd.value) / fd.std_error, 3.0,
          "residual in batch-means standard errors, t = 4e4");
    const auto lemma = r.averages.average_with_error(Observable::LambdaHessTrace);
    below("lambda_hess_average_sigmas", std::abs(lemma.value) / lemma.std_error, 3.0);
    const auto etag = r.averages.average_with_error(Observable::EtaGradCoupling);
    below("eta_grad_average_sigmas", std::abs(etag.value) / etag.std_error, 3.0);

    const auto glam = gaussian_check(r.lambda_moments, cfg.noise.D / cfg.noise.Q_lambda);
    flag("gaussian_lambda", glam.pass(),
         "variance " + std::to_string(glam.variance) + ", excess kurtosis " +
             std::to_string(glam.excess_kurtosis));
    const auto geta = gaussian_check(r.eta_moments, cfg.noise.D / cfg.noise.Q_eta);
    flag("gaussian_eta", geta.pass(),
         "variance " + std::to_string(geta.variance) + ", excess kurtosis " +
             std::to_string(geta.excess_kurtosis));
  }

  // Same relation along the additive-noise baseline.
  {
    ExperimentConfig cfg = quiet_config();
    cfg.reaction = p_asym;
    cfg.lattice = single;
    cfg.run.regime = Regime::Langevin;
    cfg.run.t_total = 2e4;
    cfg.run.burn_in = 1e3;
    cfg.run.seed = seed;
    const RunResult r = run_experiment(cfg);
    const auto fd = fd_residual(r.averages, cfg.noise.D);
    below("fd_residual_langevin_sigmas", std::abs(fd.value) / fd.std_error, 3.0, "t = 2e4");
  }

  // Bitwise repeatability of a seeded run.
  {
    ExperimentConfig cfg = quiet_config();
    cfg.reaction = p_sym;
    cfg.lattice = single;
    cfg.run.regime = Regime::Sdc;
    cfg.run.t_total = 50.0;
    cfg.run.burn_in = 0.0;
    cfg.run.seed = seed;
    const RunResult a = run_experiment(cfg);
    const RunResult b = run_experiment(cfg);
    bool same = a.histogram.total() == b.histogram.total();
    for (int i = 0; same && i < a.histogram.bins(); ++i)
      same = a.histogram.count(i) == b.histogram.count(i);
    same = same && a.averages.mean(Observable::Energy) == b.averages.mean(Observable::Energy) &&
           a.averages.mean(Observable::Lambda) == b.averages.mean(Observable::Lambda);
    flag("determinism", same, "two identically seeded runs produce identical records");
  }

  return rep;
}

}  // namespace nagumo
