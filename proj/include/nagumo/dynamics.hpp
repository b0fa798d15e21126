#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "nagumo/model.hpp"

namespace nagumo {

enum class EtaMode { Independent, Synchronous };

/// Parameters of the noise models. D is the target noise intensity,
/// Q_lambda and Q_eta the inertia of the time-scale and current variables,
/// gamma the friction of the ergodizing Ornstein-Uhlenbeck kick on lambda
/// (gamma = 0 leaves the dynamics purely deterministic).
struct NoiseConfig {
  double D = 0.04;
  double Q_lambda = 1.0;
  double Q_eta = 1.0;
  double gamma = 1.0;
  EtaMode eta_mode = EtaMode::Independent;

  void check() const {
    if (!(D > 0.0)) throw std::invalid_argument("NoiseConfig: D must be > 0");
    if (!(Q_lambda > 0.0)) throw std::invalid_argument("NoiseConfig: Q_lambda must be > 0");
    if (!(Q_eta > 0.0)) throw std::invalid_argument("NoiseConfig: Q_eta must be > 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("NoiseConfig: gamma must be >= 0");
  }
};

inline Index eta_length(const NoiseConfig& cfg, const LatticeSpec& spec) {
  return cfg.eta_mode == EtaMode::Independent ? spec.n : 1;
}

/// State of the extended dynamics: lattice potentials u, time-scale
/// variable lambda, noise-current variables eta (one per node, or a single
/// shared one in Synchronous mode), and the redundant integral variable zeta.
struct ExtendedState {
  Vector u;
  double lambda = 0.0;
  Vector eta;
  double zeta = 0.0;

  static ExtendedState zero(const LatticeSpec& spec, const NoiseConfig& cfg) {
    ExtendedState x;
    x.u = Vector::Zero(spec.n);
    x.eta = Vector::Zero(eta_length(cfg, spec));
    return x;
  }
};

inline void check_extended_shape(const ExtendedState& x, const NoiseConfig& cfg,
                                 const LatticeSpec& spec) {
  check_state_shape(x.u, spec);
  if (x.eta.size() != eta_length(cfg, spec))
    throw std::invalid_argument("eta length " + std::to_string(x.eta.size()) +
                                " does not match eta mode");
}

/// Thrown when an integrator produces a non-finite value. `variable` names
/// the first offending component; the experiment loop, which knows the
/// simulation time, rethrows with it attached.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::string variable,
                           double time = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error("non-finite value in " + variable +
                           (std::isnan(time) ? std::string{}
                                             : " at t = " + std::to_string(time))),
        variable_(std::move(variable)),
        time_(time) {}
  const std::string& variable() const { return variable_; }
  double time() const { return time_; }

 private:
  std::string variable_;
  double time_;
};

/// Seeded Gaussian stream. Identical (seed, stream) pairs reproduce the
/// identical draw sequence bit-for-bit on a given build; distinct stream
/// ids decorrelate trajectories run from one base seed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  double gaussian() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_, stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// ---- vector fields ----

/// Plain relaxation field: du/dt = -grad energy.
Vector gradient_flow_rhs(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p);

/// Drift of the time-scale variable,
/// g(u) = (1/Q_lambda) * sum_i [ (grad_i)^2 - D * hess_ii ].
double lambda_drift(const Vector& u, const NoiseConfig& cfg, const LatticeSpec& spec,
                    const NonlinearityParams& p);

/// Drift of the current variables: per-node -grad_i/Q_eta, or the single
/// shared -sum_j grad_j / Q_eta in Synchronous mode.
Vector eta_drift(const Vector& u, const NoiseConfig& cfg, const LatticeSpec& spec,
                 const NonlinearityParams& p);

/// Full extended field: du_i = -lambda*grad_i + eta_i (Synchronous mode
/// broadcasts the shared eta into every node), dlambda = g(u),
/// deta = h(u), dzeta = -lambda * sum_i hess_ii.
ExtendedState extended_rhs(const ExtendedState& x, const NoiseConfig& cfg,
                           const LatticeSpec& spec, const NonlinearityParams& p);

// ---- steppers ----

/// Reusable integrator for the extended dynamics; owns all scratch storage
/// so stepping allocates nothing. A single instance is strictly sequential;
/// use one instance (and one RngStream) per trajectory.
class ExtendedStepper {
 public:
  ExtendedStepper(const LatticeSpec& spec, const NonlinearityParams& p, const NoiseConfig& cfg);

  /// Classical fourth-order Runge-Kutta step of the deterministic field.
  void rk4(ExtendedState& x, double dt);

  /// Strang-split step of the ergodized dynamics: exact Ornstein-Uhlenbeck
  /// half-step on lambda, deterministic rk4, second half-step. With
  /// gamma = 0 the OU halves are identities and no randomness is consumed,
  /// so the step coincides bitwise with rk4.
  void sdc(ExtendedState& x, double dt, RngStream& rng);

  /// Derivative of the extended field, written into dx (shape-preserving).
  void rhs(const ExtendedState& x, ExtendedState& dx);

  const LatticeSpec& spec() const { return spec_; }
  const NoiseConfig& config() const { return cfg_; }

 private:
  void ensure_finite(const ExtendedState& x) const;

  LatticeSpec spec_;
  NonlinearityParams p_;
  NoiseConfig cfg_;
  Vector diag_coeff_;  // l * bond count per node, fixed by the lattice
  Vector grad_;
  ExtendedState k1_, k2_, k3_, k4_, work_;
  double cached_dt_ = -1.0, ou_decay_ = 1.0, ou_sigma_ = 0.0;
};

/// Euler-Maruyama integrator for the additive-noise baseline
/// du_i = -grad_i dt + sqrt(2 D dt) N(0,1), one independent draw per node.
class LangevinStepper {
 public:
  LangevinStepper(const LatticeSpec& spec, const NonlinearityParams& p, double D);

  void step(Vector& u, double dt, RngStream& rng);

 private:
  LatticeSpec spec_;
  NonlinearityParams p_;
  double D_;
  Vector grad_, lcoeff_;
};

// Single-step conveniences mirroring the stepper methods; they construct
// scratch on every call, so drive long trajectories through the classes.

ExtendedState rk4_step(const ExtendedState& x, double dt, const NoiseConfig& cfg,
                       const LatticeSpec& spec, const NonlinearityParams& p);

ExtendedState sdc_step(const ExtendedState& x, double dt, const NoiseConfig& cfg, RngStream& rng,
                       const LatticeSpec& spec, const NonlinearityParams& p);

Vector langevin_step(const Vector& u, double dt, double D, RngStream& rng,
                     const LatticeSpec& spec, const NonlinearityParams& p);

/// Exact Ornstein-Uhlenbeck update of lambda over dt/2 for
/// dlambda = -gamma*lambda + sqrt(2 gamma D / Q_lambda) xi(t).
/// Identity (consuming no draw) when gamma = 0.
double ou_halfstep(double lambda, double dt, const NoiseConfig& cfg, RngStream& rng);

}  // namespace nagumo
