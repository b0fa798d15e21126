#include "nagumo/dynamics.hpp"

#include <cmath>

namespace nagumo {

namespace {

std::uint64_t splitmix64_next(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct FieldSums {
  double grad_sq = 0.0;
  double hess_trace = 0.0;
};

// Gradient of the lattice energy written into `grad`, with the squared norm
// and Hessian trace accumulated in the same pass. `lcoeff` holds l times the
// per-node bond count.
FieldSums eval_field(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p,
                     const Vector& lcoeff, Vector& grad) {
  const Index n = spec.n;
  FieldSums s;
  const bool coupled = n > 1 && spec.bc != BoundaryCondition::SingleCell;
  const bool periodic = spec.bc == BoundaryCondition::Periodic;
  for (Index i = 0; i < n; ++i) {
    double g = local_potential_d1(u[i], p);
    if (coupled) {
      const double left = periodic ? u[(i - 1 + n) % n] : u[i == 0 ? 0 : i - 1];
      const double right = periodic ? u[(i + 1) % n] : u[i == n - 1 ? n - 1 : i + 1];
      g -= spec.l * (right - 2.0 * u[i] + left);
    }
    grad[i] = g;
    s.grad_sq += g * g;
    s.hess_trace += local_potential_d2(u[i], p) + lcoeff[i];
  }
  return s;
}

struct OuCoeffs {
  double decay;
  double sigma;
};

// Exact half-step coefficients of the lambda Ornstein-Uhlenbeck factor:
// stationary variance D/Q_lambda, relaxation rate gamma.
OuCoeffs ou_coeffs(double dt, const NoiseConfig& cfg) {
  const double decay = std::exp(-cfg.gamma * dt / 2.0);
  const double sigma = std::sqrt(cfg.D / cfg.Q_lambda * (1.0 - std::exp(-cfg.gamma * dt)));
  return {decay, sigma};
}

// out = a + c * b, component block by component block
void add_scaled(ExtendedState& out, const ExtendedState& a, double c, const ExtendedState& b) {
  out.u = a.u + c * b.u;
  out.lambda = a.lambda + c * b.lambda;
  out.eta = a.eta + c * b.eta;
  out.zeta = a.zeta + c * b.zeta;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  std::uint64_t x = seed;
  const std::uint64_t a = splitmix64_next(x);
  x ^= stream;
  const std::uint64_t b = splitmix64_next(x);
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  engine_.seed(seq);
}

Vector gradient_flow_rhs(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p) {
  return -energy_gradient(u, spec, p);
}

double lambda_drift(const Vector& u, const NoiseConfig& cfg, const LatticeSpec& spec,
                    const NonlinearityParams& p) {
  const Vector grad = energy_gradient(u, spec, p);
  const Vector hess = energy_hessian_diag(u, spec, p);
  return (grad.squaredNorm() - cfg.D * hess.sum()) / cfg.Q_lambda;
}

Vector eta_drift(const Vector& u, const NoiseConfig& cfg, const LatticeSpec& spec,
                 const NonlinearityParams& p) {
  const Vector grad = energy_gradient(u, spec, p);
  if (cfg.eta_mode == EtaMode::Independent) return -grad / cfg.Q_eta;
  Vector h(1);
  h[0] = -grad.sum() / cfg.Q_eta;
  return h;
}

ExtendedStepper::ExtendedStepper(const LatticeSpec& spec, const NonlinearityParams& p,
                                 const NoiseConfig& cfg)
    : spec_(spec), p_(p), cfg_(cfg) {
  spec_.check();
  p_.check();
  cfg_.check();
  diag_coeff_ = spec_.l * laplacian_diag_coeff(spec_).cast<double>();
  grad_ = Vector::Zero(spec_.n);
  k1_ = k2_ = k3_ = k4_ = work_ = ExtendedState::zero(spec_, cfg_);
}

void ExtendedStepper::rhs(const ExtendedState& x, ExtendedState& dx) {
  const FieldSums s = eval_field(x.u, spec_, p_, diag_coeff_, grad_);
  if (cfg_.eta_mode == EtaMode::Independent) {
    dx.u = -x.lambda * grad_ + x.eta;
    dx.eta = -grad_ / cfg_.Q_eta;
  } else {
    dx.u = -x.lambda * grad_;
    dx.u.array() += x.eta[0];
    dx.eta[0] = -grad_.sum() / cfg_.Q_eta;
  }
  dx.lambda = (s.grad_sq - cfg_.D * s.hess_trace) / cfg_.Q_lambda;
  dx.zeta = -x.lambda * s.hess_trace;
}

void ExtendedStepper::rk4(ExtendedState& x, double dt) {
  rhs(x, k1_);
  add_scaled(work_, x, 0.5 * dt, k1_);
  rhs(work_, k2_);
  add_scaled(work_, x, 0.5 * dt, k2_);
  rhs(work_, k3_);
  add_scaled(work_, x, dt, k3_);
  rhs(work_, k4_);
  const double w = dt / 6.0;
  x.u += w * (k1_.u + 2.0 * k2_.u + 2.0 * k3_.u + k4_.u);
  x.lambda += w * (k1_.lambda + 2.0 * k2_.lambda + 2.0 * k3_.lambda + k4_.lambda);
  x.eta += w * (k1_.eta + 2.0 * k2_.eta + 2.0 * k3_.eta + k4_.eta);
  x.zeta += w * (k1_.zeta + 2.0 * k2_.zeta + 2.0 * k3_.zeta + k4_.zeta);
  ensure_finite(x);
}

void ExtendedStepper::sdc(ExtendedState& x, double dt, RngStream& rng) {
  if (cfg_.gamma == 0.0) {
    rk4(x, dt);
    return;
  }
  if (dt != cached_dt_) {
    const OuCoeffs c = ou_coeffs(dt, cfg_);
    ou_decay_ = c.decay;
    ou_sigma_ = c.sigma;
    cached_dt_ = dt;
  }
  x.lambda = x.lambda * ou_decay_ + ou_sigma_ * rng.gaussian();
  rk4(x, dt);
  x.lambda = x.lambda * ou_decay_ + ou_sigma_ * rng.gaussian();
  if (!std::isfinite(x.lambda)) throw DivergenceError("lambda");
}

void ExtendedStepper::ensure_finite(const ExtendedState& x) const {
  if (x.u.allFinite() && std::isfinite(x.lambda) && x.eta.allFinite() && std::isfinite(x.zeta))
    return;
  for (Index i = 0; i < x.u.size(); ++i)
    if (!std::isfinite(x.u[i])) throw DivergenceError("u[" + std::to_string(i) + "]");
  if (!std::isfinite(x.lambda)) throw DivergenceError("lambda");
  for (Index i = 0; i < x.eta.size(); ++i)
    if (!std::isfinite(x.eta[i])) throw DivergenceError("eta[" + std::to_string(i) + "]");
  throw DivergenceError("zeta");
}

LangevinStepper::LangevinStepper(const LatticeSpec& spec, const NonlinearityParams& p, double D)
    : spec_(spec), p_(p), D_(D) {
  spec_.check();
  p_.check();
  if (!(D > 0.0)) throw std::invalid_argument("LangevinStepper: D must be > 0");
  grad_ = Vector::Zero(spec_.n);
  lcoeff_ = Vector::Zero(spec_.n);  // Hessian trace unused by this stepper
}

void LangevinStepper::step(Vector& u, double dt, RngStream& rng) {
  check_state_shape(u, spec_);
  eval_field(u, spec_, p_, lcoeff_, grad_);
  const double noise = std::sqrt(2.0 * D_ * dt);
  for (Index i = 0; i < spec_.n; ++i) u[i] += -dt * grad_[i] + noise * rng.gaussian();
  if (!u.allFinite()) {
    for (Index i = 0; i < u.size(); ++i)
      if (!std::isfinite(u[i])) throw DivergenceError("u[" + std::to_string(i) + "]");
  }
}

ExtendedState extended_rhs(const ExtendedState& x, const NoiseConfig& cfg,
                           const LatticeSpec& spec, const NonlinearityParams& p) {
  check_extended_shape(x, cfg, spec);
  ExtendedStepper stepper(spec, p, cfg);
  ExtendedState dx = ExtendedState::zero(spec, cfg);
  stepper.rhs(x, dx);
  return dx;
}

ExtendedState rk4_step(const ExtendedState& x, double dt, const NoiseConfig& cfg,
                       const LatticeSpec& spec, const NonlinearityParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("rk4_step: dt must be > 0");
  check_extended_shape(x, cfg, spec);
  ExtendedStepper stepper(spec, p, cfg);
  ExtendedState out = x;
  stepper.rk4(out, dt);
  return out;
}

ExtendedState sdc_step(const ExtendedState& x, double dt, const NoiseConfig& cfg, RngStream& rng,
                       const LatticeSpec& spec, const NonlinearityParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("sdc_step: dt must be > 0");
  check_extended_shape(x, cfg, spec);
  ExtendedStepper stepper(spec, p, cfg);
  ExtendedState out = x;
  stepper.sdc(out, dt, rng);
  return out;
}

Vector langevin_step(const Vector& u, double dt, double D, RngStream& rng,
                     const LatticeSpec& spec, const NonlinearityParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("langevin_step: dt must be > 0");
  LangevinStepper stepper(spec, p, D);
  Vector out = u;
  stepper.step(out, dt, rng);
  return out;
}

double ou_halfstep(double lambda, double dt, const NoiseConfig& cfg, RngStream& rng) {
  if (cfg.gamma == 0.0) return lambda;
  const OuCoeffs c = ou_coeffs(dt, cfg);
  return lambda * c.decay + c.sigma * rng.gaussian();
}

}  // namespace nagumo
