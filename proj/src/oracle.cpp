#include "nagumo/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace nagumo {

double fp_residual_langevin(const Vector& u, double D, const LatticeSpec& spec,
                            const NonlinearityParams& p, const NegativeControl& ctl) {
  check_state_shape(u, spec);
  if (!(D > 0.0)) throw std::invalid_argument("fp_residual_langevin: D must be > 0");
  const double Dm = D * ctl.measure_d_scale;  // D inside the density exponent
  const Vector grad = energy_gradient(u, spec, p);
  const Vector hess = energy_hessian_diag(u, spec, p);

  // F*rho/rho = -sum_i d_i(F_i rho)/rho + D sum_i d_i^2 rho / rho with
  // F_i = -grad_i, d_i log rho = -grad_i/Dm, d_i^2 log rho = -hess_i/Dm.
  double residual = 0.0;
  for (Index i = 0; i < spec.n; ++i) {
    const double s = -grad[i] / Dm;
    residual -= (-hess[i]) + (-grad[i]) * s;
    residual += D * (s * s - hess[i] / Dm);
  }
  return residual;
}

double liouville_residual_extended(const PhasePoint& pt, const NoiseConfig& cfg,
                                   const LatticeSpec& spec, const NonlinearityParams& p,
                                   const NegativeControl& ctl) {
  cfg.check();
  check_state_shape(pt.u, spec);
  if (pt.eta.size() != eta_length(cfg, spec))
    throw std::invalid_argument("liouville_residual_extended: eta length mismatch");

  const double Dm = cfg.D * ctl.measure_d_scale;
  const Vector grad = energy_gradient(pt.u, spec, p);
  const Vector hess = energy_hessian_diag(pt.u, spec, p);
  const double g = lambda_drift(pt.u, cfg, spec, p);
  const Vector h = ctl.h_sign * eta_drift(pt.u, cfg, spec, p);

  // div F: only the u-block depends on its own coordinates.
  const double div_f = -pt.lambda * hess.sum();

  // F . grad(log rho) with log rho = -(energy + Ql/2 l^2 + Qe/2 sum eta^2)/Dm.
  double advect = 0.0;
  for (Index i = 0; i < spec.n; ++i) {
    const double eta_i = cfg.eta_mode == EtaMode::Independent ? pt.eta[i] : pt.eta[0];
    advect += (-pt.lambda * grad[i] + eta_i) * (-grad[i] / Dm);
  }
  advect += g * (-cfg.Q_lambda * pt.lambda / Dm);
  for (Index j = 0; j < pt.eta.size(); ++j) advect += h[j] * (-cfg.Q_eta * pt.eta[j] / Dm);

  double residual = -(div_f + advect);

  if (cfg.gamma > 0.0) {
    // gamma * d_l[(l + D/Ql d_l) rho] / rho
    const double s = -cfg.Q_lambda * pt.lambda / Dm;
    const double sp = -cfg.Q_lambda / Dm;
    residual += cfg.gamma * (1.0 + pt.lambda * s + cfg.D / cfg.Q_lambda * (s * s + sp));
  }
  return residual;
}

PhasePoint sample_phase_point(RngStream& rng, const NoiseConfig& cfg, const LatticeSpec& spec) {
  PhasePoint pt;
  pt.u.resize(spec.n);
  for (Index i = 0; i < spec.n; ++i) pt.u[i] = -0.5 + 2.0 * rng.uniform();
  const double sd = std::sqrt(3.0 * cfg.D);
  pt.lambda = sd * rng.gaussian();
  pt.eta.resize(eta_length(cfg, spec));
  for (Index j = 0; j < pt.eta.size(); ++j) pt.eta[j] = sd * rng.gaussian();
  return pt;
}

namespace {

struct Tridiagonal {
  Vector lower, diag, upper;  // lower[0] and upper[m-1] unused
};

// Flux-conservative stationary operator with reflecting ends: row j is
// -(J_{j+1/2} - J_{j-1/2})/h where J_{j+1/2} = -(a*(rho_j+rho_{j+1})/2
// + D*(rho_{j+1}-rho_j)/h), a = V'(midpoint), J = 0 at both boundaries.
Tridiagonal stationary_operator(const NonlinearityParams& p, double D, const Vector& x) {
  const Index m = x.size();
  const double h = x[1] - x[0];
  Tridiagonal A{Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
  for (Index j = 0; j < m; ++j) {
    if (j + 1 < m) {
      const double a = local_potential_d1(0.5 * (x[j] + x[j + 1]), p);
      A.diag[j] += (0.5 * a - D / h) / h;
      A.upper[j] += (0.5 * a + D / h) / h;
    }
    if (j > 0) {
      const double a = local_potential_d1(0.5 * (x[j - 1] + x[j]), p);
      A.lower[j] += (-0.5 * a + D / h) / h;
      A.diag[j] += (-0.5 * a - D / h) / h;
    }
  }
  return A;
}

void apply(const Tridiagonal& A, const Vector& v, Vector& out) {
  const Index m = v.size();
  for (Index j = 0; j < m; ++j) {
    double s = A.diag[j] * v[j];
    if (j > 0) s += A.lower[j] * v[j - 1];
    if (j + 1 < m) s += A.upper[j] * v[j + 1];
    out[j] = s;
  }
}

// Thomas solve of the operator with row `pin` replaced by rho_pin = 1.
// Returns false on a degenerate pivot or a non-finite/meaningfully
// negative solution.
bool solve_pinned(const Tridiagonal& A, Index pin, Vector& rho) {
  const Index m = A.diag.size();
  Vector lower = A.lower, diag = A.diag, upper = A.upper, rhs = Vector::Zero(m);
  lower[pin] = 0.0;
  diag[pin] = 1.0;
  upper[pin] = 0.0;
  rhs[pin] = 1.0;

  for (Index j = 1; j < m; ++j) {
    if (diag[j - 1] == 0.0 || !std::isfinite(diag[j - 1])) return false;
    const double w = lower[j] / diag[j - 1];
    diag[j] -= w * upper[j - 1];
    rhs[j] -= w * rhs[j - 1];
  }
  if (diag[m - 1] == 0.0 || !std::isfinite(diag[m - 1])) return false;
  rho.resize(m);
  rho[m - 1] = rhs[m - 1] / diag[m - 1];
  for (Index j = m - 2; j >= 0; --j) rho[j] = (rhs[j] - upper[j] * rho[j + 1]) / diag[j];

  if (!rho.allFinite()) return false;
  const double peak = rho.maxCoeff();
  if (!(peak > 0.0)) return false;
  if (rho.minCoeff() < -1e-8 * peak) return false;
  return true;
}

// Damped fixed-point iteration rho <- rho + tau*A*rho, the power method on
// the explicit-Euler propagator of the discrete generator.
void power_iteration(const Tridiagonal& A, const NonlinearityParams& p, double D, const Vector& x,
                     Vector& rho) {
  const Index m = x.size();
  const double h = x[1] - x[0];
  double amax = 0.0;
  for (Index j = 0; j < m; ++j) amax = std::max(amax, std::abs(local_potential_d1(x[j], p)));
  const double tau = 0.4 / (2.0 * D / (h * h) + amax / h);

  rho = Vector::Constant(m, 1.0);
  Vector Arho(m);
  const long max_iters = 200'000'000L;
  for (long it = 0; it < max_iters; ++it) {
    apply(A, rho, Arho);
    if (it % 1024 == 0 && Arho.lpNorm<Eigen::Infinity>() * tau <
                              1e-14 * rho.lpNorm<Eigen::Infinity>())
      break;
    rho += tau * Arho;
    if (it % 4096 == 0) rho /= rho.maxCoeff();  // keep the scale tame
  }
  rho = rho.cwiseMax(0.0);
}

}  // namespace

DensityGrid steady_state_1d(const NonlinearityParams& p, double D, double lo, double hi, Index m) {
  p.check();
  if (!(D > 0.0)) throw std::invalid_argument("steady_state_1d: D must be > 0");
  if (!(lo < hi)) throw std::invalid_argument("steady_state_1d: lo must be < hi");
  if (m < 101 || m % 2 == 0)
    throw std::invalid_argument("steady_state_1d: m must be odd and >= 101");

  DensityGrid d;
  d.grid.resize(m);
  const double h = (hi - lo) / static_cast<double>(m - 1);
  for (Index i = 0; i < m; ++i) d.grid[i] = lo + h * static_cast<double>(i);
  d.grid[m - 1] = hi;

  const Tridiagonal A = stationary_operator(p, D, d.grid);

  Index pin = 0;  // pin the density at the potential minimum, where it is O(1)
  for (Index j = 1; j < m; ++j)
    if (local_potential(d.grid[j], p) < local_potential(d.grid[pin], p)) pin = j;

  Vector rho;
  if (!solve_pinned(A, pin, rho)) power_iteration(A, p, D, d.grid, rho);

  rho = rho.cwiseMax(0.0);
  const double integral = simpson(rho, h);
  if (!(integral > 0.0) || !std::isfinite(integral))
    throw std::runtime_error("steady_state_1d: degenerate stationary solution");
  d.values = rho / integral;
  d.norm = integral;
  return d;
}

}  // namespace nagumo
