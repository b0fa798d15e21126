#pragma once

#include "nagumo/dynamics.hpp"
#include "nagumo/model.hpp"
#include "nagumo/statistics.hpp"

namespace nagumo {

/// Evaluation point in the extended phase space (zeta does not enter the
/// stationarity algebra and is omitted).
struct PhasePoint {
  Vector u;
  double lambda = 0.0;
  Vector eta;
};

/// Deliberate corruptions for negative-control tests: flip the sign of the
/// eta drift inside the operator, or scale D in the density exponent while
/// the dynamics keeps the true D. Either one must push the residuals from
/// round-off level to O(1).
struct NegativeControl {
  double h_sign = 1.0;
  double measure_d_scale = 1.0;

  static NegativeControl none() { return {}; }
  static NegativeControl flipped_h() { return {-1.0, 1.0}; }
  static NegativeControl halved_exponent_d() { return {1.0, 0.5}; }
};

/// Stationarity residual of the additive-noise model: the Fokker-Planck
/// operator of du = -grad dt + sqrt(2D) dW applied to exp(-energy/D),
/// divided by the density at the point. Uses analytic derivatives only,
/// so a nonzero value means the algebra (not a discretization) is wrong.
double fp_residual_langevin(const Vector& u, double D, const LatticeSpec& spec,
                            const NonlinearityParams& p,
                            const NegativeControl& ctl = NegativeControl::none());

/// Stationarity residual of the extended dynamics under the augmented
/// density exp(-(energy + Q_lambda/2 lambda^2 + Q_eta/2 sum eta^2)/D):
/// the Liouville operator for gamma = 0, plus the lambda
/// Ornstein-Uhlenbeck generator term when gamma > 0. Normalized by the
/// density; covers both eta modes.
double liouville_residual_extended(const PhasePoint& pt, const NoiseConfig& cfg,
                                   const LatticeSpec& spec, const NonlinearityParams& p,
                                   const NegativeControl& ctl = NegativeControl::none());

/// Random point with u uniform on [-0.5, 1.5] per coordinate and lambda,
/// eta drawn from N(0, 3D) -- the bulk and moderate tails of the measure.
PhasePoint sample_phase_point(RngStream& rng, const NoiseConfig& cfg, const LatticeSpec& spec);

/// Ground-truth single-cell stationary density, independent of the
/// Boltzmann formula: null vector of the flux-conservative tridiagonal
/// discretization of the stationary Fokker-Planck equation with reflecting
/// ends, normalized by Simpson. Falls back to damped power iteration on
/// the discrete generator if the direct solve degenerates. m odd, >= 101.
DensityGrid steady_state_1d(const NonlinearityParams& p, double D, double lo, double hi, Index m);

}  // namespace nagumo
