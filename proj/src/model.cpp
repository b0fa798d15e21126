#include "nagumo/model.hpp"

namespace nagumo {

Vector discrete_laplacian(const Vector& u, const LatticeSpec& spec) {
  check_state_shape(u, spec);
  const Index n = spec.n;
  Vector lap(n);
  if (spec.bc == BoundaryCondition::SingleCell || n == 1) {
    // Neumann mirror and the n = 1 ring both give a zero second difference.
    lap.setZero();
    return lap;
  }
  for (Index i = 0; i < n; ++i) {
    double left, right;
    if (spec.bc == BoundaryCondition::Periodic) {
      left = u[(i - 1 + n) % n];
      right = u[(i + 1) % n];
    } else {  // Neumann
      left = (i == 0) ? u[0] : u[i - 1];
      right = (i == n - 1) ? u[n - 1] : u[i + 1];
    }
    lap[i] = right - 2.0 * u[i] + left;
  }
  return lap;
}

double energy_functional(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p) {
  check_state_shape(u, spec);
  const Index n = spec.n;
  double energy = 0.0;
  for (Index i = 0; i < n; ++i) energy += local_potential(u[i], p);
  if (spec.bc == BoundaryCondition::SingleCell) return energy;
  if (spec.bc == BoundaryCondition::Neumann) {
    for (Index i = 1; i < n; ++i) {
      const double d = u[i] - u[i - 1];
      energy += 0.5 * spec.l * d * d;
    }
  } else {  // Periodic: n bonds including the wrap
    for (Index i = 0; i < n; ++i) {
      const double d = u[i] - u[(i - 1 + n) % n];
      energy += 0.5 * spec.l * d * d;
    }
  }
  return energy;
}

Vector energy_gradient(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p) {
  Vector grad = discrete_laplacian(u, spec);
  grad *= -spec.l;
  if (spec.bc == BoundaryCondition::SingleCell) grad.setZero();
  for (Index i = 0; i < spec.n; ++i) grad[i] += local_potential_d1(u[i], p);
  return grad;
}

Eigen::VectorXi laplacian_diag_coeff(const LatticeSpec& spec) {
  const Index n = spec.n;
  Eigen::VectorXi c(n);
  switch (spec.bc) {
    case BoundaryCondition::SingleCell:
      c.setZero();
      break;
    case BoundaryCondition::Periodic:
      c.setConstant(n == 1 ? 0 : 2);
      break;
    case BoundaryCondition::Neumann:
      c.setConstant(2);
      if (n == 1) {
        c[0] = 0;
      } else {
        c[0] = 1;
        c[n - 1] = 1;
      }
      break;
  }
  return c;
}

Vector energy_hessian_diag(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p) {
  check_state_shape(u, spec);
  const Eigen::VectorXi c = laplacian_diag_coeff(spec);
  Vector diag(spec.n);
  for (Index i = 0; i < spec.n; ++i)
    diag[i] = local_potential_d2(u[i], p) + spec.l * static_cast<double>(c[i]);
  return diag;
}

}  // namespace nagumo
