#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace nagumo {

using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Cubic bistable reaction parameters. The reaction is
/// f(u) = -k*u*(u - alpha)*(u - 1) with roots at 0, alpha and 1;
/// the associated on-site potential V satisfies V' = -f, V(0) = 0.
struct NonlinearityParams {
  double k = 4.0;      // reaction amplitude, k > 0
  double alpha = 0.5;  // threshold, 0 < alpha < 1

  void check() const {
    if (!(k > 0.0)) throw std::invalid_argument("NonlinearityParams: k must be > 0");
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("NonlinearityParams: alpha must lie in (0,1)");
  }
};

enum class BoundaryCondition { Neumann, Periodic, SingleCell };

/// One-dimensional chain of cells with diffusive coupling l >= 0.
/// SingleCell is the n = 1 chain with no bonds; l is ignored there.
struct LatticeSpec {
  Index n = 1;
  double l = 0.0;
  BoundaryCondition bc = BoundaryCondition::SingleCell;

  void check() const {
    if (n < 1) throw std::invalid_argument("LatticeSpec: n must be >= 1");
    if (!(l >= 0.0)) throw std::invalid_argument("LatticeSpec: l must be >= 0");
    if (bc == BoundaryCondition::SingleCell && n != 1)
      throw std::invalid_argument("LatticeSpec: SingleCell requires n = 1");
  }
};

inline void check_state_shape(const Vector& u, const LatticeSpec& spec) {
  if (u.size() != spec.n)
    throw std::invalid_argument("state length " + std::to_string(u.size()) +
                                " does not match lattice size " + std::to_string(spec.n));
}

template <typename Scalar>
Scalar reaction(Scalar u, const NonlinearityParams& p) {
  return -p.k * u * (u - p.alpha) * (u - 1.0);
}

/// On-site potential, the antiderivative of -f with V(0) = 0:
/// V(u) = k*(u^4/4 - (1+alpha)*u^3/3 + alpha*u^2/2).
template <typename Scalar>
Scalar local_potential(Scalar u, const NonlinearityParams& p) {
  const Scalar u2 = u * u;
  return p.k * (u2 * u2 / 4.0 - (1.0 + p.alpha) * u2 * u / 3.0 + p.alpha * u2 / 2.0);
}

template <typename Scalar>
Scalar local_potential_d1(Scalar u, const NonlinearityParams& p) {
  return -reaction(u, p);
}

template <typename Scalar>
Scalar local_potential_d2(Scalar u, const NonlinearityParams& p) {
  return p.k * (3.0 * u * u - 2.0 * (1.0 + p.alpha) * u + p.alpha);
}

/// Three-point second difference u_{i+1} - 2 u_i + u_{i-1}.
/// Neumann mirrors the boundary neighbour (u_{-1} := u_0, u_n := u_{n-1});
/// Periodic wraps indices; SingleCell has no neighbours at all.
Vector discrete_laplacian(const Vector& u, const LatticeSpec& spec);

/// Lattice energy: sum over bonds of l/2*(u_i - u_{i-1})^2 plus sum of V(u_i).
/// Neumann counts the n-1 internal bonds, Periodic adds the wrap bond,
/// SingleCell has none.
double energy_functional(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p);

/// Exact gradient of energy_functional; component i is -l*Lap(u)_i + V'(u_i).
Vector energy_gradient(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p);

/// Diagonal of the energy Hessian: V''(u_i) plus l times the node's bond count.
Vector energy_hessian_diag(const Vector& u, const LatticeSpec& spec, const NonlinearityParams& p);

/// Bond-count coefficients entering the Hessian diagonal (2 in the interior,
/// 1 at Neumann ends, 0 without neighbours). A ring of one node couples the
/// cell to itself, so its wrap bond contributes nothing.
Eigen::VectorXi laplacian_diag_coeff(const LatticeSpec& spec);

}  // namespace nagumo
