#pragma once

/// @file scalar.hpp
/// @brief Real scalar field on the collar (-eps, 0] x dM: boundary Hamiltonian,
/// elimination of beta, boundary evolution and bulk solves on the cylinder.
///
/// Sign conventions are those of the boundary Hamiltonian
///   H(phi, p, beta) = -<beta, dphi> - 1/2 <p,p> + <p, eta_0i beta^i>
///                     + 1/2 <beta, beta>_g + sum_x w V(phi),
/// so that phi_dot = -p + eta_0i beta^i and p_dot = -div beta - V'(phi).
/// The potential is V(u) = m^2 u^2 (no factor 1/2), plus lambda u^4 for the
/// quartic kind.

#include "collar/lattice.hpp"
#include "collar/presym.hpp"

#include <Eigen/Sparse>

#include <string>
#include <utility>
#include <vector>

namespace collar {

struct PotentialSpec {
  enum class Kind { free, mass, quartic };
  Kind kind = Kind::free;
  double mass2 = 0.0;
  double quartic = 0.0;

  double value(double u) const;
  double derivative(double u) const;
  double second_derivative(double u) const;
  bool is_linear_force() const { return kind != Kind::quartic; }
  /// Throws ConfigError on negative parameters.
  void validate() const;
};

struct ScalarBoundaryState {
  ScalarLatticeField phi;
  ScalarLatticeField p;
  VectorLatticeField beta;
  double time = 0.0;
};

double boundary_hamiltonian(const ScalarBoundaryState& state, const LatticeGrid& grid,
                            const PotentialSpec& potential);

/// Pointwise variational derivatives of H (already divided by the site weight).
struct ScalarHamiltonianGradient {
  Eigen::VectorXd dphi;
  Eigen::VectorXd dp;
  Eigen::MatrixXd dbeta;  // d x sites, covector -d_i phi + eta_0i p + g_ij beta^j
};
ScalarHamiltonianGradient boundary_hamiltonian_gradient(const ScalarBoundaryState& state,
                                                        const LatticeGrid& grid,
                                                        const PotentialSpec& potential);

/// beta^j = g^ij (d_i phi - eta_0i p).
VectorLatticeField solve_beta(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                              const LatticeGrid& grid);

/// Max |dH/dbeta| over sites and components.
double beta_constraint_residual(const ScalarBoundaryState& state, const LatticeGrid& grid);

/// State with beta recomputed from (phi, p).
ScalarBoundaryState on_constraint(ScalarLatticeField phi, ScalarLatticeField p,
                                  const LatticeGrid& grid, double time = 0.0);

/// Reduced Hamiltonian h(phi, p) = H(phi, p, solve_beta(phi, p)).
double reduced_scalar_hamiltonian(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                                  const LatticeGrid& grid, const PotentialSpec& potential);

/// Right-hand side of the reduced equations (phi_dot, p_dot).
std::pair<Eigen::VectorXd, Eigen::VectorXd> scalar_rhs(const Eigen::VectorXd& phi,
                                                       const Eigen::VectorXd& p,
                                                       const LatticeGrid& grid,
                                                       const PotentialSpec& potential);

/// True when dt exceeds the flat-metric stability heuristic dt <= h_min.
bool scalar_cfl_exceeded(const LatticeGrid& grid, double dt);

/// One second-order symplectic step of the reduced system. With zero shift this is
/// kick-drift-kick velocity Verlet; otherwise the implicit midpoint rule.
/// A CFL warning is appended to `warnings` when supplied.
ScalarBoundaryState boundary_step(const ScalarBoundaryState& state, const LatticeGrid& grid,
                                  const PotentialSpec& potential, double dt,
                                  std::vector<std::string>* warnings = nullptr);

/// Weighted stiffness K = sum_kl D_k^T diag(w g^kl) D_l; the operator L = W^-1 K is
/// minus the weighted Laplacian, so p_dot = L phi - V'(phi) at zero shift.
Eigen::SparseMatrix<double> scalar_stiffness(const LatticeGrid& grid);

/// Discrete presymplectic system on x = (phi, p, beta), beta flattened column-major
/// (d x sites). Omega pairs phi and p with the site weights.
PresymplecticSystem scalar_presymplectic_system(const LatticeGrid& grid, const PotentialSpec& potential);
Eigen::VectorXd scalar_pack(const ScalarBoundaryState& state);
std::vector<int> scalar_beta_block(const LatticeGrid& grid);

enum class Signature { lorentzian, euclidean };

/// Bulk field on the cylinder, levels n = 0..steps with t_n = -eps + n dt.
struct BulkSolution {
  Signature signature = Signature::lorentzian;
  double epsilon = 0.0;
  double dt = 0.0;
  std::vector<Eigen::VectorXd> phi;
  std::vector<Eigen::VectorXd> p0;  // P^0 at every level
  std::vector<Eigen::MatrixXd> pk;  // P^k = g^kl d_l Phi at every level
};

/// Leapfrog evolution from Cauchy data (phi, p) at t = -eps. Requires zero shift.
BulkSolution bulk_solve_lorentzian(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                                   const LatticeGrid& grid, const PotentialSpec& potential,
                                   double epsilon, int steps);

/// Discrete Dirichlet problem Phi_tt = L Phi - V'(Phi) with Phi fixed at both ends
/// (bottom at t = -eps, top at t = 0). Linear potentials only, zero shift.
BulkSolution bulk_solve_euclidean(const ScalarLatticeField& bottom, const ScalarLatticeField& top,
                                  const LatticeGrid& grid, const PotentialSpec& potential,
                                  double epsilon, int steps);

/// Max residual of the discrete interior equations, relative to the field scale.
double euclidean_residual(const BulkSolution& bulk, const LatticeGrid& grid,
                          const PotentialSpec& potential);

/// On-shell discrete action (trapezoid in t). Its differential with respect to the
/// Dirichlet data is <p_top, d top> - <p_bottom, d bottom>.
double euclidean_action(const BulkSolution& bulk, const LatticeGrid& grid,
                        const PotentialSpec& potential);

/// Boundary states at (t = 0, t = -eps). p is P^0 at each end and beta records P^k.
std::pair<ScalarBoundaryState, ScalarBoundaryState> project_to_boundary(const BulkSolution& bulk);

}  // namespace collar
