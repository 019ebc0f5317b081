#pragma once

/// @file psigma.hpp
/// @brief Poisson sigma-model on the boundary circle: constraints Psi^a, their
/// Hamiltonian vector fields, coisotropy residuals and constrained evolution.
///
/// Fields are stored as r x N matrices (one column per site). The discrete
/// symplectic form is  omega(U, V) = sum_x w (dphi_U . dp_V - dphi_V . dp_U).

#include "collar/lattice.hpp"
#include "collar/presym.hpp"

#include <functional>
#include <string>
#include <vector>

namespace collar {

class PoissonStructure {
 public:
  enum class Kind { constant, lie_poisson_su2, polynomial };

  /// Lambda(u) = c.
  static PoissonStructure constant(Eigen::MatrixXd c);
  /// Lambda^{ab}(u) = eps^{abc} u^c on R^3.
  static PoissonStructure lie_poisson_su2();
  /// Affine tensor Lambda(u) = c + sum_k u^k linear[k]. Runs the skew and Jacobi
  /// self-tests and throws ConfigError on failure.
  static PoissonStructure polynomial(Eigen::MatrixXd c, std::vector<Eigen::MatrixXd> linear);

  int target_dim() const { return r_; }
  Kind kind() const { return kind_; }
  Eigen::MatrixXd lambda(const Eigen::VectorXd& u) const;
  /// dlambda(u)[c](a, b) = d Lambda^{ab} / d u^c.
  std::vector<Eigen::MatrixXd> dlambda(const Eigen::VectorXd& u) const;

  double skew_residual(const Eigen::VectorXd& u) const;
  /// Max |Lambda^{ad} d_d Lambda^{bc} + cyclic| at u.
  double jacobi_residual(const Eigen::VectorXd& u) const;
  /// Max discrepancy of dlambda against central differences of lambda at u.
  double dlambda_fd_residual(const Eigen::VectorXd& u) const;

 private:
  Kind kind_ = Kind::constant;
  int r_ = 0;
  Eigen::MatrixXd c_;
  std::vector<Eigen::MatrixXd> linear_;
};

struct PsmBoundaryState {
  Eigen::MatrixXd phi;   // r x N
  Eigen::MatrixXd p;     // r x N
  Eigen::MatrixXd beta;  // r x N
  double time = 0.0;
};

double boundary_hamiltonian_psm(const PsmBoundaryState& state, const LatticeGrid& grid,
                                const PoissonStructure& poisson);

/// Pointwise variational derivatives of H (divided by the site weight).
struct PsmHamiltonianGradient {
  Eigen::MatrixXd dphi, dp, dbeta;
};
PsmHamiltonianGradient boundary_hamiltonian_psm_gradient(const PsmBoundaryState& state,
                                                         const LatticeGrid& grid,
                                                         const PoissonStructure& poisson);

/// Psi^a = -d_u phi^a - Lambda^{ab}(phi) p_b at every site.
Eigen::MatrixXd constraint_psi(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                               const LatticeGrid& grid, const PoissonStructure& poisson);

/// Directional derivative dPsi(phi, p)[dphi, dp] by the exact chain rule.
Eigen::MatrixXd constraint_psi_linearized(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& dphi, const Eigen::MatrixXd& dp,
                                          const LatticeGrid& grid,
                                          const PoissonStructure& poisson);

struct PsmTangent {
  Eigen::MatrixXd dphi;
  Eigen::MatrixXd dp;
};

/// Discrete symplectic form on (dphi, dp) pairs.
double psm_omega(const PsmTangent& u, const PsmTangent& v, const LatticeGrid& grid);

/// Hamiltonian vector field of the site functional Psi^a(site), defined by
/// i_X omega = dPsi^a(site) for the discrete omega above.
PsmTangent hamiltonian_vector_field_Xa(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                       std::size_t site, int a, const LatticeGrid& grid,
                                       const PoissonStructure& poisson);

/// Hamiltonian vector field of the smeared constraint sum_x w xi(x) Psi^a(x).
PsmTangent smeared_vector_field(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                const Eigen::VectorXd& xi, int a, const LatticeGrid& grid,
                                const PoissonStructure& poisson);

/// Max over a, b, sites and smooth test profiles xi in {1, cos, sin} of
/// |X_a[xi](Psi^b)|, evaluated by the chain rule.
double coisotropy_residual(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                           const LatticeGrid& grid, const PoissonStructure& poisson);

struct PsmStepResult {
  PsmBoundaryState state;
  double constraint_drift = 0.0;  // max |Psi| after minus before
};

/// Explicit midpoint RK2 step at fixed beta.
PsmStepResult psm_step(const PsmBoundaryState& state, const LatticeGrid& grid,
                       const PoissonStructure& poisson, double dt);

/// Exactly on-constraint data for the su(2) Lie-Poisson structure: a planar circle
/// phi = R (cos theta, sin theta, c) with p = (D phi x phi)/|phi|^2 + lambda phi.
PsmBoundaryState su2_circle_state(const LatticeGrid& grid, double radius, double height,
                                  double lambda);

/// For invertible constant Lambda: p = -Lambda^{-1} D phi.
PsmBoundaryState constant_poisson_state(const LatticeGrid& grid, const PoissonStructure& poisson,
                                        const Eigen::MatrixXd& phi);

/// Discrete presymplectic system on x = (phi, p, beta), each flattened column-major.
PresymplecticSystem psm_presymplectic_system(const LatticeGrid& grid,
                                             const PoissonStructure& poisson);
Eigen::VectorXd psm_pack(const PsmBoundaryState& state);
/// Indices of the beta coordinates in the packed vector.
std::vector<int> psm_beta_block(const LatticeGrid& grid, const PoissonStructure& poisson);

}  // namespace collar
