#pragma once

/// @file yangmills.hpp
/// @brief Yang-Mills boundary fields on a flat periodic lattice: curvature,
/// covariant derivative and divergence, the extended Hamiltonian, Strang stepping,
/// Gauss law, gauge transformations, charges and reduction counts.
///
/// Layout: algebra-valued 1-forms are (d * n_g) x sites with row k * n_g + a;
/// 2-forms store one block per unordered pair k < j, in lexicographic pair order.
/// Pairings use the Killing form on algebra indices and, for 2-forms, the sum over
/// ordered pairs (twice the stored-pair sum).
///
/// Hamiltonian convention (see README):
///   H = <p, d_a a0> + 1/2 <p,p> - <beta, F> - 1/4 <beta, beta>,
/// so dH/dbeta = 0 gives beta = -2F and the reduced energy is 1/2<p,p> + <F,F>.

#include "collar/lattice.hpp"
#include "collar/lie_algebra.hpp"
#include "collar/presym.hpp"

#include <string>
#include <utility>
#include <vector>

namespace collar {

struct GaugeBoundaryState {
  Eigen::MatrixXd a;     // (d n_g) x sites
  Eigen::MatrixXd a0;    // n_g x sites
  Eigen::MatrixXd p;     // (d n_g) x sites
  Eigen::MatrixXd beta;  // (pairs n_g) x sites
  double time = 0.0;
};

int pair_count(int d);
/// Stored index of the unordered pair (k, j), k != j, and the orientation sign.
std::pair<int, double> pair_index(int k, int j, int d);

GaugeBoundaryState zero_gauge_state(const LatticeGrid& grid, const LieAlgebra& algebra);

/// F_kj = 1/2 (D_k a_j - D_j a_k + [a_k, a_j]) for k < j.
Eigen::MatrixXd curvature(const Eigen::MatrixXd& a, const LatticeGrid& grid, const LieAlgebra& algebra);

/// (d_a xi)_k = D_k xi + [a_k, xi].
Eigen::MatrixXd covariant_d(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& a,
                            const LatticeGrid& grid, const LieAlgebra& algebra);

/// Negative adjoint of covariant_d: <d_a xi, v> = -<xi, covariant_div(v)>.
Eigen::MatrixXd covariant_div(const Eigen::MatrixXd& v, const Eigen::MatrixXd& a,
                              const LatticeGrid& grid, const LieAlgebra& algebra);

/// Adjoint of the linearized curvature: <beta, dF_a[da]> = <dstar_beta(beta), da>.
Eigen::MatrixXd dstar_beta(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& a,
                           const LatticeGrid& grid, const LieAlgebra& algebra);

/// Killing/lattice inner products.
double inner_algebra(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const LatticeGrid& grid,
                     const LieAlgebra& algebra);
double inner_two_form(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const LatticeGrid& grid,
                      const LieAlgebra& algebra);

double boundary_hamiltonian_ym(const GaugeBoundaryState& state, const LatticeGrid& grid,
                               const LieAlgebra& algebra);

/// Pointwise Killing-dual gradients: dH = sum_x w (G_a . K da + ...).
struct GaugeHamiltonianGradient {
  Eigen::MatrixXd da, da0, dp, dbeta;
};
GaugeHamiltonianGradient boundary_hamiltonian_ym_gradient(const GaugeBoundaryState& state,
                                                          const LatticeGrid& grid,
                                                          const LieAlgebra& algebra);

/// beta := -2 F_a.
GaugeBoundaryState with_on_shell_beta(GaugeBoundaryState state, const LatticeGrid& grid,
                                      const LieAlgebra& algebra);

/// Throws ConfigError unless the grid is flat with uniform weights and d >= 1.
void require_flat_grid(const LatticeGrid& grid);

bool ym_cfl_exceeded(const LatticeGrid& grid, double dt);

/// Strang step: exact flow of <p, d_a a0> + 1/2<p,p> for dt/2, a p-kick by
/// dstar_beta(-2F) for dt, and the first flow again for dt/2. Returns beta on-shell.
GaugeBoundaryState ym_step(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra, double dt,
                           std::vector<std::string>* warnings = nullptr);

struct GaussReport {
  Eigen::MatrixXd residual;  // n_g x sites
  double norm = 0.0;         // sqrt <G, G>
};
GaussReport gauss_residual(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra);

enum class GaugeMode { infinitesimal, finite };

/// Infinitesimal: first-order update by (d_a xi, [p, xi], [beta, xi], [a0, xi]).
/// Finite: a -> g^-1 a g + g^-1 D g with g = exp(xi) (u(1): a + D xi exactly).
GaugeBoundaryState gauge_transform(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                                   GaugeMode mode, const LatticeGrid& grid,
                                   const LieAlgebra& algebra);

/// Q(xi) = <p, d_a xi>.
double noether_charge(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                      const LatticeGrid& grid, const LieAlgebra& algebra);

/// Reduced energy 1/2 <p,p> + <F,F>.
double reduced_hamiltonian(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra);

/// Covariant Legendre map at a point. jet_a: m x n_g potentials A^a_mu; jet_da[nu]:
/// m x n_g holding d_nu A^a_mu. eta: m x m metric. Returns P[a] = -2 eta^-1 F^a eta^-1.
std::vector<Eigen::MatrixXd> legendre_transform(const Eigen::MatrixXd& jet_a,
                                                const std::vector<Eigen::MatrixXd>& jet_da,
                                                const Eigen::MatrixXd& eta,
                                                const LieAlgebra& algebra);

struct CensusReport {
  int phase_space_dim = 0;
  int constraint_rank = 0;
  int orbit_rank = 0;
  int reduced_dim = 0;
  double constraint_margin = 1.0;  // smallest kept relative singular value
  double orbit_margin = 1.0;
  bool near_reducible = false;
  // Cross-check by the constraint algorithm on (a, a0, p, beta).
  bool pca_ran = false;
  int pca_reduced_dim = 0;
  int pca_gauge_dim = 0;
  bool pca_stabilized = false;
  int pca_steps = 0;
};

CensusReport reduction_census(const GaugeBoundaryState& state, const LatticeGrid& grid,
                              const LieAlgebra& algebra, bool run_pca = true);

/// Discrete presymplectic system on x = (a, a0, p, beta).
PresymplecticSystem ym_presymplectic_system(const LatticeGrid& grid, const LieAlgebra& algebra);
Eigen::VectorXd ym_pack(const GaugeBoundaryState& state);
std::vector<int> ym_beta_block(const LatticeGrid& grid, const LieAlgebra& algebra);

}  // namespace collar
