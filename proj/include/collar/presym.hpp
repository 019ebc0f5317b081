#pragma once

/// @file presym.hpp
/// @brief Finite-dimensional presymplectic systems (M, Omega, H) and the
/// constraint algorithm that produces M_1 > M_2 > ... > M_inf.
///
/// Omega is a constant skew matrix. The Hamiltonian comes with an exact
/// gradient; a Hessian oracle is optional and replaced by central differences
/// of the gradient when absent.

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace collar {

struct PresymplecticSystem {
  Eigen::MatrixXd omega;
  std::function<double(const Eigen::VectorXd&)> hamiltonian;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;  // may be empty

  int n() const { return static_cast<int>(omega.rows()); }
  /// Throws std::invalid_argument unless omega is square and exactly skew.
  void validate() const;
};

/// Relative rank tolerance used throughout (singular values below tol * sigma_max vanish).
inline constexpr double kDefaultRankTol = 1e-10;

/// Orthonormal basis of the numerical nullspace of an arbitrary matrix.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double tol = kDefaultRankTol);
/// Numerical rank with the same relative threshold.
int numerical_rank(const Eigen::MatrixXd& a, double tol = kDefaultRankTol);

/// Orthonormal basis of ker omega. Rejects non-skew input.
Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& omega, double tol = kDefaultRankTol);

/// Hessian at x: the oracle if present, otherwise central differences of the gradient
/// with step 1e-4 * max(1, |x|_inf).
Eigen::MatrixXd hessian_at(const PresymplecticSystem& sys, const Eigen::VectorXd& x);

/// Max relative discrepancy between the gradient oracle and central differences of H
/// along the given probe directions.
double gradient_self_test(const PresymplecticSystem& sys, const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& directions);

/// <Z_i, grad H(point)> for the columns Z_i of kernel_basis(omega).
Eigen::VectorXd primary_constraints(const PresymplecticSystem& sys, const Eigen::VectorXd& point,
                                    double tol = kDefaultRankTol);

struct PcaStep {
  int step = 0;
  int new_constraints = 0;
  int dim = 0;  // dim M_k
  /// Smallest kept and largest dropped relative singular value of the
  /// projected constraint gradients (1 / 0 when there is nothing on that side).
  double kept_margin = 1.0;
  double dropped_margin = 0.0;
};

struct PcaReport {
  std::vector<PcaStep> chain;
  int gauge_dim = 0;
  int reduced_dim = 0;
  bool stabilized = false;
  Eigen::VectorXd witness_point;
  double projection_distance = 0.0;
  bool witness_feasible = true;
  /// Human-readable notes on rank decisions that fell within 1e3 of the threshold.
  std::vector<std::string> flags;
};

PcaReport pca_run(const PresymplecticSystem& sys, const Eigen::VectorXd& point, int max_steps = 16,
                  double tol = kDefaultRankTol);

struct RegularityReport {
  bool regular = false;
  double smallest_singular_value = 0.0;
  double condition_number = 0.0;
};

/// Nondegeneracy of the Hessian block on the given coordinates. When no block is
/// supplied the kernel of omega is used.
RegularityReport check_regularity(const PresymplecticSystem& sys, const Eigen::VectorXd& point,
                                  const std::optional<std::vector<int>>& beta_block = std::nullopt,
                                  double tol = kDefaultRankTol);

struct DynamicsSolution {
  Eigen::VectorXd velocity;
  double consistency_residual = 0.0;
};

/// Minimum-norm least-squares solution of i_Gamma Omega = dH, i.e. Omega^T Gamma = grad H.
DynamicsSolution solve_dynamics(const PresymplecticSystem& sys, const Eigen::VectorXd& point);

}  // namespace collar
