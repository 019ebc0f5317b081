#pragma once

/// @file lie_algebra.hpp
/// @brief Structure constants, Killing form and matrix representations for
/// the gauge algebras u(1) and su(2).
///
/// Basis convention for su(2): xi_a = -(i/2) sigma_a, so [xi_b, xi_c] = eps_{abc} xi_a
/// and the Killing form is normalized to the identity.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <vector>

namespace collar {

class LieAlgebra {
 public:
  static LieAlgebra u1();
  static LieAlgebra su2();
  /// "u1" or "su2"; anything else throws ConfigError.
  static LieAlgebra from_name(const std::string& name);

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  bool is_abelian() const { return abelian_; }

  /// eps^a_{bc}.
  double structure(int a, int b, int c) const { return ad_[static_cast<std::size_t>(b)](a, c); }
  /// ad_b with (ad_b)_{ac} = eps^a_{bc}.
  const Eigen::MatrixXd& ad_basis(int b) const { return ad_[static_cast<std::size_t>(b)]; }
  /// ad_x = sum_b x^b ad_b.
  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const;
  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  /// K^-1 ad_x^T K y: the Killing adjoint of ad_x applied to y.
  Eigen::VectorXd ad_adjoint(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  const Eigen::MatrixXd& killing() const { return killing_; }
  const Eigen::MatrixXd& killing_inverse() const { return killing_inv_; }
  double pair(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const { return x.dot(killing_ * y); }

  double antisymmetry_residual() const;
  double jacobi_residual() const;
  /// |<[x,y],z> + <y,[x,z]>|.
  double invariance_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                             const Eigen::VectorXd& z) const;

  // su(2) fundamental representation.
  static Eigen::Matrix2cd su2_matrix(const Eigen::VectorXd& x);
  /// Components x^a = -2 Tr(xi_a X) of the anti-Hermitian traceless part of X.
  static Eigen::Vector3d su2_components(const Eigen::Matrix2cd& m);
  /// exp(sum_a x^a xi_a) in closed form.
  static Eigen::Matrix2cd su2_exp(const Eigen::VectorXd& x);

 private:
  std::string name_;
  int n_ = 0;
  bool abelian_ = true;
  std::vector<Eigen::MatrixXd> ad_;
  Eigen::MatrixXd killing_;
  Eigen::MatrixXd killing_inv_;
};

}  // namespace collar
