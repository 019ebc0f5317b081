#include "collar/lie_algebra.hpp"

#include "collar/lattice.hpp"

#include <algorithm>
#include <cmath>

namespace collar {

namespace {

const std::complex<double> kI(0.0, 1.0);

Eigen::Matrix2cd pauli(int a) {
  Eigen::Matrix2cd s;
  switch (a) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, -kI, kI, 0; break;
    default: s << 1, 0, 0, -1; break;
  }
  return s;
}

}  // namespace

LieAlgebra LieAlgebra::u1() {
  LieAlgebra g;
  g.name_ = "u1";
  g.n_ = 1;
  g.abelian_ = true;
  g.ad_ = {Eigen::MatrixXd::Zero(1, 1)};
  g.killing_ = Eigen::MatrixXd::Identity(1, 1);
  g.killing_inv_ = g.killing_;
  return g;
}

LieAlgebra LieAlgebra::su2() {
  LieAlgebra g;
  g.name_ = "su2";
  g.n_ = 3;
  g.abelian_ = false;
  g.ad_.assign(3, Eigen::MatrixXd::Zero(3, 3));
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        // Levi-Civita symbol via the sign of the permutation.
        const double e = 0.5 * (a - b) * (b - c) * (c - a);
        g.ad_[static_cast<std::size_t>(b)](a, c) = e;
      }
  g.killing_ = Eigen::MatrixXd::Identity(3, 3);
  g.killing_inv_ = g.killing_;
  return g;
}

LieAlgebra LieAlgebra::from_name(const std::string& name) {
  if (name == "u1") return u1();
  if (name == "su2") return su2();
  throw ConfigError("unknown Lie algebra '" + name + "' (expected u1 or su2)");
}

Eigen::MatrixXd LieAlgebra::ad(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n_, n_);
  for (int b = 0; b < n_; ++b) out += x[b] * ad_[static_cast<std::size_t>(b)];
  return out;
}

Eigen::VectorXd LieAlgebra::bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (abelian_) return Eigen::VectorXd::Zero(n_);
  return ad(x) * y;
}

Eigen::VectorXd LieAlgebra::ad_adjoint(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  if (abelian_) return Eigen::VectorXd::Zero(n_);
  return killing_inv_ * (ad(x).transpose() * (killing_ * y));
}

double LieAlgebra::antisymmetry_residual() const {
  double worst = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c)
        worst = std::max(worst, std::abs(structure(a, b, c) + structure(a, c, b)));
  return worst;
}

double LieAlgebra::jacobi_residual() const {
  double worst = 0.0;
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c) {
        Eigen::VectorXd ea = Eigen::VectorXd::Unit(n_, a), eb = Eigen::VectorXd::Unit(n_, b),
                        ec = Eigen::VectorXd::Unit(n_, c);
        const Eigen::VectorXd j = bracket(ea, bracket(eb, ec)) + bracket(eb, bracket(ec, ea)) +
                                  bracket(ec, bracket(ea, eb));
        worst = std::max(worst, j.cwiseAbs().maxCoeff());
      }
  return worst;
}

double LieAlgebra::invariance_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& z) const {
  return std::abs(pair(bracket(x, y), z) + pair(y, bracket(x, z)));
}

Eigen::Matrix2cd LieAlgebra::su2_matrix(const Eigen::VectorXd& x) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  for (int a = 0; a < 3; ++a) m += (-0.5 * kI * x[a]) * pauli(a);
  return m;
}

Eigen::Vector3d LieAlgebra::su2_components(const Eigen::Matrix2cd& m) {
  Eigen::Vector3d x;
  for (int a = 0; a < 3; ++a) x[a] = (-2.0 * ((-0.5 * kI) * pauli(a) * m).trace()).real();
  return x;
}

Eigen::Matrix2cd LieAlgebra::su2_exp(const Eigen::VectorXd& x) {
  const double theta = x.head<3>().norm();
  const Eigen::Matrix2cd m = su2_matrix(x);
  // m^2 = -(theta/2)^2 I.
  const double c = std::cos(0.5 * theta);
  const double s = theta > 1e-300 ? 2.0 * std::sin(0.5 * theta) / theta : 1.0;
  return c * Eigen::Matrix2cd::Identity() + s * m;
}

}  // namespace collar
