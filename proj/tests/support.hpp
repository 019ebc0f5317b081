#pragma once

#include "collar/lattice.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace collar::test {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// sqrt(sum_s w_s |m_s|^2) for a field stored column-per-site.
inline double wnorm(const Eigen::MatrixXd& m, const LatticeGrid& grid) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += grid.weight(static_cast<std::size_t>(j)) * m.col(j).squaredNorm();
  return std::sqrt(s);
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace collar::test
