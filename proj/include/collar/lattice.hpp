#pragma once

/// @file lattice.hpp
/// @brief Periodic lattice discretization of a closed boundary and the
/// summation-by-parts difference operators used by every theory module.
///
/// Sites are stored in lexicographic order with axis 0 varying fastest.
/// Every per-site quantity (metric, shift, lapse) is fixed at construction.
/// The quadrature weight of a site is  w = Delta * sqrt|g| * prod_k h_k.

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace collar {

/// Raised for invalid grid, run configuration or theory parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input to build_grid. Leaving metric/shift empty selects the flat default.
struct GridDescription {
  std::vector<int> sizes;
  std::vector<double> spacing;
  /// Either empty, one d x d matrix applied to every site, or one per site.
  std::vector<Eigen::MatrixXd> metric;
  /// Either empty, one d-vector applied to every site, or one per site.
  std::vector<Eigen::VectorXd> shift;
};

class LatticeGrid {
 public:
  static LatticeGrid build(const GridDescription& desc);

  int dim() const { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& sizes() const { return sizes_; }
  const std::vector<double>& spacing() const { return spacing_; }
  std::size_t site_count() const { return site_count_; }
  double min_spacing() const;

  /// Site reached from `site` by `offset` steps along `axis` (periodic).
  std::size_t neighbor(std::size_t site, int axis, int offset) const;
  /// Integer coordinates of a site.
  std::vector<int> coords(std::size_t site) const;
  /// Physical coordinate x_k = i_k * h_k of a site.
  double position(std::size_t site, int axis) const;
  /// Period L_k = N_k * h_k.
  double length(int axis) const { return sizes_[axis] * spacing_[axis]; }

  const Eigen::MatrixXd& metric(std::size_t site) const { return metric_[site]; }
  const Eigen::MatrixXd& inverse_metric(std::size_t site) const { return inverse_metric_[site]; }
  const Eigen::VectorXd& shift(std::size_t site) const { return shift_[site]; }
  double sqrt_det_metric(std::size_t site) const { return sqrt_det_[site]; }
  double lapse(std::size_t site) const { return lapse_[site]; }
  double weight(std::size_t site) const { return weight_[site]; }
  const Eigen::VectorXd& weights() const { return weight_; }

  bool is_flat() const { return flat_; }
  bool has_uniform_weight() const { return uniform_weight_; }

 private:
  LatticeGrid() = default;

  std::vector<int> sizes_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t site_count_ = 0;
  std::vector<Eigen::MatrixXd> metric_;
  std::vector<Eigen::MatrixXd> inverse_metric_;
  std::vector<Eigen::VectorXd> shift_;
  std::vector<double> sqrt_det_;
  std::vector<double> lapse_;
  Eigen::VectorXd weight_;
  bool flat_ = true;
  bool uniform_weight_ = true;
};

/// Flat periodic grid with identity metric and zero shift.
LatticeGrid flat_grid(std::vector<int> sizes, std::vector<double> spacing);

// Field carriers. Vector/covector fields store one column per site.

struct ScalarLatticeField {
  Eigen::VectorXd values;
};

struct CovectorLatticeField {
  Eigen::MatrixXd values;  // d x sites, components alpha_i
};

struct VectorLatticeField {
  Eigen::MatrixXd values;  // d x sites, components v^i
};

ScalarLatticeField zero_scalar(const LatticeGrid& grid);
CovectorLatticeField zero_covector(const LatticeGrid& grid);
VectorLatticeField zero_vector(const LatticeGrid& grid);

/// Samples f(x_0, ..., x_{d-1}) at every site.
ScalarLatticeField sample(const LatticeGrid& grid,
                          const std::function<double(std::span<const double>)>& f);

/// Deterministic pairwise reduction in index order.
double pairwise_sum(std::span<const double> terms);

/// Central difference along one axis: (f(x+h e_k) - f(x-h e_k)) / (2 h_k).
Eigen::VectorXd central_difference(const LatticeGrid& grid, const Eigen::VectorXd& f, int axis);
/// Transpose of central_difference with respect to the unweighted sum.
Eigen::VectorXd central_difference_transpose(const LatticeGrid& grid, const Eigen::VectorXd& u,
                                             int axis);

CovectorLatticeField grad(const ScalarLatticeField& f, const LatticeGrid& grid);

/// Negative adjoint of grad:  <grad f, v> = -<f, div v>.
/// Equals (1/w) sum_k D_k(w v^k) with w the site weight.
ScalarLatticeField div(const VectorLatticeField& v, const LatticeGrid& grid);

/// Raise / lower an index with the per-site metric.
VectorLatticeField raise(const CovectorLatticeField& alpha, const LatticeGrid& grid);
CovectorLatticeField lower(const VectorLatticeField& v, const LatticeGrid& grid);

double inner(const ScalarLatticeField& a, const ScalarLatticeField& b, const LatticeGrid& grid);
/// Natural pairing between 1-forms and vector fields.
double inner(const CovectorLatticeField& a, const VectorLatticeField& b, const LatticeGrid& grid);
double inner(const VectorLatticeField& a, const CovectorLatticeField& b, const LatticeGrid& grid);
/// Metric inner product g_ij a^i b^j.
double inner(const VectorLatticeField& a, const VectorLatticeField& b, const LatticeGrid& grid);
/// Inverse-metric inner product g^ij a_i b_j.
double inner(const CovectorLatticeField& a, const CovectorLatticeField& b, const LatticeGrid& grid);

}  // namespace collar
