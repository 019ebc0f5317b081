#include "collar/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace collar {

namespace {

void require_shape(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

}  // namespace

LatticeGrid LatticeGrid::build(const GridDescription& desc) {
  const auto d = desc.sizes.size();
  if (d == 0) throw ConfigError("grid: at least one axis is required");
  if (desc.spacing.size() != d)
    throw ConfigError("grid: spacing must have one entry per axis");

  LatticeGrid g;
  g.sizes_ = desc.sizes;
  g.spacing_ = desc.spacing;
  g.strides_.resize(d);
  std::size_t count = 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (desc.sizes[k] < 2) {
      std::ostringstream os;
      os << "grid: axis " << k << " has " << desc.sizes[k] << " sites (need >= 2)";
      throw ConfigError(os.str());
    }
    if (!(desc.spacing[k] > 0.0) || !std::isfinite(desc.spacing[k])) {
      std::ostringstream os;
      os << "grid: spacing along axis " << k << " must be positive";
      throw ConfigError(os.str());
    }
    g.strides_[k] = count;
    count *= static_cast<std::size_t>(desc.sizes[k]);
  }
  g.site_count_ = count;

  auto per_site = [&](auto const& list, std::size_t s) -> decltype(auto) {
    return list.size() == 1 ? list[0] : list[s];
  };
  if (!desc.metric.empty() && desc.metric.size() != 1 && desc.metric.size() != count)
    throw ConfigError("grid: metric must be given once or once per site");
  if (!desc.shift.empty() && desc.shift.size() != 1 && desc.shift.size() != count)
    throw ConfigError("grid: shift must be given once or once per site");

  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(d, d);
  g.metric_.resize(count);
  g.inverse_metric_.resize(count);
  g.shift_.resize(count);
  g.sqrt_det_.resize(count);
  g.lapse_.resize(count);
  g.weight_.resize(static_cast<Eigen::Index>(count));
  double cell = 1.0;
  for (double h : desc.spacing) cell *= h;

  for (std::size_t s = 0; s < count; ++s) {
    Eigen::MatrixXd m = desc.metric.empty() ? identity : per_site(desc.metric, s);
    if (m.rows() != static_cast<Eigen::Index>(d) || m.cols() != static_cast<Eigen::Index>(d))
      throw ConfigError("grid: metric must be d x d");
    if (!m.allFinite()) throw ConfigError("grid: metric entries must be finite");
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, m.cwiseAbs().maxCoeff()))
      throw ConfigError("grid: metric must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
      std::ostringstream os;
      os << "grid: metric is not positive definite at site " << s;
      throw ConfigError(os.str());
    }
    Eigen::VectorXd sh = desc.shift.empty() ? Eigen::VectorXd::Zero(d) : per_site(desc.shift, s);
    if (sh.size() != static_cast<Eigen::Index>(d) || !sh.allFinite())
      throw ConfigError("grid: shift must be a finite d-vector");

    Eigen::MatrixXd inv = m.inverse();
    const double det = m.determinant();
    // |eta| = det g * (1 + eta_0i g^ij eta_0j) for eta = -dt^2 + shift terms + g.
    const double lapse = std::sqrt(1.0 + sh.dot(inv * sh));

    g.flat_ = g.flat_ && (m - identity).cwiseAbs().maxCoeff() == 0.0 && sh.isZero(0.0);
    g.metric_[s] = std::move(m);
    g.inverse_metric_[s] = std::move(inv);
    g.shift_[s] = std::move(sh);
    g.sqrt_det_[s] = std::sqrt(det);
    g.lapse_[s] = lapse;
    g.weight_[static_cast<Eigen::Index>(s)] = lapse * g.sqrt_det_[s] * cell;
  }
  const double w0 = g.weight_[0];
  g.uniform_weight_ = (g.weight_.array() == w0).all();
  return g;
}

LatticeGrid flat_grid(std::vector<int> sizes, std::vector<double> spacing) {
  GridDescription desc;
  desc.sizes = std::move(sizes);
  desc.spacing = std::move(spacing);
  return LatticeGrid::build(desc);
}

double LatticeGrid::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

std::size_t LatticeGrid::neighbor(std::size_t site, int axis, int offset) const {
  const std::size_t n = static_cast<std::size_t>(sizes_[axis]);
  const std::size_t stride = strides_[axis];
  const std::size_t i = (site / stride) % n;
  const long shifted = (static_cast<long>(i) + offset) % static_cast<long>(n);
  const std::size_t j = static_cast<std::size_t>(shifted < 0 ? shifted + static_cast<long>(n) : shifted);
  return site + (j - i) * stride;
}

std::vector<int> LatticeGrid::coords(std::size_t site) const {
  std::vector<int> c(sizes_.size());
  for (std::size_t k = 0; k < sizes_.size(); ++k)
    c[k] = static_cast<int>((site / strides_[k]) % static_cast<std::size_t>(sizes_[k]));
  return c;
}

double LatticeGrid::position(std::size_t site, int axis) const {
  const auto i = (site / strides_[axis]) % static_cast<std::size_t>(sizes_[axis]);
  return static_cast<double>(i) * spacing_[axis];
}

ScalarLatticeField zero_scalar(const LatticeGrid& grid) {
  return {Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.site_count()))};
}

CovectorLatticeField zero_covector(const LatticeGrid& grid) {
  return {Eigen::MatrixXd::Zero(grid.dim(), static_cast<Eigen::Index>(grid.site_count()))};
}

VectorLatticeField zero_vector(const LatticeGrid& grid) {
  return {Eigen::MatrixXd::Zero(grid.dim(), static_cast<Eigen::Index>(grid.site_count()))};
}

ScalarLatticeField sample(const LatticeGrid& grid,
                          const std::function<double(std::span<const double>)>& f) {
  ScalarLatticeField out = zero_scalar(grid);
  std::vector<double> x(static_cast<std::size_t>(grid.dim()));
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    for (int k = 0; k < grid.dim(); ++k) x[static_cast<std::size_t>(k)] = grid.position(s, k);
    out.values[static_cast<Eigen::Index>(s)] = f(x);
  }
  return out;
}

double pairwise_sum(std::span<const double> terms) {
  if (terms.size() <= 8) {
    double acc = 0.0;
    for (double t : terms) acc += t;
    return acc;
  }
  const std::size_t half = terms.size() / 2;
  return pairwise_sum(terms.first(half)) + pairwise_sum(terms.subspan(half));
}

Eigen::VectorXd central_difference(const LatticeGrid& grid, const Eigen::VectorXd& f, int axis) {
  require_shape(f.size() == static_cast<Eigen::Index>(grid.site_count()), "scalar field vs grid");
  const double inv2h = 1.0 / (2.0 * grid.spacing()[axis]);
  Eigen::VectorXd out(f.size());
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto fwd = static_cast<Eigen::Index>(grid.neighbor(s, axis, +1));
    const auto bwd = static_cast<Eigen::Index>(grid.neighbor(s, axis, -1));
    out[static_cast<Eigen::Index>(s)] = (f[fwd] - f[bwd]) * inv2h;
  }
  return out;
}

Eigen::VectorXd central_difference_transpose(const LatticeGrid& grid, const Eigen::VectorXd& u,
                                             int axis) {
  require_shape(u.size() == static_cast<Eigen::Index>(grid.site_count()), "scalar field vs grid");
  const double inv2h = 1.0 / (2.0 * grid.spacing()[axis]);
  Eigen::VectorXd out(u.size());
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto fwd = static_cast<Eigen::Index>(grid.neighbor(s, axis, +1));
    const auto bwd = static_cast<Eigen::Index>(grid.neighbor(s, axis, -1));
    out[static_cast<Eigen::Index>(s)] = (u[bwd] - u[fwd]) * inv2h;
  }
  return out;
}

CovectorLatticeField grad(const ScalarLatticeField& f, const LatticeGrid& grid) {
  CovectorLatticeField out = zero_covector(grid);
  for (int k = 0; k < grid.dim(); ++k)
    out.values.row(k) = central_difference(grid, f.values, k).transpose();
  return out;
}

ScalarLatticeField div(const VectorLatticeField& v, const LatticeGrid& grid) {
  require_shape(v.values.rows() == grid.dim() &&
                    v.values.cols() == static_cast<Eigen::Index>(grid.site_count()),
                "vector field vs grid");
  const Eigen::VectorXd& w = grid.weights();
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(w.size());
  for (int k = 0; k < grid.dim(); ++k) {
    Eigen::VectorXd flux = w.cwiseProduct(v.values.row(k).transpose());
    acc += central_difference_transpose(grid, flux, k);
  }
  return {-acc.cwiseQuotient(w)};
}

VectorLatticeField raise(const CovectorLatticeField& alpha, const LatticeGrid& grid) {
  VectorLatticeField out = zero_vector(grid);
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto c = static_cast<Eigen::Index>(s);
    out.values.col(c) = grid.inverse_metric(s) * alpha.values.col(c);
  }
  return out;
}

CovectorLatticeField lower(const VectorLatticeField& v, const LatticeGrid& grid) {
  CovectorLatticeField out = zero_covector(grid);
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto c = static_cast<Eigen::Index>(s);
    out.values.col(c) = grid.metric(s) * v.values.col(c);
  }
  return out;
}

namespace {

template <typename Contract>
double weighted_sum(const LatticeGrid& grid, Contract&& contract) {
  std::vector<double> terms(grid.site_count());
  for (std::size_t s = 0; s < grid.site_count(); ++s) terms[s] = contract(s) * grid.weight(s);
  return pairwise_sum(terms);
}

void check_field(const Eigen::MatrixXd& m, const LatticeGrid& grid) {
  require_shape(m.rows() == grid.dim() && m.cols() == static_cast<Eigen::Index>(grid.site_count()),
                "field vs grid");
}

}  // namespace

double inner(const ScalarLatticeField& a, const ScalarLatticeField& b, const LatticeGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.site_count());
  require_shape(a.values.size() == n && b.values.size() == n, "scalar fields vs grid");
  return weighted_sum(grid, [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    return a.values[i] * b.values[i];
  });
}

double inner(const CovectorLatticeField& a, const VectorLatticeField& b, const LatticeGrid& grid) {
  check_field(a.values, grid);
  check_field(b.values, grid);
  return weighted_sum(grid, [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    return a.values.col(i).dot(b.values.col(i));
  });
}

double inner(const VectorLatticeField& a, const CovectorLatticeField& b, const LatticeGrid& grid) {
  return inner(b, a, grid);
}

double inner(const VectorLatticeField& a, const VectorLatticeField& b, const LatticeGrid& grid) {
  check_field(a.values, grid);
  check_field(b.values, grid);
  return weighted_sum(grid, [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    return a.values.col(i).dot(grid.metric(s) * b.values.col(i));
  });
}

double inner(const CovectorLatticeField& a, const CovectorLatticeField& b,
             const LatticeGrid& grid) {
  check_field(a.values, grid);
  check_field(b.values, grid);
  return weighted_sum(grid, [&](std::size_t s) {
    const auto i = static_cast<Eigen::Index>(s);
    return a.values.col(i).dot(grid.inverse_metric(s) * b.values.col(i));
  });
}

}  // namespace collar
