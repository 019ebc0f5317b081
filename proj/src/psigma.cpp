#include "collar/psigma.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace collar {

namespace {

void require_circle(const LatticeGrid& grid) {
  if (grid.dim() != 1) throw std::invalid_argument("Poisson sigma-model needs a 1D boundary grid");
}

void require_shape(const Eigen::MatrixXd& m, int r, const LatticeGrid& grid, const char* what) {
  if (m.rows() != r || m.cols() != static_cast<Eigen::Index>(grid.site_count()))
    throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

// Row-wise central difference along the circle.
Eigen::MatrixXd d_rows(const Eigen::MatrixXd& m, const LatticeGrid& grid) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < m.rows(); ++a)
    out.row(a) = central_difference(grid, m.row(a).transpose(), 0).transpose();
  return out;
}

// Row-wise (1/w) D^T (w m).
Eigen::MatrixXd dt_rows(const Eigen::MatrixXd& m, const LatticeGrid& grid) {
  const Eigen::VectorXd& w = grid.weights();
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index a = 0; a < m.rows(); ++a) {
    const Eigen::VectorXd f = w.cwiseProduct(m.row(a).transpose());
    out.row(a) = central_difference_transpose(grid, f, 0).cwiseQuotient(w).transpose();
  }
  return out;
}

Eigen::MatrixXd levi_civita(int c) {
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(3, 3);
  const int a = (c + 1) % 3;
  const int b = (c + 2) % 3;
  e(a, b) = 1.0;
  e(b, a) = -1.0;
  return e;
}

}  // namespace

PoissonStructure PoissonStructure::constant(Eigen::MatrixXd c) {
  return polynomial(std::move(c), {});
}

PoissonStructure PoissonStructure::lie_poisson_su2() {
  PoissonStructure ps = polynomial(Eigen::MatrixXd::Zero(3, 3), {levi_civita(0), levi_civita(1), levi_civita(2)});
  ps.kind_ = Kind::lie_poisson_su2;
  return ps;
}

PoissonStructure PoissonStructure::polynomial(Eigen::MatrixXd c, std::vector<Eigen::MatrixXd> linear) {
  if (c.rows() != c.cols() || c.rows() == 0)
    throw ConfigError("poisson: constant part must be a non-empty square matrix");
  const auto r = static_cast<int>(c.rows());
  if (!linear.empty() && static_cast<int>(linear.size()) != r)
    throw ConfigError("poisson: linear part needs one r x r matrix per target coordinate");
  for (const auto& l : linear)
    if (l.rows() != r || l.cols() != r) throw ConfigError("poisson: linear part has wrong shape");

  PoissonStructure ps;
  ps.kind_ = linear.empty() ? Kind::constant : Kind::polynomial;
  ps.r_ = r;
  ps.c_ = std::move(c);
  ps.linear_ = std::move(linear);

  // Load-time self-tests at a few deterministic sample points.
  for (int k = 0; k < 4; ++k) {
    Eigen::VectorXd u(r);
    for (int i = 0; i < r; ++i) u[i] = std::sin(1.3 * (k + 1) + 0.7 * i) * (k + 1);
    const double scale = std::max(1.0, ps.lambda(u).cwiseAbs().maxCoeff());
    if (ps.skew_residual(u) > 1e-12 * scale) throw ConfigError("poisson: tensor is not skew");
    if (ps.jacobi_residual(u) > 1e-10 * scale * scale)
      throw ConfigError("poisson: tensor violates the Jacobi identity");
  }
  return ps;
}

Eigen::MatrixXd PoissonStructure::lambda(const Eigen::VectorXd& u) const {
  Eigen::MatrixXd out = c_;
  for (std::size_t k = 0; k < linear_.size(); ++k) out += u[static_cast<Eigen::Index>(k)] * linear_[k];
  return out;
}

std::vector<Eigen::MatrixXd> PoissonStructure::dlambda(const Eigen::VectorXd&) const {
  if (!linear_.empty()) return linear_;
  return std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(r_), Eigen::MatrixXd::Zero(r_, r_));
}

double PoissonStructure::skew_residual(const Eigen::VectorXd& u) const {
  const Eigen::MatrixXd l = lambda(u);
  return (l + l.transpose()).cwiseAbs().maxCoeff();
}

double PoissonStructure::jacobi_residual(const Eigen::VectorXd& u) const {
  const Eigen::MatrixXd l = lambda(u);
  const auto dl = dlambda(u);
  double worst = 0.0;
  for (int a = 0; a < r_; ++a)
    for (int b = 0; b < r_; ++b)
      for (int c = 0; c < r_; ++c) {
        double s = 0.0;
        for (int d = 0; d < r_; ++d)
          s += l(a, d) * dl[d](b, c) + l(b, d) * dl[d](c, a) + l(c, d) * dl[d](a, b);
        worst = std::max(worst, std::abs(s));
      }
  return worst;
}

double PoissonStructure::dlambda_fd_residual(const Eigen::VectorXd& u) const {
  const auto dl = dlambda(u);
  double worst = 0.0;
  const double h = 1e-5 * std::max(1.0, u.cwiseAbs().maxCoeff());
  for (int c = 0; c < r_; ++c) {
    Eigen::VectorXd up = u, um = u;
    up[c] += h;
    um[c] -= h;
    const Eigen::MatrixXd fd = (lambda(up) - lambda(um)) / (2.0 * h);
    worst = std::max(worst, (fd - dl[c]).cwiseAbs().maxCoeff());
  }
  return worst;
}

double boundary_hamiltonian_psm(const PsmBoundaryState& state, const LatticeGrid& grid,
                                const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  require_shape(state.phi, r, grid, "phi");
  require_shape(state.p, r, grid, "p");
  require_shape(state.beta, r, grid, "beta");
  const Eigen::MatrixXd dphi = d_rows(state.phi, grid);
  std::vector<double> terms(grid.site_count());
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    const double density = -state.beta.col(i).dot(dphi.col(i)) +
                           state.p.col(i).dot(poisson.lambda(state.phi.col(i)) * state.beta.col(i));
    terms[s] = grid.weight(s) * density;
  }
  return pairwise_sum(terms);
}

PsmHamiltonianGradient boundary_hamiltonian_psm_gradient(const PsmBoundaryState& state,
                                                         const LatticeGrid& grid,
                                                         const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  PsmHamiltonianGradient g;
  g.dbeta = -d_rows(state.phi, grid);
  g.dp.resize(r, state.phi.cols());
  g.dphi = -dt_rows(state.beta, grid);
  for (Eigen::Index i = 0; i < state.phi.cols(); ++i) {
    const Eigen::MatrixXd l = poisson.lambda(state.phi.col(i));
    const auto dl = poisson.dlambda(state.phi.col(i));
    g.dbeta.col(i) += l.transpose() * state.p.col(i);
    g.dp.col(i) = l * state.beta.col(i);
    for (int c = 0; c < r; ++c) g.dphi(c, i) += state.p.col(i).dot(dl[c] * state.beta.col(i));
  }
  return g;
}

Eigen::MatrixXd constraint_psi(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                               const LatticeGrid& grid, const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  require_shape(phi, r, grid, "phi");
  require_shape(p, r, grid, "p");
  Eigen::MatrixXd psi = -d_rows(phi, grid);
  for (Eigen::Index i = 0; i < phi.cols(); ++i) psi.col(i) -= poisson.lambda(phi.col(i)) * p.col(i);
  return psi;
}

Eigen::MatrixXd constraint_psi_linearized(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                          const Eigen::MatrixXd& dphi, const Eigen::MatrixXd& dp,
                                          const LatticeGrid& grid,
                                          const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  Eigen::MatrixXd out = -d_rows(dphi, grid);
  for (Eigen::Index i = 0; i < phi.cols(); ++i) {
    out.col(i) -= poisson.lambda(phi.col(i)) * dp.col(i);
    const auto dl = poisson.dlambda(phi.col(i));
    for (int c = 0; c < r; ++c) out.col(i) -= dphi(c, i) * (dl[c] * p.col(i));
  }
  return out;
}

double psm_omega(const PsmTangent& u, const PsmTangent& v, const LatticeGrid& grid) {
  std::vector<double> terms(grid.site_count());
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto i = static_cast<Eigen::Index>(s);
    terms[s] = grid.weight(s) * (u.dphi.col(i).dot(v.dp.col(i)) - v.dphi.col(i).dot(u.dp.col(i)));
  }
  return pairwise_sum(terms);
}

PsmTangent hamiltonian_vector_field_Xa(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                       std::size_t site, int a, const LatticeGrid& grid,
                                       const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  if (a < 0 || a >= r) throw std::invalid_argument("X_a: index out of range");
  const auto y = static_cast<Eigen::Index>(site);
  PsmTangent x{Eigen::MatrixXd::Zero(r, phi.cols()), Eigen::MatrixXd::Zero(r, phi.cols())};
  const double wy = grid.weight(site);
  const Eigen::MatrixXd l = poisson.lambda(phi.col(y));
  x.dphi.col(y) = -l.row(a).transpose() / wy;
  // Row y of the difference matrix: +1/(2h) at y+1, -1/(2h) at y-1.
  const double c = 1.0 / (2.0 * grid.spacing()[0]);
  const std::size_t fwd = grid.neighbor(site, 0, +1);
  const std::size_t bwd = grid.neighbor(site, 0, -1);
  x.dp(a, static_cast<Eigen::Index>(fwd)) += c / grid.weight(fwd);
  x.dp(a, static_cast<Eigen::Index>(bwd)) -= c / grid.weight(bwd);
  const auto dl = poisson.dlambda(phi.col(y));
  for (int cc = 0; cc < r; ++cc) x.dp(cc, y) += dl[cc].row(a).dot(p.col(y)) / wy;
  return x;
}

PsmTangent smeared_vector_field(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                                const Eigen::VectorXd& xi, int a, const LatticeGrid& grid,
                                const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  PsmTangent x{Eigen::MatrixXd::Zero(r, phi.cols()), Eigen::MatrixXd::Zero(r, phi.cols())};
  const Eigen::VectorXd& w = grid.weights();
  x.dp.row(a) = central_difference_transpose(grid, w.cwiseProduct(xi), 0).cwiseQuotient(w).transpose();
  for (Eigen::Index i = 0; i < phi.cols(); ++i) {
    const Eigen::MatrixXd l = poisson.lambda(phi.col(i));
    const auto dl = poisson.dlambda(phi.col(i));
    x.dphi.col(i) = -xi[i] * l.row(a).transpose();
    for (int c = 0; c < r; ++c) x.dp(c, i) += xi[i] * dl[c].row(a).dot(p.col(i));
  }
  return x;
}

double coisotropy_residual(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p,
                           const LatticeGrid& grid, const PoissonStructure& poisson) {
  require_circle(grid);
  const double two_pi_over_l = 2.0 * std::numbers::pi / grid.length(0);
  const auto n = static_cast<Eigen::Index>(grid.site_count());
  std::vector<Eigen::VectorXd> profiles;
  profiles.push_back(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd cs(n), sn(n);
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const double u = grid.position(s, 0);
    cs[static_cast<Eigen::Index>(s)] = std::cos(two_pi_over_l * u);
    sn[static_cast<Eigen::Index>(s)] = std::sin(two_pi_over_l * u);
  }
  profiles.push_back(cs);
  profiles.push_back(sn);

  double worst = 0.0;
  for (const auto& xi : profiles)
    for (int a = 0; a < poisson.target_dim(); ++a) {
      const PsmTangent x = smeared_vector_field(phi, p, xi, a, grid, poisson);
      const Eigen::MatrixXd d = constraint_psi_linearized(phi, p, x.dphi, x.dp, grid, poisson);
      worst = std::max(worst, d.cwiseAbs().maxCoeff());
    }
  return worst;
}

namespace {

struct PsmRates {
  Eigen::MatrixXd phidot, pdot;
};

PsmRates psm_rates(const Eigen::MatrixXd& phi, const Eigen::MatrixXd& p, const Eigen::MatrixXd& beta,
                   const LatticeGrid& grid, const PoissonStructure& poisson) {
  const PsmHamiltonianGradient g =
      boundary_hamiltonian_psm_gradient(PsmBoundaryState{phi, p, beta, 0.0}, grid, poisson);
  return {g.dp, -g.dphi};
}

}  // namespace

PsmStepResult psm_step(const PsmBoundaryState& state, const LatticeGrid& grid,
                       const PoissonStructure& poisson, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("psm_step: dt must be positive");
  const Eigen::MatrixXd psi0 = constraint_psi(state.phi, state.p, grid, poisson);
  const PsmRates k1 = psm_rates(state.phi, state.p, state.beta, grid, poisson);
  const Eigen::MatrixXd phim = state.phi + 0.5 * dt * k1.phidot;
  const Eigen::MatrixXd pm = state.p + 0.5 * dt * k1.pdot;
  const PsmRates k2 = psm_rates(phim, pm, state.beta, grid, poisson);
  PsmStepResult out;
  out.state.phi = state.phi + dt * k2.phidot;
  out.state.p = state.p + dt * k2.pdot;
  out.state.beta = state.beta;
  out.state.time = state.time + dt;
  const Eigen::MatrixXd psi1 = constraint_psi(out.state.phi, out.state.p, grid, poisson);
  out.constraint_drift = (psi1 - psi0).cwiseAbs().maxCoeff();
  return out;
}

PsmBoundaryState su2_circle_state(const LatticeGrid& grid, double radius, double height,
                                  double lambda) {
  require_circle(grid);
  const auto n = static_cast<Eigen::Index>(grid.site_count());
  PsmBoundaryState st;
  st.phi.resize(3, n);
  const double k = 2.0 * std::numbers::pi / grid.length(0);
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const double th = k * grid.position(s, 0);
    st.phi.col(static_cast<Eigen::Index>(s)) << radius * std::cos(th), radius * std::sin(th),
        radius * height;
  }
  const Eigen::MatrixXd dphi = d_rows(st.phi, grid);
  st.p.resize(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3d f = st.phi.col(i);
    const Eigen::Vector3d df = dphi.col(i);
    st.p.col(i) = df.cross(f) / f.squaredNorm() + lambda * f;
  }
  st.beta = Eigen::MatrixXd::Zero(3, n);
  return st;
}

PsmBoundaryState constant_poisson_state(const LatticeGrid& grid, const PoissonStructure& poisson,
                                        const Eigen::MatrixXd& phi) {
  require_circle(grid);
  const Eigen::MatrixXd l = poisson.lambda(Eigen::VectorXd::Zero(poisson.target_dim()));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(l);
  if (poisson.kind() != PoissonStructure::Kind::constant || !lu.isInvertible())
    throw ConfigError("constant_poisson_state needs a constant invertible Poisson tensor");
  PsmBoundaryState st;
  st.phi = phi;
  st.p = -lu.solve(d_rows(phi, grid));
  st.beta = Eigen::MatrixXd::Zero(phi.rows(), phi.cols());
  return st;
}

Eigen::VectorXd psm_pack(const PsmBoundaryState& state) {
  const Eigen::Index m = state.phi.size();
  Eigen::VectorXd x(3 * m);
  x << state.phi.reshaped(), state.p.reshaped(), state.beta.reshaped();
  return x;
}

std::vector<int> psm_beta_block(const LatticeGrid& grid, const PoissonStructure& poisson) {
  const int m = poisson.target_dim() * static_cast<int>(grid.site_count());
  std::vector<int> out(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = 2 * m + i;
  return out;
}

PresymplecticSystem psm_presymplectic_system(const LatticeGrid& grid,
                                             const PoissonStructure& poisson) {
  require_circle(grid);
  const int r = poisson.target_dim();
  const auto n = static_cast<Eigen::Index>(grid.site_count());
  const Eigen::Index m = r * n;
  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(3 * m, 3 * m);
  for (Eigen::Index s = 0; s < n; ++s)
    for (int a = 0; a < r; ++a) {
      const Eigen::Index i = s * r + a;
      sys.omega(i, m + i) = grid.weight(static_cast<std::size_t>(s));
      sys.omega(m + i, i) = -grid.weight(static_cast<std::size_t>(s));
    }
  auto unpack = [r, n, m](const Eigen::VectorXd& x) {
    PsmBoundaryState st;
    st.phi = x.segment(0, m).reshaped(r, n);
    st.p = x.segment(m, m).reshaped(r, n);
    st.beta = x.segment(2 * m, m).reshaped(r, n);
    return st;
  };
  sys.hamiltonian = [grid, poisson, unpack](const Eigen::VectorXd& x) {
    return boundary_hamiltonian_psm(unpack(x), grid, poisson);
  };
  sys.gradient = [grid, poisson, unpack, m](const Eigen::VectorXd& x) {
    const PsmHamiltonianGradient g = boundary_hamiltonian_psm_gradient(unpack(x), grid, poisson);
    Eigen::VectorXd out(3 * m);
    const Eigen::RowVectorXd w = grid.weights().transpose();
    out << (g.dphi.array().rowwise() * w.array()).matrix().reshaped(),
        (g.dp.array().rowwise() * w.array()).matrix().reshaped(),
        (g.dbeta.array().rowwise() * w.array()).matrix().reshaped();
    return out;
  };
  return sys;
}

}  // namespace collar
