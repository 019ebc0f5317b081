#include "collar/yangmills.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace collar {

namespace {

Eigen::Index sites(const LatticeGrid& grid) { return static_cast<Eigen::Index>(grid.site_count()); }

// Row-wise central difference of an (rows x sites) block.
Eigen::MatrixXd d_rows(const Eigen::MatrixXd& m, const LatticeGrid& grid, int axis) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    out.row(r) = central_difference(grid, m.row(r).transpose(), axis).transpose();
  return out;
}

// Row-wise (1/w) D^T (w m): the weighted adjoint of d_rows.
Eigen::MatrixXd dt_rows(const Eigen::MatrixXd& m, const LatticeGrid& grid, int axis) {
  const Eigen::VectorXd& w = grid.weights();
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Eigen::VectorXd f = w.cwiseProduct(m.row(r).transpose());
    out.row(r) = central_difference_transpose(grid, f, axis).cwiseQuotient(w).transpose();
  }
  return out;
}

Eigen::MatrixXd site_bracket(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                             const LieAlgebra& g) {
  if (g.is_abelian()) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index s = 0; s < x.cols(); ++s) out.col(s) = g.bracket(x.col(s), y.col(s));
  return out;
}

Eigen::MatrixXd site_ad_adjoint(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                                const LieAlgebra& g) {
  if (g.is_abelian()) return Eigen::MatrixXd::Zero(x.rows(), x.cols());
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index s = 0; s < x.cols(); ++s) out.col(s) = g.ad_adjoint(x.col(s), y.col(s));
  return out;
}

void require_rows(const Eigen::MatrixXd& m, Eigen::Index rows, const LatticeGrid& grid,
                  const char* what) {
  if (m.rows() != rows || m.cols() != sites(grid))
    throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

}  // namespace

int pair_count(int d) { return d * (d - 1) / 2; }

std::pair<int, double> pair_index(int k, int j, int d) {
  if (k == j) throw std::invalid_argument("pair_index: k == j");
  const int lo = std::min(k, j);
  const int hi = std::max(k, j);
  int idx = 0;
  for (int a = 0; a < lo; ++a) idx += d - 1 - a;
  idx += hi - lo - 1;
  return {idx, k < j ? 1.0 : -1.0};
}

void require_flat_grid(const LatticeGrid& grid) {
  if (!grid.is_flat() || !grid.has_uniform_weight())
    throw ConfigError("Yang-Mills module requires a flat metric with zero shift");
}

GaugeBoundaryState zero_gauge_state(const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  GaugeBoundaryState st;
  st.a = Eigen::MatrixXd::Zero(d * n, sites(grid));
  st.a0 = Eigen::MatrixXd::Zero(n, sites(grid));
  st.p = Eigen::MatrixXd::Zero(d * n, sites(grid));
  st.beta = Eigen::MatrixXd::Zero(pair_count(d) * n, sites(grid));
  return st;
}

Eigen::MatrixXd curvature(const Eigen::MatrixXd& a, const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  require_rows(a, d * n, grid, "connection");
  Eigen::MatrixXd f(pair_count(d) * n, sites(grid));
  for (int k = 0; k < d; ++k)
    for (int j = k + 1; j < d; ++j) {
      const auto ak = a.middleRows(k * n, n);
      const auto aj = a.middleRows(j * n, n);
      const int pi = pair_index(k, j, d).first;
      f.middleRows(pi * n, n) =
          0.5 * (d_rows(aj, grid, k) - d_rows(ak, grid, j) + site_bracket(ak, aj, algebra));
    }
  return f;
}

Eigen::MatrixXd covariant_d(const Eigen::MatrixXd& xi, const Eigen::MatrixXd& a,
                            const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  require_rows(xi, n, grid, "algebra scalar");
  require_rows(a, d * n, grid, "connection");
  Eigen::MatrixXd out(d * n, sites(grid));
  for (int k = 0; k < d; ++k)
    out.middleRows(k * n, n) = d_rows(xi, grid, k) + site_bracket(a.middleRows(k * n, n), xi, algebra);
  return out;
}

Eigen::MatrixXd covariant_div(const Eigen::MatrixXd& v, const Eigen::MatrixXd& a,
                              const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  require_rows(v, d * n, grid, "1-form");
  require_rows(a, d * n, grid, "connection");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, sites(grid));
  for (int k = 0; k < d; ++k) {
    const auto vk = v.middleRows(k * n, n);
    out -= dt_rows(vk, grid, k) + site_ad_adjoint(a.middleRows(k * n, n), vk, algebra);
  }
  return out;
}

Eigen::MatrixXd dstar_beta(const Eigen::MatrixXd& beta, const Eigen::MatrixXd& a,
                           const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  require_rows(beta, pair_count(d) * n, grid, "2-form");
  require_rows(a, d * n, grid, "connection");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * n, sites(grid));
  for (int k = 0; k < d; ++k)
    for (int j = k + 1; j < d; ++j) {
      const auto b = beta.middleRows(pair_index(k, j, d).first * n, n);
      out.middleRows(j * n, n) += dt_rows(b, grid, k) + site_ad_adjoint(a.middleRows(k * n, n), b, algebra);
      out.middleRows(k * n, n) -= dt_rows(b, grid, j) + site_ad_adjoint(a.middleRows(j * n, n), b, algebra);
    }
  return out;
}

double inner_algebra(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const LatticeGrid& grid,
                     const LieAlgebra& algebra) {
  const int n = algebra.dim();
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.rows() % n != 0 || x.cols() != sites(grid))
    throw std::invalid_argument("inner_algebra: shape mismatch");
  const Eigen::MatrixXd& k = algebra.killing();
  std::vector<double> terms(grid.site_count());
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    double acc = 0.0;
    for (Eigen::Index blk = 0; blk < x.rows() / n; ++blk)
      acc += x.col(s).segment(blk * n, n).dot(k * y.col(s).segment(blk * n, n));
    terms[static_cast<std::size_t>(s)] = grid.weight(static_cast<std::size_t>(s)) * acc;
  }
  return pairwise_sum(terms);
}

double inner_two_form(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const LatticeGrid& grid,
                      const LieAlgebra& algebra) {
  return 2.0 * inner_algebra(x, y, grid, algebra);
}

double boundary_hamiltonian_ym(const GaugeBoundaryState& state, const LatticeGrid& grid,
                               const LieAlgebra& algebra) {
  const Eigen::MatrixXd f = curvature(state.a, grid, algebra);
  const Eigen::MatrixXd da0 = covariant_d(state.a0, state.a, grid, algebra);
  require_rows(state.beta, f.rows(), grid, "beta");
  return inner_algebra(state.p, da0, grid, algebra) + 0.5 * inner_algebra(state.p, state.p, grid, algebra) -
         inner_two_form(state.beta, f, grid, algebra) -
         0.25 * inner_two_form(state.beta, state.beta, grid, algebra);
}

GaugeHamiltonianGradient boundary_hamiltonian_ym_gradient(const GaugeBoundaryState& state,
                                                          const LatticeGrid& grid,
                                                          const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  GaugeHamiltonianGradient g;
  g.da = -dstar_beta(state.beta, state.a, grid, algebra);
  for (int k = 0; k < d; ++k)
    g.da.middleRows(k * n, n) -= site_ad_adjoint(state.a0, state.p.middleRows(k * n, n), algebra);
  g.da0 = -covariant_div(state.p, state.a, grid, algebra);
  g.dp = covariant_d(state.a0, state.a, grid, algebra) + state.p;
  // Per stored pair component, in the same pointwise pairing as the other slots.
  g.dbeta = -2.0 * curvature(state.a, grid, algebra) - state.beta;
  return g;
}

GaugeBoundaryState with_on_shell_beta(GaugeBoundaryState state, const LatticeGrid& grid,
                                      const LieAlgebra& algebra) {
  state.beta = -2.0 * curvature(state.a, grid, algebra);
  return state;
}

bool ym_cfl_exceeded(const LatticeGrid& grid, double dt) { return dt > grid.min_spacing(); }

namespace {

// Exact flow of <p, d_a a0> + 1/2 <p,p> over time tau:
//   a_k' = p_k + D_k a0 - ad_{a0} a_k,   p_k' = K^-1 ad_{a0}^T K p_k.
void kinetic_flow(GaugeBoundaryState& st, const LatticeGrid& grid, const LieAlgebra& algebra,
                  double tau) {
  const int n = algebra.dim();
  const int d = grid.dim();
  Eigen::MatrixXd da0(d * n, sites(grid));
  for (int k = 0; k < d; ++k) da0.middleRows(k * n, n) = d_rows(st.a0, grid, k);

  if (algebra.is_abelian() || st.a0.isZero(0.0)) {
    st.a += tau * (st.p + da0);
    return;
  }
  const Eigen::MatrixXd& kk = algebra.killing();
  const Eigen::MatrixXd& ki = algebra.killing_inverse();
  for (Eigen::Index s = 0; s < st.a.cols(); ++s) {
    const Eigen::VectorXd a0 = st.a0.col(s);
    if (a0.isZero(0.0)) {
      st.a.col(s) += tau * (st.p.col(s) + da0.col(s));
      continue;
    }
    const Eigen::MatrixXd ad = algebra.ad(a0);
    Eigen::MatrixXd gen = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    gen.block(0, 0, n, n) = -ad;
    gen.block(0, n, n, n).setIdentity();
    gen.block(0, 2 * n, n, n).setIdentity();
    gen.block(n, n, n, n) = ki * ad.transpose() * kk;
    const Eigen::MatrixXd prop = (tau * gen).exp();
    for (int k = 0; k < d; ++k) {
      Eigen::VectorXd z(3 * n);
      z << st.a.col(s).segment(k * n, n), st.p.col(s).segment(k * n, n), da0.col(s).segment(k * n, n);
      const Eigen::VectorXd out = prop * z;
      st.a.col(s).segment(k * n, n) = out.head(n);
      st.p.col(s).segment(k * n, n) = out.segment(n, n);
    }
  }
}

}  // namespace

GaugeBoundaryState ym_step(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra, double dt, std::vector<std::string>* warnings) {
  if (!(dt > 0.0)) throw std::invalid_argument("ym_step: dt must be positive");
  require_flat_grid(grid);
  if (warnings && ym_cfl_exceeded(grid, dt)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the CFL heuristic h_min = " << grid.min_spacing();
    warnings->push_back(os.str());
  }
  GaugeBoundaryState st = state;
  kinetic_flow(st, grid, algebra, 0.5 * dt);
  const Eigen::MatrixXd beta = -2.0 * curvature(st.a, grid, algebra);
  st.p += dt * dstar_beta(beta, st.a, grid, algebra);
  kinetic_flow(st, grid, algebra, 0.5 * dt);
  st.time = state.time + dt;
  return with_on_shell_beta(std::move(st), grid, algebra);
}

GaussReport gauss_residual(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra) {
  GaussReport r;
  r.residual = covariant_div(state.p, state.a, grid, algebra);
  r.norm = std::sqrt(std::max(0.0, inner_algebra(r.residual, r.residual, grid, algebra)));
  return r;
}

GaugeBoundaryState gauge_transform(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                                   GaugeMode mode, const LatticeGrid& grid,
                                   const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  require_rows(xi, n, grid, "gauge parameter");
  GaugeBoundaryState out = state;
  if (mode == GaugeMode::infinitesimal) {
    out.a += covariant_d(xi, state.a, grid, algebra);
    for (int k = 0; k < d; ++k)
      out.p.middleRows(k * n, n) += site_bracket(state.p.middleRows(k * n, n), xi, algebra);
    for (Eigen::Index b = 0; b < state.beta.rows() / n; ++b)
      out.beta.middleRows(b * n, n) += site_bracket(state.beta.middleRows(b * n, n), xi, algebra);
    out.a0 += site_bracket(state.a0, xi, algebra);
    return out;
  }

  if (algebra.is_abelian()) {
    for (int k = 0; k < d; ++k) out.a.middleRows(k * n, n) += d_rows(xi, grid, k);
    return out;
  }
  if (algebra.name() != "su2")
    throw std::invalid_argument("finite gauge transformations need a matrix representation");

  const auto ns = static_cast<std::size_t>(sites(grid));
  std::vector<Eigen::Matrix2cd> g(ns), ginv(ns);
  for (std::size_t s = 0; s < ns; ++s) {
    g[s] = LieAlgebra::su2_exp(xi.col(static_cast<Eigen::Index>(s)));
    ginv[s] = g[s].adjoint();
  }
  auto conj = [&](const Eigen::VectorXd& x, std::size_t s) -> Eigen::VectorXd {
    return LieAlgebra::su2_components(ginv[s] * LieAlgebra::su2_matrix(x) * g[s]);
  };
  for (std::size_t s = 0; s < ns; ++s) {
    const auto c = static_cast<Eigen::Index>(s);
    for (int k = 0; k < d; ++k) {
      const Eigen::Matrix2cd dg =
          (g[grid.neighbor(s, k, +1)] - g[grid.neighbor(s, k, -1)]) / (2.0 * grid.spacing()[k]);
      const Eigen::Matrix2cd ak = ginv[s] * LieAlgebra::su2_matrix(state.a.col(c).segment(k * n, n)) * g[s] +
                                  ginv[s] * dg;
      out.a.col(c).segment(k * n, n) = LieAlgebra::su2_components(ak);
      out.p.col(c).segment(k * n, n) = conj(state.p.col(c).segment(k * n, n), s);
    }
    for (Eigen::Index b = 0; b < state.beta.rows() / n; ++b)
      out.beta.col(c).segment(b * n, n) = conj(state.beta.col(c).segment(b * n, n), s);
    out.a0.col(c) = conj(state.a0.col(c), s);
  }
  return out;
}

double noether_charge(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                      const LatticeGrid& grid, const LieAlgebra& algebra) {
  return inner_algebra(state.p, covariant_d(xi, state.a, grid, algebra), grid, algebra);
}

double reduced_hamiltonian(const GaugeBoundaryState& state, const LatticeGrid& grid,
                           const LieAlgebra& algebra) {
  const Eigen::MatrixXd f = curvature(state.a, grid, algebra);
  return 0.5 * inner_algebra(state.p, state.p, grid, algebra) + inner_two_form(f, f, grid, algebra);
}

std::vector<Eigen::MatrixXd> legendre_transform(const Eigen::MatrixXd& jet_a,
                                                const std::vector<Eigen::MatrixXd>& jet_da,
                                                const Eigen::MatrixXd& eta,
                                                const LieAlgebra& algebra) {
  const auto m = jet_a.rows();
  const int n = algebra.dim();
  if (jet_a.cols() != n || static_cast<Eigen::Index>(jet_da.size()) != m || eta.rows() != m ||
      eta.cols() != m)
    throw std::invalid_argument("legendre_transform: malformed jet");
  for (const auto& dj : jet_da)
    if (dj.rows() != m || dj.cols() != n) throw std::invalid_argument("legendre_transform: malformed jet");
  const Eigen::MatrixXd eta_inv = eta.inverse();
  std::vector<Eigen::MatrixXd> out(static_cast<std::size_t>(n), Eigen::MatrixXd::Zero(m, m));
  for (Eigen::Index mu = 0; mu < m; ++mu)
    for (Eigen::Index nu = 0; nu < m; ++nu) {
      // d_mu A_nu - d_nu A_mu + [A_mu, A_nu]
      const Eigen::VectorXd f =
          0.5 * (jet_da[mu].row(nu).transpose() - jet_da[nu].row(mu).transpose() +
                 algebra.bracket(jet_a.row(mu).transpose(), jet_a.row(nu).transpose()));
      for (int a = 0; a < n; ++a) out[a](mu, nu) = f[a];
    }
  for (auto& p : out) p = -2.0 * eta_inv * p * eta_inv.transpose();
  return out;
}

Eigen::VectorXd ym_pack(const GaugeBoundaryState& state) {
  Eigen::VectorXd x(state.a.size() + state.a0.size() + state.p.size() + state.beta.size());
  x << state.a.reshaped(), state.a0.reshaped(), state.p.reshaped(), state.beta.reshaped();
  return x;
}

std::vector<int> ym_beta_block(const LatticeGrid& grid, const LieAlgebra& algebra) {
  const int n = algebra.dim();
  const int d = grid.dim();
  const int s = static_cast<int>(grid.site_count());
  const int start = (2 * d * n + n) * s;
  std::vector<int> out(static_cast<std::size_t>(pair_count(d) * n * s));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = start + static_cast<int>(i);
  return out;
}

PresymplecticSystem ym_presymplectic_system(const LatticeGrid& grid, const LieAlgebra& algebra) {
  require_flat_grid(grid);
  const int n = algebra.dim();
  const int d = grid.dim();
  const Eigen::Index s = sites(grid);
  const Eigen::Index na = d * n * s, na0 = n * s, nb = pair_count(d) * n * s;
  const Eigen::Index total = 2 * na + na0 + nb;

  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(total, total);
  const Eigen::MatrixXd& kk = algebra.killing();
  for (Eigen::Index site = 0; site < s; ++site) {
    const double w = grid.weight(static_cast<std::size_t>(site));
    for (int k = 0; k < d; ++k)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const Eigen::Index ia = site * d * n + k * n + a;
          const Eigen::Index ip = na + na0 + site * d * n + k * n + b;
          sys.omega(ia, ip) = w * kk(a, b);
          sys.omega(ip, ia) = -w * kk(a, b);
        }
  }

  auto unpack = [=](const Eigen::VectorXd& x) {
    GaugeBoundaryState st;
    st.a = x.segment(0, na).reshaped(d * n, s);
    st.a0 = x.segment(na, na0).reshaped(n, s);
    st.p = x.segment(na + na0, na).reshaped(d * n, s);
    st.beta = x.segment(2 * na + na0, nb).reshaped(pair_count(d) * n, s);
    return st;
  };
  sys.hamiltonian = [grid, algebra, unpack](const Eigen::VectorXd& x) {
    return boundary_hamiltonian_ym(unpack(x), grid, algebra);
  };
  sys.gradient = [grid, algebra, unpack, n, total](const Eigen::VectorXd& x) {
    const GaugeHamiltonianGradient g = boundary_hamiltonian_ym_gradient(unpack(x), grid, algebra);
    // Convert Killing-dual pointwise gradients to coordinate gradients (w K G).
    auto lift = [&](const Eigen::MatrixXd& m) {
      Eigen::MatrixXd out(m.rows(), m.cols());
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        const double w = grid.weight(static_cast<std::size_t>(c));
        for (Eigen::Index blk = 0; blk < m.rows() / n; ++blk)
          out.col(c).segment(blk * n, n) = w * (algebra.killing() * m.col(c).segment(blk * n, n));
      }
      return out;
    };
    Eigen::VectorXd out(total);
    out << lift(g.da).reshaped(), lift(g.da0).reshaped(), lift(g.dp).reshaped(),
        lift(g.dbeta).reshaped();
    return out;
  };
  return sys;
}

CensusReport reduction_census(const GaugeBoundaryState& state, const LatticeGrid& grid,
                              const LieAlgebra& algebra, bool run_pca) {
  require_flat_grid(grid);
  const int n = algebra.dim();
  const int d = grid.dim();
  const Eigen::Index s = sites(grid);
  const Eigen::Index na = d * n * s;
  CensusReport rep;
  rep.phase_space_dim = static_cast<int>(2 * na);

  // Linearized Gauss map (a, p) -> covariant_div_a(p). It is bilinear, so a central
  // difference with unit step is exact up to rounding.
  Eigen::MatrixXd jac(n * s, 2 * na);
  for (Eigen::Index i = 0; i < na; ++i) {
    Eigen::MatrixXd ap = state.a, am = state.a;
    ap.reshaped()[i] += 1.0;
    am.reshaped()[i] -= 1.0;
    jac.col(i) = 0.5 * (covariant_div(state.p, ap, grid, algebra) -
                        covariant_div(state.p, am, grid, algebra)).reshaped();
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(d * n, s);
    e.reshaped()[i] = 1.0;
    jac.col(na + i) = covariant_div(e, state.a, grid, algebra).reshaped();
  }
  // Orbit map xi -> (d_a xi, [p, xi]).
  Eigen::MatrixXd orbit(2 * na, n * s);
  for (Eigen::Index i = 0; i < n * s; ++i) {
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(n, s);
    xi.reshaped()[i] = 1.0;
    Eigen::MatrixXd dp(d * n, s);
    for (int k = 0; k < d; ++k) dp.middleRows(k * n, n) = site_bracket(state.p.middleRows(k * n, n), xi, algebra);
    orbit.col(i) << covariant_d(xi, state.a, grid, algebra).reshaped(), dp.reshaped();
  }

  auto rank_with_margin = [](const Eigen::MatrixXd& m, double& margin) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd sv = svd.singularValues();
    margin = 1.0;
    if (sv.size() == 0 || sv[0] == 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv[i] > kDefaultRankTol * sv[0]) {
        ++r;
        margin = sv[i] / sv[0];
      }
    return r;
  };
  rep.constraint_rank = rank_with_margin(jac, rep.constraint_margin);
  rep.orbit_rank = rank_with_margin(orbit, rep.orbit_margin);
  rep.reduced_dim = rep.phase_space_dim - rep.constraint_rank - rep.orbit_rank;
  rep.near_reducible = std::min(rep.constraint_margin, rep.orbit_margin) < 1e-6;

  if (run_pca) {
    const PresymplecticSystem sys = ym_presymplectic_system(grid, algebra);
    const PcaReport pca = pca_run(sys, ym_pack(with_on_shell_beta(state, grid, algebra)), 8);
    rep.pca_ran = true;
    rep.pca_reduced_dim = pca.reduced_dim;
    rep.pca_gauge_dim = pca.gauge_dim;
    rep.pca_stabilized = pca.stabilized;
    rep.pca_steps = static_cast<int>(pca.chain.size());
  }
  return rep;
}

}  // namespace collar
