#include "collar/scalar.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace collar {

namespace {

bool zero_shift(const LatticeGrid& grid) {
  for (std::size_t s = 0; s < grid.site_count(); ++s)
    if (!grid.shift(s).isZero(0.0)) return false;
  return true;
}

Eigen::Index idx(std::size_t s) { return static_cast<Eigen::Index>(s); }

Eigen::VectorXd shift_dot(const Eigen::MatrixXd& beta, const LatticeGrid& grid) {
  Eigen::VectorXd out(beta.cols());
  for (std::size_t s = 0; s < grid.site_count(); ++s)
    out[idx(s)] = grid.shift(s).dot(beta.col(idx(s)));
  return out;
}

Eigen::VectorXd potential_force(const Eigen::VectorXd& phi, const PotentialSpec& v) {
  return phi.unaryExpr([&](double u) { return v.derivative(u); });
}

void check_scalar(const ScalarLatticeField& f, const LatticeGrid& grid, const char* what) {
  if (f.values.size() != idx(grid.site_count()))
    throw std::invalid_argument(std::string("shape mismatch: ") + what);
}

}  // namespace

double PotentialSpec::value(double u) const {
  switch (kind) {
    case Kind::free: return 0.0;
    case Kind::mass: return mass2 * u * u;
    case Kind::quartic: return mass2 * u * u + quartic * u * u * u * u;
  }
  return 0.0;
}

double PotentialSpec::derivative(double u) const {
  switch (kind) {
    case Kind::free: return 0.0;
    case Kind::mass: return 2.0 * mass2 * u;
    case Kind::quartic: return 2.0 * mass2 * u + 4.0 * quartic * u * u * u;
  }
  return 0.0;
}

double PotentialSpec::second_derivative(double u) const {
  switch (kind) {
    case Kind::free: return 0.0;
    case Kind::mass: return 2.0 * mass2;
    case Kind::quartic: return 2.0 * mass2 + 12.0 * quartic * u * u;
  }
  return 0.0;
}

void PotentialSpec::validate() const {
  if (!(mass2 >= 0.0) || !std::isfinite(mass2)) throw ConfigError("potential: mass2 must be >= 0");
  if (!(quartic >= 0.0) || !std::isfinite(quartic))
    throw ConfigError("potential: quartic coupling must be >= 0");
}

double boundary_hamiltonian(const ScalarBoundaryState& state, const LatticeGrid& grid,
                            const PotentialSpec& potential) {
  check_scalar(state.phi, grid, "phi vs grid");
  check_scalar(state.p, grid, "p vs grid");
  const CovectorLatticeField dphi = grad(state.phi, grid);
  const ScalarLatticeField tilde{shift_dot(state.beta.values, grid)};
  const ScalarLatticeField pot{state.phi.values.unaryExpr([&](double u) { return potential.value(u); })};
  const ScalarLatticeField one{Eigen::VectorXd::Ones(state.phi.values.size())};
  return -inner(state.beta, dphi, grid) - 0.5 * inner(state.p, state.p, grid) +
         inner(state.p, tilde, grid) + 0.5 * inner(state.beta, state.beta, grid) +
         inner(pot, one, grid);
}

ScalarHamiltonianGradient boundary_hamiltonian_gradient(const ScalarBoundaryState& state,
                                                        const LatticeGrid& grid,
                                                        const PotentialSpec& potential) {
  ScalarHamiltonianGradient g;
  const CovectorLatticeField dphi = grad(state.phi, grid);
  g.dbeta = -dphi.values;
  for (std::size_t s = 0; s < grid.site_count(); ++s) {
    const auto i = idx(s);
    g.dbeta.col(i) += grid.shift(s) * state.p.values[i] + grid.metric(s) * state.beta.values.col(i);
  }
  g.dp = -state.p.values + shift_dot(state.beta.values, grid);
  g.dphi = div(state.beta, grid).values + potential_force(state.phi.values, potential);
  return g;
}

VectorLatticeField solve_beta(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                              const LatticeGrid& grid) {
  check_scalar(phi, grid, "phi vs grid");
  check_scalar(p, grid, "p vs grid");
  CovectorLatticeField rhs = grad(phi, grid);
  for (std::size_t s = 0; s < grid.site_count(); ++s)
    rhs.values.col(idx(s)) -= grid.shift(s) * p.values[idx(s)];
  return raise(rhs, grid);
}

double beta_constraint_residual(const ScalarBoundaryState& state, const LatticeGrid& grid) {
  const ScalarHamiltonianGradient g = boundary_hamiltonian_gradient(state, grid, PotentialSpec{});
  return g.dbeta.size() ? g.dbeta.cwiseAbs().maxCoeff() : 0.0;
}

ScalarBoundaryState on_constraint(ScalarLatticeField phi, ScalarLatticeField p,
                                  const LatticeGrid& grid, double time) {
  ScalarBoundaryState st;
  st.beta = solve_beta(phi, p, grid);
  st.phi = std::move(phi);
  st.p = std::move(p);
  st.time = time;
  return st;
}

double reduced_scalar_hamiltonian(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                                  const LatticeGrid& grid, const PotentialSpec& potential) {
  return boundary_hamiltonian(on_constraint(phi, p, grid), grid, potential);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> scalar_rhs(const Eigen::VectorXd& phi,
                                                       const Eigen::VectorXd& p,
                                                       const LatticeGrid& grid,
                                                       const PotentialSpec& potential) {
  const VectorLatticeField beta = solve_beta({phi}, {p}, grid);
  Eigen::VectorXd phidot = -p + shift_dot(beta.values, grid);
  Eigen::VectorXd pdot = -div(beta, grid).values - potential_force(phi, potential);
  return {std::move(phidot), std::move(pdot)};
}

bool scalar_cfl_exceeded(const LatticeGrid& grid, double dt) { return dt > grid.min_spacing(); }

ScalarBoundaryState boundary_step(const ScalarBoundaryState& state, const LatticeGrid& grid,
                                  const PotentialSpec& potential, double dt,
                                  std::vector<std::string>* warnings) {
  if (!(dt > 0.0)) throw std::invalid_argument("boundary_step: dt must be positive");
  if (warnings && scalar_cfl_exceeded(grid, dt)) {
    std::ostringstream os;
    os << "dt = " << dt << " exceeds the CFL heuristic h_min = " << grid.min_spacing();
    warnings->push_back(os.str());
  }
  Eigen::VectorXd phi = state.phi.values;
  Eigen::VectorXd p = state.p.values;

  if (zero_shift(grid)) {
    // H = -1/2 <p,p> + U(phi): kick-drift-kick.
    auto force = [&](const Eigen::VectorXd& f) { return scalar_rhs(f, p, grid, potential).second; };
    p += 0.5 * dt * force(phi);
    phi -= dt * p;
    p += 0.5 * dt * force(phi);
  } else {
    const auto [f0, g0] = scalar_rhs(phi, p, grid, potential);
    Eigen::VectorXd phi1 = phi + dt * f0;
    Eigen::VectorXd p1 = p + dt * g0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
      const auto [fm, gm] =
          scalar_rhs(0.5 * (phi + phi1), 0.5 * (p + p1), grid, potential);
      Eigen::VectorXd phi2 = phi + dt * fm;
      Eigen::VectorXd p2 = p + dt * gm;
      const double change = std::max((phi2 - phi1).cwiseAbs().maxCoeff(),
                                     (p2 - p1).cwiseAbs().maxCoeff());
      const double scale = std::max({1.0, phi2.cwiseAbs().maxCoeff(), p2.cwiseAbs().maxCoeff()});
      phi1 = std::move(phi2);
      p1 = std::move(p2);
      if (change <= 1e-14 * scale) {
        converged = true;
        break;
      }
    }
    if (!converged && warnings) warnings->push_back("implicit midpoint iteration did not converge");
    phi = std::move(phi1);
    p = std::move(p1);
  }
  return on_constraint({std::move(phi)}, {std::move(p)}, grid, state.time + dt);
}

Eigen::SparseMatrix<double> scalar_stiffness(const LatticeGrid& grid) {
  const auto n = idx(grid.site_count());
  std::vector<Eigen::SparseMatrix<double>> d(static_cast<std::size_t>(grid.dim()));
  for (int k = 0; k < grid.dim(); ++k) {
    std::vector<Eigen::Triplet<double>> t;
    const double c = 1.0 / (2.0 * grid.spacing()[k]);
    for (std::size_t s = 0; s < grid.site_count(); ++s) {
      t.emplace_back(idx(s), idx(grid.neighbor(s, k, +1)), c);
      t.emplace_back(idx(s), idx(grid.neighbor(s, k, -1)), -c);
    }
    d[k].resize(n, n);
    d[k].setFromTriplets(t.begin(), t.end());
  }
  Eigen::SparseMatrix<double> out(n, n);
  for (int k = 0; k < grid.dim(); ++k) {
    for (int l = 0; l < grid.dim(); ++l) {
      Eigen::VectorXd diag(n);
      for (std::size_t s = 0; s < grid.site_count(); ++s)
        diag[idx(s)] = grid.weight(s) * grid.inverse_metric(s)(k, l);
      const Eigen::SparseMatrix<double> dl = diag.asDiagonal() * d[l];
      out += Eigen::SparseMatrix<double>(d[k].transpose()) * dl;
    }
  }
  out.prune(0.0);
  return out;
}

namespace {

Eigen::MatrixXd spatial_momentum(const Eigen::VectorXd& phi, const LatticeGrid& grid) {
  return raise(grad(ScalarLatticeField{phi}, grid), grid).values;
}

}  // namespace

BulkSolution bulk_solve_lorentzian(const ScalarLatticeField& phi, const ScalarLatticeField& p,
                                   const LatticeGrid& grid, const PotentialSpec& potential,
                                   double epsilon, int steps) {
  check_scalar(phi, grid, "phi vs grid");
  check_scalar(p, grid, "p vs grid");
  if (!zero_shift(grid)) throw ConfigError("bulk solve requires a zero collar shift");
  if (!(epsilon > 0.0) || steps < 1) throw ConfigError("bulk solve: need epsilon > 0 and steps >= 1");
  const Eigen::SparseMatrix<double> k = scalar_stiffness(grid);
  const Eigen::VectorXd winv = grid.weights().cwiseInverse();
  auto acc = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    return -winv.cwiseProduct(k * f) + potential_force(f, potential);
  };

  BulkSolution out;
  out.signature = Signature::lorentzian;
  out.epsilon = epsilon;
  out.dt = epsilon / steps;
  const double dt = out.dt;
  out.phi.reserve(static_cast<std::size_t>(steps) + 1);
  out.phi.push_back(phi.values);
  // phi_dot = -p at zero shift.
  out.phi.push_back(phi.values - dt * p.values + 0.5 * dt * dt * acc(phi.values));
  for (int n = 1; n < steps; ++n)
    out.phi.push_back(2.0 * out.phi[n] - out.phi[n - 1] + dt * dt * acc(out.phi[n]));

  out.p0.resize(out.phi.size());
  out.p0[0] = p.values;
  for (int n = 1; n < steps; ++n) out.p0[n] = -(out.phi[n + 1] - out.phi[n - 1]) / (2.0 * dt);
  out.p0[steps] =
      -((out.phi[steps] - out.phi[steps - 1]) / dt + 0.5 * dt * acc(out.phi[steps]));
  for (const auto& f : out.phi) out.pk.push_back(spatial_momentum(f, grid));
  return out;
}

BulkSolution bulk_solve_euclidean(const ScalarLatticeField& bottom, const ScalarLatticeField& top,
                                  const LatticeGrid& grid, const PotentialSpec& potential,
                                  double epsilon, int steps) {
  check_scalar(bottom, grid, "bottom data vs grid");
  check_scalar(top, grid, "top data vs grid");
  if (!potential.is_linear_force())
    throw ConfigError("nonlinear Euclidean Dirichlet solve is out of scope");
  if (!zero_shift(grid)) throw ConfigError("bulk solve requires a zero collar shift");
  if (!(epsilon > 0.0) || steps < 1) throw ConfigError("bulk solve: need epsilon > 0 and steps >= 1");

  const auto ns = idx(grid.site_count());
  const double dt = epsilon / steps;
  const double c2 = potential.second_derivative(0.0);  // V'(u) = c2 u
  const Eigen::VectorXd& w = grid.weights();
  const Eigen::SparseMatrix<double> k = scalar_stiffness(grid);

  BulkSolution out;
  out.signature = Signature::euclidean;
  out.epsilon = epsilon;
  out.dt = dt;
  out.phi.assign(static_cast<std::size_t>(steps) + 1, Eigen::VectorXd::Zero(ns));
  out.phi.front() = bottom.values;
  out.phi.back() = top.values;

  const int interior = steps - 1;
  if (interior > 0) {
    const Eigen::Index n = interior * ns;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n) * 8);
    for (int lvl = 0; lvl < interior; ++lvl) {
      const Eigen::Index off = lvl * ns;
      for (int outer = 0; outer < k.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(k, outer); it; ++it)
          t.emplace_back(off + it.row(), off + it.col(), it.value());
      for (Eigen::Index s = 0; s < ns; ++s) {
        t.emplace_back(off + s, off + s, w[s] * (2.0 / (dt * dt) - c2));
        if (lvl > 0) t.emplace_back(off + s, off - ns + s, -w[s] / (dt * dt));
        if (lvl + 1 < interior) t.emplace_back(off + s, off + ns + s, -w[s] / (dt * dt));
      }
    }
    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs.head(ns) += w.cwiseProduct(bottom.values) / (dt * dt);
    rhs.tail(ns) += w.cwiseProduct(top.values) / (dt * dt);

    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(a);
    lu.factorize(a);
    if (lu.info() != Eigen::Success)
      throw std::runtime_error("Euclidean Dirichlet system is singular: " + lu.lastErrorMessage());
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite())
      throw std::runtime_error("Euclidean Dirichlet solve failed");
    for (int lvl = 0; lvl < interior; ++lvl) out.phi[lvl + 1] = x.segment(lvl * ns, ns);
  }

  const Eigen::VectorXd winv = w.cwiseInverse();
  auto lap = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    return winv.cwiseProduct(k * f) - c2 * f;  // L f - V'(f)
  };
  out.p0.resize(out.phi.size());
  for (int n = 1; n < steps; ++n) out.p0[n] = (out.phi[n + 1] - out.phi[n - 1]) / (2.0 * dt);
  out.p0[0] = (out.phi[1] - out.phi[0]) / dt - 0.5 * dt * lap(out.phi[0]);
  out.p0[steps] = (out.phi[steps] - out.phi[steps - 1]) / dt + 0.5 * dt * lap(out.phi[steps]);
  for (const auto& f : out.phi) out.pk.push_back(spatial_momentum(f, grid));
  return out;
}

double euclidean_residual(const BulkSolution& bulk, const LatticeGrid& grid,
                          const PotentialSpec& potential) {
  const Eigen::SparseMatrix<double> k = scalar_stiffness(grid);
  const Eigen::VectorXd winv = grid.weights().cwiseInverse();
  const double dt = bulk.dt;
  double worst = 0.0;
  double scale = 1e-300;
  for (std::size_t n = 1; n + 1 < bulk.phi.size(); ++n) {
    const Eigen::VectorXd lf = winv.cwiseProduct(k * bulk.phi[n]);
    const Eigen::VectorXd force = potential_force(bulk.phi[n], potential);
    const Eigen::VectorXd r =
        (2.0 * bulk.phi[n] - bulk.phi[n + 1] - bulk.phi[n - 1]) / (dt * dt) + lf - force;
    const Eigen::VectorXd s = (bulk.phi[n + 1].cwiseAbs() + 2.0 * bulk.phi[n].cwiseAbs() +
                               bulk.phi[n - 1].cwiseAbs()) / (dt * dt) +
                              lf.cwiseAbs() + force.cwiseAbs();
    worst = std::max(worst, r.cwiseAbs().maxCoeff());
    scale = std::max(scale, s.maxCoeff());
  }
  return worst / scale;
}

double euclidean_action(const BulkSolution& bulk, const LatticeGrid& grid,
                        const PotentialSpec& potential) {
  const Eigen::SparseMatrix<double> k = scalar_stiffness(grid);
  const Eigen::VectorXd& w = grid.weights();
  const double dt = bulk.dt;
  const std::size_t steps = bulk.phi.size() - 1;
  std::vector<double> terms;
  terms.reserve(2 * steps + 1);
  for (std::size_t n = 0; n < steps; ++n) {
    const Eigen::VectorXd v = (bulk.phi[n + 1] - bulk.phi[n]) / dt;
    terms.push_back(0.5 * dt * v.dot(w.cwiseProduct(v)));
  }
  for (std::size_t n = 0; n <= steps; ++n) {
    const double c = (n == 0 || n == steps) ? 0.5 : 1.0;
    const Eigen::VectorXd pot =
        bulk.phi[n].unaryExpr([&](double u) { return potential.value(u); });
    terms.push_back(c * dt * (0.5 * bulk.phi[n].dot(k * bulk.phi[n]) - w.dot(pot)));
  }
  return pairwise_sum(terms);
}

std::pair<ScalarBoundaryState, ScalarBoundaryState> project_to_boundary(const BulkSolution& bulk) {
  if (bulk.phi.size() < 2) throw std::invalid_argument("project_to_boundary: empty bulk solution");
  auto make = [&](std::size_t n, double t) {
    ScalarBoundaryState st;
    st.phi.values = bulk.phi[n];
    st.p.values = bulk.p0[n];
    st.beta.values = bulk.pk[n];
    st.time = t;
    return st;
  };
  return {make(bulk.phi.size() - 1, 0.0), make(0, -bulk.epsilon)};
}

Eigen::VectorXd scalar_pack(const ScalarBoundaryState& state) {
  Eigen::VectorXd x(state.phi.values.size() + state.p.values.size() + state.beta.values.size());
  x << state.phi.values, state.p.values, state.beta.values.reshaped();
  return x;
}

std::vector<int> scalar_beta_block(const LatticeGrid& grid) {
  const int n = static_cast<int>(grid.site_count());
  std::vector<int> out(static_cast<std::size_t>(grid.dim() * n));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = 2 * n + static_cast<int>(i);
  return out;
}

PresymplecticSystem scalar_presymplectic_system(const LatticeGrid& grid, const PotentialSpec& potential) {
  potential.validate();
  const auto n = static_cast<Eigen::Index>(grid.site_count());
  const Eigen::Index d = grid.dim();
  const Eigen::Index total = (2 + d) * n;
  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(total, total);
  for (Eigen::Index s = 0; s < n; ++s) {
    sys.omega(s, n + s) = grid.weight(static_cast<std::size_t>(s));
    sys.omega(n + s, s) = -grid.weight(static_cast<std::size_t>(s));
  }
  auto unpack = [n, d](const Eigen::VectorXd& x) {
    ScalarBoundaryState st;
    st.phi.values = x.segment(0, n);
    st.p.values = x.segment(n, n);
    st.beta.values = x.segment(2 * n, d * n).reshaped(d, n);
    return st;
  };
  sys.hamiltonian = [grid, potential, unpack](const Eigen::VectorXd& x) {
    return boundary_hamiltonian(unpack(x), grid, potential);
  };
  sys.gradient = [grid, potential, unpack, total](const Eigen::VectorXd& x) {
    const ScalarHamiltonianGradient g = boundary_hamiltonian_gradient(unpack(x), grid, potential);
    const Eigen::VectorXd& w = grid.weights();
    Eigen::VectorXd out(total);
    out << g.dphi.cwiseProduct(w), g.dp.cwiseProduct(w),
        (g.dbeta.array().rowwise() * w.transpose().array()).matrix().reshaped();
    return out;
  };
  return sys;
}

}  // namespace collar
