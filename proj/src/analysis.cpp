#include "collar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace collar {

BoundaryPairing BoundaryPairing::scalar(const LatticeGrid& grid) { return euclidean(grid, 1); }

BoundaryPairing BoundaryPairing::euclidean(const LatticeGrid& grid, int n) {
  return {grid.weights(), Eigen::MatrixXd::Identity(n, n)};
}

BoundaryPairing BoundaryPairing::gauge(const LatticeGrid& grid, const LieAlgebra& algebra) {
  return {grid.weights(), algebra.killing()};
}

double BoundaryPairing::operator()(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const {
  const auto n = fiber.rows();
  if (x.rows() != y.rows() || x.cols() != y.cols() || x.cols() != weights.size() || x.rows() % n != 0)
    throw std::invalid_argument("boundary pairing: shape mismatch");
  std::vector<double> terms(static_cast<std::size_t>(x.cols()));
  for (Eigen::Index s = 0; s < x.cols(); ++s) {
    double acc = 0.0;
    for (Eigen::Index b = 0; b < x.rows() / n; ++b)
      acc += x.col(s).segment(b * n, n).dot(fiber * y.col(s).segment(b * n, n));
    terms[static_cast<std::size_t>(s)] = weights[s] * acc;
  }
  return pairwise_sum(terms);
}

BoundaryTangent scalar_tangent(const Eigen::VectorXd& dphi, const Eigen::VectorXd& dp, int sign) {
  return {dphi.transpose(), dp.transpose(), sign};
}

double omega_boundary(const BoundaryTangent& u1, const BoundaryTangent& u2, const BoundaryPairing& pairing) {
  if (u1.component_sign != u2.component_sign)
    throw std::invalid_argument("omega_boundary: tangents live on different components");
  return u1.component_sign * (pairing(u1.dphi, u2.dp) - pairing(u2.dphi, u1.dp));
}

double canonical_alpha(const Eigen::MatrixXd& p, const BoundaryTangent& u, const BoundaryPairing& pairing) {
  return u.component_sign * pairing(p, u.dphi);
}

double alpha_differential(const Eigen::MatrixXd& p, const BoundaryTangent& u, const BoundaryTangent& v,
                          const BoundaryPairing& pairing) {
  // U(alpha(V)) - V(alpha(U)); the bracket of constant fields vanishes.
  const double uv = canonical_alpha(p + u.dp, v, pairing) - canonical_alpha(p, v, pairing);
  const double vu = canonical_alpha(p + v.dp, u, pairing) - canonical_alpha(p, u, pairing);
  return uv - vu;
}

BoundaryTangent gauge_generator(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                                const LatticeGrid& grid, const LieAlgebra& algebra) {
  const GaugeBoundaryState moved = gauge_transform(state, xi, GaugeMode::infinitesimal, grid, algebra);
  return {moved.a - state.a, moved.p - state.p, 1};
}

namespace {

double tangent_norm(const BoundaryTangent& u, const BoundaryPairing& pairing) {
  return std::sqrt(std::max(0.0, pairing(u.dphi, u.dphi) + pairing(u.dp, u.dp)));
}

BoundaryTangent push_forward(const CollarFlow& flow, const PhasePoint& base, const BoundaryTangent& u,
                             double theta) {
  auto central = [&](double h) {
    const PhasePoint plus = flow({base.first + h * u.dphi, base.second + h * u.dp});
    const PhasePoint minus = flow({base.first - h * u.dphi, base.second - h * u.dp});
    return PhasePoint{(plus.first - minus.first) / (2.0 * h), (plus.second - minus.second) / (2.0 * h)};
  };
  const PhasePoint coarse = central(theta);
  const PhasePoint fine = central(0.5 * theta);
  return {(4.0 * fine.first - coarse.first) / 3.0, (4.0 * fine.second - coarse.second) / 3.0, 1};
}

}  // namespace

SymplecticityReport symplecticity_certificate(const CollarFlow& flow, const PhasePoint& base,
                                              const std::vector<std::pair<BoundaryTangent, BoundaryTangent>>& pairs,
                                              const BoundaryPairing& pairing, double theta,
                                              double tolerance, const std::string& name) {
  if (!(theta > 0.0)) throw std::invalid_argument("symplecticity_certificate: theta must be positive");
  SymplecticityReport rep;
  for (const auto& [v1, v2] : pairs) {
    BoundaryTangent u1 = v1, u2 = v2;
    u1.component_sign = u2.component_sign = -1;
    const double scale = tangent_norm(u1, pairing) * tangent_norm(u2, pairing);
    double value = 0.0;
    if (scale > 0.0) {
      const BoundaryTangent t1 = push_forward(flow, base, u1, theta);
      const BoundaryTangent t2 = push_forward(flow, base, u2, theta);
      value = std::abs(omega_boundary(t1, t2, pairing) + omega_boundary(u1, u2, pairing)) / scale;
    }
    rep.pair_values.push_back(value);
    rep.max_relative = std::max(rep.max_relative, value);
  }
  rep.record = {name, rep.max_relative, tolerance, rep.max_relative <= tolerance};
  return rep;
}

GeneratingFunctionalReport generating_functional_check(
    const ScalarLatticeField& bottom, const ScalarLatticeField& top, const LatticeGrid& grid,
    const PotentialSpec& potential, double epsilon, int steps,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& probes, double theta,
    double probe_tolerance, double symmetry_tolerance) {
  if (potential.kind == PotentialSpec::Kind::quartic)
    throw ConfigError("generating_functional_check needs a linear field equation");
  auto action = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& t) {
    return euclidean_action(bulk_solve_euclidean({b}, {t}, grid, potential, epsilon, steps), grid, potential);
  };
  auto momenta = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& t) {
    const auto [top_state, bottom_state] =
        project_to_boundary(bulk_solve_euclidean({b}, {t}, grid, potential, epsilon, steps));
    return std::pair{bottom_state.p.values, top_state.p.values};
  };
  const BoundaryPairing pairing = BoundaryPairing::scalar(grid);
  auto pair_vec = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return pairing(x.transpose(), y.transpose());
  };

  GeneratingFunctionalReport rep;
  rep.action = action(bottom.values, top.values);
  const auto [p_bot, p_top] = momenta(bottom.values, top.values);
  const double p_norm = std::sqrt(pair_vec(p_bot, p_bot) + pair_vec(p_top, p_top));

  for (const auto& [db, dt] : probes) {
    auto central = [&](double h) {
      return (action(bottom.values + h * db, top.values + h * dt) -
              action(bottom.values - h * db, top.values - h * dt)) /
             (2.0 * h);
    };
    const double fd = (4.0 * central(0.5 * theta) - central(theta)) / 3.0;
    const double predicted = pair_vec(p_top, dt) - pair_vec(p_bot, db);
    const double scale = p_norm * std::sqrt(pair_vec(db, db) + pair_vec(dt, dt));
    const double err = scale > 0.0 ? std::abs(fd - predicted) / scale : std::abs(fd - predicted);
    rep.probe_errors.push_back(err);
    rep.max_probe_error = std::max(rep.max_probe_error, err);
  }

  // Second variation: H = diag(w, w) * d(-p_bot, p_top)/d(bottom, top). The field
  // equation is linear, so the response to a unit datum is the column itself.
  const auto n = bottom.values.size();
  const auto [p0_bot, p0_top] = momenta(Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n));
  Eigen::MatrixXd hess(2 * n, 2 * n);
  for (Eigen::Index c = 0; c < 2 * n; ++c) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n), t = Eigen::VectorXd::Zero(n);
    if (c < n) b[c] = 1.0; else t[c - n] = 1.0;
    const auto [pb, pt] = momenta(b, t);
    hess.col(c) << -(pb - p0_bot).cwiseProduct(grid.weights()), (pt - p0_top).cwiseProduct(grid.weights());
  }
  const double hmax = hess.cwiseAbs().maxCoeff();
  rep.dn_symmetry = hmax > 0.0 ? (hess - hess.transpose()).cwiseAbs().maxCoeff() / hmax : 0.0;

  rep.probe_record = {"generating_functional_dW", rep.max_probe_error, probe_tolerance,
                      rep.max_probe_error <= probe_tolerance};
  rep.symmetry_record = {"dirichlet_to_neumann_symmetry", rep.dn_symmetry, symmetry_tolerance,
                         rep.dn_symmetry <= symmetry_tolerance};
  return rep;
}

}  // namespace collar
