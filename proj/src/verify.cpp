#include "collar/verify.hpp"

#include "collar/psigma.hpp"
#include "collar/scalar.hpp"
#include "collar/yangmills.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace collar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

CertificateRecord at_most(const std::string& name, double value, double tol) {
  return {name, value, tol, value <= tol};
}

CertificateRecord exact(const std::string& name, double mismatches) {
  return {name, mismatches, 0.0, mismatches == 0.0};
}

Json vec_json(const std::vector<double>& v) { return Json(v); }

Json chain_json(const PcaReport& rep) {
  Json chain = Json::array();
  for (const auto& s : rep.chain)
    chain.push_back({{"step", s.step}, {"new_constraints", s.new_constraints}, {"dim", s.dim}});
  return chain;
}

double weighted_norm(const Eigen::MatrixXd& m, const LatticeGrid& grid) {
  double acc = 0.0;
  for (Eigen::Index s = 0; s < m.cols(); ++s) acc += grid.weight(static_cast<std::size_t>(s)) * m.col(s).squaredNorm();
  return std::sqrt(acc);
}

GaugeBoundaryState smooth_gauge_state(const LatticeGrid& grid, const LieAlgebra& algebra, StreamRng& rng,
                                      double amp_a, double amp_p) {
  GaugeBoundaryState st = zero_gauge_state(grid, algebra);
  for (Eigen::Index r = 0; r < st.a.rows(); ++r) {
    st.a.row(r) = amp_a * random_smooth_field(grid, rng).transpose();
    st.p.row(r) = amp_p * random_smooth_field(grid, rng).transpose();
  }
  return with_on_shell_beta(st, grid, algebra);
}

GaugeBoundaryState random_gauge_state(const LatticeGrid& grid, const LieAlgebra& algebra, StreamRng& rng) {
  GaugeBoundaryState st = zero_gauge_state(grid, algebra);
  st.a = rng.normal_matrix(st.a.rows(), st.a.cols());
  st.p = rng.normal_matrix(st.p.rows(), st.p.cols());
  return with_on_shell_beta(st, grid, algebra);
}

}  // namespace

double VerifyOptions::tol(const std::string& name) const {
  const auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

bool CriterionResult::pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

std::vector<double> observed_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) out.push_back(std::log2(errors[i] / errors[i + 1]));
  return out;
}

CertificateRecord convergence_record(const std::string& name, const std::vector<double>& errors,
                                     double target_order, double floor) {
  const bool at_floor = std::all_of(errors.begin(), errors.end(), [&](double e) { return e <= floor; });
  if (at_floor) return {name, *std::max_element(errors.begin(), errors.end()), floor, true};
  const std::vector<double> orders = observed_orders(errors);
  const double worst = orders.empty() ? 0.0 : *std::min_element(orders.begin(), orders.end());
  return {name, worst, target_order, worst >= target_order};
}

Eigen::VectorXd random_smooth_field(const LatticeGrid& grid, StreamRng& rng, int max_mode) {
  const int d = grid.dim();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.site_count()));
  std::vector<int> m(static_cast<std::size_t>(d), -max_mode);
  while (true) {
    const double c = rng.normal(), s = rng.normal();
    double scale = 1.0;
    for (int k : m) scale += k * k;
    for (std::size_t site = 0; site < grid.site_count(); ++site) {
      double phase = 0.0;
      for (int k = 0; k < d; ++k) phase += kTwoPi * m[static_cast<std::size_t>(k)] * grid.position(site, k) / grid.length(k);
      out[static_cast<Eigen::Index>(site)] += (c * std::cos(phase) + s * std::sin(phase)) / scale;
    }
    int k = 0;
    while (k < d && ++m[static_cast<std::size_t>(k)] > max_mode) m[static_cast<std::size_t>(k++)] = -max_mode;
    if (k == d) break;
  }
  return out;
}

Eigen::MatrixXd project_gauss(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a, const LatticeGrid& grid,
                              const LieAlgebra& algebra) {
  // The Gauss map is linear in p; assemble it column by column.
  const Eigen::Index np = p.size();
  const Eigen::Index ng = algebra.dim() * static_cast<Eigen::Index>(grid.site_count());
  Eigen::MatrixXd j(ng, np);
  for (Eigen::Index i = 0; i < np; ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p.rows(), p.cols());
    e.reshaped()[i] = 1.0;
    j.col(i) = covariant_div(e, a, grid, algebra).reshaped();
  }
  const Eigen::VectorXd g = covariant_div(p, a, grid, algebra).reshaped();
  const Eigen::VectorXd corr = j.completeOrthogonalDecomposition().solve(g);
  Eigen::MatrixXd out = p;
  out.reshaped() -= corr;
  return out;
}

PresymplecticSystem regular_example_system() {
  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(4, 4);
  sys.omega(0, 1) = 1.0;
  sys.omega(1, 0) = -1.0;
  sys.hamiltonian = [](const Eigen::VectorXd& x) {
    return 0.5 * x[1] * x[1] + 0.5 * (x[2] * x[2] + x[3] * x[3]) + x[0] * x[2];
  };
  sys.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(4);
    g << x[2], x[1], x[2] + x[0], x[3];
    return g;
  };
  sys.hessian = [](const Eigen::VectorXd&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(4, 4);
    h(1, 1) = h(2, 2) = h(3, 3) = 1.0;
    h(0, 2) = h(2, 0) = 1.0;
    return h;
  };
  return sys;
}

PresymplecticSystem two_step_example_system() {
  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(3, 3);
  sys.omega(0, 1) = 1.0;
  sys.omega(1, 0) = -1.0;
  sys.hamiltonian = [](const Eigen::VectorXd& x) { return 0.5 * x[1] * x[1] + x[0] * x[2]; };
  sys.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(3);
    g << x[2], x[1], x[0];
    return g;
  };
  sys.hessian = [](const Eigen::VectorXd&) {
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(3, 3);
    h(1, 1) = 1.0;
    h(0, 2) = h(2, 0) = 1.0;
    return h;
  };
  return sys;
}

CriterionResult verify_pca_exactness(const VerifyOptions& opt) {
  CriterionResult r{1, "pca_exactness", {}, Json::object()};
  struct Case {
    std::string name;
    PresymplecticSystem sys;
    Eigen::VectorXd point;
    std::vector<std::array<int, 3>> chain;
    int gauge, reduced;
  };
  Eigen::VectorXd x1(4), x2(3), x3(2);
  x1 << 0.3, -0.7, -0.3, 0.0;
  x2 << 0.0, 0.0, 0.4;
  x3 << 0.2, 0.5;
  PresymplecticSystem nondeg;
  nondeg.omega = Eigen::MatrixXd{{0.0, 1.0}, {-1.0, 0.0}};
  nondeg.hamiltonian = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm(); };
  nondeg.gradient = [](const Eigen::VectorXd& x) { return x; };
  const std::vector<Case> cases = {
      {"regular_R4", regular_example_system(), x1, {{0, 2, 4}, {1, 0, 2}}, 0, 2},
      {"two_step_R3", two_step_example_system(), x2, {{0, 1, 3}, {1, 1, 2}, {2, 0, 1}}, 1, 0},
      {"nondegenerate_R2", nondeg, x3, {{0, 0, 2}}, 0, 2},
  };
  for (const auto& c : cases) {
    const PcaReport rep = pca_run(c.sys, c.point, 16, opt.tol("rank"));
    double mismatches = rep.chain.size() == c.chain.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min(rep.chain.size(), c.chain.size()); ++i)
      if (rep.chain[i].step != c.chain[i][0] || rep.chain[i].new_constraints != c.chain[i][1] ||
          rep.chain[i].dim != c.chain[i][2])
        mismatches += 1.0;
    mismatches += (rep.gauge_dim != c.gauge) + (rep.reduced_dim != c.reduced) + (!rep.stabilized);
    r.checks.push_back(exact("pca_" + c.name, mismatches));
    r.details[c.name] = {{"chain", chain_json(rep)},
                         {"gauge_dim", rep.gauge_dim},
                         {"reduced_dim", rep.reduced_dim},
                         {"stabilized", rep.stabilized}};
  }
  return r;
}

CriterionResult verify_regularity(const VerifyOptions& opt) {
  CriterionResult r{2, "regularity", {}, Json::object()};
  StreamRng rng(opt.seed, "regularity");
  const double tol = opt.tol("rank");

  GridConfig gc;
  gc.sizes = {4, 4};
  gc.metric = {{1.0, 0.0}, {0.0, 4.0}};
  const LatticeGrid sgrid = LatticeGrid::build(grid_description(gc));
  const PresymplecticSystem ssys = scalar_presymplectic_system(sgrid, PotentialSpec{});
  const RegularityReport sr =
      check_regularity(ssys, rng.normal_vector(ssys.n()), scalar_beta_block(sgrid), tol);
  r.checks.push_back({"scalar_regular", sr.smallest_singular_value, tol, sr.regular});
  r.details["scalar"] = {{"regular", sr.regular}, {"condition_number", sr.condition_number}};

  const LatticeGrid ygrid = flat_grid({3, 3}, {1.0 / 3, 1.0 / 3});
  const LieAlgebra su2 = LieAlgebra::su2();
  const PresymplecticSystem ysys = ym_presymplectic_system(ygrid, su2);
  const RegularityReport yr = check_regularity(ysys, rng.normal_vector(ysys.n()), ym_beta_block(ygrid, su2), tol);
  r.checks.push_back({"yangmills_regular", yr.smallest_singular_value, tol, yr.regular});
  r.details["yangmills"] = {{"regular", yr.regular}, {"condition_number", yr.condition_number}};

  const LatticeGrid pgrid = flat_grid({8}, {1.0 / 8});
  const PoissonStructure lp = PoissonStructure::lie_poisson_su2();
  const PresymplecticSystem psys = psm_presymplectic_system(pgrid, lp);
  const RegularityReport pr = check_regularity(psys, rng.normal_vector(psys.n()), psm_beta_block(pgrid, lp), tol);
  r.checks.push_back({"psigma_singular", pr.smallest_singular_value, tol, !pr.regular});
  r.details["psigma"] = {{"regular", pr.regular}, {"smallest_singular_value", pr.smallest_singular_value}};
  return r;
}

CriterionResult verify_scalar_convergence(const VerifyOptions& opt) {
  CriterionResult r{3, "scalar_convergence", {}, Json::object()};
  const int n = 32;
  const double h = 1.0 / n;
  const LatticeGrid grid = flat_grid({n}, {h});
  const double k = kTwoPi;
  const double omega = std::abs(std::sin(k * h)) / h;
  const ScalarLatticeField phi0 = sample(grid, [&](std::span<const double> x) { return std::cos(k * x[0]); });
  std::vector<double> errors;
  for (double dt : {0.02, 0.01, 0.005}) {
    const int steps = static_cast<int>(std::lround(1.0 / dt));
    ScalarBoundaryState st = on_constraint(phi0, zero_scalar(grid), grid);
    for (int i = 0; i < steps; ++i) st = boundary_step(st, grid, PotentialSpec{}, dt);
    const Eigen::VectorXd exact_phi = std::cos(omega * st.time) * phi0.values;
    const Eigen::VectorXd exact_p = omega * std::sin(omega * st.time) * phi0.values;
    errors.push_back(std::max((st.phi.values - exact_phi).cwiseAbs().maxCoeff(),
                              (st.p.values - exact_p).cwiseAbs().maxCoeff() / omega));
  }
  std::vector<double> ratios{errors[0] / errors[1], errors[1] / errors[2]};
  double dev = 0.0;
  for (double q : ratios) dev = std::max(dev, std::abs(q - 4.0));
  r.checks.push_back(at_most("scalar_error_ratio", dev, opt.tol("scalar_ratio_band")));
  r.details = {{"dt", {0.02, 0.01, 0.005}}, {"errors", vec_json(errors)}, {"ratios", vec_json(ratios)}};
  return r;
}

CriterionResult verify_energy(const VerifyOptions& opt) {
  CriterionResult r{4, "energy_conservation", {}, Json::object()};
  const std::vector<double> dts{0.02, 0.01, 0.005};
  const double floor = opt.tol("roundoff_floor");

  {
    StreamRng rng(opt.seed, "energy.scalar");
    const LatticeGrid grid = flat_grid({32}, {1.0 / 32});
    const ScalarLatticeField phi{random_smooth_field(grid, rng)};
    const ScalarLatticeField p{random_smooth_field(grid, rng)};
    std::vector<double> drift;
    for (double dt : dts) {
      ScalarBoundaryState st = on_constraint(phi, p, grid);
      const double h0 = boundary_hamiltonian(st, grid, PotentialSpec{});
      double worst = 0.0;
      for (int i = 0; i < static_cast<int>(std::lround(1.0 / dt)); ++i) {
        st = boundary_step(st, grid, PotentialSpec{}, dt);
        worst = std::max(worst, std::abs(boundary_hamiltonian(st, grid, PotentialSpec{}) - h0) / std::abs(h0));
      }
      drift.push_back(worst);
    }
    r.checks.push_back(convergence_record("scalar_energy_order", drift, opt.tol("energy_order"), floor));
    r.details["scalar"] = {{"dt", dts}, {"relative_drift", drift}, {"orders", observed_orders(drift)}};
  }
  {
    StreamRng rng(opt.seed, "energy.yangmills");
    const LatticeGrid grid = flat_grid({8, 8}, {1.0 / 8, 1.0 / 8});
    const LieAlgebra su2 = LieAlgebra::su2();
    const GaugeBoundaryState init = smooth_gauge_state(grid, su2, rng, 0.5, 0.5);
    std::vector<double> drift;
    for (double dt : dts) {
      GaugeBoundaryState st = init;
      const double h0 = reduced_hamiltonian(st, grid, su2);
      double worst = 0.0;
      for (int i = 0; i < static_cast<int>(std::lround(1.0 / dt)); ++i) {
        st = ym_step(st, grid, su2, dt);
        worst = std::max(worst, std::abs(reduced_hamiltonian(st, grid, su2) - h0) / std::abs(h0));
      }
      drift.push_back(worst);
    }
    r.checks.push_back(convergence_record("yangmills_energy_order", drift, opt.tol("energy_order"), floor));
    r.details["yangmills"] = {{"dt", dts}, {"relative_drift", drift}, {"orders", observed_orders(drift)}};
  }
  return r;
}

CriterionResult verify_symplecticity(const VerifyOptions& opt) {
  CriterionResult r{5, "symplecticity", {}, Json::object()};
  const double theta = 1e-3;
  {
    StreamRng rng(opt.seed, "symplecticity.scalar");
    const LatticeGrid grid = flat_grid({32}, {1.0 / 32});
    const double dt = 1e-3;
    const int steps = 250;
    CollarFlow flow = [&](const PhasePoint& z) {
      ScalarBoundaryState st = on_constraint({z.first.row(0).transpose()}, {z.second.row(0).transpose()}, grid);
      for (int i = 0; i < steps; ++i) st = boundary_step(st, grid, PotentialSpec{}, dt);
      return PhasePoint{st.phi.values.transpose(), st.p.values.transpose()};
    };
    const PhasePoint base{random_smooth_field(grid, rng).transpose(), random_smooth_field(grid, rng).transpose()};
    std::vector<std::pair<BoundaryTangent, BoundaryTangent>> pairs;
    for (int i = 0; i < 5; ++i) {
      BoundaryTangent u1 = scalar_tangent(rng.normal_vector(32), rng.normal_vector(32));
      BoundaryTangent u2 = scalar_tangent(rng.normal_vector(32), rng.normal_vector(32));
      pairs.emplace_back(u1, u2);
    }
    const SymplecticityReport rep = symplecticity_certificate(flow, base, pairs, BoundaryPairing::scalar(grid),
                                                              theta, opt.tol("symplecticity"), "scalar_symplecticity");
    r.checks.push_back(rep.record);
    r.details["scalar"] = {{"pairs", rep.pair_values}, {"dt", dt}, {"steps", steps}};
  }
  {
    StreamRng rng(opt.seed, "symplecticity.yangmills");
    const LatticeGrid grid = flat_grid({16, 16}, {1.0 / 16, 1.0 / 16});
    const LieAlgebra u1 = LieAlgebra::u1();
    const double dt = 0.01;
    const int steps = 25;
    CollarFlow flow = [&](const PhasePoint& z) {
      GaugeBoundaryState st = zero_gauge_state(grid, u1);
      st.a = z.first;
      st.p = z.second;
      for (int i = 0; i < steps; ++i) st = ym_step(st, grid, u1, dt);
      return PhasePoint{st.a, st.p};
    };
    const GaugeBoundaryState init = smooth_gauge_state(grid, u1, rng, 1.0, 1.0);
    std::vector<std::pair<BoundaryTangent, BoundaryTangent>> pairs;
    for (int i = 0; i < 5; ++i) {
      BoundaryTangent t1{rng.normal_matrix(2, 256), rng.normal_matrix(2, 256), 1};
      BoundaryTangent t2{rng.normal_matrix(2, 256), rng.normal_matrix(2, 256), 1};
      pairs.emplace_back(t1, t2);
    }
    const SymplecticityReport rep =
        symplecticity_certificate(flow, {init.a, init.p}, pairs, BoundaryPairing::gauge(grid, u1), theta,
                                  opt.tol("symplecticity"), "yangmills_u1_symplecticity");
    r.checks.push_back(rep.record);
    r.details["yangmills_u1"] = {{"pairs", rep.pair_values}, {"dt", dt}, {"steps", steps}};
  }
  return r;
}

CriterionResult verify_noether(const VerifyOptions& opt) {
  CriterionResult r{6, "noether_identities", {}, Json::object()};
  StreamRng rng(opt.seed, "noether");
  const LatticeGrid grid = flat_grid({4, 4}, {0.25, 0.25});
  const LieAlgebra su2 = LieAlgebra::su2();
  const BoundaryPairing pairing = BoundaryPairing::gauge(grid, su2);
  const double tol = opt.tol("noether");

  double adjoint = 0.0, charge = 0.0, alpha = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    GaugeBoundaryState st = random_gauge_state(grid, su2, rng);
    const Eigen::MatrixXd xi = rng.normal_matrix(3, 16);
    const Eigen::MatrixXd dxi = covariant_d(xi, st.a, grid, su2);
    const Eigen::MatrixXd divp = covariant_div(st.p, st.a, grid, su2);
    const double lhs = inner_algebra(st.p, dxi, grid, su2) + inner_algebra(divp, xi, grid, su2);
    const double scale = weighted_norm(st.p, grid) * weighted_norm(dxi, grid) +
                         weighted_norm(divp, grid) * weighted_norm(xi, grid);
    adjoint = std::max(adjoint, std::abs(lhs) / scale);

    const double q_generic = noether_charge(st, xi, grid, su2);
    const double a_generic = canonical_alpha(st.p, gauge_generator(st, xi, grid, su2), pairing);
    alpha = std::max(alpha, std::abs(q_generic - a_generic) / std::max(std::abs(q_generic), 1e-300));

    st.p = project_gauss(st.p, st.a, grid, su2);
    const double q = noether_charge(st, xi, grid, su2);
    charge = std::max(charge, std::abs(q) / (weighted_norm(st.p, grid) * weighted_norm(dxi, grid)));
  }
  r.checks.push_back(at_most("adjoint_identity", adjoint, tol));
  r.checks.push_back(at_most("charge_on_gauss_constraint", charge, tol));
  r.checks.push_back(at_most("alpha_equals_charge", alpha, tol));
  r.details = {{"trials", 20}, {"adjoint_relative", adjoint}, {"charge_relative", charge}, {"alpha_relative", alpha}};
  return r;
}

CriterionResult verify_gauss(const VerifyOptions& opt) {
  CriterionResult r{7, "gauss_preservation", {}, Json::object()};
  const LatticeGrid grid = flat_grid({8, 8}, {1.0 / 8, 1.0 / 8});
  const std::vector<double> dts{0.02, 0.01, 0.005};
  for (const std::string name : {"su2", "u1"}) {
    const LieAlgebra g = LieAlgebra::from_name(name);
    StreamRng rng(opt.seed, "gauss." + name);
    GaugeBoundaryState init = smooth_gauge_state(grid, g, rng, 0.5, 0.5);
    init.p = project_gauss(init.p, init.a, grid, g);
    const double initial = gauss_residual(init, grid, g).norm;
    std::vector<double> finals;
    for (double dt : dts) {
      GaugeBoundaryState st = init;
      for (int i = 0; i < static_cast<int>(std::lround(1.0 / dt)); ++i) st = ym_step(st, grid, g, dt);
      finals.push_back(gauss_residual(st, grid, g).norm);
    }
    if (name == "su2") {
      r.checks.push_back(convergence_record("su2_gauss_order", finals, opt.tol("gauss_order"),
                                            opt.tol("roundoff_floor")));
    } else {
      r.checks.push_back(at_most("u1_gauss_residual", *std::max_element(finals.begin(), finals.end()),
                                 opt.tol("gauss_u1")));
    }
    r.details[name] = {{"dt", dts}, {"initial_residual", initial}, {"final_residual", finals},
                       {"orders", observed_orders(finals)}};
  }
  return r;
}

CriterionResult verify_coisotropy(const VerifyOptions& opt) {
  CriterionResult r{8, "coisotropy", {}, Json::object()};
  StreamRng rng(opt.seed, "coisotropy");
  const PoissonStructure constant = PoissonStructure::constant(Eigen::MatrixXd{{0.0, 1.0}, {-1.0, 0.0}});
  const PoissonStructure lp = PoissonStructure::lie_poisson_su2();

  // i_X omega = dPsi at random points.
  double identity = 0.0;
  {
    const LatticeGrid grid = flat_grid({16}, {1.0 / 16});
    for (const PoissonStructure* ps : {&constant, &lp}) {
      const int rdim = ps->target_dim();
      for (int trial = 0; trial < 4; ++trial) {
        const Eigen::MatrixXd phi = rng.normal_matrix(rdim, 16), p = rng.normal_matrix(rdim, 16);
        const PsmTangent v{rng.normal_matrix(rdim, 16), rng.normal_matrix(rdim, 16)};
        const auto site = static_cast<std::size_t>(trial * 5 % 16);
        for (int a = 0; a < rdim; ++a) {
          const PsmTangent x = hamiltonian_vector_field_Xa(phi, p, site, a, grid, *ps);
          const double lhs = psm_omega(x, v, grid);
          const double rhs = constraint_psi_linearized(phi, p, v.dphi, v.dp, grid, *ps)(a, static_cast<Eigen::Index>(site));
          const double scale = std::sqrt(std::pow(weighted_norm(x.dphi, grid), 2) + std::pow(weighted_norm(x.dp, grid), 2)) *
                               std::sqrt(std::pow(weighted_norm(v.dphi, grid), 2) + std::pow(weighted_norm(v.dp, grid), 2));
          identity = std::max(identity, std::abs(lhs - rhs) / scale);
        }
      }
    }
  }
  r.checks.push_back(at_most("vector_field_identity", identity, opt.tol("coisotropy_identity")));
  r.details["identity_relative"] = identity;

  std::vector<double> res_const, res_su2;
  const std::vector<int> sizes{16, 32, 64};
  for (int n : sizes) {
    const LatticeGrid grid = flat_grid({n}, {1.0 / n});
    Eigen::MatrixXd phi(2, n);
    for (std::size_t s = 0; s < grid.site_count(); ++s) {
      const double x = kTwoPi * grid.position(s, 0);
      phi.col(static_cast<Eigen::Index>(s)) << std::cos(x) + 0.3 * std::sin(2.0 * x), std::sin(x);
    }
    const PsmBoundaryState cs = constant_poisson_state(grid, constant, phi);
    res_const.push_back(coisotropy_residual(cs.phi, cs.p, grid, constant));
    const PsmBoundaryState ls = su2_circle_state(grid, 1.0, 0.3, 0.5);
    res_su2.push_back(coisotropy_residual(ls.phi, ls.p, grid, lp));
  }
  const double floor = opt.tol("roundoff_floor");
  r.checks.push_back(convergence_record("constant_coisotropy_order", res_const, opt.tol("coisotropy_order"), floor));
  r.checks.push_back(convergence_record("su2_coisotropy_order", res_su2, opt.tol("coisotropy_order"), floor));
  r.details["sizes"] = sizes;
  r.details["constant_residual"] = res_const;
  r.details["su2_residual"] = res_su2;
  r.details["su2_orders"] = observed_orders(res_su2);
  return r;
}

CriterionResult verify_generating_functional(const VerifyOptions& opt) {
  CriterionResult r{9, "generating_functional", {}, Json::object()};
  StreamRng rng(opt.seed, "generating_functional");
  const LatticeGrid grid = flat_grid({16}, {1.0 / 16});
  const ScalarLatticeField bottom{random_smooth_field(grid, rng)};
  const ScalarLatticeField top{random_smooth_field(grid, rng)};
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> probes;
  for (int i = 0; i < 10; ++i) probes.emplace_back(rng.normal_vector(16), rng.normal_vector(16));
  const GeneratingFunctionalReport rep = generating_functional_check(
      bottom, top, grid, PotentialSpec{}, 1.0, 16, probes, 1e-3, opt.tol("generating_functional"), opt.tol("dn_symmetry"));
  r.checks.push_back(rep.symmetry_record);
  r.checks.push_back(rep.probe_record);
  r.details = {{"action", rep.action}, {"probe_errors", rep.probe_errors}, {"dn_symmetry", rep.dn_symmetry}};
  return r;
}

CriterionResult verify_census(const VerifyOptions& opt) {
  CriterionResult r{10, "reduction_census", {}, Json::object()};
  const LieAlgebra u1 = LieAlgebra::u1();
  for (int n : {4, 6}) {
    StreamRng rng(opt.seed, "census.u1." + std::to_string(n));
    const LatticeGrid grid = flat_grid({n, n}, {1.0 / n, 1.0 / n});
    const CensusReport c = reduction_census(random_gauge_state(grid, u1, rng), grid, u1, true);
    const int expected = 2 * 2 * n * n - 2 * (n * n - 1);
    r.checks.push_back(exact("u1_census_N" + std::to_string(n), std::abs(c.reduced_dim - expected)));
    r.details["u1_N" + std::to_string(n)] = {{"expected_reduced_dim", expected},
                                             {"reduced_dim", c.reduced_dim},
                                             {"constraint_rank", c.constraint_rank},
                                             {"orbit_rank", c.orbit_rank},
                                             {"pca_reduced_dim", c.pca_reduced_dim},
                                             {"pca_gauge_dim", c.pca_gauge_dim},
                                             {"pca_steps", c.pca_steps}};
  }
  {
    StreamRng rng(opt.seed, "census.su2");
    const LieAlgebra su2 = LieAlgebra::su2();
    const LatticeGrid grid = flat_grid({4, 4}, {0.25, 0.25});
    const CensusReport c = reduction_census(random_gauge_state(grid, su2, rng), grid, su2, false);
    const int s = 16;
    const double mismatches = (c.constraint_rank != 3 * s) + (c.orbit_rank != 3 * s) + (c.reduced_dim != 6 * s);
    r.checks.push_back(exact("su2_generic_ranks", mismatches));
    r.details["su2_N4"] = {{"constraint_rank", c.constraint_rank},
                           {"orbit_rank", c.orbit_rank},
                           {"reduced_dim", c.reduced_dim},
                           {"constraint_margin", c.constraint_margin},
                           {"orbit_margin", c.orbit_margin}};
  }
  return r;
}

const std::vector<CriterionSpec>& criteria() {
  static const std::vector<CriterionSpec> list = {
      {1, "pca_exactness", verify_pca_exactness},
      {2, "regularity", verify_regularity},
      {3, "scalar_convergence", verify_scalar_convergence},
      {4, "energy_conservation", verify_energy},
      {5, "symplecticity", verify_symplecticity},
      {6, "noether_identities", verify_noether},
      {7, "gauss_preservation", verify_gauss},
      {8, "coisotropy", verify_coisotropy},
      {9, "generating_functional", verify_generating_functional},
      {10, "reduction_census", verify_census},
  };
  return list;
}

Json criteria_to_json(const std::vector<CriterionResult>& results) {
  Json out = Json::array();
  for (const auto& c : results) {
    Json checks = Json::array();
    for (const auto& rec : c.checks) checks.push_back(record_to_json(rec));
    out.push_back({{"id", c.id}, {"key", c.key}, {"pass", c.pass()}, {"checks", checks}, {"details", c.details}});
  }
  return out;
}

std::vector<CriterionResult> run_verify_suite(const VerifyOptions& opt) {
  auto once = [&]() {
    std::vector<CriterionResult> out;
    for (const auto& c : criteria())
      if (opt.filter.empty() || c.key.find(opt.filter) != std::string::npos) out.push_back(c.run(opt));
    return out;
  };
  std::vector<CriterionResult> first = once();
  const std::string a = criteria_to_json(first).dump();
  const std::string b = criteria_to_json(once()).dump();
  CriterionResult det{11, "determinism", {}, Json::object()};
  det.checks.push_back(exact("identical_results", a == b ? 0.0 : 1.0));
  det.details = {{"bytes", a.size()}};
  first.push_back(det);
  return first;
}

}  // namespace collar
