#include "collar/rng.hpp"
#include "collar/scalar.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace collar;
using collar::test::kTwoPi;
using collar::test::max_abs;

namespace {

LatticeGrid shifted_grid() {
  GridDescription d;
  d.sizes = {6, 5};
  d.spacing = {1.0 / 6, 0.2};
  d.metric = {Eigen::Vector2d(1.0, 4.0).asDiagonal()};
  d.shift = {Eigen::Vector2d(0.1, 0.0)};
  return LatticeGrid::build(d);
}

ScalarLatticeField mode(const LatticeGrid& g, double k) {
  return sample(g, [k](std::span<const double> x) { return std::cos(k * x[0]); });
}

}  // namespace

TEST_SUITE("scalar") {

TEST_CASE("zero state has zero energy") {
  const LatticeGrid g = flat_grid({8}, {0.5});
  ScalarBoundaryState st{zero_scalar(g), zero_scalar(g), zero_vector(g), 0.0};
  CHECK(boundary_hamiltonian(st, g, PotentialSpec{}) == 0.0);
}

TEST_CASE("unit momentum gives minus half its norm") {
  const LatticeGrid g = flat_grid({8}, {0.5});
  ScalarBoundaryState st{zero_scalar(g), {Eigen::VectorXd::Ones(8)}, zero_vector(g), 0.0};
  CHECK(boundary_hamiltonian(st, g, PotentialSpec{}) == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("potential derivatives are consistent") {
  PotentialSpec v;
  v.kind = PotentialSpec::Kind::quartic;
  v.mass2 = 0.7;
  v.quartic = 0.3;
  for (double u : {-1.3, 0.0, 0.4, 2.0}) {
    const double e = 1e-5;
    CHECK(v.derivative(u) == doctest::Approx((v.value(u + e) - v.value(u - e)) / (2 * e)).epsilon(1e-8));
    CHECK(v.second_derivative(u) ==
          doctest::Approx((v.derivative(u + e) - v.derivative(u - e)) / (2 * e)).epsilon(1e-8));
  }
  v.mass2 = -1.0;
  CHECK_THROWS_AS(v.validate(), ConfigError);
}

TEST_CASE("solve_beta on flat grids is the gradient") {
  StreamRng rng(2, "scalar.beta_flat");
  const LatticeGrid g = flat_grid({6, 4}, {0.25, 0.5});
  const ScalarLatticeField phi{rng.normal_vector(24)}, p{rng.normal_vector(24)};
  CHECK(max_abs(solve_beta(phi, p, g).values - grad(phi, g).values) == 0.0);
  const ScalarLatticeField c{Eigen::VectorXd::Constant(24, 2.0)};
  CHECK(max_abs(solve_beta(c, zero_scalar(g), g).values) == 0.0);
}

TEST_CASE("solve_beta is stationary in beta with metric and shift") {
  StreamRng rng(3, "scalar.beta_shift");
  const LatticeGrid g = shifted_grid();
  const auto n = static_cast<Eigen::Index>(g.site_count());
  const ScalarBoundaryState st = on_constraint({rng.normal_vector(n)}, {rng.normal_vector(n)}, g);
  // H is quadratic in beta, so the symmetric difference is exact for any step.
  const double e = 1.0;
  double worst = 0.0;
  for (Eigen::Index s = 0; s < n; ++s)
    for (int k = 0; k < 2; ++k) {
      ScalarBoundaryState a = st, b = st;
      a.beta.values(k, s) += e;
      b.beta.values(k, s) -= e;
      const double fd = (boundary_hamiltonian(a, g, PotentialSpec{}) - boundary_hamiltonian(b, g, PotentialSpec{})) /
                        (2 * e * g.weight(static_cast<std::size_t>(s)));
      worst = std::max(worst, std::abs(fd));
    }
  CHECK(worst <= 1e-8);
  CHECK(beta_constraint_residual(st, g) <= 1e-12);
}

TEST_CASE("pointwise gradient matches finite differences") {
  StreamRng rng(4, "scalar.gradient");
  const LatticeGrid g = shifted_grid();
  const auto n = static_cast<Eigen::Index>(g.site_count());
  PotentialSpec v;
  v.kind = PotentialSpec::Kind::quartic;
  v.mass2 = 0.5;
  v.quartic = 0.1;
  ScalarBoundaryState st{{rng.normal_vector(n)}, {rng.normal_vector(n)}, {rng.normal_matrix(2, n)}, 0.0};
  const ScalarHamiltonianGradient gr = boundary_hamiltonian_gradient(st, g, v);
  const double e = 1e-5;
  for (Eigen::Index s : {Eigen::Index{0}, Eigen::Index{7}, n - 1}) {
    const double w = g.weight(static_cast<std::size_t>(s));
    auto fd = [&](auto&& poke) {
      ScalarBoundaryState a = st, b = st;
      poke(a, e);
      poke(b, -e);
      return (boundary_hamiltonian(a, g, v) - boundary_hamiltonian(b, g, v)) / (2 * e * w);
    };
    CHECK(gr.dphi[s] == doctest::Approx(fd([&](ScalarBoundaryState& x, double t) { x.phi.values[s] += t; })).epsilon(1e-6));
    CHECK(gr.dp[s] == doctest::Approx(fd([&](ScalarBoundaryState& x, double t) { x.p.values[s] += t; })).epsilon(1e-6));
    CHECK(gr.dbeta(1, s) ==
          doctest::Approx(fd([&](ScalarBoundaryState& x, double t) { x.beta.values(1, s) += t; })).epsilon(1e-6));
  }
}

TEST_CASE("constant field at rest is a fixed point") {
  const LatticeGrid g = flat_grid({16}, {1.0 / 16});
  ScalarBoundaryState st = on_constraint({Eigen::VectorXd::Constant(16, 1.5)}, zero_scalar(g), g);
  for (int i = 0; i < 10; ++i) st = boundary_step(st, g, PotentialSpec{}, 0.01);
  CHECK(max_abs(st.phi.values.array() - 1.5) == 0.0);
  CHECK(max_abs(st.p.values) == 0.0);
  CHECK(st.time == doctest::Approx(0.1));
}

TEST_CASE("standing wave follows the discrete dispersion relation") {
  const int n = 32;
  const double h = 1.0 / n;
  const LatticeGrid g = flat_grid({n}, {h});
  const double k = kTwoPi * 2;
  const double w = std::sin(k * h) / h;  // symbol of the central-difference Laplacian
  const ScalarLatticeField phi0 = mode(g, k);
  std::vector<double> err;
  for (double dt : {0.01, 0.005}) {
    ScalarBoundaryState st = on_constraint(phi0, zero_scalar(g), g);
    for (int i = 0; i < std::lround(1.0 / dt); ++i) st = boundary_step(st, g, PotentialSpec{}, dt);
    err.push_back(max_abs(st.phi.values - std::cos(w * st.time) * phi0.values));
  }
  CHECK(err[0] < 0.05);
  CHECK(err[0] / err[1] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("shifted grids use the implicit midpoint rule and conserve energy") {
  StreamRng rng(6, "scalar.shift_energy");
  const LatticeGrid g = shifted_grid();
  const auto n = static_cast<Eigen::Index>(g.site_count());
  ScalarBoundaryState st = on_constraint({0.1 * rng.normal_vector(n)}, {0.1 * rng.normal_vector(n)}, g);
  const double h0 = boundary_hamiltonian(st, g, PotentialSpec{});
  std::vector<std::string> warnings;
  for (int i = 0; i < 20; ++i) st = boundary_step(st, g, PotentialSpec{}, 0.01, &warnings);
  CHECK(warnings.empty());
  // Quadratic invariants are preserved exactly by the midpoint rule.
  CHECK(boundary_hamiltonian(st, g, PotentialSpec{}) == doctest::Approx(h0).epsilon(1e-11));
}

TEST_CASE("CFL warning") {
  const LatticeGrid g = flat_grid({8}, {0.125});
  std::vector<std::string> warnings;
  const ScalarBoundaryState st = on_constraint(zero_scalar(g), zero_scalar(g), g);
  boundary_step(st, g, PotentialSpec{}, 0.2, &warnings);
  CHECK(warnings.size() == 1);
  CHECK(scalar_cfl_exceeded(g, 0.2));
  CHECK_FALSE(scalar_cfl_exceeded(g, 0.1));
  CHECK_THROWS_AS(boundary_step(st, g, PotentialSpec{}, 0.0), std::invalid_argument);
}

TEST_CASE("stiffness is symmetric and annihilates constants") {
  const LatticeGrid g = shifted_grid();
  const Eigen::MatrixXd k = Eigen::MatrixXd(scalar_stiffness(g));
  CHECK(max_abs(k - k.transpose()) <= 1e-12);
  CHECK(max_abs(k * Eigen::VectorXd::Ones(k.cols())) <= 1e-12);
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("Lorentzian bulk restriction equals the boundary step composition") {
  StreamRng rng(8, "scalar.bulk_lorentz");
  const LatticeGrid g = flat_grid({16}, {1.0 / 16});
  PotentialSpec v;
  v.kind = PotentialSpec::Kind::mass;
  v.mass2 = 0.5;
  const ScalarLatticeField phi{rng.normal_vector(16)}, p{rng.normal_vector(16)};
  const int steps = 40;
  const double eps = 0.4;
  const BulkSolution bulk = bulk_solve_lorentzian(phi, p, g, v, eps, steps);
  ScalarBoundaryState st = on_constraint(phi, p, g);
  for (int i = 0; i < steps; ++i) st = boundary_step(st, g, v, eps / steps);
  const auto [top, bottom] = project_to_boundary(bulk);
  CHECK(max_abs(top.phi.values - st.phi.values) <= 1e-12 * max_abs(st.phi.values));
  CHECK(max_abs(top.p.values - st.p.values) <= 1e-11 * max_abs(st.p.values));
  CHECK(max_abs(bottom.p.values - p.values) == 0.0);
  CHECK(top.time == 0.0);
  CHECK(bottom.time == doctest::Approx(-eps));
}

TEST_CASE("Euclidean Dirichlet problem: zero data") {
  const LatticeGrid g = flat_grid({8}, {0.125});
  const BulkSolution b = bulk_solve_euclidean(zero_scalar(g), zero_scalar(g), g, PotentialSpec{}, 1.0, 8);
  for (const auto& f : b.phi) CHECK(max_abs(f) == 0.0);
  const auto [top, bottom] = project_to_boundary(b);
  CHECK(max_abs(top.p.values) == 0.0);
  CHECK(max_abs(bottom.p.values) == 0.0);
}

TEST_CASE("Euclidean Dirichlet problem: discrete sinh profile") {
  const int n = 16, steps = 20;
  const double h = 1.0 / n, eps = 0.5, dt = eps / steps;
  const LatticeGrid g = flat_grid({n}, {h});
  const double k = kTwoPi;
  const ScalarLatticeField top = sample(g, [k](std::span<const double> x) { return std::sin(k * x[0]); });
  const BulkSolution b = bulk_solve_euclidean(zero_scalar(g), top, g, PotentialSpec{}, eps, steps);
  CHECK(euclidean_residual(b, g, PotentialSpec{}) <= 1e-10);
  // Separation of variables: Phi_n = sinh(mu n dt) / sinh(mu eps) sin(kx), cosh(mu dt) = 1 + lambda dt^2 / 2.
  const double lambda = std::pow(std::sin(k * h) / h, 2);
  const double mu = std::acosh(1.0 + 0.5 * lambda * dt * dt) / dt;
  double worst = 0.0;
  for (int lvl = 0; lvl <= steps; ++lvl)
    worst = std::max(worst, max_abs(b.phi[lvl] - std::sinh(mu * lvl * dt) / std::sinh(mu * eps) * top.values));
  CHECK(worst <= 1e-12);
  // Normal derivative at the top end approaches mu coth(mu eps) at second order.
  const auto [t, bot] = project_to_boundary(b);
  const double expect = mu / std::tanh(mu * eps);
  CHECK(max_abs(t.p.values - expect * top.values) <= 0.05 * expect);
  (void)bot;
}

TEST_CASE("nonlinear Euclidean solve is rejected") {
  const LatticeGrid g = flat_grid({8}, {0.125});
  PotentialSpec v;
  v.kind = PotentialSpec::Kind::quartic;
  v.quartic = 1.0;
  CHECK_THROWS_AS(bulk_solve_euclidean(zero_scalar(g), zero_scalar(g), g, v, 1.0, 4), ConfigError);
  CHECK_THROWS_AS(bulk_solve_lorentzian(zero_scalar(g), zero_scalar(g), g, v, 0.0, 4), ConfigError);
}

TEST_CASE("Euclidean action variation equals the end momenta") {
  StreamRng rng(9, "scalar.action");
  const LatticeGrid g = flat_grid({8}, {0.125});
  const ScalarLatticeField bot{rng.normal_vector(8)}, top{rng.normal_vector(8)};
  const Eigen::VectorXd dir = rng.normal_vector(8);
  const double e = 1e-4;
  auto w = [&](double s) {
    return euclidean_action(bulk_solve_euclidean(bot, {top.values + s * dir}, g, PotentialSpec{}, 1.0, 10), g,
                            PotentialSpec{});
  };
  const double fd = (w(e) - w(-e)) / (2 * e);
  const BulkSolution b = bulk_solve_euclidean(bot, top, g, PotentialSpec{}, 1.0, 10);
  const double pairing = project_to_boundary(b).first.p.values.dot(g.weights().cwiseProduct(dir));
  CHECK(fd == doctest::Approx(pairing).epsilon(1e-7));
}

}
