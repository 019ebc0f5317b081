#include "collar/presym.hpp"
#include "collar/psigma.hpp"
#include "collar/rng.hpp"
#include "collar/scalar.hpp"
#include "collar/verify.hpp"
#include "collar/yangmills.hpp"

#include <doctest.h>

using namespace collar;

namespace {

Eigen::MatrixXd standard_j(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return j;
}

// Omega = dq ^ dp on (q, p, b) with H = 1/2 p^2 + c/2 b^2 + q b.
PresymplecticSystem r3_system(double c) {
  PresymplecticSystem sys;
  sys.omega = Eigen::MatrixXd::Zero(3, 3);
  sys.omega(0, 1) = 1.0;
  sys.omega(1, 0) = -1.0;
  sys.hamiltonian = [c](const Eigen::VectorXd& x) { return 0.5 * x[1] * x[1] + 0.5 * c * x[2] * x[2] + x[0] * x[2]; };
  sys.gradient = [c](const Eigen::VectorXd& x) { return Eigen::Vector3d(x[2], x[1], c * x[2] + x[0]).eval(); };
  return sys;
}

}  // namespace

TEST_SUITE("presym") {

TEST_CASE("kernel of the zero 2x2 form is everything") {
  CHECK(kernel_basis(Eigen::MatrixXd::Zero(2, 2)).cols() == 2);
}

TEST_CASE("standard symplectic form has no kernel") {
  CHECK(kernel_basis(standard_j(3)).cols() == 0);
}

TEST_CASE("J plus zero block has the trailing coordinates as kernel") {
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(7, 7);
  om.topLeftCorner(4, 4) = standard_j(2);
  const Eigen::MatrixXd z = kernel_basis(om);
  REQUIRE(z.cols() == 3);
  // Projector onto span(Z) equals the projector onto e_4..e_6.
  Eigen::MatrixXd expect = Eigen::MatrixXd::Zero(7, 7);
  expect.bottomRightCorner(3, 3) = Eigen::MatrixXd::Identity(3, 3);
  CHECK((z * z.transpose() - expect).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK((z.transpose() * z - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("kernel of a rotated degenerate form") {
  StreamRng rng(5, "presym.rotated");
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(6, 6);
  om.topLeftCorner(4, 4) = standard_j(2);
  const Eigen::MatrixXd q = rng.normal_matrix(6, 6).householderQr().householderQ();
  const Eigen::MatrixXd rotated = q * om * q.transpose();
  const Eigen::MatrixXd z = kernel_basis(rotated);
  REQUIRE(z.cols() == 2);
  CHECK((rotated * z).cwiseAbs().maxCoeff() <= 1e-13);
  CHECK(numerical_rank(rotated) == 4);
}

TEST_CASE("non-skew forms are rejected") {
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(kernel_basis(m), std::invalid_argument);
}

TEST_CASE("primary constraints of the R3 examples") {
  const Eigen::Vector3d x(0.4, -1.1, 0.7);
  const Eigen::VectorXd r1 = primary_constraints(r3_system(1.0), x);
  REQUIRE(r1.size() == 1);
  CHECK(std::abs(r1[0]) == doctest::Approx(0.7 + 0.4));
  const Eigen::VectorXd r0 = primary_constraints(r3_system(0.0), x);
  REQUIRE(r0.size() == 1);
  CHECK(std::abs(r0[0]) == doctest::Approx(0.4));
}

TEST_CASE("nondegenerate form has no primary constraints and stabilizes at once") {
  PresymplecticSystem sys;
  sys.omega = standard_j(2);
  sys.hamiltonian = [](const Eigen::VectorXd& x) { return 0.5 * x.squaredNorm() + x[0] * x[3]; };
  sys.gradient = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g = x;
    g[0] += x[3];
    g[3] += x[0];
    return g;
  };
  const Eigen::Vector4d x(0.1, 0.2, 0.3, 0.4);
  CHECK(primary_constraints(sys, x).size() == 0);
  const PcaReport rep = pca_run(sys, x);
  REQUIRE(rep.chain.size() == 1);
  CHECK(rep.chain[0].dim == 4);
  CHECK(rep.stabilized);
  CHECK(rep.reduced_dim == 4);
  CHECK(rep.gauge_dim == 0);

  // Gamma = Omega^-T grad H.
  const DynamicsSolution sol = solve_dynamics(sys, x);
  const Eigen::VectorXd expect = sys.omega.transpose().inverse() * sys.gradient(x);
  CHECK((sol.velocity - expect).cwiseAbs().maxCoeff() <= 1e-14);
  CHECK(sol.consistency_residual <= 1e-14);
}

TEST_CASE("regular R4 chain") {
  const Eigen::Vector4d x(0.3, -0.7, -0.3, 0.0);
  const PcaReport rep = pca_run(regular_example_system(), x);
  REQUIRE(rep.chain.size() == 2);
  // Record k: constraints found on M_k, and dim M_k.
  CHECK(rep.chain[0].dim == 4);
  CHECK(rep.chain[0].new_constraints == 2);
  CHECK(rep.chain[1].new_constraints == 0);
  CHECK(rep.chain[1].dim == 2);
  CHECK(rep.stabilized);
  CHECK(rep.gauge_dim == 0);
  CHECK(rep.reduced_dim == 2);
}

TEST_CASE("two-step R3 chain") {
  const PcaReport rep = pca_run(two_step_example_system(), Eigen::Vector3d(0.0, 0.0, 0.4));
  REQUIRE(rep.chain.size() == 3);
  CHECK(rep.chain[0].new_constraints == 1);
  CHECK(rep.chain[0].dim == 3);
  CHECK(rep.chain[1].new_constraints == 1);
  CHECK(rep.chain[1].dim == 2);
  CHECK(rep.chain[2].new_constraints == 0);
  CHECK(rep.chain[2].dim == 1);
  CHECK(rep.gauge_dim == 1);
  CHECK(rep.reduced_dim == 0);
  CHECK(rep.stabilized);
}

TEST_CASE("pca respects max_steps") {
  const PcaReport rep = pca_run(two_step_example_system(), Eigen::Vector3d(0.0, 0.0, 0.4), 1);
  CHECK_FALSE(rep.stabilized);
}

TEST_CASE("consistency residual off and on the primary constraint") {
  const PresymplecticSystem sys = r3_system(1.0);
  CHECK(solve_dynamics(sys, Eigen::Vector3d(0.4, 0.2, 0.7)).consistency_residual > 0.1);
  const DynamicsSolution on = solve_dynamics(sys, Eigen::Vector3d(0.4, 0.2, -0.4));
  CHECK(on.consistency_residual <= 1e-10);
  // Hamilton's equations for Omega = dq ^ dp: Omega^T Gamma = grad H.
  CHECK((sys.omega.transpose() * on.velocity - sys.gradient(Eigen::Vector3d(0.4, 0.2, -0.4))).norm() <= 1e-12);
}

TEST_CASE("regularity of the discretized theories") {
  StreamRng rng(11, "presym.regularity");
  GridDescription d;
  d.sizes = {4, 4};
  d.spacing = {0.25, 0.25};
  d.metric = {Eigen::Vector2d(1.0, 4.0).asDiagonal()};
  const LatticeGrid sg = LatticeGrid::build(d);
  const PresymplecticSystem ss = scalar_presymplectic_system(sg, PotentialSpec{});
  const RegularityReport sr = check_regularity(ss, rng.normal_vector(ss.n()), scalar_beta_block(sg));
  CHECK(sr.regular);
  CHECK(sr.condition_number == doctest::Approx(4.0));

  const LatticeGrid yg = flat_grid({3, 3}, {1.0 / 3, 1.0 / 3});
  const LieAlgebra su2 = LieAlgebra::su2();
  const PresymplecticSystem ys = ym_presymplectic_system(yg, su2);
  const RegularityReport yr = check_regularity(ys, rng.normal_vector(ys.n()), ym_beta_block(yg, su2));
  CHECK(yr.regular);
  CHECK(yr.condition_number == doctest::Approx(1.0));

  const LatticeGrid pg = flat_grid({6}, {1.0 / 6});
  const PoissonStructure lp = PoissonStructure::lie_poisson_su2();
  const PresymplecticSystem ps = psm_presymplectic_system(pg, lp);
  const RegularityReport pr = check_regularity(ps, rng.normal_vector(ps.n()), psm_beta_block(pg, lp));
  CHECK_FALSE(pr.regular);
  CHECK(pr.smallest_singular_value == 0.0);
}

TEST_CASE("gradient oracles agree with finite differences") {
  StreamRng rng(13, "presym.gradients");
  const LatticeGrid g = flat_grid({5}, {0.2});
  PotentialSpec quartic;
  quartic.kind = PotentialSpec::Kind::quartic;
  quartic.mass2 = 0.5;
  quartic.quartic = 0.2;
  const PresymplecticSystem sys = scalar_presymplectic_system(g, quartic);
  std::vector<Eigen::VectorXd> dirs;
  for (int i = 0; i < 4; ++i) dirs.push_back(rng.normal_vector(sys.n()));
  CHECK(gradient_self_test(sys, rng.normal_vector(sys.n()), dirs) <= 1e-6);

  const LatticeGrid yg = flat_grid({3, 3}, {1.0 / 3, 1.0 / 3});
  const PresymplecticSystem ys = ym_presymplectic_system(yg, LieAlgebra::su2());
  dirs.clear();
  for (int i = 0; i < 4; ++i) dirs.push_back(rng.normal_vector(ys.n()));
  CHECK(gradient_self_test(ys, rng.normal_vector(ys.n()), dirs) <= 1e-6);
}

TEST_CASE("system validation") {
  PresymplecticSystem sys = r3_system(1.0);
  CHECK_NOTHROW(sys.validate());
  sys.omega(0, 1) = 2.0;
  CHECK_THROWS_AS(sys.validate(), std::invalid_argument);
}

}
