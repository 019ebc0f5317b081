#include "collar/analysis.hpp"
#include "collar/rng.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace collar;
using collar::test::max_abs;

TEST_SUITE("analysis") {

TEST_CASE("boundary pairing weights sites and contracts the fiber") {
  const LatticeGrid g = flat_grid({4}, {0.5});
  const BoundaryPairing p = BoundaryPairing::euclidean(g, 2);
  Eigen::MatrixXd x = Eigen::MatrixXd::Ones(2, 4), y = Eigen::MatrixXd::Constant(2, 4, 3.0);
  CHECK(p(x, y) == doctest::Approx(4 * 0.5 * 2 * 3.0));
  // Block-wise contraction: 4 rows are two fiber blocks.
  CHECK(p(Eigen::MatrixXd::Ones(4, 4), Eigen::MatrixXd::Ones(4, 4)) == doctest::Approx(8.0));
  CHECK_THROWS_AS(p(Eigen::MatrixXd::Ones(3, 4), Eigen::MatrixXd::Ones(3, 4)), std::invalid_argument);
}

TEST_CASE("omega is minus the differential of alpha") {
  const LatticeGrid g = flat_grid({8}, {0.125});
  const BoundaryPairing pair = BoundaryPairing::scalar(g);
  StreamRng rng(1, "analysis.alpha");
  const Eigen::MatrixXd p = rng.normal_matrix(1, 8);
  for (int sign : {1, -1}) {
    const BoundaryTangent u = scalar_tangent(rng.normal_vector(8), rng.normal_vector(8), sign);
    const BoundaryTangent v = scalar_tangent(rng.normal_vector(8), rng.normal_vector(8), sign);
    const double om = omega_boundary(u, v, pair);
    CHECK(om == doctest::Approx(-alpha_differential(p, u, v, pair)).epsilon(1e-13));
    CHECK(om == doctest::Approx(-omega_boundary(v, u, pair)));
    // Hand evaluation with unit weights times h.
    double expect = 0.0;
    for (int s = 0; s < 8; ++s) expect += 0.125 * (u.dphi(0, s) * v.dp(0, s) - v.dphi(0, s) * u.dp(0, s));
    CHECK(om == doctest::Approx(sign * expect).epsilon(1e-13));
  }
  const BoundaryTangent a = scalar_tangent(Eigen::VectorXd::Ones(8), Eigen::VectorXd::Ones(8), 1);
  const BoundaryTangent b = scalar_tangent(Eigen::VectorXd::Ones(8), Eigen::VectorXd::Ones(8), -1);
  CHECK_THROWS_AS(omega_boundary(a, b, pair), std::invalid_argument);
}

TEST_CASE("canonical alpha on gauge generators is the Noether charge") {
  const LatticeGrid g = flat_grid({4, 4}, {0.25, 0.25});
  const LieAlgebra su2 = LieAlgebra::su2();
  StreamRng rng(2, "analysis.generator");
  const GaugeBoundaryState st{rng.normal_matrix(6, 16), rng.normal_matrix(3, 16), rng.normal_matrix(6, 16),
                              rng.normal_matrix(3, 16), 0.0};
  const Eigen::MatrixXd xi = rng.normal_matrix(3, 16);
  const BoundaryTangent gen = gauge_generator(st, xi, g, su2);
  CHECK(max_abs(gen.dphi - covariant_d(xi, st.a, g, su2)) <= 1e-15);
  for (Eigen::Index s = 0; s < 16; ++s)
    CHECK(max_abs(gen.dp.col(s).head(3) - su2.bracket(st.p.col(s).head(3), xi.col(s))) <= 1e-15);
  const double q = noether_charge(st, xi, g, su2);
  CHECK(canonical_alpha(st.p, gen, BoundaryPairing::gauge(g, su2)) == doctest::Approx(q).epsilon(1e-12));
}

TEST_CASE("certificate accepts a symplectic map and rejects a non-symplectic one") {
  const LatticeGrid g = flat_grid({6}, {1.0 / 6});
  const BoundaryPairing pair = BoundaryPairing::scalar(g);
  StreamRng rng(3, "analysis.certificate");
  // Site-wise nonlinear symplectic shear followed by a rotation.
  const CollarFlow good = [](const PhasePoint& z) {
    Eigen::MatrixXd q = z.first, p = z.second + z.first.array().sin().matrix();
    const double c = std::cos(0.3), s = std::sin(0.3);
    return PhasePoint{c * q + s * p, -s * q + c * p};
  };
  const CollarFlow bad = [](const PhasePoint& z) { return PhasePoint{2.0 * z.first, z.second}; };
  const PhasePoint base{rng.normal_matrix(1, 6), rng.normal_matrix(1, 6)};
  std::vector<std::pair<BoundaryTangent, BoundaryTangent>> pairs;
  for (int i = 0; i < 3; ++i)
    pairs.emplace_back(scalar_tangent(rng.normal_vector(6), rng.normal_vector(6)),
                       scalar_tangent(rng.normal_vector(6), rng.normal_vector(6)));
  const SymplecticityReport ok = symplecticity_certificate(good, base, pairs, pair, 1e-3, 1e-6, "good");
  CHECK(ok.record.pass);
  CHECK(ok.max_relative <= 1e-9);
  CHECK(ok.pair_values.size() == 3);
  const SymplecticityReport no = symplecticity_certificate(bad, base, pairs, pair, 1e-3, 1e-6, "bad");
  CHECK_FALSE(no.record.pass);
  CHECK(no.record.name == "bad");
}

TEST_CASE("generating functional of the free Euclidean field") {
  const LatticeGrid g = flat_grid({8}, {0.125});
  StreamRng rng(4, "analysis.gf");
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> probes;
  for (int i = 0; i < 3; ++i) probes.emplace_back(rng.normal_vector(8), rng.normal_vector(8));
  const ScalarLatticeField bot{rng.normal_vector(8)}, top{rng.normal_vector(8)};
  PotentialSpec mass;
  mass.kind = PotentialSpec::Kind::mass;
  mass.mass2 = 0.3;
  for (const PotentialSpec& v : {PotentialSpec{}, mass}) {
    const GeneratingFunctionalReport r = generating_functional_check(bot, top, g, v, 1.0, 8, probes, 1e-3, 1e-6, 1e-10);
    CHECK(r.probe_record.pass);
    CHECK(r.symmetry_record.pass);
    CHECK(r.probe_errors.size() == 3);
  }
  PotentialSpec quartic;
  quartic.kind = PotentialSpec::Kind::quartic;
  CHECK_THROWS_AS(generating_functional_check(bot, top, g, quartic, 1.0, 8, probes, 1e-3, 1e-6, 1e-10), ConfigError);
}

}
