// Acceptance runner: one PASS/FAIL line per criterion, with the measured numbers.
//
//   collar_acceptance [--known-failures 7,10]
//
// Exit status is 0 when the set of failing criteria equals the known-failure set
// (empty by default), so a new regression and an unexpected fix both show up.

#include "collar/analysis.hpp"
#include "collar/lie_algebra.hpp"
#include "collar/presym.hpp"
#include "collar/psigma.hpp"
#include "collar/rng.hpp"
#include "collar/scalar.hpp"
#include "collar/verify.hpp"
#include "collar/yangmills.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

using namespace collar;
namespace fs = std::filesystem;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kSeed = 20240611;

// Pinned tolerances.
constexpr double kRatioTarget = 4.0, kRatioBand = 0.3;
constexpr double kOrderTarget = 1.8;
constexpr double kSymplectic = 1e-6;
constexpr double kIdentity = 1e-12;
constexpr double kGaussU1 = 1e-10;
constexpr double kCoisotropyIdentity = 1e-10;
constexpr double kRoundoffFloor = 1e-12;
constexpr double kDnSymmetry = 1e-10;
constexpr double kGenerating = 1e-6;

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string list(const std::vector<double>& v, const char* f = "%.3g") {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(f, v[i]);
  return s + "]";
}

std::vector<double> orders(const std::vector<double>& e) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < e.size(); ++i) out.push_back(std::log2(e[i] / e[i + 1]));
  return out;
}

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

double wnorm(const Eigen::MatrixXd& m, const LatticeGrid& g) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) s += g.weight(static_cast<std::size_t>(j)) * m.col(j).squaredNorm();
  return std::sqrt(s);
}

// Order check that treats an all-roundoff sequence as converged.
void order_check(Outcome& o, const std::string& name, const std::vector<double>& e) {
  if (*std::max_element(e.begin(), e.end()) <= kRoundoffFloor) {
    o.check(true, fmt("%s: values %s all below roundoff floor %.0e", name.c_str(), list(e).c_str(), kRoundoffFloor));
    return;
  }
  const std::vector<double> q = orders(e);
  const double worst = *std::min_element(q.begin(), q.end());
  o.check(worst >= kOrderTarget,
          fmt("%s: values %s, orders %s (need >= %.1f)", name.c_str(), list(e).c_str(), list(q, "%.3f").c_str(), kOrderTarget));
}

Eigen::VectorXd smooth_field(const LatticeGrid& g, StreamRng& rng) {
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.site_count()));
  for (int m = 1; m <= 2; ++m)
    for (int axis = 0; axis < g.dim(); ++axis) {
      const double c = rng.normal() / m, s = rng.normal() / m;
      for (std::size_t i = 0; i < g.site_count(); ++i) {
        const double x = kTwoPi * m * g.position(i, axis) / g.length(axis);
        f[static_cast<Eigen::Index>(i)] += c * std::cos(x) + s * std::sin(x);
      }
    }
  return f;
}

GaugeBoundaryState smooth_gauge(const LatticeGrid& g, const LieAlgebra& alg, StreamRng& rng, double amp) {
  GaugeBoundaryState st = zero_gauge_state(g, alg);
  for (Eigen::Index r = 0; r < st.a.rows(); ++r) {
    st.a.row(r) = amp * smooth_field(g, rng).transpose();
    st.p.row(r) = amp * smooth_field(g, rng).transpose();
  }
  return with_on_shell_beta(st, g, alg);
}

Eigen::MatrixXd gauss_project(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a, const LatticeGrid& g,
                              const LieAlgebra& alg) {
  Eigen::MatrixXd op(alg.dim() * static_cast<Eigen::Index>(g.site_count()), p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(p.rows(), p.cols());
    e.reshaped()[i] = 1.0;
    op.col(i) = covariant_div(e, a, g, alg).reshaped();
  }
  Eigen::MatrixXd out = p;
  out.reshaped() -= op.completeOrthogonalDecomposition().solve(covariant_div(p, a, g, alg).reshaped().eval());
  return out;
}

// ---------------------------------------------------------------------------

Outcome pca_exactness() {
  Outcome o;
  struct Expect {
    const char* name;
    PresymplecticSystem sys;
    Eigen::VectorXd x;
    std::vector<std::array<int, 3>> chain;  // step, new constraints, dim
    int gauge, reduced;
  };
  Eigen::VectorXd x4(4), x3(3);
  x4 << 0.3, -0.7, -0.3, 0.0;
  x3 << 0.0, 0.0, 0.4;
  // Hand elimination. R4: the kernel directions b1, b2 give b1 + q = 0 and b2 = 0,
  // after which Omega restricted to M1 is dq ^ dp, nondegenerate. R3: b gives q = 0,
  // preserving it gives p = 0, and b stays free as the gauge direction.
  const std::vector<Expect> cases = {
      {"regular R4", regular_example_system(), x4, {{0, 2, 4}, {1, 0, 2}}, 0, 2},
      {"two-step R3", two_step_example_system(), x3, {{0, 1, 3}, {1, 1, 2}, {2, 0, 1}}, 1, 0},
  };
  for (const auto& c : cases) {
    const PcaReport r = pca_run(c.sys, c.x);
    bool ok = r.stabilized && r.gauge_dim == c.gauge && r.reduced_dim == c.reduced && r.chain.size() == c.chain.size();
    std::string chain;
    for (std::size_t i = 0; i < r.chain.size(); ++i) {
      chain += fmt("(%d,%d,%d)", r.chain[i].step, r.chain[i].new_constraints, r.chain[i].dim);
      if (i < c.chain.size())
        ok = ok && r.chain[i].step == c.chain[i][0] && r.chain[i].new_constraints == c.chain[i][1] &&
             r.chain[i].dim == c.chain[i][2];
    }
    o.check(ok, fmt("%s: chain %s gauge_dim %d reduced_dim %d", c.name, chain.c_str(), r.gauge_dim, r.reduced_dim));
  }
  return o;
}

Outcome regularity() {
  Outcome o;
  StreamRng rng(kSeed, "acceptance.regularity");
  GridDescription d;
  d.sizes = {4, 4};
  d.spacing = {0.25, 0.25};
  d.metric = {Eigen::Vector2d(1.0, 4.0).asDiagonal()};
  const LatticeGrid sg = LatticeGrid::build(d);
  const PresymplecticSystem ss = scalar_presymplectic_system(sg, PotentialSpec{});
  const RegularityReport sr = check_regularity(ss, rng.normal_vector(ss.n()), scalar_beta_block(sg));
  o.check(sr.regular, fmt("scalar: regular, condition number %.6g (metric condition 4)", sr.condition_number));

  const LatticeGrid yg = flat_grid({3, 3}, {1.0 / 3, 1.0 / 3});
  const LieAlgebra su2 = LieAlgebra::su2();
  const PresymplecticSystem ys = ym_presymplectic_system(yg, su2);
  const RegularityReport yr = check_regularity(ys, rng.normal_vector(ys.n()), ym_beta_block(yg, su2));
  o.check(yr.regular, fmt("yang-mills su(2): regular, condition number %.6g", yr.condition_number));

  const LatticeGrid pg = flat_grid({8}, {0.125});
  const PoissonStructure lp = PoissonStructure::lie_poisson_su2();
  const PresymplecticSystem ps = psm_presymplectic_system(pg, lp);
  const Eigen::VectorXd x = rng.normal_vector(ps.n());
  const RegularityReport pr = check_regularity(ps, x, psm_beta_block(pg, lp));
  // Oracle: the beta-beta block of the Hessian vanishes identically (H is linear in beta).
  const std::vector<int> blk = psm_beta_block(pg, lp);
  const Eigen::MatrixXd hess = hessian_at(ps, x);
  double bb = 0.0;
  for (int i : blk)
    for (int j : blk) bb = std::max(bb, std::abs(hess(i, j)));
  o.check(!pr.regular && bb <= 1e-8,
          fmt("sigma model: singular (smallest singular value %.3g, max |beta-beta Hessian| %.3g)", pr.smallest_singular_value, bb));
  return o;
}

Outcome scalar_convergence() {
  Outcome o;
  const int n = 32;
  const LatticeGrid g = flat_grid({n}, {1.0 / n});
  StreamRng rng(kSeed, "acceptance.scalar_convergence");
  const Eigen::VectorXd phi0 = smooth_field(g, rng), p0 = smooth_field(g, rng);

  // Exact semi-discrete solution of phi_dot = -p, p_dot = -L phi with L = W^-1 K,
  // by eigendecomposition of the symmetric stiffness (uniform weights).
  const Eigen::MatrixXd k = Eigen::MatrixXd(scalar_stiffness(g)) / g.weight(0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0);
  auto exact = [&](double t) {
    const Eigen::VectorXd a = v.transpose() * phi0, b = v.transpose() * p0;
    Eigen::VectorXd fa(n), fb(n);
    for (int i = 0; i < n; ++i) {
      const double w = std::sqrt(lam[i]);
      const double c = std::cos(w * t), s_over = w > 1e-12 ? std::sin(w * t) / w : t;
      fa[i] = c * a[i] - s_over * b[i];
      fb[i] = c * b[i] + w * w * s_over * a[i];
    }
    return std::pair<Eigen::VectorXd, Eigen::VectorXd>{v * fa, v * fb};
  };

  std::vector<double> errors;
  for (double dt : {0.02, 0.01, 0.005}) {
    ScalarBoundaryState st = on_constraint({phi0}, {p0}, g);
    for (int i = 0; i < std::lround(1.0 / dt); ++i) st = boundary_step(st, g, PotentialSpec{}, dt);
    const auto [ephi, ep] = exact(st.time);
    errors.push_back(std::max(max_abs(st.phi.values - ephi), max_abs(st.p.values - ep)));
  }
  const std::vector<double> ratio{errors[0] / errors[1], errors[1] / errors[2]};
  bool ok = true;
  for (double r : ratio) ok = ok && std::abs(r - kRatioTarget) <= kRatioBand;
  o.check(ok, fmt("global errors %s at dt [0.02, 0.01, 0.005], ratios %s (need 4.0 +- 0.3)", list(errors).c_str(),
                  list(ratio, "%.4f").c_str()));
  return o;
}

Outcome energy() {
  Outcome o;
  const std::vector<double> dts{0.02, 0.01, 0.005};
  {
    StreamRng rng(kSeed, "acceptance.energy.scalar");
    const LatticeGrid g = flat_grid({32}, {1.0 / 32});
    const Eigen::VectorXd phi = smooth_field(g, rng), p = smooth_field(g, rng);
    std::vector<double> drift;
    for (double dt : dts) {
      ScalarBoundaryState st = on_constraint({phi}, {p}, g);
      const double h0 = boundary_hamiltonian(st, g, PotentialSpec{});
      double worst = 0.0;
      for (int i = 0; i < std::lround(1.0 / dt); ++i) {
        st = boundary_step(st, g, PotentialSpec{}, dt);
        worst = std::max(worst, std::abs(boundary_hamiltonian(st, g, PotentialSpec{}) - h0) / std::abs(h0));
      }
      drift.push_back(worst);
    }
    order_check(o, "scalar relative energy drift", drift);
  }
  {
    StreamRng rng(kSeed, "acceptance.energy.ym");
    const LatticeGrid g = flat_grid({8, 8}, {0.125, 0.125});
    const LieAlgebra su2 = LieAlgebra::su2();
    const GaugeBoundaryState init = smooth_gauge(g, su2, rng, 0.5);
    std::vector<double> drift;
    for (double dt : dts) {
      GaugeBoundaryState st = init;
      const double h0 = reduced_hamiltonian(st, g, su2);
      double worst = 0.0;
      for (int i = 0; i < std::lround(1.0 / dt); ++i) {
        st = ym_step(st, g, su2, dt);
        worst = std::max(worst, std::abs(reduced_hamiltonian(st, g, su2) - h0) / std::abs(h0));
      }
      drift.push_back(worst);
    }
    order_check(o, "su(2) yang-mills relative energy drift", drift);
  }
  return o;
}

Outcome symplecticity() {
  Outcome o;
  // Both flows are linear, so T U = flow(base + U) - flow(base) exactly; this is the
  // oracle the finite-difference certificate is compared with.
  auto run = [&](const std::string& name, const CollarFlow& flow, const PhasePoint& base, const BoundaryPairing& pair,
                 const std::function<BoundaryTangent()>& draw) {
    std::vector<std::pair<BoundaryTangent, BoundaryTangent>> pairs;
    for (int i = 0; i < 5; ++i) {
      BoundaryTangent u1 = draw();
      BoundaryTangent u2 = draw();
      pairs.emplace_back(u1, u2);
    }
    const SymplecticityReport cert = symplecticity_certificate(flow, base, pairs, pair, 1e-3, kSymplectic, name);
    const PhasePoint f0 = flow(base);
    double oracle = 0.0;
    for (const auto& [u1, u2] : pairs) {
      auto push = [&](const BoundaryTangent& u) {
        const PhasePoint f = flow({base.first + u.dphi, base.second + u.dp});
        return BoundaryTangent{f.first - f0.first, f.second - f0.second, 1};
      };
      const double n1 = std::sqrt(pair(u1.dphi, u1.dphi) + pair(u1.dp, u1.dp));
      const double n2 = std::sqrt(pair(u2.dphi, u2.dphi) + pair(u2.dp, u2.dp));
      oracle = std::max(oracle, std::abs(omega_boundary(push(u1), push(u2), pair) - omega_boundary(u1, u2, pair)) / (n1 * n2));
    }
    o.check(cert.max_relative <= kSymplectic && oracle <= kSymplectic,
            fmt("%s: certificate %.3g, exact linear push-forward %.3g over 5 pairs (need <= %.0e)", name.c_str(),
                cert.max_relative, oracle, kSymplectic));
  };
  {
    StreamRng rng(kSeed, "acceptance.symplectic.scalar");
    const LatticeGrid g = flat_grid({32}, {1.0 / 32});
    const CollarFlow flow = [&](const PhasePoint& z) {
      ScalarBoundaryState st = on_constraint({z.first.row(0).transpose()}, {z.second.row(0).transpose()}, g);
      for (int i = 0; i < 250; ++i) st = boundary_step(st, g, PotentialSpec{}, 1e-3);
      return PhasePoint{st.phi.values.transpose(), st.p.values.transpose()};
    };
    const PhasePoint base{smooth_field(g, rng).transpose(), smooth_field(g, rng).transpose()};
    run("free scalar N=32", flow, base, BoundaryPairing::scalar(g),
        [&] { return scalar_tangent(rng.normal_vector(32), rng.normal_vector(32)); });
  }
  {
    StreamRng rng(kSeed, "acceptance.symplectic.ym");
    const LatticeGrid g = flat_grid({16, 16}, {1.0 / 16, 1.0 / 16});
    const LieAlgebra u1 = LieAlgebra::u1();
    const CollarFlow flow = [&](const PhasePoint& z) {
      GaugeBoundaryState st = zero_gauge_state(g, u1);
      st.a = z.first;
      st.p = z.second;
      for (int i = 0; i < 25; ++i) st = ym_step(st, g, u1, 0.01);
      return PhasePoint{st.a, st.p};
    };
    const GaugeBoundaryState init = smooth_gauge(g, u1, rng, 1.0);
    run("u(1) yang-mills 16x16", flow, {init.a, init.p}, BoundaryPairing::gauge(g, u1),
        [&] { return BoundaryTangent{rng.normal_matrix(2, 256), rng.normal_matrix(2, 256), 1}; });
  }
  return o;
}

Outcome noether() {
  Outcome o;
  StreamRng rng(kSeed, "acceptance.noether");
  const LatticeGrid g = flat_grid({6, 6}, {1.0 / 6, 1.0 / 6});
  const LieAlgebra su2 = LieAlgebra::su2();
  const BoundaryPairing pair = BoundaryPairing::gauge(g, su2);
  double adjoint = 0.0, charge = 0.0, alpha = 0.0;
  for (int t = 0; t < 20; ++t) {
    GaugeBoundaryState st = zero_gauge_state(g, su2);
    st.a = rng.normal_matrix(6, 36);
    st.p = rng.normal_matrix(6, 36);
    const Eigen::MatrixXd xi = rng.normal_matrix(3, 36);
    const Eigen::MatrixXd dxi = covariant_d(xi, st.a, g, su2), dp = covariant_div(st.p, st.a, g, su2);
    const double lhs = inner_algebra(st.p, dxi, g, su2) + inner_algebra(dp, xi, g, su2);
    adjoint = std::max(adjoint, std::abs(lhs) / (wnorm(st.p, g) * wnorm(dxi, g) + wnorm(dp, g) * wnorm(xi, g)));

    const double q = noether_charge(st, xi, g, su2);
    alpha = std::max(alpha, std::abs(canonical_alpha(st.p, gauge_generator(st, xi, g, su2), pair) - q) /
                                (wnorm(st.p, g) * wnorm(dxi, g)));

    st.p = gauss_project(st.p, st.a, g, su2);
    charge = std::max(charge, std::abs(noether_charge(st, xi, g, su2)) / (wnorm(st.p, g) * wnorm(dxi, g)));
  }
  o.check(adjoint <= kIdentity, fmt("<p, d_a xi> + <d*_a p, xi>: max relative %.3g over 20 su(2) triples", adjoint));
  o.check(charge <= kIdentity, fmt("Q(xi) on zero-Gauss states: max relative %.3g", charge));
  o.check(alpha <= kIdentity, fmt("alpha(gauge generator) - Q(xi): max relative %.3g", alpha));
  return o;
}

Outcome gauss() {
  Outcome o;
  const LatticeGrid g = flat_grid({8, 8}, {0.125, 0.125});
  for (const char* name : {"su2", "u1"}) {
    const LieAlgebra alg = LieAlgebra::from_name(name);
    StreamRng rng(kSeed, std::string("acceptance.gauss.") + name);
    GaugeBoundaryState init = smooth_gauge(g, alg, rng, 0.5);
    init.p = gauss_project(init.p, init.a, g, alg);
    const double g0 = gauss_residual(init, g, alg).norm;
    std::vector<double> finals;
    for (double dt : {0.02, 0.01, 0.005}) {
      GaugeBoundaryState st = init;
      for (int i = 0; i < std::lround(1.0 / dt); ++i) st = ym_step(st, g, alg, dt);
      finals.push_back(gauss_residual(st, g, alg).norm);
    }
    if (std::string(name) == "su2") {
      order_check(o, fmt("su(2) final Gauss residual (initial %.2g), dt [0.02, 0.01, 0.005]", g0), finals);
    } else {
      const double worst = *std::max_element(finals.begin(), finals.end());
      o.check(worst <= kGaussU1, fmt("u(1) final Gauss residual %s (need <= %.0e)", list(finals).c_str(), kGaussU1));
    }
  }
  return o;
}

Outcome coisotropy() {
  Outcome o;
  StreamRng rng(kSeed, "acceptance.coisotropy");
  const PoissonStructure constant = PoissonStructure::constant(Eigen::Matrix2d{{0.0, 1.0}, {-1.0, 0.0}});
  const PoissonStructure lp = PoissonStructure::lie_poisson_su2();
  {
    // Psi is quadratic in (phi, p): dPsi(V) = (Psi(x + V) - Psi(x - V)) / 2 exactly.
    const LatticeGrid g = flat_grid({16}, {1.0 / 16});
    double worst = 0.0;
    for (const PoissonStructure* ps : {&constant, &lp}) {
      const int r = ps->target_dim();
      for (int t = 0; t < 20; ++t) {
        const Eigen::MatrixXd phi = rng.normal_matrix(r, 16), p = rng.normal_matrix(r, 16);
        const PsmTangent v{rng.normal_matrix(r, 16), rng.normal_matrix(r, 16)};
        const Eigen::MatrixXd dpsi =
            0.5 * (constraint_psi(phi + v.dphi, p + v.dp, g, *ps) - constraint_psi(phi - v.dphi, p - v.dp, g, *ps));
        const auto site = static_cast<std::size_t>((3 * t) % 16);
        for (int a = 0; a < r; ++a) {
          const PsmTangent x = hamiltonian_vector_field_Xa(phi, p, site, a, g, *ps);
          const double scale = std::hypot(wnorm(x.dphi, g), wnorm(x.dp, g)) * std::hypot(wnorm(v.dphi, g), wnorm(v.dp, g));
          worst = std::max(worst, std::abs(psm_omega(x, v, g) - dpsi(a, static_cast<Eigen::Index>(site))) / scale);
        }
      }
    }
    o.check(worst <= kCoisotropyIdentity, fmt("i_X omega = dPsi: max relative %.3g (need <= %.0e)", worst, kCoisotropyIdentity));
  }
  std::vector<double> rc, rl;
  for (int n : {16, 32, 64}) {
    const LatticeGrid g = flat_grid({n}, {1.0 / n});
    Eigen::MatrixXd phi(2, n);
    for (int s = 0; s < n; ++s) {
      const double x = kTwoPi * s / n;
      phi.col(s) << std::cos(x) + 0.3 * std::sin(2 * x), std::sin(x);
    }
    const PsmBoundaryState cs = constant_poisson_state(g, constant, phi);
    rc.push_back(coisotropy_residual(cs.phi, cs.p, g, constant));
    const PsmBoundaryState ls = su2_circle_state(g, 1.0, 0.3, 0.5);
    rl.push_back(coisotropy_residual(ls.phi, ls.p, g, lp));
  }
  order_check(o, "constant Lambda coisotropy residual, N [16, 32, 64]", rc);
  order_check(o, "su(2) Lie-Poisson coisotropy residual, N [16, 32, 64]", rl);
  return o;
}

Outcome generating_functional() {
  Outcome o;
  StreamRng rng(kSeed, "acceptance.generating");
  const int n = 16, steps = 16;
  const double eps = 1.0;
  const LatticeGrid g = flat_grid({n}, {1.0 / n});
  const Eigen::VectorXd bot = smooth_field(g, rng), top = smooth_field(g, rng);
  auto solve = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& t) {
    return bulk_solve_euclidean({b}, {t}, g, PotentialSpec{}, eps, steps);
  };
  const BulkSolution base = solve(bot, top);
  const auto [ts, bs] = project_to_boundary(base);
  const Eigen::VectorXd& w = g.weights();

  // Oracle 1: W is quadratic, so its differential is an exact symmetric difference.
  std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> probes;
  double dw = 0.0;
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd db = rng.normal_vector(n), dt = rng.normal_vector(n);
    probes.emplace_back(db, dt);
    const double exact = 0.5 * (euclidean_action(solve(bot + db, top + dt), g, PotentialSpec{}) -
                                euclidean_action(solve(bot - db, top - dt), g, PotentialSpec{}));
    const double predicted = ts.p.values.dot(w.cwiseProduct(dt)) - bs.p.values.dot(w.cwiseProduct(db));
    const double scale = std::sqrt(ts.p.values.dot(w.cwiseProduct(ts.p.values)) + bs.p.values.dot(w.cwiseProduct(bs.p.values))) *
                         std::sqrt(db.dot(w.cwiseProduct(db)) + dt.dot(w.cwiseProduct(dt)));
    dw = std::max(dw, std::abs(exact - predicted) / scale);
  }
  // Oracle 2: the Dirichlet-to-Neumann matrix, assembled from unit data.
  Eigen::MatrixXd dn(2 * n, 2 * n);
  for (int c = 0; c < 2 * n; ++c) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n), t = Eigen::VectorXd::Zero(n);
    (c < n ? b[c] : t[c - n]) = 1.0;
    const auto [tt, bb] = project_to_boundary(solve(b, t));
    dn.col(c) << -bb.p.values.cwiseProduct(w), tt.p.values.cwiseProduct(w);
  }
  const double sym = max_abs(dn - dn.transpose()) / max_abs(dn);
  const GeneratingFunctionalReport rep =
      generating_functional_check({bot}, {top}, g, PotentialSpec{}, eps, steps, probes, 1e-3, kGenerating, kDnSymmetry);
  o.check(sym <= kDnSymmetry && rep.dn_symmetry <= kDnSymmetry,
          fmt("Dirichlet-to-Neumann asymmetry %.3g (library %.3g), need <= %.0e", sym, rep.dn_symmetry, kDnSymmetry));
  o.check(dw <= kGenerating && rep.max_probe_error <= kGenerating,
          fmt("dW = <p, d data>: exact polarization %.3g, extrapolated finite difference %.3g, need <= %.0e", dw,
              rep.max_probe_error, kGenerating));
  return o;
}

Outcome census() {
  Outcome o;
  const LieAlgebra u1 = LieAlgebra::u1(), su2 = LieAlgebra::su2();
  for (int n : {4, 6}) {
    StreamRng rng(kSeed, "acceptance.census.u1." + std::to_string(n));
    const LatticeGrid g = flat_grid({n, n}, {1.0 / n, 1.0 / n});
    GaugeBoundaryState st = zero_gauge_state(g, u1);
    st.a = rng.normal_matrix(2, n * n);
    st.p = rng.normal_matrix(2, n * n);
    const CensusReport c = reduction_census(st, g, u1, true);
    const int expect = 2 * 2 * n * n - 2 * (n * n - 1);
    o.check(c.reduced_dim == expect,
            fmt("u(1) N=%d: reduced dim %d vs closed form %d (constraint rank %d, orbit rank %d, expected %d each; "
                "constraint algorithm %d)",
                n, c.reduced_dim, expect, c.constraint_rank, c.orbit_rank, n * n - 1, c.pca_reduced_dim));
  }
  {
    StreamRng rng(kSeed, "acceptance.census.su2");
    const int n = 4, s = n * n;
    const LatticeGrid g = flat_grid({n, n}, {0.25, 0.25});
    GaugeBoundaryState st = zero_gauge_state(g, su2);
    st.a = rng.normal_matrix(6, s);
    st.p = rng.normal_matrix(6, s);
    const CensusReport c = reduction_census(st, g, su2, false);
    o.check(c.constraint_rank == 3 * s && c.orbit_rank == 3 * s && c.reduced_dim == 6 * s,
            fmt("su(2) N=4: constraint rank %d, orbit rank %d (expected %d each), reduced dim %d", c.constraint_rank,
                c.orbit_rank, 3 * s, c.reduced_dim));
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / ("collar_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::vector<std::string> reports;
  for (const char* name : {"first", "second"}) {
    const fs::path dir = root / name;
    const std::string cmd = std::string(COLLAR_CLI_PATH) + " verify --seed " + std::to_string(kSeed) + " --out " +
                            dir.string() + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.check(code == 0 || code == 1, fmt("verify run '%s' finished with exit code %d", name, code));
    reports.push_back(slurp(dir / "report.json"));
  }
  o.check(!reports[0].empty() && reports[0] == reports[1],
          fmt("report.json byte-identical across runs (%zu and %zu bytes)", reports[0].size(), reports[1].size()));
  fs::remove_all(root);
  return o;
}

struct Criterion {
  int id;
  const char* key;
  double limit_s;
  Outcome (*run)();
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--known-failures" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty()) known.insert(std::stoi(tok));
    } else {
      std::fprintf(stderr, "usage: %s [--known-failures id,id,...]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Criterion> list = {
      {1, "pca_exactness", 1, pca_exactness},
      {2, "regularity", 1, regularity},
      {3, "scalar_convergence", 10, scalar_convergence},
      {4, "energy_conservation", 30, energy},
      {5, "symplecticity", 60, symplecticity},
      {6, "noether_identities", 5, noether},
      {7, "gauss_preservation", 60, gauss},
      {8, "coisotropy", 30, coisotropy},
      {9, "generating_functional", 30, generating_functional},
      {10, "reduction_census", 60, census},
      {11, "determinism", 300, determinism},
  };

  std::set<int> failed;
  const auto t_start = std::chrono::steady_clock::now();
  for (const auto& c : list) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out = c.run();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.check(secs < c.limit_s, fmt("runtime %.3f s (limit %.0f s)", secs, c.limit_s));
    if (!out.pass) failed.insert(c.id);
    std::printf("%s C%d %s\n", out.pass ? "PASS" : "FAIL", c.id, c.key);
    for (const auto& l : out.lines) std::printf("       %s\n", l.c_str());
    std::fflush(stdout);
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

  auto join = [](const std::set<int>& s) {
    std::string r;
    for (int i : s) r += (r.empty() ? "" : ",") + std::to_string(i);
    return r.empty() ? std::string("none") : r;
  };
  std::printf("\n%zu/%zu criteria pass; failing: %s; known failures: %s; total %.2f s\n", list.size() - failed.size(),
              list.size(), join(failed).c_str(), join(known).c_str(), total);
  if (failed != known) {
    std::printf("failing set differs from the known-failure set\n");
    return 1;
  }
  return 0;
}
