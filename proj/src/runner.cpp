#include "collar/runner.hpp"

#include "collar/psigma.hpp"
#include "collar/scalar.hpp"
#include "collar/verify.hpp"
#include "collar/yangmills.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numbers>

namespace collar {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

PotentialSpec potential_of(const ScalarConfig& c) {
  PotentialSpec p;
  p.kind = c.potential == "quartic" ? PotentialSpec::Kind::quartic
           : c.potential == "mass"  ? PotentialSpec::Kind::mass
                                    : PotentialSpec::Kind::free;
  p.mass2 = c.mass2;
  p.quartic = c.quartic;
  p.validate();
  return p;
}

void add_warning(RunReport& rep, const std::vector<std::string>& w) {
  for (const auto& s : w)
    if (std::find(rep.warnings.begin(), rep.warnings.end(), s) == rep.warnings.end()) rep.warnings.push_back(s);
}

Json pca_json(const PcaReport& pca) {
  Json chain = Json::array();
  for (const auto& s : pca.chain)
    chain.push_back({{"step", s.step}, {"new_constraints", s.new_constraints}, {"dim", s.dim},
                     {"kept_margin", s.kept_margin}, {"dropped_margin", s.dropped_margin}});
  return {{"chain", chain},
          {"gauge_dim", pca.gauge_dim},
          {"reduced_dim", pca.reduced_dim},
          {"stabilized", pca.stabilized},
          {"projection_distance", pca.projection_distance},
          {"witness_feasible", pca.witness_feasible},
          {"flags", pca.flags}};
}

std::vector<Eigen::VectorXd> probe_directions(int n, StreamRng& rng, int count = 4) {
  std::vector<Eigen::VectorXd> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.normal_vector(n));
  return out;
}

// Probed at a generic point near x: run states are often critical points of H,
// where the gradient vanishes and a relative comparison is meaningless.
CertificateRecord gradient_record(const PresymplecticSystem& sys, const Eigen::VectorXd& x, StreamRng& rng,
                                  double tol) {
  const Eigen::VectorXd probe = x + 0.1 * rng.normal_vector(sys.n());
  const double v = gradient_self_test(sys, probe, probe_directions(sys.n(), rng));
  return {"gradient_self_test", v, tol, v <= tol};
}

ScalarLatticeField scalar_initial(const ScalarConfig& c, const LatticeGrid& grid) {
  if (c.initial == "gaussian") {
    return sample(grid, [&](std::span<const double> x) {
      double r2 = 0.0;
      for (int k = 0; k < grid.dim(); ++k) {
        const double l = grid.length(k);
        double dx = std::fmod(x[static_cast<std::size_t>(k)] - 0.5 * l, l);
        dx = std::min(std::abs(dx), l - std::abs(dx));
        r2 += dx * dx / (l * l);
      }
      return c.amplitude * std::exp(-r2 / (2.0 * 0.01));
    });
  }
  return sample(grid, [&](std::span<const double> x) {
    return c.amplitude * std::cos(kTwoPi * c.mode * x[0] / grid.length(0));
  });
}

std::string scalar_snapshot(const ScalarBoundaryState& st) {
  CsvTable t({"field", "site", "direction", "algebra_index", "value"});
  for (Eigen::Index s = 0; s < st.phi.values.size(); ++s)
    t.add_row({"phi", std::to_string(s), "", "", CsvTable::number(st.phi.values[s])});
  for (Eigen::Index s = 0; s < st.p.values.size(); ++s)
    t.add_row({"p", std::to_string(s), "", "", CsvTable::number(st.p.values[s])});
  for (Eigen::Index s = 0; s < st.beta.values.cols(); ++s)
    for (Eigen::Index k = 0; k < st.beta.values.rows(); ++k)
      t.add_row({"beta", std::to_string(s), std::to_string(k), "", CsvTable::number(st.beta.values(k, s))});
  return t.str();
}

// Rows of a block-structured field: (direction, algebra index) from row = dir * n + a.
void gauge_rows(CsvTable& t, const std::string& name, const Eigen::MatrixXd& m, int n) {
  for (Eigen::Index s = 0; s < m.cols(); ++s)
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      t.add_row({name, std::to_string(s), std::to_string(r / n), std::to_string(r % n), CsvTable::number(m(r, s))});
}

void run_scalar(const RunConfig& cfg, RunReport& rep, Artifacts& files) {
  const LatticeGrid grid = LatticeGrid::build(grid_description(cfg.grid));
  const PotentialSpec pot = potential_of(cfg.scalar);
  StreamRng rng(cfg.seed, "run.scalar");
  ScalarBoundaryState st = on_constraint(scalar_initial(cfg.scalar, grid), zero_scalar(grid), grid);
  const ScalarBoundaryState init = st;

  const PresymplecticSystem sys = scalar_presymplectic_system(grid, pot);
  rep.add(gradient_record(sys, scalar_pack(st), rng, cfg.tolerances.at("gradient_check")));

  const double h0 = boundary_hamiltonian(st, grid, pot);
  CsvTable series({"step", "time", "hamiltonian", "relative_drift", "beta_residual", "phi_max"});
  double worst_drift = 0.0, worst_beta = 0.0;
  auto record = [&](int i) {
    const double h = boundary_hamiltonian(st, grid, pot);
    const double drift = std::abs(h - h0) / std::max(std::abs(h0), 1e-300);
    const double beta = beta_constraint_residual(st, grid);
    worst_drift = std::max(worst_drift, drift);
    worst_beta = std::max(worst_beta, beta);
    series.add_row({std::to_string(i), CsvTable::number(st.time), CsvTable::number(h), CsvTable::number(drift),
                    CsvTable::number(beta), CsvTable::number(st.phi.values.cwiseAbs().maxCoeff())});
  };
  record(0);
  std::vector<std::string> warnings;
  for (int i = 1; i <= cfg.collar.steps; ++i) {
    st = boundary_step(st, grid, pot, cfg.collar.dt, &warnings);
    if (!st.phi.values.allFinite() || !st.p.values.allFinite()) {
      rep.add({"finite_state", static_cast<double>(i), 0.0, false});
      break;
    }
    if (i % cfg.collar.output_every == 0 || i == cfg.collar.steps) record(i);
  }
  add_warning(rep, warnings);
  const double beta_scale = 1.0 + st.beta.values.cwiseAbs().maxCoeff();
  rep.add({"beta_constraint", worst_beta / beta_scale, cfg.tolerances.at("roundoff_floor"),
           worst_beta / beta_scale <= cfg.tolerances.at("roundoff_floor")});

  Json bulk = Json::object();
  if (cfg.scalar.bulk == "lorentzian") {
    const BulkSolution b = bulk_solve_lorentzian(init.phi, init.p, grid, pot, cfg.collar.epsilon, cfg.collar.steps);
    const double diff = (b.phi.back() - st.phi.values).cwiseAbs().maxCoeff();
    bulk = {{"signature", "lorentzian"}, {"top_vs_boundary_step", diff}};
  } else if (cfg.scalar.bulk == "euclidean") {
    if (!pot.is_linear_force()) throw ConfigError("line " + std::to_string(cfg.key_lines.count("scalar.bulk") ? cfg.key_lines.at("scalar.bulk") : 0) +
                                                  ": Euclidean bulk solve needs a linear field equation");
    const BulkSolution b = bulk_solve_euclidean(init.phi, st.phi, grid, pot, cfg.collar.epsilon, cfg.collar.steps);
    bulk = {{"signature", "euclidean"},
            {"residual", euclidean_residual(b, grid, pot)},
            {"action", euclidean_action(b, grid, pot)}};
  }

  rep.details = {{"sites", grid.site_count()},
                 {"final_time", st.time},
                 {"initial_hamiltonian", h0},
                 {"max_relative_drift", worst_drift},
                 {"max_beta_residual", worst_beta},
                 {"bulk", bulk}};
  files.emplace_back("series.csv", series.str());
  files.emplace_back("snapshot.csv", scalar_snapshot(st));
}

PoissonStructure poisson_of(const PsigmaConfig& c) {
  auto mat = [](const std::vector<std::vector<double>>& m) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), m.empty() ? 0 : static_cast<Eigen::Index>(m[0].size()));
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i].size() != m[0].size()) throw ConfigError("psigma matrices must be rectangular");
      for (std::size_t j = 0; j < m[i].size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m[i][j];
    }
    return out;
  };
  if (c.poisson == "su2") return PoissonStructure::lie_poisson_su2();
  if (c.poisson == "constant") return PoissonStructure::constant(mat(c.constant));
  std::vector<Eigen::MatrixXd> lin;
  for (const auto& m : c.linear) lin.push_back(mat(m));
  return PoissonStructure::polynomial(mat(c.constant), lin);
}

void run_psigma(const RunConfig& cfg, RunReport& rep, Artifacts& files) {
  const LatticeGrid grid = LatticeGrid::build(grid_description(cfg.grid));
  if (grid.dim() != 1) throw ConfigError("the Poisson sigma-model runs on a 1D boundary grid");
  const PoissonStructure ps = poisson_of(cfg.psigma);
  const int r = ps.target_dim();
  StreamRng rng(cfg.seed, "run.psigma");

  PsmBoundaryState st;
  if (cfg.psigma.poisson == "su2") {
    st = su2_circle_state(grid, cfg.psigma.radius, cfg.psigma.height, cfg.psigma.lambda);
  } else {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(r, static_cast<Eigen::Index>(grid.site_count()));
    for (std::size_t s = 0; s < grid.site_count(); ++s) {
      const double th = kTwoPi * grid.position(s, 0) / grid.length(0);
      for (int a = 0; a < r; ++a)
        phi(a, static_cast<Eigen::Index>(s)) = cfg.psigma.radius * (a % 2 == 0 ? std::cos((a / 2 + 1) * th) : std::sin((a / 2 + 1) * th));
    }
    if (ps.kind() == PoissonStructure::Kind::constant && r % 2 == 0 &&
        std::abs(ps.lambda(Eigen::VectorXd::Zero(r)).determinant()) > 1e-12) {
      st = constant_poisson_state(grid, ps, phi);
    } else {
      st = {phi, Eigen::MatrixXd::Zero(r, phi.cols()), Eigen::MatrixXd::Zero(r, phi.cols()), 0.0};
      rep.warnings.push_back("initial data is not on the constraint set (p = 0)");
    }
  }
  if (!cfg.psigma.beta.empty()) {
    if (static_cast<int>(cfg.psigma.beta.size()) != r) throw ConfigError("psigma.beta needs one entry per target axis");
    for (int a = 0; a < r; ++a) st.beta.row(a).setConstant(cfg.psigma.beta[static_cast<std::size_t>(a)]);
  }

  const PresymplecticSystem sys = psm_presymplectic_system(grid, ps);
  rep.add(gradient_record(sys, psm_pack(st), rng, cfg.tolerances.at("gradient_check")));

  const double psi0 = constraint_psi(st.phi, st.p, grid, ps).cwiseAbs().maxCoeff();
  const double cois0 = coisotropy_residual(st.phi, st.p, grid, ps);
  CsvTable series({"step", "time", "hamiltonian", "psi_max", "step_drift"});
  double worst = 0.0;
  series.add_row({"0", CsvTable::number(st.time), CsvTable::number(boundary_hamiltonian_psm(st, grid, ps)),
                  CsvTable::number(psi0), "0"});
  for (int i = 1; i <= cfg.collar.steps; ++i) {
    const PsmStepResult res = psm_step(st, grid, ps, cfg.collar.dt);
    st = res.state;
    worst = std::max(worst, res.constraint_drift);
    if (i % cfg.collar.output_every == 0 || i == cfg.collar.steps)
      series.add_row({std::to_string(i), CsvTable::number(st.time), CsvTable::number(boundary_hamiltonian_psm(st, grid, ps)),
                      CsvTable::number(constraint_psi(st.phi, st.p, grid, ps).cwiseAbs().maxCoeff()),
                      CsvTable::number(res.constraint_drift)});
  }
  const PcaReport pca = pca_run(sys, psm_pack(st), cfg.pca.max_steps, cfg.tolerances.at("rank"));
  rep.details = {{"target_dim", r},
                 {"initial_psi_max", psi0},
                 {"initial_coisotropy_residual", cois0},
                 {"max_step_drift", worst},
                 {"final_psi_max", constraint_psi(st.phi, st.p, grid, ps).cwiseAbs().maxCoeff()},
                 {"final_coisotropy_residual", coisotropy_residual(st.phi, st.p, grid, ps)},
                 {"pca", pca_json(pca)}};
  CsvTable snap({"field", "site", "direction", "algebra_index", "value"});
  gauge_rows(snap, "phi", st.phi, r);
  gauge_rows(snap, "p", st.p, r);
  gauge_rows(snap, "beta", st.beta, r);
  files.emplace_back("series.csv", series.str());
  files.emplace_back("snapshot.csv", snap.str());
}

GaugeBoundaryState gauge_initial(const RunConfig& cfg, const LatticeGrid& grid, const LieAlgebra& g) {
  StreamRng rng(cfg.seed, "run.yangmills.initial");
  GaugeBoundaryState st = zero_gauge_state(grid, g);
  const double amp = cfg.yangmills.amplitude;
  if (cfg.yangmills.initial == "mode") {
    for (std::size_t s = 0; s < grid.site_count(); ++s) {
      const double x = grid.dim() > 1 ? grid.position(s, 1) / grid.length(1) : grid.position(s, 0) / grid.length(0);
      st.a(0, static_cast<Eigen::Index>(s)) = amp * std::cos(kTwoPi * x);
    }
  } else {
    for (Eigen::Index r = 0; r < st.a.rows(); ++r) {
      st.a.row(r) = amp * random_smooth_field(grid, rng).transpose();
      st.p.row(r) = amp * random_smooth_field(grid, rng).transpose();
    }
  }
  if (cfg.yangmills.a0 == "constant") {
    if (static_cast<int>(cfg.yangmills.a0_value.size()) != g.dim())
      throw ConfigError("yangmills.a0_value needs one entry per algebra generator");
    for (int a = 0; a < g.dim(); ++a) st.a0.row(a).setConstant(cfg.yangmills.a0_value[static_cast<std::size_t>(a)]);
  }
  st.p = project_gauss(st.p, st.a, grid, g);
  return with_on_shell_beta(st, grid, g);
}

void run_yangmills(const RunConfig& cfg, RunReport& rep, Artifacts& files) {
  const LatticeGrid grid = LatticeGrid::build(grid_description(cfg.grid));
  require_flat_grid(grid);
  const LieAlgebra g = LieAlgebra::from_name(cfg.yangmills.algebra);
  StreamRng rng(cfg.seed, "run.yangmills");
  GaugeBoundaryState st = gauge_initial(cfg, grid, g);

  const PresymplecticSystem sys = ym_presymplectic_system(grid, g);
  rep.add(gradient_record(sys, ym_pack(st), rng, cfg.tolerances.at("gradient_check")));

  const double e0 = reduced_hamiltonian(st, grid, g);
  const double g0 = gauss_residual(st, grid, g).norm;
  CsvTable series({"step", "time", "energy", "relative_drift", "gauss_norm"});
  double worst = 0.0;
  auto record = [&](int i) {
    const double e = reduced_hamiltonian(st, grid, g);
    const double drift = std::abs(e - e0) / std::max(std::abs(e0), 1e-300);
    worst = std::max(worst, drift);
    series.add_row({std::to_string(i), CsvTable::number(st.time), CsvTable::number(e), CsvTable::number(drift),
                    CsvTable::number(gauss_residual(st, grid, g).norm)});
  };
  record(0);
  std::vector<std::string> warnings;
  for (int i = 1; i <= cfg.collar.steps; ++i) {
    st = ym_step(st, grid, g, cfg.collar.dt, &warnings);
    if (!st.a.allFinite() || !st.p.allFinite()) {
      rep.add({"finite_state", static_cast<double>(i), 0.0, false});
      break;
    }
    if (i % cfg.collar.output_every == 0 || i == cfg.collar.steps) record(i);
  }
  add_warning(rep, warnings);
  const double gscale = 1.0 + std::sqrt(inner_algebra(st.p, st.p, grid, g));
  rep.add({"initial_gauss", g0 / gscale, cfg.tolerances.at("roundoff_floor"), g0 / gscale <= cfg.tolerances.at("roundoff_floor")});

  // Charge table for constant generators.
  Json charges = Json::array();
  for (int a = 0; a < g.dim(); ++a) {
    Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(g.dim(), static_cast<Eigen::Index>(grid.site_count()));
    xi.row(a).setOnes();
    charges.push_back({{"generator", a}, {"charge", noether_charge(st, xi, grid, g)}});
  }
  rep.details = {{"algebra", g.name()},
                 {"sites", grid.site_count()},
                 {"final_time", st.time},
                 {"initial_energy", e0},
                 {"max_relative_drift", worst},
                 {"initial_gauss_norm", g0},
                 {"final_gauss_norm", gauss_residual(st, grid, g).norm},
                 {"charges", charges}};
  if (cfg.yangmills.census) {
    const CensusReport c = reduction_census(st, grid, g, true);
    rep.details["census"] = {{"phase_space_dim", c.phase_space_dim},
                             {"constraint_rank", c.constraint_rank},
                             {"orbit_rank", c.orbit_rank},
                             {"reduced_dim", c.reduced_dim},
                             {"near_reducible", c.near_reducible},
                             {"pca_reduced_dim", c.pca_reduced_dim},
                             {"pca_gauge_dim", c.pca_gauge_dim},
                             {"pca_stabilized", c.pca_stabilized}};
  }
  CsvTable snap({"field", "site", "direction", "algebra_index", "value"});
  gauge_rows(snap, "a", st.a, g.dim());
  gauge_rows(snap, "a0", st.a0, g.dim());
  gauge_rows(snap, "p", st.p, g.dim());
  gauge_rows(snap, "beta", st.beta, g.dim());
  files.emplace_back("series.csv", series.str());
  files.emplace_back("snapshot.csv", snap.str());
}

void run_pca(const RunConfig& cfg, RunReport& rep) {
  const std::string& ex = cfg.pca.example;
  if (ex == "regular" || ex == "two_step") {
    VerifyOptions opt;
    opt.seed = cfg.seed;
    opt.tolerances = cfg.tolerances;
    const CriterionResult res = verify_pca_exactness(opt);
    for (const auto& c : res.checks)
      if (c.name == (ex == "regular" ? "pca_regular_R4" : "pca_two_step_R3")) rep.add(c);
    rep.details = res.details[ex == "regular" ? "regular_R4" : "two_step_R3"];
    return;
  }
  const LatticeGrid grid = LatticeGrid::build(grid_description(cfg.grid));
  StreamRng rng(cfg.seed, "run.pca");
  PresymplecticSystem sys;
  Eigen::VectorXd x;
  int expected = -1;
  if (ex == "scalar") {
    const PotentialSpec pot = potential_of(cfg.scalar);
    sys = scalar_presymplectic_system(grid, pot);
    x = scalar_pack(on_constraint(scalar_initial(cfg.scalar, grid), zero_scalar(grid), grid));
    expected = 2 * static_cast<int>(grid.site_count());
  } else if (ex == "psigma") {
    if (grid.dim() != 1) throw ConfigError("the Poisson sigma-model runs on a 1D boundary grid");
    const PoissonStructure ps = poisson_of(cfg.psigma);
    sys = psm_presymplectic_system(grid, ps);
    x = rng.normal_vector(sys.n());
  } else {
    require_flat_grid(grid);
    const LieAlgebra g = LieAlgebra::from_name(cfg.yangmills.algebra);
    sys = ym_presymplectic_system(grid, g);
    x = ym_pack(gauge_initial(cfg, grid, g));
  }
  const PcaReport pca = pca_run(sys, x, cfg.pca.max_steps, cfg.tolerances.at("rank"));
  rep.add({"pca_stabilized", pca.stabilized ? 0.0 : 1.0, 0.0, pca.stabilized});
  if (expected >= 0)
    rep.add({"pca_reduced_dim", static_cast<double>(std::abs(pca.reduced_dim - expected)), 0.0, pca.reduced_dim == expected});
  rep.details = pca_json(pca);
  rep.details["state_dim"] = sys.n();
}

void run_verify(const RunConfig& cfg, const std::string& filter, RunReport& rep) {
  VerifyOptions opt;
  opt.seed = cfg.seed;
  opt.tolerances = cfg.tolerances;
  opt.filter = filter;
  const std::vector<CriterionResult> results = run_verify_suite(opt);
  for (const auto& c : results)
    for (auto rec : c.checks) {
      rec.name = "c" + std::to_string(c.id) + "." + c.key + "." + rec.name;
      rep.add(rec);
    }
  rep.details = {{"criteria", criteria_to_json(results)}};
}

}  // namespace

RunReport build_report(const RunConfig& config, const std::string& check_filter, Artifacts& files) {
  RunReport rep;
  rep.command = to_string(config.theory);
  rep.config_echo = echo_config(config, false);
  switch (config.theory) {
    case Theory::scalar: run_scalar(config, rep, files); break;
    case Theory::psigma: run_psigma(config, rep, files); break;
    case Theory::yangmills: run_yangmills(config, rep, files); break;
    case Theory::pca_demo: run_pca(config, rep); break;
    case Theory::verify_all: run_verify(config, check_filter, rep); break;
  }
  if (!check_filter.empty() && config.theory != Theory::verify_all) {
    std::vector<CertificateRecord> kept;
    for (const auto& c : rep.checks)
      if (c.name.find(check_filter) != std::string::npos) kept.push_back(c);
    rep.checks = kept;
  }
  for (const auto& f : files) rep.series_files.push_back(f.first);
  return rep;
}

RunOutcome run_experiment(const RunConfig& config, const std::string& output_dir, const std::string& check_filter) {
  namespace fs = std::filesystem;
  const auto t0 = std::chrono::steady_clock::now();
  Artifacts files;
  RunOutcome out;
  out.report = build_report(config, check_filter, files);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  const fs::path dir(output_dir);
  for (const auto& [name, content] : files) write_file((dir / name).string(), content);
  write_file((dir / "config.toml").string(), out.report.config_echo);
  out.report_path = (dir / "report.json").string();
  write_file(out.report_path, report_text(out.report));
  Json timing = {{"command", out.report.command}, {"wall_clock_seconds", seconds}};
  write_file((dir / "timing.json").string(), timing.dump(2) + "\n");
  out.exit_code = out.report.pass() ? 0 : 1;
  return out;
}

}  // namespace collar
