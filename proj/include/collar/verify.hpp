#pragma once

/// @file verify.hpp
/// @brief The verification suite: one function per acceptance criterion, each
/// returning named check records plus the raw numbers behind them.

#include "collar/analysis.hpp"
#include "collar/config.hpp"
#include "collar/presym.hpp"
#include "collar/report.hpp"
#include "collar/rng.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace collar {

struct VerifyOptions {
  std::uint64_t seed = 20240611;
  std::map<std::string, double> tolerances = default_tolerances();
  std::string filter;  // substring of the criterion key; empty runs everything

  double tol(const std::string& name) const;
};

struct CriterionResult {
  int id = 0;
  std::string key;
  std::vector<CertificateRecord> checks;
  Json details = Json::object();

  bool pass() const;
};

struct CriterionSpec {
  int id;
  std::string key;
  std::function<CriterionResult(const VerifyOptions&)> run;
};

/// Criteria 1-10 in order. Criterion 11 (determinism) lives in run_verify_suite.
const std::vector<CriterionSpec>& criteria();

CriterionResult verify_pca_exactness(const VerifyOptions& opt);
CriterionResult verify_regularity(const VerifyOptions& opt);
CriterionResult verify_scalar_convergence(const VerifyOptions& opt);
CriterionResult verify_energy(const VerifyOptions& opt);
CriterionResult verify_symplecticity(const VerifyOptions& opt);
CriterionResult verify_noether(const VerifyOptions& opt);
CriterionResult verify_gauss(const VerifyOptions& opt);
CriterionResult verify_coisotropy(const VerifyOptions& opt);
CriterionResult verify_generating_functional(const VerifyOptions& opt);
CriterionResult verify_census(const VerifyOptions& opt);

Json criteria_to_json(const std::vector<CriterionResult>& results);

/// Runs the selected criteria twice and adds a determinism record comparing the
/// serialized results byte for byte.
std::vector<CriterionResult> run_verify_suite(const VerifyOptions& opt);

// Reference systems and helpers shared with the runner.

/// R^4 (q, p, b1, b2), Omega = dq ^ dp, H = p^2/2 + (b1^2 + b2^2)/2 + q b1.
PresymplecticSystem regular_example_system();
/// R^3 (q, p, b), Omega = dq ^ dp, H = p^2/2 + q b.
PresymplecticSystem two_step_example_system();

/// Observed orders log2(e_i / e_{i+1}) for successive halvings.
std::vector<double> observed_orders(const std::vector<double>& errors);

/// Pass if every error sits below floor (value = largest error, tolerance = floor),
/// otherwise if every observed order reaches target (value = smallest order).
CertificateRecord convergence_record(const std::string& name, const std::vector<double>& errors,
                                     double target_order, double floor);

/// Sum of low Fourier modes (|m| <= max_mode per axis) with normal coefficients.
Eigen::VectorXd random_smooth_field(const LatticeGrid& grid, StreamRng& rng, int max_mode = 2);

/// Removes the component of p that violates the Gauss law, by a minimum-norm correction.
Eigen::MatrixXd project_gauss(const Eigen::MatrixXd& p, const Eigen::MatrixXd& a, const LatticeGrid& grid,
                              const LieAlgebra& algebra);

}  // namespace collar
