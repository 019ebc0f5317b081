#pragma once

/// @file analysis.hpp
/// @brief Boundary symplectic form, canonical 1-form and the numerical
/// certificates built on them (two-time symplecticity, generating functional).

#include "collar/lattice.hpp"
#include "collar/lie_algebra.hpp"
#include "collar/scalar.hpp"
#include "collar/yangmills.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace collar {

/// Quadrature plus fiber metric used to contract boundary fields. Fields are
/// (blocks * n) x sites matrices; every n-row block is contracted with `fiber`.
struct BoundaryPairing {
  Eigen::VectorXd weights;
  Eigen::MatrixXd fiber;

  static BoundaryPairing scalar(const LatticeGrid& grid);
  /// Identity fiber of size n (target coordinates of a sigma model, say).
  static BoundaryPairing euclidean(const LatticeGrid& grid, int n);
  static BoundaryPairing gauge(const LatticeGrid& grid, const LieAlgebra& algebra);

  double operator()(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
};

/// A tangent vector (dphi, dp) on one boundary component. component_sign is +1 on
/// the outgoing end (t = 0) and -1 on the incoming one (t = -eps).
struct BoundaryTangent {
  Eigen::MatrixXd dphi;
  Eigen::MatrixXd dp;
  int component_sign = 1;
};

BoundaryTangent scalar_tangent(const Eigen::VectorXd& dphi, const Eigen::VectorXd& dp, int sign = 1);

/// sign * (<d1 phi, d2 p> - <d2 phi, d1 p>).
double omega_boundary(const BoundaryTangent& u1, const BoundaryTangent& u2, const BoundaryPairing& pairing);

/// sign * <p, dphi>.
double canonical_alpha(const Eigen::MatrixXd& p, const BoundaryTangent& u, const BoundaryPairing& pairing);

/// d(alpha)(U, V) for constant vector fields, by differencing alpha along U and V
/// from the point p. Linear in p, so the differences are exact: omega = -d alpha.
double alpha_differential(const Eigen::MatrixXd& p, const BoundaryTangent& u, const BoundaryTangent& v,
                          const BoundaryPairing& pairing);

/// Infinitesimal gauge generator (d_a xi, [p, xi]) as a boundary tangent.
BoundaryTangent gauge_generator(const GaugeBoundaryState& state, const Eigen::MatrixXd& xi,
                                const LatticeGrid& grid, const LieAlgebra& algebra);

struct CertificateRecord {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Flow of boundary data across the collar: (phi, p) at t = -eps to (phi, p) at t = 0.
using PhasePoint = std::pair<Eigen::MatrixXd, Eigen::MatrixXd>;
using CollarFlow = std::function<PhasePoint(const PhasePoint&)>;

struct SymplecticityReport {
  std::vector<double> pair_values;  // relative two-time defect per pair
  double max_relative = 0.0;
  CertificateRecord record;
};

/// Pushes each pair of incoming tangents through the flow by centered differences
/// with step theta, Richardson-extrapolated against theta/2, and measures
/// omega_out(T U1, T U2) + omega_in(U1, U2) relative to |U1| |U2|.
SymplecticityReport symplecticity_certificate(const CollarFlow& flow, const PhasePoint& base,
                                              const std::vector<std::pair<BoundaryTangent, BoundaryTangent>>& pairs,
                                              const BoundaryPairing& pairing, double theta,
                                              double tolerance, const std::string& name);

struct GeneratingFunctionalReport {
  double action = 0.0;
  std::vector<double> probe_errors;  // relative |dW(d) - <p, d>|
  double max_probe_error = 0.0;
  double dn_symmetry = 0.0;          // relative asymmetry of the second variation
  CertificateRecord probe_record;
  CertificateRecord symmetry_record;
};

/// Euclidean free-field check that the on-shell action W(bottom, top) generates the
/// boundary momenta: dW = <p_top, d top> - <p_bot, d bottom>. Each probe is a pair of
/// directions (bottom, top). The second variation is assembled column by column.
GeneratingFunctionalReport generating_functional_check(
    const ScalarLatticeField& bottom, const ScalarLatticeField& top, const LatticeGrid& grid,
    const PotentialSpec& potential, double epsilon, int steps,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& probes, double theta,
    double probe_tolerance, double symmetry_tolerance);

}  // namespace collar
