#include "collar/presym.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace collar {

namespace {

struct SvdRank {
  int rank = 0;
  double kept = 1.0;
  double dropped = 0.0;
};

SvdRank rank_of(const Eigen::VectorXd& sv, double tol) {
  SvdRank r;
  const double smax = sv.size() > 0 ? sv[0] : 0.0;
  if (smax == 0.0) return r;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    const double rel = sv[i] / smax;
    if (rel > tol) {
      ++r.rank;
      r.kept = rel;
    } else {
      r.dropped = std::max(r.dropped, rel);
    }
  }
  return r;
}

Eigen::MatrixXd nullspace_with(const Eigen::MatrixXd& a, double tol, SvdRank* info) {
  const Eigen::Index n = a.cols();
  if (a.rows() == 0 || n == 0) {
    if (info) *info = SvdRank{};
    return Eigen::MatrixXd::Identity(n, n);
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const SvdRank r = rank_of(svd.singularValues(), tol);
  if (info) *info = r;
  return svd.matrixV().rightCols(n - r.rank);
}

bool is_skew(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  return (m + m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool near_threshold(const SvdRank& r, double tol) {
  return (r.rank > 0 && r.kept < 1e3 * tol) || (r.dropped > 1e-3 * tol);
}

}  // namespace

void PresymplecticSystem::validate() const {
  if (omega.rows() != omega.cols()) throw std::invalid_argument("omega must be square");
  if (!is_skew(omega)) throw std::invalid_argument("omega must be skew-symmetric");
  if (!gradient) throw std::invalid_argument("presymplectic system needs a gradient oracle");
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& a, double tol) {
  return nullspace_with(a, tol, nullptr);
}

int numerical_rank(const Eigen::MatrixXd& a, double tol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  return rank_of(svd.singularValues(), tol).rank;
}

Eigen::MatrixXd kernel_basis(const Eigen::MatrixXd& omega, double tol) {
  if (!is_skew(omega))
    throw std::invalid_argument("kernel_basis: omega must be square and skew-symmetric");
  if (!(tol > 0.0)) throw std::invalid_argument("kernel_basis: tol must be positive");
  return nullspace(omega, tol);
}

Eigen::MatrixXd hessian_at(const PresymplecticSystem& sys, const Eigen::VectorXd& x) {
  if (sys.hessian) return sys.hessian(x);
  const Eigen::Index n = x.size();
  const double step = 1e-4 * std::max(1.0, x.cwiseAbs().maxCoeff());
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < n; ++j) {
    xp[j] = x[j] + step;
    const Eigen::VectorXd gp = sys.gradient(xp);
    xp[j] = x[j] - step;
    const Eigen::VectorXd gm = sys.gradient(xp);
    xp[j] = x[j];
    h.col(j) = (gp - gm) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

double gradient_self_test(const PresymplecticSystem& sys, const Eigen::VectorXd& x,
                          const std::vector<Eigen::VectorXd>& directions) {
  const Eigen::VectorXd g = sys.gradient(x);
  double worst = 0.0;
  for (const auto& d : directions) {
    const double s = 1e-5 * std::max(1.0, x.cwiseAbs().maxCoeff()) / std::max(1e-300, d.norm());
    const double fd = (sys.hamiltonian(x + s * d) - sys.hamiltonian(x - s * d)) / (2.0 * s);
    const double exact = g.dot(d);
    const double scale = std::max({std::abs(exact), g.norm() * d.norm(), 1e-300});
    worst = std::max(worst, std::abs(fd - exact) / scale);
  }
  return worst;
}

Eigen::VectorXd primary_constraints(const PresymplecticSystem& sys, const Eigen::VectorXd& point,
                                    double tol) {
  sys.validate();
  const Eigen::MatrixXd z = kernel_basis(sys.omega, tol);
  return z.transpose() * sys.gradient(point);
}

PcaReport pca_run(const PresymplecticSystem& sys, const Eigen::VectorXd& point, int max_steps,
                  double tol) {
  sys.validate();
  const int n = sys.n();
  if (point.size() != n) throw std::invalid_argument("pca_run: point has wrong dimension");

  PcaReport report;
  Eigen::VectorXd x = point;
  // Frozen kernel vectors; the k-th constraint is c_k(x) = zs.col(k) . grad H(x).
  Eigen::MatrixXd zs(n, 0);
  Eigen::MatrixXd tangent = Eigen::MatrixXd::Identity(n, n);

  auto constraint_values = [&](const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return zs.transpose() * sys.gradient(y);
  };
  auto feasibility_scale = [&](const Eigen::VectorXd& y) {
    return std::max(1.0, sys.gradient(y).norm());
  };

  // Damped Gauss-Newton onto {c(x) = 0}; the minimum-norm step keeps the point close.
  auto project = [&]() {
    const Eigen::VectorXd start = x;
    Eigen::VectorXd c = constraint_values(x);
    for (int it = 0; it < 50 && c.norm() > 1e-13 * feasibility_scale(x); ++it) {
      const Eigen::MatrixXd jac = zs.transpose() * hessian_at(sys, x);
      const Eigen::VectorXd dx =
          jac.completeOrthogonalDecomposition().solve(-c);
      double lambda = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        const Eigen::VectorXd trial = x + lambda * dx;
        const Eigen::VectorXd ct = constraint_values(trial);
        if (ct.norm() < c.norm()) {
          x = trial;
          c = ct;
          accepted = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!accepted) break;
    }
    report.projection_distance = std::max(report.projection_distance, (x - start).norm());
    if (c.norm() > 1e-9 * feasibility_scale(x)) report.witness_feasible = false;
  };

  for (int k = 0; k <= max_steps; ++k) {
    const int dim_k = static_cast<int>(tangent.cols());
    PcaStep rec;
    rec.step = k;
    rec.dim = dim_k;

    const Eigen::MatrixXd restricted = tangent.transpose() * sys.omega * tangent;
    SvdRank kinfo;
    const Eigen::MatrixXd kernel_local = nullspace_with(restricted, tol, &kinfo);
    if (near_threshold(kinfo, tol)) {
      std::ostringstream os;
      os << "step " << k << ": kernel rank decision near threshold (kept " << kinfo.kept
         << ", dropped " << kinfo.dropped << ")";
      report.flags.push_back(os.str());
    }
    const Eigen::MatrixXd z = tangent * kernel_local;

    if (z.cols() == 0 || k == max_steps) {
      report.chain.push_back(rec);
      report.stabilized = z.cols() == 0;
      report.gauge_dim = static_cast<int>(z.cols());
      break;
    }

    // Linearized new constraints: gradients Hess(x) Z projected onto TM_k.
    const Eigen::MatrixXd hess = hessian_at(sys, x);
    const Eigen::MatrixXd grads = hess * z;
    const Eigen::MatrixXd projected = tangent.transpose() * grads;  // dim_k x |Z|
    SvdRank cinfo;
    Eigen::MatrixXd keep_local(dim_k, dim_k);
    {
      const Eigen::MatrixXd scaled = projected.transpose();
      // Scale by the Hessian magnitude so the relative threshold is meaningful even
      // when only some constraints are active.
      const double ref = std::max(hess.norm(), 1e-300);
      if (scaled.size() > 0) {
        Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeFullV);
        Eigen::VectorXd sv = svd.singularValues();
        SvdRank r;
        for (Eigen::Index i = 0; i < sv.size(); ++i) {
          const double rel = sv[i] / ref;
          if (rel > tol) {
            ++r.rank;
            r.kept = rel;
          } else {
            r.dropped = std::max(r.dropped, rel);
          }
        }
        cinfo = r;
        keep_local = svd.matrixV().rightCols(dim_k - r.rank);
      } else {
        keep_local = Eigen::MatrixXd::Identity(dim_k, dim_k);
      }
    }
    rec.new_constraints = cinfo.rank;
    rec.kept_margin = cinfo.kept;
    rec.dropped_margin = cinfo.dropped;
    if (near_threshold(cinfo, tol)) {
      std::ostringstream os;
      os << "step " << k << ": constraint rank decision near threshold (kept " << cinfo.kept
         << ", dropped " << cinfo.dropped << ")";
      report.flags.push_back(os.str());
    }
    report.chain.push_back(rec);

    // Register the new constraints and make sure the witness satisfies them.
    Eigen::MatrixXd grown(n, zs.cols() + z.cols());
    grown << zs, z;
    zs = std::move(grown);
    const Eigen::VectorXd c = constraint_values(x);
    if (c.size() > 0 && c.norm() > 1e-12 * feasibility_scale(x)) project();

    if (cinfo.rank == 0) {
      report.stabilized = true;
      report.gauge_dim = static_cast<int>(z.cols());
      break;
    }
    tangent = tangent * keep_local;
  }

  const int dim_inf = report.chain.empty() ? n : report.chain.back().dim;
  report.reduced_dim = dim_inf - report.gauge_dim;
  report.witness_point = x;
  return report;
}

RegularityReport check_regularity(const PresymplecticSystem& sys, const Eigen::VectorXd& point,
                                  const std::optional<std::vector<int>>& beta_block, double tol) {
  sys.validate();
  const Eigen::MatrixXd hess = hessian_at(sys, point);
  Eigen::MatrixXd block;
  if (beta_block) {
    const auto m = static_cast<Eigen::Index>(beta_block->size());
    block.resize(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) block(i, j) = hess((*beta_block)[i], (*beta_block)[j]);
  } else {
    const Eigen::MatrixXd z = kernel_basis(sys.omega, tol);
    block = z.transpose() * hess * z;
  }
  RegularityReport out;
  if (block.size() == 0) {
    out.regular = true;
    out.condition_number = 1.0;
    out.smallest_singular_value = 0.0;
    return out;
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(block);
  const Eigen::VectorXd sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  out.smallest_singular_value = smin;
  out.regular = smax > 0.0 && smin > tol * smax;
  out.condition_number = smin > 0.0 ? smax / smin : INFINITY;
  return out;
}

DynamicsSolution solve_dynamics(const PresymplecticSystem& sys, const Eigen::VectorXd& point) {
  sys.validate();
  const Eigen::VectorXd g = sys.gradient(point);
  const Eigen::MatrixXd a = sys.omega.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kDefaultRankTol);
  DynamicsSolution out;
  out.velocity = svd.solve(g);
  const double gn = g.norm();
  out.consistency_residual = gn > 0.0 ? (a * out.velocity - g).norm() / gn : 0.0;
  return out;
}

}  // namespace collar
