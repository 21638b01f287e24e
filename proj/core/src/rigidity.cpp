#include "sphererig/rigidity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "sphererig/errors.hpp"

namespace sphererig {

namespace {

Mat3 tangent_projector(const Vec3& x) { return Mat3::Identity() - x * x.transpose(); }

JacobianField projector_field(const SphereGrid& grid, const Mat3& left) {
  JacobianField out(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) out[k] = left * tangent_projector(grid.nodes()[k]);
  return out;
}

}  // namespace

Mat3 linear_coefficient(const SphereMap& u) {
  const SphereGrid& grid = *u.grid();
  const Vec3 b = mean(u.as_field());
  if (b.norm() > 1e-6) {
    throw InvalidArgument("linear_coefficient: map is not centered (|mean u| = " +
                          std::to_string(b.norm()) + ")");
  }
  Mat3 a;
  std::vector<double> prod(grid.size());
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < grid.size(); ++k) {
        prod[k] = u.values()[k][i] * grid.nodes()[k][j];
      }
      a(i, j) = 3.0 * grid_average(grid, prod);
    }
  }
  return a;
}

Mat3 linear_coefficient_spectral(const SphereMap& u) {
  const SHExpansion& e = u.expansion();
  const double s3 = std::sqrt(3.0);
  Mat3 a;
  for (int i = 0; i < 3; ++i) {
    a(i, 0) = s3 * e.coeff(i, 1, 1);
    a(i, 1) = s3 * e.coeff(i, 1, -1);
    a(i, 2) = s3 * e.coeff(i, 1, 0);
  }
  return a;
}

PolarData polar_decompose(const Mat3& A) {
  const double det = A.determinant();
  if (!(det > 0.0)) {
    throw OutOfRegime("polar_decompose: det A = " + std::to_string(det) + " is not positive");
  }
  Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Mat3& U = svd.matrixU();
  const Mat3& V = svd.matrixV();
  const Vec3 sigma = svd.singularValues();  // descending

  PolarData p;
  p.A = A;
  p.R0 = U * V.transpose();
  p.S = V * sigma.asDiagonal() * V.transpose();
  p.alpha = Vec3(sigma[2], sigma[1], sigma[0]);
  p.shifts = p.alpha - Vec3::Ones();
  p.lambda_sum = p.shifts.sum();
  p.Lambda_sq = p.shifts.squaredNorm();
  p.detA = det;
  return p;
}

double det_from_shifts(const PolarData& p) {
  const double l = p.lambda_sum;
  return 1.0 + l + 0.5 * (l * l - p.Lambda_sq) + p.shifts[0] * p.shifts[1] * p.shifts[2];
}

bool in_regime(const Mat3& A) {
  const double det = A.determinant();
  if (!(det > 0.0)) return false;
  return A.inverse().squaredNorm() <= 4.0;
}

VectorField w_field(const SphereMap& u, const Mat3& A) {
  if (!in_regime(A)) {
    throw OutOfRegime("w_field: A is singular, orientation reversing or |A^-1|^2 > 4");
  }
  const Mat3 inv = A.inverse();
  VectorField w{u.grid(), std::vector<Vec3>(u.size())};
  for (std::size_t k = 0; k < u.size(); ++k) {
    w.values[k] = inv * u.values()[k] - u.grid()->nodes()[k];
  }
  return w;
}

double qv3(const VectorField& w, const JacobianField& dw) {
  const SphereGrid& grid = *w.grid;
  std::vector<double> integrand(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec3& x = grid.nodes()[k];
    const Vec3 v = dw[k].trace() * x - dw[k].transpose() * x;
    integrand[k] = w.values[k].dot(v);
  }
  return 1.5 * grid_average(grid, integrand);
}

double qv3(const VectorField& w) { return qv3(w, tangential_gradient(w)); }

double cubic_term(const VectorField& w, const JacobianField& dw) {
  return grid_average(*w.grid, degree_density(w.values, dw, *w.grid));
}

double cubic_term(const VectorField& w) { return cubic_term(w, tangential_gradient(w)); }

Bound wente_check(const VectorField& w) {
  const auto dw = tangential_gradient(w);
  std::vector<double> e(dw.size());
  for (std::size_t k = 0; k < dw.size(); ++k) e[k] = dw[k].squaredNorm();
  const double half_energy = 0.5 * grid_average(*w.grid, e);
  return {std::abs(cubic_term(w, dw)), std::pow(std::max(half_energy, 0.0), 1.5)};
}

double degree_identity_residual(const SphereMap& u, const Mat3& A) {
  const VectorField w = w_field(u, A);
  const auto dw = tangential_gradient(w);
  return std::abs(A.determinant() * (1.0 + qv3(w, dw) + cubic_term(w, dw)) - 1.0);
}

Bound poincare_gap_check(const SphereMap& u, const Mat3& A) {
  const double lhs =
      gradient_distance_sq(u.gradient(), projector_field(*u.grid(), A), *u.grid());
  return {lhs, 3.0 * deficit(u)};
}

RigidityConstants rigidity_constants(double theta) {
  const double s2 = std::numbers::sqrt2;
  if (!(theta >= 0.0) || !(0.5 - theta / (3.0 * s2) >= 0.25 - 1e-15)) {
    throw InvalidArgument("rigidity_constants: theta must satisfy 0 <= theta <= 3 sqrt2 / 4");
  }
  const double t2 = 1.0 + theta * theta;
  const double c1 = 6.0 * (1.0 + 0.75 * t2 + (18.0 + 4.0 * std::sqrt(27.0 * t2)) / s2);
  return {c1, 6.0 + (2.0 / 3.0) * c1};
}

std::string to_string(ReportStatus s) {
  switch (s) {
    case ReportStatus::ok: return "ok";
    case ReportStatus::out_of_regime: return "out-of-regime";
    case ReportStatus::centering_failed: return "centering-failed";
    case ReportStatus::inadmissible: return "inadmissible";
  }
  return "unknown";
}

RigidityReport analyze(const SphereMap& u, double theta, const AnalyzeOptions& options) {
  RigidityReport rep;
  rep.theta = theta;
  const auto constants = rigidity_constants(theta);
  rep.c1 = constants.c1;
  rep.c = constants.c;

  rep.degree = degree(u);
  const double tol = options.centering.degree_tolerance;
  std::optional<SphereMap> reflected;
  if (std::abs(rep.degree + 1.0) <= tol) {
    reflected.emplace(reflect(u));
    rep.reflected = true;
  } else if (!(std::abs(rep.degree - 1.0) <= tol)) {
    rep.status = ReportStatus::inadmissible;
    rep.message = "degree " + std::to_string(rep.degree) + " is not +-1";
    rep.deficit = deficit(u);
    return rep;
  }
  const SphereMap& work = reflected ? *reflected : u;
  rep.deficit = deficit(work);

  CenteringResult centering;
  try {
    centering = center_map(work, options.centering);
  } catch (const CenteringFailure& e) {
    rep.status = ReportStatus::centering_failed;
    rep.message = e.what();
    rep.centering_residual = e.best_residual();
    return rep;
  }
  rep.psi = centering.psi;
  rep.centering_residual = centering.residual.norm();
  rep.centering_iterations = centering.iterations;

  const SphereMap centered = compose_map(work, centering.psi);
  rep.centered_deficit = deficit(centered);
  rep.A = linear_coefficient(centered);

  const SphereGrid& grid = *work.grid();
  rep.closeness_raw =
      gradient_distance_sq(centered.gradient(), projector_field(grid, Mat3::Identity()), grid);

  const auto gap = poincare_gap_check(centered, rep.A);
  rep.poincare_lhs = gap.lhs;
  rep.poincare_bound = gap.rhs;

  try {
    rep.polar = polar_decompose(rep.A);
  } catch (const OutOfRegime& e) {
    rep.status = ReportStatus::out_of_regime;
    rep.message = e.what();
    return rep;
  }
  const Mat3& r0 = rep.polar->R0;
  rep.closeness = gradient_distance_sq(centered.gradient(), projector_field(grid, r0), grid);
  rep.in_gate = rep.closeness <= theta * theta;
  rep.trivial_bound = rep.deficit <= 1.0 + theta * theta;

  rep.regime = in_regime(rep.A);
  if (rep.regime) {
    const VectorField w = w_field(centered, rep.A);
    const auto dw = tangential_gradient(w);
    std::vector<double> e(dw.size());
    for (std::size_t k = 0; k < dw.size(); ++k) e[k] = dw[k].squaredNorm();
    rep.w_norm_sq = grid_average(grid, e);
    rep.qv3 = qv3(w, dw);
    rep.cubic = cubic_term(w, dw);
    rep.wente_rhs = std::pow(0.5 * rep.w_norm_sq, 1.5);
    rep.identity_residual = std::abs(rep.polar->detA * (1.0 + rep.qv3 + rep.cubic) - 1.0);
  } else {
    rep.status = ReportStatus::out_of_regime;
    rep.message = "|A^-1|^2 > 4: local estimates do not apply";
  }

  rep.phi = compose(MoebiusTransform::rotation(r0), inverse(centering.psi));
  rep.lhs = gradient_distance_sq(work, as_map(*rep.phi, work.grid()));
  if (rep.deficit > kZeroDeficit) rep.ratio = rep.lhs / rep.deficit;
  rep.certified = rep.regime && rep.in_gate;

  if (options.optimize) {
    rep.phi_opt = best_moebius(work, *rep.phi);
    rep.lhs_opt = gradient_distance_sq(work, as_map(*rep.phi_opt, work.grid()));
  }
  return rep;
}

MoebiusTransform best_moebius(const SphereMap& u, const MoebiusTransform& initial,
                              int max_sweeps) {
  const Mat3 r_init = initial.R();
  const Vec3 b_init = initial.boost();
  using Params = Eigen::Matrix<double, 6, 1>;

  auto build = [&](const Params& p) {
    const Vec3 omega = p.head<3>();
    const double angle = omega.norm();
    Mat3 r = r_init;
    if (angle > 0.0) r = Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix() * r_init;
    return MoebiusTransform::from_boost(r, b_init + p.tail<3>());
  };
  auto objective = [&](const Params& p) {
    try {
      return gradient_distance_sq(u, as_map(build(p), u.grid()));
    } catch (const std::exception&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  Params best = Params::Zero();
  double f_best = objective(best);
  const double f_initial = f_best;
  double h = 0.05;
  for (int sweep = 0; sweep < max_sweeps && h > 1e-7 && f_best > 1e-16; ++sweep) {
    const double f_start = f_best;
    for (int i = 0; i < 6; ++i) {
      Params pm = best, pp = best;
      pm[i] -= h;
      pp[i] += h;
      const double fm = objective(pm), fp = objective(pp);
      Params cand = best;
      double f_cand = f_best;
      if (fm < f_cand) { cand = pm; f_cand = fm; }
      if (fp < f_cand) { cand = pp; f_cand = fp; }
      const double curv = fp + fm - 2.0 * f_best;
      if (curv > 0.0 && std::isfinite(curv)) {
        const double step = std::clamp(0.5 * h * (fm - fp) / curv, -2.0 * h, 2.0 * h);
        Params pq = best;
        pq[i] += step;
        const double fq = objective(pq);
        if (fq < f_cand) { cand = pq; f_cand = fq; }
      }
      best = cand;
      f_best = f_cand;
    }
    if (f_best > f_start * (1.0 - 1e-3)) h *= 0.25;
  }
  if (best.isZero() || !(f_best <= f_initial)) return initial;
  return build(best);
}

}  // namespace sphererig
