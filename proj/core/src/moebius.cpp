#include "sphererig/moebius.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "sphererig/errors.hpp"
#include "sphererig/map_io.hpp"

namespace sphererig {

std::pair<Vec3, Vec3> tangent_basis(const Vec3& xi) {
  const Vec3 seed = std::abs(xi[0]) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = (seed - seed.dot(xi) * xi).normalized();
  return {e1, xi.cross(e1)};
}

Vec2 stereo(const Vec3& xi, const Vec3& x) {
  if ((x + xi).norm() <= 1e-10) {
    throw PoleError("stereographic projection evaluated at its pole -xi");
  }
  const auto [e1, e2] = tangent_basis(xi);
  const double scale = 2.0 / (1.0 + x.dot(xi));
  return {scale * x.dot(e1), scale * x.dot(e2)};
}

Vec3 stereo_inv(const Vec3& xi, const Vec2& p) {
  const auto [e1, e2] = tangent_basis(xi);
  const double r2 = p.squaredNorm();
  return (((4.0 - r2) * xi + 4.0 * (p[0] * e1 + p[1] * e2)) / (4.0 + r2)).normalized();
}

Vec3 dilate(const Vec3& xi, double lambda, const Vec3& x) {
  const double s = x.dot(xi);
  const Vec3 y = x - s * xi;
  const double a = 1.0 + s;
  const double b = lambda * lambda * (1.0 - s);
  return (((a - b) * xi + 2.0 * lambda * y) / (a + b)).normalized();
}

double dilation_conformal_factor(const Vec3& xi, double lambda, const Vec3& x) {
  const double s = x.dot(xi);
  return 2.0 * lambda / ((1.0 + s) + lambda * lambda * (1.0 - s));
}

MoebiusTransform::MoebiusTransform(const Mat3& rotation, const Vec3& xi, double lambda)
    : rotation_(rotation), xi_(xi), lambda_(lambda) {
  if ((rotation.transpose() * rotation - Mat3::Identity()).norm() > 1e-12 ||
      std::abs(rotation.determinant() - 1.0) > 1e-12) {
    throw InvalidArgument("MoebiusTransform: rotation factor is not in SO(3)");
  }
  if (std::abs(xi.norm() - 1.0) > 1e-12) {
    throw InvalidArgument("MoebiusTransform: xi must be a unit vector");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("MoebiusTransform: lambda must be positive and finite");
  }
}

MoebiusTransform MoebiusTransform::identity() { return {}; }

MoebiusTransform MoebiusTransform::rotation(const Mat3& r) {
  return MoebiusTransform(r, Vec3::UnitZ(), 1.0);
}

MoebiusTransform MoebiusTransform::dilation(const Vec3& xi, double lambda) {
  return MoebiusTransform(Mat3::Identity(), xi, lambda);
}

MoebiusTransform MoebiusTransform::from_boost(const Mat3& rotation, const Vec3& boost) {
  const double t = boost.norm();
  if (t == 0.0) return MoebiusTransform(rotation, Vec3::UnitZ(), 1.0);
  return MoebiusTransform(rotation, boost / t, std::exp(-t));
}

Vec3 MoebiusTransform::apply(const Vec3& x) const {
  return rotation_ * dilate(xi_, lambda_, x);
}

double MoebiusTransform::conformal_factor(const Vec3& x) const {
  return dilation_conformal_factor(xi_, lambda_, x);
}

std::array<double, 13> MoebiusTransform::parameters() const {
  std::array<double, 13> p{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p[3 * r + c] = rotation_(r, c);
  for (int i = 0; i < 3; ++i) p[9 + i] = xi_[i];
  p[12] = lambda_;
  return p;
}

std::string MoebiusTransform::to_line() const {
  std::string out;
  for (double v : parameters()) {
    if (!out.empty()) out += ' ';
    out += format_double(v);
  }
  return out;
}

MoebiusTransform MoebiusTransform::from_line(const std::string& line) {
  std::istringstream is(line);
  std::array<double, 13> p{};
  for (auto& v : p) {
    std::string tok;
    if (!(is >> tok)) throw InvalidArgument("transform line needs 13 numbers");
    v = std::stod(tok);
  }
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < 3; ++c) r(i, c) = p[3 * i + c];
  return MoebiusTransform(r, Vec3(p[9], p[10], p[11]), p[12]);
}

SphereMap as_map(const MoebiusTransform& phi, const GridPtr& grid) {
  std::vector<Vec3> values;
  values.reserve(grid->size());
  for (const auto& x : grid->nodes()) values.push_back(phi.apply(x));
  return SphereMap(grid, std::move(values));
}

std::vector<Vec3> fibonacci_sphere(int n) {
  std::vector<Vec3> pts(n);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - (2.0 * i + 1.0) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts[i] = Vec3(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

MoebiusTransform compose(const MoebiusTransform& a, const MoebiusTransform& b) {
  const auto samples = fibonacci_sphere(64);
  const int n = static_cast<int>(samples.size());

  Eigen::MatrixXd design(n, 4);
  Eigen::VectorXd rhs(n);
  std::vector<Vec3> images(n);
  for (int i = 0; i < n; ++i) {
    const Vec3& x = samples[i];
    const Vec3 bx = b.apply(x);
    images[i] = a.apply(bx);
    const double c = a.conformal_factor(bx) * b.conformal_factor(x);
    design.row(i) << 1.0, x[0], x[1], x[2];
    rhs[i] = 1.0 / c;
  }
  // 1/c(x) = (1 + l^2)/(2l) + <x, xi> (1 - l^2)/(2l)
  const Eigen::Vector4d fit = design.colPivHouseholderQr().solve(rhs);
  const double alpha = fit[0];
  const Vec3 beta = fit.tail<3>();
  const double bn = beta.norm();

  Vec3 xi = b.xi();
  double lambda = 1.0;
  if (bn > 1e-12) {
    const Vec3 dir = beta / bn;
    // keep the representative whose fixed point agrees with b's
    if (dir.dot(b.xi()) >= 0.0) {
      xi = dir;
      lambda = 1.0 / (alpha + bn);
    } else {
      xi = -dir;
      lambda = alpha + bn;
    }
  }

  // Kabsch: rotation taking phi_{xi,lambda}(x) onto (a o b)(x).
  Mat3 cov = Mat3::Zero();
  std::vector<Vec3> pre(n);
  for (int i = 0; i < n; ++i) {
    pre[i] = dilate(xi, lambda, samples[i]);
    cov += images[i] * pre[i].transpose();
  }
  Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 fix = Mat3::Identity();
  fix(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Mat3 r = svd.matrixU() * fix * svd.matrixV().transpose();

  double residual = 0.0;
  for (int i = 0; i < n; ++i) residual = std::max(residual, (r * pre[i] - images[i]).norm());
  if (residual > 1e-8) {
    throw RepresentationError("composite transform refit residual " + std::to_string(residual),
                              residual);
  }
  return MoebiusTransform(r, xi, lambda);
}

MoebiusTransform inverse(const MoebiusTransform& a) {
  Vec3 xi = a.R() * a.xi();
  xi.normalize();
  return MoebiusTransform(a.R().transpose(), xi, 1.0 / a.lambda());
}

double max_deviation(const MoebiusTransform& a, const MoebiusTransform& b) {
  double dev = 0.0;
  for (const auto& x : fibonacci_sphere(200)) dev = std::max(dev, (a.apply(x) - b.apply(x)).norm());
  return dev;
}

SphereMap compose_map(const SphereMap& u, const MoebiusTransform& phi) {
  std::vector<Vec3> pre;
  pre.reserve(u.size());
  for (const auto& x : u.grid()->nodes()) pre.push_back(phi.apply(x));
  return compose_at_points(u, pre);
}

MoebiusTransform random_moebius(std::uint64_t seed, double lambda_lo, double lambda_hi) {
  constexpr double kSlack = 1e-12;
  if (!(lambda_lo > 0.0) || lambda_lo > lambda_hi || lambda_lo < 0.1 - kSlack ||
      lambda_hi > 10.0 + kSlack) {
    throw InvalidArgument("random_moebius: lambda range must lie within [1/10, 10]");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::Quaterniond q(normal(rng), normal(rng), normal(rng), normal(rng));
  q.normalize();
  const Mat3 r = q.toRotationMatrix();
  Vec3 xi(normal(rng), normal(rng), normal(rng));
  xi.normalize();
  double lambda = lambda_lo;
  if (lambda_hi > lambda_lo) {
    std::uniform_real_distribution<double> u(std::log(lambda_lo), std::log(lambda_hi));
    lambda = std::exp(u(rng));
  }
  return MoebiusTransform(r, xi, lambda);
}

}  // namespace sphererig
