#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Core>

#include "sphererig/grid.hpp"
#include "sphererig/sphere_map.hpp"
#include "sphererig/types.hpp"

namespace sphererig {

using Vec2 = Eigen::Vector2d;

// Orthonormal basis (e1, e2) of the tangent plane at xi with e1 x e2 = xi.
std::pair<Vec3, Vec3> tangent_basis(const Vec3& xi);

// Stereographic projection from -xi onto the tangent plane at xi, in the
// coordinates of tangent_basis(xi). xi -> 0; the great circle orthogonal to
// xi lands on the circle of radius 2. Throws PoleError within 1e-10 of -xi.
Vec2 stereo(const Vec3& xi, const Vec3& x);
Vec3 stereo_inv(const Vec3& xi, const Vec2& p);

// phi_{xi,lambda} = stereo_inv o (p -> lambda p) o stereo, in closed form
// (well defined at -xi as well).
Vec3 dilate(const Vec3& xi, double lambda, const Vec3& x);

// Conformal factor |d phi_{xi,lambda}(x) v| / |v|.
double dilation_conformal_factor(const Vec3& xi, double lambda, const Vec3& x);

/// Orientation-preserving Moebius transformation x -> R phi_{xi,lambda}(x).
///
/// The (xi, lambda) pair is not unique: phi_{xi,lambda} = phi_{-xi,1/lambda},
/// and lambda = 1 leaves xi free. Equality is therefore tested on the action
/// (see max_deviation), never on the parameters.
class MoebiusTransform {
 public:
  MoebiusTransform() = default;
  // Validates R in SO(3), |xi| = 1 (both within 1e-12) and lambda > 0.
  MoebiusTransform(const Mat3& rotation, const Vec3& xi, double lambda);

  static MoebiusTransform identity();
  static MoebiusTransform rotation(const Mat3& r);
  static MoebiusTransform dilation(const Vec3& xi, double lambda);
  // Boost coordinates b = -log(lambda) xi: smooth chart around the identity,
  // b = 0 is the identity, |b| -> infinity is bubbling.
  static MoebiusTransform from_boost(const Mat3& rotation, const Vec3& boost);

  const Mat3& R() const { return rotation_; }
  const Vec3& xi() const { return xi_; }
  double lambda() const { return lambda_; }
  Vec3 boost() const { return -std::log(lambda_) * xi_; }

  Vec3 apply(const Vec3& x) const;
  double conformal_factor(const Vec3& x) const;

  // R(9, row-major) xi(3) lambda(1), space separated, 17 significant digits.
  std::array<double, 13> parameters() const;
  std::string to_line() const;
  static MoebiusTransform from_line(const std::string& line);

 private:
  Mat3 rotation_ = Mat3::Identity();
  Vec3 xi_ = Vec3::UnitZ();
  double lambda_ = 1.0;
};

SphereMap as_map(const MoebiusTransform& phi, const GridPtr& grid);

// Numerical composition a o b refit to (R, xi, lambda). The reciprocal
// conformal factor of any phi_{xi,lambda} is affine in x, which pins
// (xi, lambda) by linear least squares; R then follows by a Kabsch fit.
// Throws RepresentationError when the refit misses sample images by > 1e-8.
MoebiusTransform compose(const MoebiusTransform& a, const MoebiusTransform& b);
MoebiusTransform inverse(const MoebiusTransform& a);

// max over a fixed spherical sample of |a(x) - b(x)|.
double max_deviation(const MoebiusTransform& a, const MoebiusTransform& b);

// u o phi by spectral interpolation (see compose_at_points).
SphereMap compose_map(const SphereMap& u, const MoebiusTransform& phi);

// Uniform rotation, uniform xi, log-uniform lambda in [lo, hi] (within
// [1/10, 10]). Deterministic per seed.
MoebiusTransform random_moebius(std::uint64_t seed, double lambda_lo, double lambda_hi);

// Fibonacci points, used for sampling-based fits and comparisons.
std::vector<Vec3> fibonacci_sphere(int n);

}  // namespace sphererig
