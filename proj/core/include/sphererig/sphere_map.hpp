#pragma once

#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "sphererig/grid.hpp"
#include "sphererig/harmonics.hpp"
#include "sphererig/types.hpp"

namespace sphererig {

/// Discretized map u: S^2 -> S^2, one unit vector per grid node.
///
/// The spectral expansion and the tangential Jacobian are filled lazily, once,
/// and shared between copies (values are immutable, so sharing is safe).
class SphereMap {
 public:
  // Throws InvalidArgument unless every value has unit norm within 1e-12.
  SphereMap(GridPtr grid, std::vector<Vec3> values);

  const GridPtr& grid() const { return grid_; }
  const std::vector<Vec3>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  // Spectral coefficients up to the grid's max degree.
  const SHExpansion& expansion() const;
  // Row i of each 3x3 entry is grad_{S^2} u_i at that node.
  const JacobianField& gradient() const;

  VectorField as_field() const { return {grid_, values_}; }

 private:
  struct Cache {
    std::once_flag expansion_once;
    std::once_flag gradient_once;
    SHExpansion expansion;
    JacobianField gradient;
  };

  GridPtr grid_;
  std::vector<Vec3> values_;
  std::shared_ptr<Cache> cache_;
};

inline constexpr double kUnitNormTolerance = 1e-12;

// Pointwise radial projection. Throws DegenerateMapError when some
// |raw| < 1e-8.
SphereMap normalize_to_sphere(const VectorField& raw);

SphereMap identity_map(const GridPtr& grid);

// mean <u, (grad u tau1) x (grad u tau2)>; real-valued, never rounded.
double degree(const SphereMap& u);

// 1/2 mean |grad u|^2 and the conformal deficit (energy - 1).
double dirichlet_energy(const SphereMap& u);
double deficit(const SphereMap& u);

// mean |grad u - grad v|^2. Throws InvalidArgument on grid mismatch.
double gradient_distance_sq(const SphereMap& u, const SphereMap& v);
double gradient_distance_sq(const JacobianField& du, const JacobianField& dv,
                            const SphereGrid& grid);

// Post-composition with x -> (x1, x2, -x3); flips the degree.
SphereMap reflect(const SphereMap& u);

// Post-composition with a rotation (R u).
SphereMap rotate(const SphereMap& u, const Mat3& rotation);

// u o g sampled at the grid: the truncated expansion of u is evaluated at
// g(node) (supplied as `preimages`) and re-normalized.
SphereMap compose_at_points(const SphereMap& u, std::span<const Vec3> preimages);

// Pointwise degree integrand <u, d_tau1 u x d_tau2 u> for any R^3 field.
std::vector<double> degree_density(const std::vector<Vec3>& values,
                                   const JacobianField& jacobian,
                                   const SphereGrid& grid);

}  // namespace sphererig
