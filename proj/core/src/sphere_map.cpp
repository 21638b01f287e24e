#include "sphererig/sphere_map.hpp"

#include <cmath>
#include <string>

#include "sphererig/errors.hpp"

namespace sphererig {

SphereMap::SphereMap(GridPtr grid, std::vector<Vec3> values)
    : grid_(std::move(grid)), values_(std::move(values)), cache_(std::make_shared<Cache>()) {
  if (!grid_) throw InvalidArgument("SphereMap needs a grid");
  if (values_.size() != grid_->size()) {
    throw InvalidArgument("SphereMap value count " + std::to_string(values_.size()) +
                          " does not match grid size " + std::to_string(grid_->size()));
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double n = values_[k].norm();
    if (!(std::abs(n - 1.0) <= kUnitNormTolerance)) {
      throw InvalidArgument("SphereMap value at node " + std::to_string(k) +
                            " is not unit length (|u| = " + std::to_string(n) + ")");
    }
  }
}

const SHExpansion& SphereMap::expansion() const {
  std::call_once(cache_->expansion_once,
                 [this] { cache_->expansion = sh_analyze(as_field()); });
  return cache_->expansion;
}

const JacobianField& SphereMap::gradient() const {
  std::call_once(cache_->gradient_once,
                 [this] { cache_->gradient = jacobian_from_expansion(expansion()); });
  return cache_->gradient;
}

SphereMap normalize_to_sphere(const VectorField& raw) {
  std::vector<Vec3> values(raw.values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double n = raw.values[k].norm();
    if (!(n >= 1e-8)) {
      throw DegenerateMapError("cannot project onto the sphere: |value| = " +
                               std::to_string(n) + " at node " + std::to_string(k));
    }
    values[k] = raw.values[k] / n;
  }
  return SphereMap(raw.grid, std::move(values));
}

SphereMap identity_map(const GridPtr& grid) {
  return SphereMap(grid, grid->nodes());
}

std::vector<double> degree_density(const std::vector<Vec3>& values,
                                   const JacobianField& jacobian,
                                   const SphereGrid& grid) {
  std::vector<double> density(values.size());
  const auto& tau1 = grid.tau1();
  const auto& tau2 = grid.tau2();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Vec3 d1 = jacobian[k] * tau1[k];
    const Vec3 d2 = jacobian[k] * tau2[k];
    density[k] = values[k].dot(d1.cross(d2));
  }
  return density;
}

double degree(const SphereMap& u) {
  return grid_average(*u.grid(), degree_density(u.values(), u.gradient(), *u.grid()));
}

double dirichlet_energy(const SphereMap& u) {
  const auto& grad = u.gradient();
  std::vector<double> e(grad.size());
  for (std::size_t k = 0; k < grad.size(); ++k) e[k] = grad[k].squaredNorm();
  return 0.5 * grid_average(*u.grid(), e);
}

double deficit(const SphereMap& u) { return dirichlet_energy(u) - 1.0; }

double gradient_distance_sq(const JacobianField& du, const JacobianField& dv,
                            const SphereGrid& grid) {
  if (du.size() != grid.size() || dv.size() != grid.size()) {
    throw InvalidArgument("gradient fields do not match the grid");
  }
  std::vector<double> d(du.size());
  for (std::size_t k = 0; k < du.size(); ++k) d[k] = (du[k] - dv[k]).squaredNorm();
  return grid_average(grid, d);
}

double gradient_distance_sq(const SphereMap& u, const SphereMap& v) {
  if (!u.grid()->same_layout(*v.grid())) {
    throw InvalidArgument("gradient_distance_sq: maps live on different grids");
  }
  return gradient_distance_sq(u.gradient(), v.gradient(), *u.grid());
}

SphereMap reflect(const SphereMap& u) {
  std::vector<Vec3> values = u.values();
  for (auto& v : values) v[2] = -v[2];
  return SphereMap(u.grid(), std::move(values));
}

SphereMap rotate(const SphereMap& u, const Mat3& rotation) {
  std::vector<Vec3> values(u.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    values[k] = rotation * u.values()[k];
    values[k].normalize();
  }
  return SphereMap(u.grid(), std::move(values));
}

SphereMap compose_at_points(const SphereMap& u, std::span<const Vec3> preimages) {
  if (preimages.size() != u.size()) {
    throw InvalidArgument("compose_at_points: one preimage per node required");
  }
  VectorField raw{u.grid(), u.expansion().evaluate_vector(preimages)};
  return normalize_to_sphere(raw);
}

}  // namespace sphererig
