#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "sphererig/types.hpp"

namespace sphererig {

class SHBasis;

/// Gauss-Legendre (in cos colatitude) x equispaced longitude grid on S^2.
///
/// Node k = i * n_phi + j sits at colatitude theta_i and longitude
/// phi_j = 2 pi j / n_phi. Weights average rather than integrate: they sum
/// to 1, so every integral in this library is a mean over the sphere.
/// tau1 = d/dtheta and tau2 = d/dphi / sin(theta), which gives
/// tau1 x tau2 = x (outward normal). Gauss nodes never hit the poles.
class SphereGrid {
 public:
  static std::shared_ptr<const SphereGrid> build(int n_theta, int n_phi);
  // n_phi = 2 * n_theta.
  static std::shared_ptr<const SphereGrid> build(int n_theta);

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  std::size_t size() const { return nodes_.size(); }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vec3>& tau1() const { return tau1_; }
  const std::vector<Vec3>& tau2() const { return tau2_; }

  double theta(int ring) const { return theta_[ring]; }
  double phi(int column) const { return phi_[column]; }
  double cos_theta(int ring) const { return cos_theta_[ring]; }
  double sin_theta(int ring) const { return sin_theta_[ring]; }
  // Weight shared by every node on a ring.
  double ring_weight(int ring) const { return ring_weight_[ring]; }

  // Largest harmonic degree the transforms resolve exactly on this grid:
  // min(n_theta - 2, n_phi / 2 - 1).
  int max_degree() const;

  const SHBasis& basis() const { return *basis_; }

  bool same_layout(const SphereGrid& other) const {
    return n_theta_ == other.n_theta_ && n_phi_ == other.n_phi_;
  }

 private:
  SphereGrid(int n_theta, int n_phi);

  int n_theta_;
  int n_phi_;
  std::vector<double> theta_, phi_, cos_theta_, sin_theta_, ring_weight_;
  std::vector<Vec3> nodes_, tau1_, tau2_;
  std::vector<double> weights_;
  std::shared_ptr<const SHBasis> basis_;
};

using GridPtr = std::shared_ptr<const SphereGrid>;

struct ScalarField {
  GridPtr grid;
  std::vector<double> values;

  static ScalarField from_function(GridPtr grid,
                                   const std::function<double(const Vec3&)>& f);
};

struct VectorField {
  GridPtr grid;
  std::vector<Vec3> values;

  static VectorField from_function(GridPtr grid,
                                   const std::function<Vec3(const Vec3&)>& f);
};

double mean(const ScalarField& field);
Vec3 mean(const VectorField& field);

// Weighted average of per-node values; same order and compensation as mean().
double grid_average(const SphereGrid& grid, const std::vector<double>& values);

// Gauss-Legendre rule on [-1, 1], nodes ascending.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace sphererig
