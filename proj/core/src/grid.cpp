#include "sphererig/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphererig/errors.hpp"
#include "sphererig/harmonics.hpp"

namespace sphererig {

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // one more derivative evaluation at the converged node
        double q0 = 1.0, q1 = x;
        for (int k = 2; k <= n; ++k) {
          const double q2 = ((2.0 * k - 1.0) * x * q1 - (k - 1.0) * q0) / k;
          q0 = q1;
          q1 = q2;
        }
        dp = n * (x * q1 - q0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

std::shared_ptr<const SphereGrid> SphereGrid::build(int n_theta, int n_phi) {
  if (n_theta < 4 || n_phi < 8 || n_phi % 2 != 0) {
    throw InvalidArgument("SphereGrid requires n_theta >= 4 and even n_phi >= 8 (got " +
                          std::to_string(n_theta) + ", " + std::to_string(n_phi) + ")");
  }
  return std::shared_ptr<const SphereGrid>(new SphereGrid(n_theta, n_phi));
}

std::shared_ptr<const SphereGrid> SphereGrid::build(int n_theta) {
  return build(n_theta, 2 * n_theta);
}

int SphereGrid::max_degree() const {
  return std::min(n_theta_ - 2, n_phi_ / 2 - 1);
}

SphereGrid::SphereGrid(int n_theta, int n_phi) : n_theta_(n_theta), n_phi_(n_phi) {
  std::vector<double> t, w;
  gauss_legendre(n_theta, t, w);

  theta_.resize(n_theta);
  cos_theta_.resize(n_theta);
  sin_theta_.resize(n_theta);
  ring_weight_.resize(n_theta);
  // rings run north to south: cos(theta) descending
  for (int i = 0; i < n_theta; ++i) {
    const double ct = t[n_theta - 1 - i];
    cos_theta_[i] = ct;
    sin_theta_[i] = std::sqrt((1.0 - ct) * (1.0 + ct));
    theta_[i] = std::acos(ct);
    ring_weight_[i] = w[n_theta - 1 - i] / (2.0 * n_phi);
  }
  phi_.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) phi_[j] = 2.0 * std::numbers::pi * j / n_phi;

  const std::size_t n = static_cast<std::size_t>(n_theta) * n_phi;
  nodes_.resize(n);
  tau1_.resize(n);
  tau2_.resize(n);
  weights_.resize(n);
  for (int i = 0; i < n_theta; ++i) {
    const double ct = cos_theta_[i], st = sin_theta_[i];
    for (int j = 0; j < n_phi; ++j) {
      const double cp = std::cos(phi_[j]), sp = std::sin(phi_[j]);
      const std::size_t k = static_cast<std::size_t>(i) * n_phi + j;
      nodes_[k] = Vec3(st * cp, st * sp, ct);
      tau1_[k] = Vec3(ct * cp, ct * sp, -st);
      tau2_[k] = Vec3(-sp, cp, 0.0);
      weights_[k] = ring_weight_[i];
    }
  }
  basis_ = std::make_shared<const SHBasis>(max_degree(), cos_theta_, sin_theta_, phi_);
}

ScalarField ScalarField::from_function(GridPtr grid,
                                       const std::function<double(const Vec3&)>& f) {
  ScalarField out{grid, {}};
  out.values.reserve(grid->size());
  for (const auto& x : grid->nodes()) out.values.push_back(f(x));
  return out;
}

VectorField VectorField::from_function(GridPtr grid,
                                       const std::function<Vec3(const Vec3&)>& f) {
  VectorField out{grid, {}};
  out.values.reserve(grid->size());
  for (const auto& x : grid->nodes()) out.values.push_back(f(x));
  return out;
}

double grid_average(const SphereGrid& grid, const std::vector<double>& values) {
  if (values.size() != grid.size()) {
    throw InvalidArgument("field size does not match grid");
  }
  CompensatedSum acc;
  const auto& w = grid.weights();
  for (std::size_t k = 0; k < values.size(); ++k) acc.add(w[k] * values[k]);
  return acc.value();
}

double mean(const ScalarField& field) {
  return grid_average(*field.grid, field.values);
}

Vec3 mean(const VectorField& field) {
  const auto& grid = *field.grid;
  if (field.values.size() != grid.size()) {
    throw InvalidArgument("field size does not match grid");
  }
  CompensatedSum acc[3];
  const auto& w = grid.weights();
  for (std::size_t k = 0; k < field.values.size(); ++k) {
    for (int c = 0; c < 3; ++c) acc[c].add(w[k] * field.values[k][c]);
  }
  return {acc[0].value(), acc[1].value(), acc[2].value()};
}

}  // namespace sphererig
