#pragma once

#include <span>
#include <vector>

#include "sphererig/grid.hpp"
#include "sphererig/types.hpp"

namespace sphererig {

// Real spherical harmonics orthonormal for the *average* measure on S^2:
// mean(Y_lm Y_l'm') = delta. Y_l0 = Pbar_l(cos t), Y_lm = sqrt2 Pbar_lm cos(m p)
// and Y_l,-m = sqrt2 Pbar_lm sin(m p) for m > 0, with
// Pbar_lm = sqrt((2l+1)(l-m)!/(l+m)!) P_lm (no Condon-Shortley phase).
// Flat index: l*l + l + m.
inline constexpr int sh_index(int l, int m) { return l * l + l + m; }
inline constexpr int sh_count(int k_max) { return (k_max + 1) * (k_max + 1); }

// -Delta eigenvalue on degree k.
inline constexpr double laplace_eigenvalue(int k) { return double(k) * (k + 1); }

/// Precomputed associated Legendre tables (values and d/dtheta) on the rings
/// of one grid, up to the grid's max degree, plus the recurrence constants
/// used for evaluation at arbitrary points.
class SHBasis {
 public:
  SHBasis(int k_max, std::span<const double> cos_theta,
          std::span<const double> sin_theta, std::span<const double> phi);

  int k_max() const { return k_max_; }

  // Packed (m-major, l >= m) offset of Pbar_lm.
  int packed(int l, int m) const { return offset_[m] + (l - m); }
  int packed_count() const { return packed_count_; }

  double p(int ring, int l, int m) const {
    return p_[ring * packed_count_ + packed(l, m)];
  }
  double dp(int ring, int l, int m) const {
    return dp_[ring * packed_count_ + packed(l, m)];
  }
  const double* p_ring(int ring) const { return &p_[ring * packed_count_]; }
  const double* dp_ring(int ring) const { return &dp_[ring * packed_count_]; }
  double cos_mphi(int column, int m) const { return cos_[column * (k_max_ + 1) + m]; }
  double sin_mphi(int column, int m) const { return sin_[column * (k_max_ + 1) + m]; }

  // Pbar_lm(t) for 0 <= m <= l <= k_max into out (packed layout).
  void legendre(double t, double s, int k_max, std::vector<double>& out) const;

 private:
  int k_max_;
  int packed_count_;
  std::vector<int> offset_;
  std::vector<double> a_, b_;  // three-term recurrence constants
  std::vector<double> p_, dp_, cos_, sin_;
};

/// Spherical-harmonic coefficients of a scalar (components = 1) or
/// R^3-valued (components = 3) field.
class SHExpansion {
 public:
  SHExpansion() = default;
  SHExpansion(GridPtr grid, int k_max, int components);

  const GridPtr& grid() const { return grid_; }
  int k_max() const { return k_max_; }
  int components() const { return components_; }

  double& coeff(int component, int l, int m) {
    return coeffs_[component * sh_count(k_max_) + sh_index(l, m)];
  }
  double coeff(int component, int l, int m) const {
    return coeffs_[component * sh_count(k_max_) + sh_index(l, m)];
  }
  std::span<const double> component(int c) const {
    return {coeffs_.data() + c * sh_count(k_max_),
            static_cast<std::size_t>(sh_count(k_max_))};
  }

  // Sum of squared coefficients of degree k over all components.
  double degree_power(int k) const;
  // Sum of squares of all coefficients (= mean |f|^2 for band-limited f).
  double power() const;

  // Copy with every degree other than k zeroed.
  SHExpansion band(int k) const;

  // Values at arbitrary unit vectors; out[i] holds `components` entries.
  std::vector<double> evaluate(std::span<const Vec3> points) const;
  std::vector<Vec3> evaluate_vector(std::span<const Vec3> points) const;

 private:
  GridPtr grid_;
  int k_max_ = 0;
  int components_ = 0;
  std::vector<double> coeffs_;
};

// Forward transforms by Gauss quadrature. Exact for fields of degree <= k_max.
// Throws ResolutionError when k_max > grid.max_degree().
SHExpansion sh_analyze(const ScalarField& field, int k_max);
SHExpansion sh_analyze(const VectorField& field, int k_max);
SHExpansion sh_analyze(const ScalarField& field);  // k_max = grid max degree
SHExpansion sh_analyze(const VectorField& field);

ScalarField sh_synthesize_scalar(const SHExpansion& expansion);
VectorField sh_synthesize_vector(const SHExpansion& expansion);

// Pi_k: the degree-k component of a field.
ScalarField project(const ScalarField& field, int k);
VectorField project(const VectorField& field, int k);

// Tangential (extrinsic) gradients computed from the spectral representation.
// Scalar: one tangent vector per node. Vector: one 3x3 Jacobian per node whose
// row i is grad of component i.
VectorField tangential_gradient(const ScalarField& field);
JacobianField tangential_gradient(const VectorField& field);
std::vector<Vec3> gradient_from_expansion(const SHExpansion& expansion, int component);
JacobianField jacobian_from_expansion(const SHExpansion& expansion);

// mean |grad f|^2 / mean f^2.
double rayleigh_quotient(const ScalarField& field);
// Rayleigh quotient of the canonical degree-k harmonic (x3 for k = 1,
// x1 x2 for k = 2) on the given grid.
double laplace_eigencheck(const GridPtr& grid, int k);

}  // namespace sphererig
