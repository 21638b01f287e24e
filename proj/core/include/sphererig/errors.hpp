#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sphererig {

// Bad sizes, mismatched grids, parameters outside their documented range.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A spectral degree was requested that the grid cannot resolve.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A raw field has a (near) zero vector and cannot be projected onto S^2.
class DegenerateMapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Stereographic projection evaluated at (or next to) its pole -xi.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A composite transform could not be refit to the (R, xi, lambda) form.
class RepresentationError : public std::runtime_error {
 public:
  RepresentationError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

// The mean-zero reparametrization was not found. Carries the best residual
// seen, which separates under-resolution from near-bubbling inputs.
class CenteringFailure : public std::runtime_error {
 public:
  CenteringFailure(const std::string& what, double best_residual,
                   Eigen::Vector3d best_boost)
      : std::runtime_error(what),
        best_residual_(best_residual),
        best_boost_(best_boost) {}
  double best_residual() const noexcept { return best_residual_; }
  const Eigen::Vector3d& best_boost() const noexcept { return best_boost_; }

 private:
  double best_residual_;
  Eigen::Vector3d best_boost_;
};

// Linear coefficient outside the regime where the local estimates apply
// (det A <= 0 or |A^{-1}|^2 > 4).
class OutOfRegime : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Map whose computed degree is not within tolerance of the required value.
class InadmissibleMap : public std::runtime_error {
 public:
  InadmissibleMap(const std::string& what, double degree)
      : std::runtime_error(what), degree_(degree) {}
  double degree() const noexcept { return degree_; }

 private:
  double degree_;
};

}  // namespace sphererig
