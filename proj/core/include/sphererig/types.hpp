#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace sphererig {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Per-node 3x3 Jacobians: row i is the tangential gradient of component i.
using JacobianField = std::vector<Mat3>;

// Neumaier compensated sum; the order of add() calls fixes the result.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace sphererig
