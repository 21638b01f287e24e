#pragma once

#include "sphererig/moebius.hpp"
#include "sphererig/sphere_map.hpp"

namespace sphererig {

struct CenteringOptions {
  double tolerance = 1e-8;        // accepted |mean(u o psi)|
  double target = 1e-13;          // Newton stops early below this
  int max_iterations = 40;        // per start
  int max_restarts = 6;           // grid-search starts after the identity start
  double fd_step = 1e-7;          // forward-difference Jacobian step in boost space
  double min_lambda = 1.0 / 1024; // lambda below this is reported as bubbling
  double degree_tolerance = 1e-3;
};

struct CenteringResult {
  MoebiusTransform psi;  // pure dilation, R = I
  Vec3 residual;         // mean(u o psi)
  int iterations = 0;    // Newton iterations summed over all starts
  int start = 0;         // index in the restart schedule that succeeded
};

// F(xi, lambda) = mean(u o phi_{xi,lambda}); lambda in (0, 1].
Vec3 homotopy_F(const SphereMap& u, const Vec3& xi, double lambda);

// Finds psi = phi_{xi0,lambda0}, lambda0 in (0, 1], with |mean(u o psi)| <=
// tolerance. Damped Newton in boost coordinates b = -log(lambda) xi starting
// from the identity; on stagnation, a coarse (xi, lambda) search over
// S^2 x {2^-6 .. 2^-1} seeds further Newton starts, tried in order of
// increasing |F|. The first start that converges wins.
//
// Throws InadmissibleMap when |degree(u) - 1| > degree_tolerance and
// CenteringFailure (carrying the best residual) when every start fails or
// lambda runs into min_lambda.
CenteringResult center_map(const SphereMap& u, const CenteringOptions& options = {});

}  // namespace sphererig
