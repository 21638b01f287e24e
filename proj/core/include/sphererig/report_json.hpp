#pragma once

#include <string>

#include "sphererig/rigidity.hpp"

namespace sphererig {

// Stable JSON schema "sphererig.report/1". Always present: deficit, lhs,
// ratio, detA, Lambda_sq, qv3, cubic, identity_residual, psi, phi, status,
// theta, c1, c. Unavailable numbers (and an undefined ratio) are null;
// transforms use the 13-number MoebiusTransform::to_line() string.
std::string report_to_json(const RigidityReport& report, int indent = 2);

}  // namespace sphererig
