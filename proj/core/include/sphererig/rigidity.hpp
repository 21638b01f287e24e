#pragma once

#include <optional>
#include <string>

#include "sphererig/centering.hpp"
#include "sphererig/moebius.hpp"
#include "sphererig/sphere_map.hpp"

namespace sphererig {

inline constexpr double kDefaultTheta = 0.1;
// Deficits at or below this are treated as exact conformality (ratio undefined).
inline constexpr double kZeroDeficit = 1e-13;

/// Polar factors of the linear coefficient A = R0 S, S = sqrt(A^T A).
struct PolarData {
  Mat3 A;
  Mat3 R0;
  Mat3 S;
  Vec3 alpha;          // eigenvalues of S, ascending
  Vec3 shifts;         // alpha_i - 1
  double lambda_sum;   // sum of shifts
  double Lambda_sq;    // sum of squared shifts = dist^2(A, SO(3))
  double detA;
};

// A = 3 mean(u x^T), the degree-1 part of a centered map (Pi_1 u = A x).
// Throws InvalidArgument when |mean(u)| > 1e-6.
Mat3 linear_coefficient(const SphereMap& u_centered);
// Same matrix read off the degree-1 spherical-harmonic coefficients.
Mat3 linear_coefficient_spectral(const SphereMap& u_centered);

// Throws OutOfRegime when det A <= 0.
PolarData polar_decompose(const Mat3& A);

// Polynomial form 1 + lambda + (lambda^2 - Lambda^2)/2 + l1 l2 l3 of det A.
double det_from_shifts(const PolarData& polar);

// w(x) = A^{-1}(u(x) - A x). Throws OutOfRegime unless det A > 0 and
// |A^{-1}|_F^2 <= 4.
VectorField w_field(const SphereMap& u_centered, const Mat3& A);
bool in_regime(const Mat3& A);

// (3/2) mean <w, (div w) x - sum_j x_j grad w^j>, div w = trace of the
// tangential Jacobian.
double qv3(const VectorField& w);
double qv3(const VectorField& w, const JacobianField& dw);

// mean <w, d_tau1 w x d_tau2 w>.
double cubic_term(const VectorField& w);
double cubic_term(const VectorField& w, const JacobianField& dw);

struct Bound {
  double lhs;
  double rhs;
};

// lhs = |cubic_term(w)|, rhs = (1/2 mean |grad w|^2)^{3/2}.
Bound wente_check(const VectorField& w);

// |det A (1 + qv3(w) + cubic(w)) - 1| for w = w_field(u, A).
double degree_identity_residual(const SphereMap& u_centered, const Mat3& A);

// lhs = mean |grad u - A P_T|^2, rhs = 3 deficit(u).
Bound poincare_gap_check(const SphereMap& u_centered, const Mat3& A);

struct RigidityConstants {
  double c1;
  double c;
};

// c1 = 6 (1 + 3/4 (1 + t^2) + (18 + 4 sqrt(27 (1 + t^2))) / sqrt2),
// c = 6 + 2/3 c1. Requires 1/2 - t/(3 sqrt2) >= 1/4 and t >= 0.
RigidityConstants rigidity_constants(double theta);

enum class ReportStatus { ok, out_of_regime, centering_failed, inadmissible };
std::string to_string(ReportStatus s);

struct RigidityReport {
  ReportStatus status = ReportStatus::ok;
  std::string message;

  double degree = 0.0;
  bool reflected = false;  // degree -1 input analyzed through its reflection
  double deficit = 0.0;

  std::optional<MoebiusTransform> psi;
  double centering_residual = std::numeric_limits<double>::quiet_NaN();
  int centering_iterations = 0;
  double centered_deficit = std::numeric_limits<double>::quiet_NaN();

  Mat3 A = Mat3::Constant(std::numeric_limits<double>::quiet_NaN());
  std::optional<PolarData> polar;
  bool regime = false;

  // mean |grad u~ - P_T|^2 and the same after undoing the rotation R0.
  double closeness_raw = std::numeric_limits<double>::quiet_NaN();
  double closeness = std::numeric_limits<double>::quiet_NaN();
  bool in_gate = false;          // closeness <= theta^2
  bool trivial_bound = false;    // deficit <= 1 + theta^2 (checked when in_gate)

  double w_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double qv3 = std::numeric_limits<double>::quiet_NaN();
  double cubic = std::numeric_limits<double>::quiet_NaN();
  double wente_rhs = std::numeric_limits<double>::quiet_NaN();
  double identity_residual = std::numeric_limits<double>::quiet_NaN();
  double poincare_lhs = std::numeric_limits<double>::quiet_NaN();
  double poincare_bound = std::numeric_limits<double>::quiet_NaN();

  std::optional<MoebiusTransform> phi;  // R0 psi^{-1}
  double lhs = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> ratio;          // empty when deficit <= kZeroDeficit

  std::optional<MoebiusTransform> phi_opt;  // locally optimized candidate
  double lhs_opt = std::numeric_limits<double>::quiet_NaN();

  double theta = kDefaultTheta;
  double c1 = 0.0;
  double c = 0.0;
  bool certified = false;  // in regime and within the closeness gate
};

struct AnalyzeOptions {
  CenteringOptions centering;
  bool optimize = false;  // also run best_moebius from phi
};

// Full pipeline: center, linear coefficient, polar factor, candidate
// phi = R0 psi^{-1}, lhs = mean |grad u - grad phi|^2 and all intermediate
// quantities. Failures are reported through status, never thrown.
RigidityReport analyze(const SphereMap& u, double theta = kDefaultTheta,
                       const AnalyzeOptions& options = {});

// Derivative-free local minimization of gradient_distance_sq(u, as_map(.))
// over rotation and boost coordinates. Never returns something worse than
// `initial`.
MoebiusTransform best_moebius(const SphereMap& u, const MoebiusTransform& initial,
                              int max_sweeps = 60);

}  // namespace sphererig
