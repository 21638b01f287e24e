#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sphererig/moebius.hpp"
#include "sphererig/rigidity.hpp"
#include "sphererig/sphere_map.hpp"

namespace sphererig {

enum class Family { exact_moebius, perturbed_moebius, rotated_graph, near_bubble };

std::string to_string(Family f);
Family parse_family(const std::string& name);  // throws InvalidArgument
const std::vector<Family>& all_families();

struct GeneratorParams {
  double eps = 0.0;
  double lambda_lo = 0.25;
  double lambda_hi = 4.0;
  int band_max = 4;  // perturbations use harmonic degrees 2..band_max
  // Overrides the seeded random transform (exact/perturbed/near-bubble) or
  // supplies the rotation (rotated-graph).
  std::optional<MoebiusTransform> base;
};

// Seeded R^3-valued field with random coefficients in degrees lo..hi,
// scaled to mean |h|^2 = 1.
VectorField random_harmonic_field(const GridPtr& grid, std::uint64_t seed, int lo, int hi);

// Test-map families:
//   exact-moebius      R phi_{xi,lambda}, lambda log-uniform in the range
//   perturbed-moebius  normalize(phi + eps h)
//   rotated-graph      R normalize(id + eps h)
//   near-bubble        normalize(phi_{xi,lambda_hi} + eps h), lambda at the
//                      edge of the range (the concentrated side)
// generate() throws InadmissibleMap naming family and resolution when the
// result is not degree 1 within 1e-3.
SphereMap generate(Family family, const GeneratorParams& params, const GridPtr& grid,
                   std::uint64_t seed);
SphereMap generate_unchecked(Family family, const GeneratorParams& params,
                             const GridPtr& grid, std::uint64_t seed);

// Per-map seed: splitmix64 over (master, family index, replicate). It does
// not depend on eps or the grid, so an eps schedule perturbs one fixed map
// along one fixed direction.
std::uint64_t derive_seed(std::uint64_t master, Family family, int replicate);

struct ExperimentConfig {
  std::vector<int> grids{48};
  std::vector<Family> families{Family::perturbed_moebius};
  std::vector<double> eps{0.1, 0.05, 0.025, 0.0125};
  std::uint64_t seed = 1;
  double theta = kDefaultTheta;
  double lambda_lo = 0.25;
  double lambda_hi = 4.0;
  int band_max = 4;
  int replicates = 1;
  std::string csv_path;      // empty: no file
  std::string report_dir;    // empty: no per-row JSON reports
};

// Throws InvalidArgument on a malformed or inconsistent config
// (eps must be positive and decreasing, grids increasing).
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
void validate(const ExperimentConfig& config);

struct SweepRow {
  Family family;
  int replicate = 0;
  double eps = 0.0;
  int n_theta = 0;
  double degree = 0.0;
  double deficit = 0.0;
  double lhs = 0.0;
  std::optional<double> ratio;
  double identity_residual = 0.0;
  double closeness = 0.0;
  bool in_gate = false;
  std::string status;  // report status, or "zero-deficit", or "generation-failed"
};

SweepRow row_from_report(Family family, int replicate, double eps, int n_theta,
                         const RigidityReport& report);

struct FamilySummary {
  Family family;
  int rows = 0;
  int failures = 0;
  double max_ratio = 0.0;
  double max_ratio_in_gate = 0.0;
  double max_ratio_out_of_gate = 0.0;
  int in_gate_rows = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<FamilySummary> summary;
  double c_theta = 0.0;
  int anomalies = 0;  // failed rows plus in-gate rows with ratio > c(theta)
};

// Rows in (family, replicate, eps, grid) order.
SweepResult sweep(const ExperimentConfig& config);

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_summary(std::ostream& os, const SweepResult& result);

struct ConvergenceRow {
  int n_theta = 0;
  double degree_residual = 0.0;     // |degree - 1|
  double identity_residual = 0.0;   // NaN when centering failed
  double deficit = 0.0;
  std::string flags;                // "", "under-resolved", "non-monotone", ...
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  bool anomaly = false;
};

// Needs >= 3 increasing grid sizes. Residuals above 1e-6 are flagged
// under-resolved; a residual that grows with refinement while above the
// 1e-12 noise floor is flagged non-monotone.
ConvergenceTable convergence_study(Family family, const GeneratorParams& params,
                                   std::uint64_t seed, const std::vector<int>& grids);

void write_convergence(std::ostream& os, const ConvergenceTable& table);

}  // namespace sphererig
