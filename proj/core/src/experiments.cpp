#include "sphererig/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "sphererig/errors.hpp"
#include "sphererig/map_io.hpp"
#include "sphererig/report_json.hpp"

namespace sphererig {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr double kDegreeTolerance = 1e-3;

SphereMap perturb(const GridPtr& grid, const std::function<Vec3(const Vec3&)>& base,
                  double eps, int band_max, std::uint64_t seed) {
  VectorField raw = VectorField::from_function(grid, base);
  if (eps != 0.0) {
    const VectorField h = random_harmonic_field(grid, splitmix64(seed ^ 0x5eedULL), 2, band_max);
    for (std::size_t k = 0; k < raw.values.size(); ++k) raw.values[k] += eps * h.values[k];
  }
  return normalize_to_sphere(raw);
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::exact_moebius: return "exact-moebius";
    case Family::perturbed_moebius: return "perturbed-moebius";
    case Family::rotated_graph: return "rotated-graph";
    case Family::near_bubble: return "near-bubble";
  }
  return "unknown";
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> f{Family::exact_moebius, Family::perturbed_moebius,
                                     Family::rotated_graph, Family::near_bubble};
  return f;
}

Family parse_family(const std::string& name) {
  for (Family f : all_families()) {
    if (to_string(f) == name) return f;
  }
  throw InvalidArgument("unknown map family '" + name +
                        "' (exact-moebius, perturbed-moebius, rotated-graph, near-bubble)");
}

VectorField random_harmonic_field(const GridPtr& grid, std::uint64_t seed, int lo, int hi) {
  if (lo < 0 || hi < lo) throw InvalidArgument("random_harmonic_field: bad degree band");
  if (hi > grid->max_degree()) {
    throw ResolutionError("random_harmonic_field: band exceeds grid resolution");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SHExpansion e(grid, hi, 3);
  for (int c = 0; c < 3; ++c)
    for (int l = lo; l <= hi; ++l)
      for (int m = -l; m <= l; ++m) e.coeff(c, l, m) = normal(rng);
  const double scale = 1.0 / std::sqrt(e.power());
  VectorField h = sh_synthesize_vector(e);
  for (auto& v : h.values) v *= scale;
  return h;
}

std::uint64_t derive_seed(std::uint64_t master, Family family, int replicate) {
  const std::uint64_t key = (static_cast<std::uint64_t>(family) + 1) << 32 |
                            static_cast<std::uint32_t>(replicate);
  return splitmix64(master ^ splitmix64(key));
}

SphereMap generate_unchecked(Family family, const GeneratorParams& p, const GridPtr& grid,
                             std::uint64_t seed) {
  switch (family) {
    case Family::exact_moebius: {
      const auto phi = p.base ? *p.base : random_moebius(seed, p.lambda_lo, p.lambda_hi);
      return as_map(phi, grid);
    }
    case Family::perturbed_moebius: {
      const auto phi = p.base ? *p.base : random_moebius(seed, p.lambda_lo, p.lambda_hi);
      return perturb(grid, [&](const Vec3& x) { return phi.apply(x); }, p.eps, p.band_max, seed);
    }
    case Family::rotated_graph: {
      const Mat3 r = p.base ? p.base->R() : random_moebius(seed, 1.0, 1.0).R();
      return rotate(perturb(grid, [](const Vec3& x) { return x; }, p.eps, p.band_max, seed), r);
    }
    case Family::near_bubble: {
      MoebiusTransform phi;
      if (p.base) {
        phi = *p.base;
      } else {
        const auto r = random_moebius(seed, p.lambda_hi, p.lambda_hi);
        phi = r;
      }
      return perturb(grid, [&](const Vec3& x) { return phi.apply(x); }, p.eps, p.band_max, seed);
    }
  }
  throw InvalidArgument("unknown family");
}

SphereMap generate(Family family, const GeneratorParams& params, const GridPtr& grid,
                   std::uint64_t seed) {
  SphereMap u = generate_unchecked(family, params, grid, seed);
  const double deg = degree(u);
  if (!(std::abs(deg - 1.0) <= kDegreeTolerance)) {
    throw InadmissibleMap("generate: family " + to_string(family) + " at n_theta=" +
                              std::to_string(grid->n_theta()) + " has degree " +
                              std::to_string(deg),
                          deg);
  }
  return u;
}

void validate(const ExperimentConfig& c) {
  if (c.grids.empty() || c.families.empty() || c.eps.empty()) {
    throw InvalidArgument("config needs non-empty grids, families and eps");
  }
  for (std::size_t i = 0; i < c.grids.size(); ++i) {
    if (c.grids[i] < 4) throw InvalidArgument("config: grid sizes must be >= 4");
    if (i > 0 && c.grids[i] <= c.grids[i - 1]) {
      throw InvalidArgument("config: grid sizes must be increasing");
    }
  }
  for (std::size_t i = 0; i < c.eps.size(); ++i) {
    if (!(c.eps[i] > 0.0)) throw InvalidArgument("config: eps values must be positive");
    if (i > 0 && !(c.eps[i] < c.eps[i - 1])) {
      throw InvalidArgument("config: eps values must be decreasing");
    }
  }
  if (c.replicates < 1) throw InvalidArgument("config: replicates must be >= 1");
  if (c.band_max < 2) throw InvalidArgument("config: band_max must be >= 2");
  rigidity_constants(c.theta);
  random_moebius(0, c.lambda_lo, c.lambda_hi);
}

ExperimentConfig parse_config(const std::string& text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "grids") {
        c.grids = value.get<std::vector<int>>();
      } else if (key == "families") {
        c.families.clear();
        for (const auto& f : value) c.families.push_back(parse_family(f.get<std::string>()));
      } else if (key == "eps") {
        c.eps = value.get<std::vector<double>>();
      } else if (key == "seed") {
        c.seed = value.get<std::uint64_t>();
      } else if (key == "theta") {
        c.theta = value.get<double>();
      } else if (key == "lambda_range") {
        const auto r = value.get<std::vector<double>>();
        if (r.size() != 2) throw InvalidArgument("config: lambda_range needs two values");
        c.lambda_lo = r[0];
        c.lambda_hi = r[1];
      } else if (key == "band_max") {
        c.band_max = value.get<int>();
      } else if (key == "replicates") {
        c.replicates = value.get<int>();
      } else if (key == "out") {
        c.csv_path = value.get<std::string>();
      } else if (key == "report_dir") {
        c.report_dir = value.get<std::string>();
      } else {
        throw InvalidArgument("config: unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: wrong value type: ") + e.what());
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

SweepRow row_from_report(Family family, int replicate, double eps, int n_theta,
                         const RigidityReport& r) {
  SweepRow row;
  row.family = family;
  row.replicate = replicate;
  row.eps = eps;
  row.n_theta = n_theta;
  row.degree = r.degree;
  row.deficit = r.deficit;
  row.lhs = r.lhs;
  row.ratio = r.ratio;
  row.identity_residual = r.identity_residual;
  row.closeness = r.closeness;
  row.in_gate = r.in_gate;
  row.status = to_string(r.status);
  if (r.status == ReportStatus::ok && !r.ratio) row.status = "zero-deficit";
  return row;
}

SweepResult sweep(const ExperimentConfig& config) {
  validate(config);
  SweepResult result;
  result.c_theta = rigidity_constants(config.theta).c;

  std::map<int, GridPtr> grids;
  for (int n : config.grids) grids[n] = SphereGrid::build(n);
  if (!config.report_dir.empty()) std::filesystem::create_directories(config.report_dir);

  for (Family family : config.families) {
    FamilySummary fs{family};
    for (int rep = 0; rep < config.replicates; ++rep) {
      const std::uint64_t seed = derive_seed(config.seed, family, rep);
      for (std::size_t ie = 0; ie < config.eps.size(); ++ie) {
        const double eps = config.eps[ie];
        for (int n : config.grids) {
          GeneratorParams params;
          params.eps = eps;
          params.lambda_lo = config.lambda_lo;
          params.lambda_hi = config.lambda_hi;
          params.band_max = config.band_max;
          SweepRow row;
          try {
            const SphereMap u = generate(family, params, grids.at(n), seed);
            const RigidityReport report = analyze(u, config.theta);
            row = row_from_report(family, rep, eps, n, report);
            if (!config.report_dir.empty()) {
              std::ofstream os(config.report_dir + "/" + to_string(family) + "_r" +
                               std::to_string(rep) + "_e" + std::to_string(ie) + "_n" +
                               std::to_string(n) + ".json");
              os << report_to_json(report) << '\n';
            }
          } catch (const std::exception& e) {
            row = SweepRow{};
            row.family = family;
            row.replicate = rep;
            row.eps = eps;
            row.n_theta = n;
            const double nan = std::numeric_limits<double>::quiet_NaN();
            row.degree = row.deficit = row.lhs = row.identity_residual = row.closeness = nan;
            row.status = "generation-failed";
          }
          ++fs.rows;
          const bool failed = row.status != "ok" && row.status != "zero-deficit";
          if (failed) {
            ++fs.failures;
            ++result.anomalies;
          }
          if (row.ratio) {
            fs.max_ratio = std::max(fs.max_ratio, *row.ratio);
            if (row.in_gate) {
              ++fs.in_gate_rows;
              fs.max_ratio_in_gate = std::max(fs.max_ratio_in_gate, *row.ratio);
              if (*row.ratio > result.c_theta) ++result.anomalies;
            } else {
              fs.max_ratio_out_of_gate = std::max(fs.max_ratio_out_of_gate, *row.ratio);
            }
          }
          result.rows.push_back(row);
        }
      }
    }
    result.summary.push_back(fs);
  }

  if (!config.csv_path.empty()) {
    std::ofstream os(config.csv_path);
    if (!os) throw InvalidArgument("cannot open '" + config.csv_path + "' for writing");
    write_sweep_csv(os, result.rows);
  }
  return result;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "family,replicate,eps,n_theta,degree,deficit,lhs,ratio,identity_residual,closeness,"
        "in_gate,status\n";
  for (const auto& r : rows) {
    os << to_string(r.family) << ',' << r.replicate << ',' << format_double(r.eps) << ','
       << r.n_theta << ',' << format_double(r.degree) << ',' << format_double(r.deficit) << ','
       << format_double(r.lhs) << ',' << (r.ratio ? format_double(*r.ratio) : std::string())
       << ',' << format_double(r.identity_residual) << ',' << format_double(r.closeness) << ','
       << (r.in_gate ? 1 : 0) << ',' << r.status << '\n';
  }
}

void write_summary(std::ostream& os, const SweepResult& result) {
  os << "# c(theta) = " << format_double(result.c_theta) << '\n';
  os << "# family rows failures max_ratio in_gate_rows max_ratio_in_gate "
        "max_ratio_out_of_gate\n";
  for (const auto& s : result.summary) {
    os << "# " << to_string(s.family) << ' ' << s.rows << ' ' << s.failures << ' '
       << format_double(s.max_ratio) << ' ' << s.in_gate_rows << ' '
       << format_double(s.max_ratio_in_gate) << ' ' << format_double(s.max_ratio_out_of_gate)
       << '\n';
  }
  os << "# anomalies " << result.anomalies << '\n';
}

ConvergenceTable convergence_study(Family family, const GeneratorParams& params,
                                   std::uint64_t seed, const std::vector<int>& grids) {
  if (grids.size() < 3) throw InvalidArgument("convergence_study needs at least 3 grid sizes");
  for (std::size_t i = 1; i < grids.size(); ++i) {
    if (grids[i] <= grids[i - 1]) throw InvalidArgument("grid sizes must be increasing");
  }
  constexpr double kFloor = 1e-12;
  constexpr double kResolved = 1e-6;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  ConvergenceTable table;
  for (int n : grids) {
    const auto grid = SphereGrid::build(n);
    ConvergenceRow row;
    row.n_theta = n;
    row.identity_residual = nan;
    std::vector<std::string> flags;
    try {
      const SphereMap u = generate_unchecked(family, params, grid, seed);
      row.degree_residual = std::abs(degree(u) - 1.0);
      row.deficit = deficit(u);
      try {
        const auto centering = center_map(u);
        const SphereMap centered = compose_map(u, centering.psi);
        const Mat3 a = linear_coefficient(centered);
        if (in_regime(a)) row.identity_residual = degree_identity_residual(centered, a);
      } catch (const std::exception&) {
        flags.push_back("centering-failed");
      }
    } catch (const std::exception&) {
      row.degree_residual = row.deficit = nan;
      flags.push_back("generation-failed");
    }
    if (!(row.degree_residual <= kResolved) || !(row.identity_residual <= kResolved)) {
      flags.push_back("under-resolved");
    }
    if (!table.rows.empty()) {
      const auto& prev = table.rows.back();
      const bool grew = (row.degree_residual > prev.degree_residual &&
                         row.degree_residual > kFloor) ||
                        (row.identity_residual > prev.identity_residual &&
                         row.identity_residual > kFloor);
      if (grew) flags.push_back("non-monotone");
    }
    for (std::size_t i = 0; i < flags.size(); ++i) row.flags += (i ? ";" : "") + flags[i];
    if (!row.flags.empty()) table.anomaly = true;
    table.rows.push_back(row);
  }
  return table;
}

void write_convergence(std::ostream& os, const ConvergenceTable& table) {
  os << "n_theta,degree_residual,identity_residual,deficit,flags\n";
  for (const auto& r : table.rows) {
    os << r.n_theta << ',' << format_double(r.degree_residual) << ','
       << format_double(r.identity_residual) << ',' << format_double(r.deficit) << ','
       << r.flags << '\n';
  }
}

}  // namespace sphererig
