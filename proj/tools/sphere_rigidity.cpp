// sphere-rigidity: generate test maps, run the rigidity pipeline on them, and
// sweep / converge over map families.
//
// Exit codes: 0 = all checks passed, 1 = anomalies flagged, 2 = hard errors.

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sphererig/centering.hpp"
#include "sphererig/errors.hpp"
#include "sphererig/experiments.hpp"
#include "sphererig/map_io.hpp"
#include "sphererig/report_json.hpp"
#include "sphererig/rigidity.hpp"

using namespace sphererig;

namespace {

constexpr int kOk = 0;
constexpr int kAnomaly = 1;
constexpr int kHardError = 2;

std::vector<int> parse_grid_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
  return out;
}

struct GenerateArgs {
  std::string family = "perturbed-moebius";
  double eps = 0.0;
  std::uint64_t seed = 1;
  int ntheta = 48;
  int nphi = 0;
  double lambda = 0.0;
  double lambda_min = 0.25;
  double lambda_max = 4.0;
  int band = 4;
};

void add_generator_options(CLI::App* cmd, GenerateArgs& a) {
  cmd->add_option("--family", a.family,
                  "exact-moebius | perturbed-moebius | rotated-graph | near-bubble");
  cmd->add_option("--eps", a.eps, "perturbation size");
  cmd->add_option("--seed", a.seed, "random seed");
  cmd->add_option("--lambda", a.lambda, "fix the dilation factor (overrides the range)");
  cmd->add_option("--lambda-min", a.lambda_min, "lower end of the dilation range");
  cmd->add_option("--lambda-max", a.lambda_max, "upper end of the dilation range");
  cmd->add_option("--band", a.band, "highest harmonic degree of the perturbation");
}

GeneratorParams to_params(const GenerateArgs& a) {
  GeneratorParams p;
  p.eps = a.eps;
  p.band_max = a.band;
  p.lambda_lo = a.lambda_min;
  p.lambda_hi = a.lambda_max;
  if (a.lambda > 0.0) p.lambda_lo = p.lambda_hi = a.lambda;
  return p;
}

int cmd_generate(const GenerateArgs& a, const std::string& out) {
  const auto grid = SphereGrid::build(a.ntheta, a.nphi > 0 ? a.nphi : 2 * a.ntheta);
  const SphereMap u = generate(parse_family(a.family), to_params(a), grid, a.seed);
  if (out.empty()) {
    write_map(std::cout, u);
  } else {
    write_map_file(out, u);
    std::cerr << "wrote " << out << " (" << a.family << ", n_theta=" << a.ntheta
              << ", degree " << format_double(degree(u)) << ")\n";
  }
  return kOk;
}

int cmd_analyze(const std::string& input, double theta, const std::string& out, bool optimize) {
  const SphereMap u = read_map_file(input);
  AnalyzeOptions options;
  options.optimize = optimize;
  const RigidityReport report = analyze(u, theta, options);
  const std::string json = report_to_json(report);
  if (out.empty()) {
    std::cout << json << '\n';
  } else {
    std::ofstream os(out);
    if (!os) throw InvalidArgument("cannot open '" + out + "' for writing");
    os << json << '\n';
    std::cerr << "status " << to_string(report.status) << ", deficit "
              << format_double(report.deficit) << ", lhs " << format_double(report.lhs)
              << ", ratio " << (report.ratio ? format_double(*report.ratio) : "undefined")
              << '\n';
  }
  if (report.status != ReportStatus::ok) return kAnomaly;
  if (report.certified && report.ratio && *report.ratio > report.c) return kAnomaly;
  return kOk;
}

int cmd_center(const std::string& input, const std::string& out) {
  const SphereMap u = read_map_file(input);
  try {
    const CenteringResult r = center_map(u);
    std::cout << "psi " << r.psi.to_line() << '\n'
              << "xi0 " << format_double(r.psi.xi()[0]) << ' ' << format_double(r.psi.xi()[1])
              << ' ' << format_double(r.psi.xi()[2]) << '\n'
              << "lambda0 " << format_double(r.psi.lambda()) << '\n'
              << "residual " << format_double(r.residual.norm()) << '\n'
              << "iterations " << r.iterations << '\n';
    if (!out.empty()) write_map_file(out, compose_map(u, r.psi));
    return kOk;
  } catch (const CenteringFailure& e) {
    std::cerr << e.what() << '\n';
    std::cout << "residual " << format_double(e.best_residual()) << '\n';
    return kAnomaly;
  }
}

int cmd_sweep(const std::string& config_path, const std::string& out,
              const std::string& reports) {
  ExperimentConfig config = load_config(config_path);
  if (!out.empty()) config.csv_path = out;
  if (!reports.empty()) config.report_dir = reports;
  const SweepResult result = sweep(config);
  if (config.csv_path.empty()) write_sweep_csv(std::cout, result.rows);
  write_summary(std::cout, result);
  return result.anomalies > 0 ? kAnomaly : kOk;
}

int cmd_converge(const GenerateArgs& a, const std::string& grids) {
  const auto table = convergence_study(parse_family(a.family), to_params(a), a.seed,
                                       parse_grid_list(grids));
  write_convergence(std::cout, table);
  return table.anomaly ? kAnomaly : kOk;
}

int cmd_constants(double theta) {
  const auto k = rigidity_constants(theta);
  std::cout << "theta " << format_double(theta) << '\n'
            << "c1 " << format_double(k.c1) << '\n'
            << "c " << format_double(k.c) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantitative rigidity of degree-1 maps of the 2-sphere"};
  app.require_subcommand(1);

  GenerateArgs gen;
  std::string gen_out;
  auto* generate_cmd = app.add_subcommand("generate", "write a test map");
  add_generator_options(generate_cmd, gen);
  generate_cmd->add_option("--ntheta", gen.ntheta, "colatitude nodes");
  generate_cmd->add_option("--nphi", gen.nphi, "longitude nodes (default 2*ntheta)");
  generate_cmd->add_option("--out", gen_out, "output map file (default stdout)");

  std::string an_input, an_out;
  double an_theta = kDefaultTheta;
  bool an_optimize = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "run the rigidity pipeline on a map file");
  analyze_cmd->add_option("--input", an_input, "map file")->required();
  analyze_cmd->add_option("--theta", an_theta, "closeness threshold");
  analyze_cmd->add_option("--out", an_out, "report JSON (default stdout)");
  analyze_cmd->add_flag("--optimize", an_optimize, "also locally optimize the Moebius candidate");

  std::string ce_input, ce_out;
  auto* center_cmd = app.add_subcommand("center", "find psi with mean(u o psi) = 0");
  center_cmd->add_option("--input", ce_input, "map file")->required();
  center_cmd->add_option("--out", ce_out, "write the centered map");

  std::string sw_config, sw_out, sw_reports;
  auto* sweep_cmd = app.add_subcommand("sweep", "rigidity sweep over families and eps");
  sweep_cmd->add_option("--config", sw_config, "JSON experiment config")->required();
  sweep_cmd->add_option("--out", sw_out, "CSV output (overrides config)");
  sweep_cmd->add_option("--reports", sw_reports, "directory for per-row JSON reports");

  GenerateArgs conv;
  std::string conv_grids = "24,48,96";
  auto* converge_cmd = app.add_subcommand("converge", "resolution study for one family");
  add_generator_options(converge_cmd, conv);
  converge_cmd->add_option("--grids", conv_grids, "comma separated n_theta values");

  double k_theta = kDefaultTheta;
  auto* constants_cmd = app.add_subcommand("constants", "explicit constants c1(theta), c(theta)");
  constants_cmd->add_option("--theta", k_theta, "closeness threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kHardError;
  }

  try {
    if (*generate_cmd) return cmd_generate(gen, gen_out);
    if (*analyze_cmd) return cmd_analyze(an_input, an_theta, an_out, an_optimize);
    if (*center_cmd) return cmd_center(ce_input, ce_out);
    if (*sweep_cmd) return cmd_sweep(sw_config, sw_out, sw_reports);
    if (*converge_cmd) return cmd_converge(conv, conv_grids);
    if (*constants_cmd) return cmd_constants(k_theta);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kHardError;
  }
  return kHardError;
}
