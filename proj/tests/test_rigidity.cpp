#include <cmath>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "sphererig/errors.hpp"
#include "sphererig/harmonics.hpp"
#include "sphererig/report_json.hpp"
#include "sphererig/rigidity.hpp"
#include "test_support.hpp"

using namespace sphererig;
using testing::Vec3;

namespace {

const GridPtr& grid48() {
  static const GridPtr g = SphereGrid::build(48);
  return g;
}

SphereMap graph_map(const GridPtr& grid, double eps) {
  return normalize_to_sphere(
      testing::field(grid, [eps](const Vec3& x) { return Vec3(x + eps * testing::quadratic_harmonic(x)); }));
}

SphereMap centered(const SphereMap& u) { return compose_map(u, center_map(u).psi); }

Mat3 exp_so3(const Vec3& w) {
  const double a = w.norm();
  return a == 0.0 ? Mat3::Identity() : testing::axis_rotation(w / a, a);
}

// dist^2(A, SO(3)) by random sampling followed by shrinking random local search.
double sampled_rotation_distance(const Mat3& a, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mat3 best = Mat3::Identity();
  double f = (a - best).squaredNorm();
  for (int k = 0; k < 20000; ++k) {
    const Mat3 q = testing::random_rotation(rng);
    const double fq = (a - q).squaredNorm();
    if (fq < f) { f = fq; best = q; }
  }
  std::normal_distribution<double> n(0.0, 1.0);
  for (double s = 0.1; s > 1e-8; s *= 0.5) {
    for (int k = 0; k < 200; ++k) {
      const Mat3 q = exp_so3(s * Vec3(n(rng), n(rng), n(rng))) * best;
      const double fq = (a - q).squaredNorm();
      if (fq < f) { f = fq; best = q; }
    }
  }
  return f;
}

Mat3 random_positive_det(std::mt19937_64& rng, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  Mat3 a;
  do {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + u(rng);
  } while (a.determinant() <= 0.05);
  return a;
}

VectorField random_band_field(const GridPtr& grid, std::uint64_t seed, int lo, int hi) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SHExpansion e(grid, hi, 3);
  for (int c = 0; c < 3; ++c)
    for (int l = lo; l <= hi; ++l)
      for (int m = -l; m <= l; ++m) e.coeff(c, l, m) = n(rng) / l;
  return sh_synthesize_vector(e);
}

}  // namespace

TEST_CASE("linear coefficient") {
  const auto grid = SphereGrid::build(24);
  const auto id = identity_map(grid);
  CHECK((linear_coefficient(id) - Mat3::Identity()).norm() < 1e-12);
  std::mt19937_64 rng(2);
  const Mat3 r = testing::random_rotation(rng);
  CHECK((linear_coefficient(rotate(id, r)) - r).norm() < 1e-12);
  CHECK((linear_coefficient(reflect(id)) - Vec3(1, 1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-12);

  const auto u = centered(graph_map(grid, 0.3));
  CHECK((linear_coefficient(u) - linear_coefficient_spectral(u)).norm() < 1e-12);

  const auto off = normalize_to_sphere(
      testing::field(grid, [](const Vec3& x) { return Vec3(x + 0.2 * Vec3::UnitZ()); }));
  CHECK_THROWS_AS(linear_coefficient(off), InvalidArgument);
}

TEST_CASE("polar decomposition examples") {
  const auto p = polar_decompose(Mat3::Identity());
  CHECK((p.R0 - Mat3::Identity()).norm() < 1e-15);
  CHECK(p.Lambda_sq < 1e-30);

  Mat3 d = Mat3::Identity();
  d(0, 0) = 1.1;
  const auto q = polar_decompose(d);
  CHECK((q.R0 - Mat3::Identity()).norm() < 1e-14);
  CHECK(std::abs(q.Lambda_sq - 0.01) < 1e-14);
  CHECK(std::abs(q.lambda_sum - 0.1) < 1e-14);

  std::mt19937_64 rng(6);
  for (int k = 0; k < 10; ++k) {
    const Mat3 r = testing::random_rotation(rng);
    const Mat3 a = r * Vec3(1.2, 1.0, 0.9).asDiagonal();
    const auto pd = polar_decompose(a);
    CHECK((pd.R0 - r).norm() < 1e-11);
    CHECK((pd.shifts - Vec3(-0.1, 0.0, 0.2)).norm() < 1e-11);
    CHECK(pd.alpha[0] <= pd.alpha[1]);
    CHECK(pd.alpha[1] <= pd.alpha[2]);
  }

  CHECK_THROWS_AS(polar_decompose(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()), OutOfRegime);
  CHECK_THROWS_AS(polar_decompose(Mat3::Zero()), OutOfRegime);
}

TEST_CASE("polar invariants on random matrices") {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    const Mat3 a = random_positive_det(rng, 0.5);
    const auto p = polar_decompose(a);
    CHECK((p.R0 * p.S - a).norm() < 1e-11);
    CHECK((p.R0.transpose() * p.R0 - Mat3::Identity()).norm() < 1e-11);
    CHECK(std::abs(p.R0.determinant() - 1.0) < 1e-11);
    CHECK((p.S - p.S.transpose()).norm() < 1e-12);
    CHECK(p.alpha.minCoeff() > 0.0);
    CHECK(std::abs(det_from_shifts(p) - a.determinant()) < 1e-11);
    CHECK(std::abs(p.detA - a.determinant()) < 1e-12);
  }
}

TEST_CASE("Lambda^2 equals the squared distance to SO(3)") {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 5; ++k) {
    const Mat3 a = random_positive_det(rng, 0.3);
    const double oracle = sampled_rotation_distance(a, 100 + k);
    const auto p = polar_decompose(a);
    CHECK(p.Lambda_sq <= oracle + 1e-12);
    CHECK(std::abs(p.Lambda_sq - oracle) < 1e-9);
  }
}

TEST_CASE("w field") {
  const auto grid = SphereGrid::build(24);
  const auto id = identity_map(grid);
  for (const auto& v : w_field(id, Mat3::Identity()).values) CHECK(v.norm() < 1e-15);
  std::mt19937_64 rng(3);
  const Mat3 r = testing::random_rotation(rng);
  for (const auto& v : w_field(rotate(id, r), r).values) CHECK(v.norm() < 1e-14);

  for (double eps : {0.05, 0.1, 0.2}) {
    const auto u = centered(graph_map(grid, eps));
    const Mat3 a = linear_coefficient(u);
    const auto dw = tangential_gradient(w_field(u, a));
    double lhs = 0.0, gap = 0.0;
    for (std::size_t i = 0; i < grid->size(); ++i) {
      const Vec3& x = grid->nodes()[i];
      const Mat3 pt = Mat3::Identity() - x * x.transpose();
      lhs += grid->weights()[i] * dw[i].squaredNorm();
      gap += grid->weights()[i] * (u.gradient()[i] - a * pt).squaredNorm();
    }
    CHECK(lhs <= a.inverse().squaredNorm() * gap + 1e-14);
  }

  CHECK(in_regime(Mat3::Identity()));
  CHECK_FALSE(in_regime(Vec3(0.1, 1, 1).asDiagonal().toDenseMatrix()));
  CHECK_FALSE(in_regime(Vec3(1, 1, -1).asDiagonal().toDenseMatrix()));
  CHECK_THROWS_AS(w_field(id, Vec3(0.1, 1, 1).asDiagonal().toDenseMatrix()), OutOfRegime);
}

TEST_CASE("qv3 and cubic term on constant and linear fields") {
  const auto grid = SphereGrid::build(16);
  const auto zero = testing::field(grid, [](const Vec3&) { return Vec3::Zero().eval(); });
  const auto constant = testing::field(grid, [](const Vec3&) { return Vec3(0.3, -1.2, 2.0); });
  const auto x = testing::field(grid, [](const Vec3& p) { return p; });
  CHECK(qv3(zero) == 0.0);
  CHECK(std::abs(qv3(constant)) < 1e-12);
  CHECK(std::abs(qv3(x) - 3.0) < 1e-10);
  CHECK(cubic_term(zero) == 0.0);
  CHECK(std::abs(cubic_term(constant)) < 1e-12);
  CHECK(std::abs(cubic_term(x) - 1.0) < 1e-10);

  // For w = Bx: qv3 = ((tr B)^2 - tr(B^2)) / 2 and cubic = det B.
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 10; ++k) {
    Mat3 b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b(i, j) = u(rng);
    const auto w = testing::field(grid, [&](const Vec3& p) { return Vec3(b * p); });
    CHECK(std::abs(qv3(w) - 0.5 * (b.trace() * b.trace() - (b * b).trace())) < 1e-10);
    CHECK(std::abs(cubic_term(w) - b.determinant()) < 1e-10);
  }
}

TEST_CASE("qv3 bound on mean-zero fields without a degree-1 part") {
  const auto grid = SphereGrid::build(24);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto w = random_band_field(grid, seed, 2, 6);
    const auto dw = tangential_gradient(w);
    std::vector<double> e(dw.size());
    for (std::size_t i = 0; i < dw.size(); ++i) e[i] = dw[i].squaredNorm();
    const double energy = grid_average(*grid, e);
    CHECK(std::abs(qv3(w, dw)) <= 3.0 / (2.0 * std::sqrt(2.0)) * energy + 1e-9);
    CHECK(qv3(w, dw) == qv3(w));
  }
}

TEST_CASE("Wente inequality") {
  const auto grid = SphereGrid::build(24);
  const auto zero = wente_check(testing::field(grid, [](const Vec3&) { return Vec3::Zero().eval(); }));
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  const auto id = wente_check(testing::field(grid, [](const Vec3& p) { return p; }));
  CHECK(std::abs(id.lhs - 1.0) < 1e-9);
  CHECK(std::abs(id.rhs - 1.0) < 1e-9);
  const auto small = wente_check(
      testing::field(grid, [](const Vec3& p) { return Vec3(0.1 * testing::quadratic_harmonic(p)); }));
  CHECK(small.lhs <= small.rhs + 1e-9);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = wente_check(random_band_field(grid, 40 + seed, 1, 5));
    CHECK(b.lhs <= b.rhs + 1e-9);
  }
}

TEST_CASE("degree-expansion identity") {
  const auto grid = SphereGrid::build(24);
  const auto id = identity_map(grid);
  CHECK(degree_identity_residual(id, Mat3::Identity()) < 1e-12);
  std::mt19937_64 rng(9);
  const Mat3 r = testing::random_rotation(rng);
  CHECK(degree_identity_residual(rotate(id, r), r) < 1e-12);

  // Centered Moebius maps: the residual is a discretization error and shrinks under refinement.
  const auto phi = MoebiusTransform::dilation(Vec3(1, 2, 2).normalized(), 3.0);
  double prev = INFINITY;
  for (int n : {16, 24, 32, 48}) {
    const auto u = centered(as_map(phi, SphereGrid::build(n)));
    const double res = degree_identity_residual(u, linear_coefficient(u));
    INFO("n_theta ", n, " residual ", res);
    CHECK((res < prev || res < 1e-13));
    prev = res;
  }
  CHECK(prev <= 1e-6);
}

TEST_CASE("Poincare gap") {
  const auto grid = SphereGrid::build(32);
  const auto id = identity_map(grid);
  const auto b0 = poincare_gap_check(id, Mat3::Identity());
  CHECK(b0.lhs < 1e-24);
  CHECK(std::abs(b0.rhs) < 1e-12);
  std::mt19937_64 rng(1);
  const Mat3 r = testing::random_rotation(rng);
  const auto b1 = poincare_gap_check(rotate(id, r), r);
  CHECK(b1.lhs < 1e-24);

  for (double eps : {0.05, 0.2}) {
    const auto u = centered(graph_map(grid, eps));
    const auto b = poincare_gap_check(u, linear_coefficient(u));
    CHECK(b.lhs <= b.rhs + 1e-8);
    CHECK(std::abs(b.rhs - 3.0 * deficit(u)) < 1e-15);
  }
}

TEST_CASE("explicit constants") {
  const auto k0 = rigidity_constants(0.0);
  CHECK(std::abs(k0.c1 - 175.05) < 0.005);
  CHECK(std::abs(k0.c - 122.70) < 0.005);
  CHECK(k0.c == 6.0 + 2.0 / 3.0 * k0.c1);
  const auto k = rigidity_constants(0.1);
  CHECK(k.c > k0.c);
  CHECK_NOTHROW(rigidity_constants(3.0 * std::sqrt(2.0) / 4.0));
  CHECK_THROWS_AS(rigidity_constants(3.0 * std::sqrt(2.0)), InvalidArgument);
  CHECK_THROWS_AS(rigidity_constants(-0.1), InvalidArgument);
}

TEST_CASE("analyze: exact Moebius input") {
  for (std::uint64_t seed : {1u, 2u}) {
    const auto u = as_map(random_moebius(seed, 0.25, 4.0), grid48());
    const auto rep = analyze(u);
    CHECK(rep.status == ReportStatus::ok);
    CHECK(std::abs(rep.deficit) <= 1e-7);
    CHECK(rep.lhs <= 1e-6);
    CHECK(rep.identity_residual <= 1e-6);
    CHECK_FALSE(rep.ratio.has_value());
    const auto expected = compose(MoebiusTransform::rotation(rep.polar->R0), inverse(*rep.psi));
    CHECK(max_deviation(*rep.phi, expected) < 1e-12);
  }
}

TEST_CASE("analyze: rotated identity") {
  const auto grid = SphereGrid::build(24);
  std::mt19937_64 rng(15);
  const Mat3 r = testing::random_rotation(rng);
  const auto rep = analyze(rotate(identity_map(grid), r));
  CHECK(rep.status == ReportStatus::ok);
  CHECK(max_deviation(*rep.phi, MoebiusTransform::rotation(r)) < 1e-10);
  CHECK(rep.lhs <= 1e-10);
  CHECK(rep.certified);
}

TEST_CASE("analyze: graph perturbations of the identity") {
  const auto grid = SphereGrid::build(32);
  std::vector<double> ratios;
  for (double eps : {0.1, 0.05, 0.025}) {
    const auto rep = analyze(graph_map(grid, eps));
    REQUIRE(rep.status == ReportStatus::ok);
    REQUIRE(rep.ratio.has_value());
    ratios.push_back(*rep.ratio);
    CHECK(rep.poincare_lhs <= rep.poincare_bound + 1e-8);
    CHECK(std::abs(rep.cubic) <= rep.wente_rhs + 1e-9);
    if (rep.in_gate) CHECK(*rep.ratio <= rep.c);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("analyze: reflection reduction and inadmissible input") {
  const auto grid = SphereGrid::build(24);
  const auto v = graph_map(grid, 0.1);
  const auto u = reflect(v);
  const auto a = analyze(v);
  const auto b = analyze(u);
  CHECK(b.reflected);
  CHECK(std::abs(b.degree + 1.0) < 1e-12);
  CHECK(std::abs(a.lhs - b.lhs) < 1e-10);
  CHECK(std::abs(a.deficit - b.deficit) < 1e-10);

  const auto flat = normalize_to_sphere(
      testing::field(grid, [](const Vec3& x) { return Vec3(x + 2.0 * Vec3::UnitZ()); }));
  const auto c = analyze(flat);
  CHECK(c.status == ReportStatus::inadmissible);
  CHECK_FALSE(c.phi.has_value());
}

TEST_CASE("analyze: exhausted centering is reported, not thrown") {
  const auto u = as_map(MoebiusTransform::dilation(Vec3::UnitY(), 3.0), grid48());
  AnalyzeOptions opts;
  opts.centering.max_iterations = 1;
  opts.centering.max_restarts = 0;
  const auto rep = analyze(u, 0.1, opts);
  CHECK(rep.status == ReportStatus::centering_failed);
  CHECK(rep.centering_residual > 1e-8);
}

TEST_CASE("report JSON") {
  const auto grid = SphereGrid::build(24);
  const auto rep = analyze(graph_map(grid, 0.05));
  const auto j = nlohmann::json::parse(report_to_json(rep));
  for (const char* key : {"deficit", "lhs", "ratio", "detA", "Lambda_sq", "qv3", "cubic",
                          "identity_residual", "psi", "phi", "status", "theta", "c1", "c"})
    CHECK(j.contains(key));
  CHECK(j["status"] == "ok");
  CHECK(j["deficit"].get<double>() == rep.deficit);
  CHECK(j["ratio"].get<double>() == *rep.ratio);
  CHECK(MoebiusTransform::from_line(j["phi"].get<std::string>()).parameters() == rep.phi->parameters());

  const auto exact = analyze(identity_map(grid));
  const auto k = nlohmann::json::parse(report_to_json(exact));
  CHECK(k["ratio"].is_null());
}

TEST_CASE("best_moebius") {
  const auto grid = SphereGrid::build(24);
  const auto phi0 = MoebiusTransform(testing::axis_rotation(Vec3(0, 1, 1), 0.4), Vec3(1, 0, 1).normalized(), 1.5);
  const auto u = as_map(phi0, grid);
  const auto same = best_moebius(u, phi0);
  CHECK(max_deviation(same, phi0) < 1e-12);

  const auto start = MoebiusTransform::from_boost(
      testing::axis_rotation(Vec3(1, 0, 0), 0.05) * phi0.R(), phi0.boost() + Vec3(0.03, -0.02, 0.01));
  const double f0 = gradient_distance_sq(u, as_map(start, grid));
  const auto better = best_moebius(u, start);
  const double f1 = gradient_distance_sq(u, as_map(better, grid));
  CHECK(f0 > 1e-4);
  CHECK(f1 <= 1e-8);

  const auto v = graph_map(grid, 0.2);
  const auto init = MoebiusTransform::rotation(testing::axis_rotation(Vec3(0, 0, 1), 0.1));
  const double g0 = gradient_distance_sq(v, as_map(init, grid));
  const double g1 = gradient_distance_sq(v, as_map(best_moebius(v, init, 10), grid));
  CHECK(g1 <= g0);
}
