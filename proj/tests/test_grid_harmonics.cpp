#include <cmath>
#include <random>

#include "doctest.h"
#include "sphererig/errors.hpp"
#include "sphererig/grid.hpp"
#include "sphererig/harmonics.hpp"
#include "test_support.hpp"

using namespace sphererig;
using testing::Vec3;

namespace {

double double_factorial(int n) {
  double r = 1.0;
  for (int k = n; k > 1; k -= 2) r *= k;
  return r;
}

// Average of x^a y^b z^c over the unit sphere.
double monomial_average(int a, int b, int c) {
  if (a % 2 || b % 2 || c % 2) return 0.0;
  return double_factorial(a - 1) * double_factorial(b - 1) * double_factorial(c - 1) /
         double_factorial(a + b + c + 1);
}

double direct_average(const SphereGrid& grid, const std::function<double(const Vec3&)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) s += grid.weights()[i] * f(grid.nodes()[i]);
  return s;
}

// Random polynomial of total degree <= 4 in the ambient coordinates.
struct RandomPoly {
  std::vector<std::array<int, 3>> powers;
  std::vector<double> coeffs;

  explicit RandomPoly(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int a = 0; a <= 4; ++a)
      for (int b = 0; a + b <= 4; ++b)
        for (int c = 0; a + b + c <= 4; ++c) {
          powers.push_back({a, b, c});
          coeffs.push_back(u(rng));
        }
  }
  double operator()(const Vec3& x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < powers.size(); ++i)
      s += coeffs[i] * std::pow(x[0], powers[i][0]) * std::pow(x[1], powers[i][1]) *
           std::pow(x[2], powers[i][2]);
    return s;
  }
};

}  // namespace

TEST_CASE("grid layout and weights") {
  const auto grid = SphereGrid::build(16, 32);
  CHECK(grid->size() == 512);
  CHECK(grid->max_degree() == 14);
  double wsum = 0.0;
  for (double w : grid->weights()) {
    CHECK(w > 0.0);
    wsum += w;
  }
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
  for (int r = 1; r < grid->n_theta(); ++r) CHECK(grid->theta(r) > grid->theta(r - 1));
  CHECK(SphereGrid::build(12)->n_phi() == 24);
}

TEST_CASE("grid frames are right-handed and orthonormal") {
  const auto grid = SphereGrid::build(12, 30);
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& x = grid->nodes()[i];
    const Vec3& t1 = grid->tau1()[i];
    const Vec3& t2 = grid->tau2()[i];
    CHECK(std::abs(x.norm() - 1.0) < 1e-14);
    CHECK(std::abs(t1.norm() - 1.0) < 1e-14);
    CHECK(std::abs(t2.norm() - 1.0) < 1e-14);
    CHECK(std::abs(t1.dot(x)) < 1e-14);
    CHECK(std::abs(t2.dot(x)) < 1e-14);
    CHECK((t1.cross(t2) - x).norm() < 1e-14);
  }
}

TEST_CASE("grid construction rejects bad sizes") {
  CHECK_THROWS_AS(SphereGrid::build(3, 32), InvalidArgument);
  CHECK_THROWS_AS(SphereGrid::build(16, 6), InvalidArgument);
  CHECK_THROWS_AS(SphereGrid::build(16, 31), InvalidArgument);
}

TEST_CASE("mean of simple fields") {
  const auto grid = SphereGrid::build(16);
  CHECK(mean(ScalarField::from_function(grid, [](const Vec3&) { return 1.0; })) ==
        doctest::Approx(1.0).epsilon(1e-15));
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(mean(ScalarField::from_function(grid, [i](const Vec3& x) { return x[i]; }))) <
          1e-14);
    for (int j = 0; j < 3; ++j) {
      const double m =
          mean(ScalarField::from_function(grid, [i, j](const Vec3& x) { return x[i] * x[j]; }));
      CHECK(std::abs(m - (i == j ? 1.0 / 3.0 : 0.0)) < 1e-12);
    }
  }
}

TEST_CASE("quadrature is exact for polynomials up to degree n_theta") {
  const int n = 16;
  const auto grid = SphereGrid::build(n);
  for (int a = 0; a <= n; ++a)
    for (int b = 0; a + b <= n; ++b)
      for (int c = 0; a + b + c <= n; ++c) {
        const double q = direct_average(*grid, [&](const Vec3& x) {
          return std::pow(x[0], a) * std::pow(x[1], b) * std::pow(x[2], c);
        });
        INFO("monomial ", a, " ", b, " ", c);
        CHECK(std::abs(q - monomial_average(a, b, c)) < 1e-12);
      }
}

TEST_CASE("analysis of x3 has a single degree-1 coefficient") {
  const auto grid = SphereGrid::build(16);
  const auto e = sh_analyze(ScalarField::from_function(grid, [](const Vec3& x) { return x[2]; }));
  for (int l = 0; l <= e.k_max(); ++l)
    for (int m = -l; m <= l; ++m) {
      const double c = e.coeff(0, l, m);
      if (l == 1 && m == 0)
        CHECK(std::abs(c - 1.0 / std::sqrt(3.0)) < 1e-14);
      else
        CHECK(std::abs(c) < 1e-12);
    }
}

TEST_CASE("round trip reproduces band-limited fields") {
  const auto grid = SphereGrid::build(16);
  const auto f = ScalarField::from_function(grid, [](const Vec3& x) { return x[0] * x[1]; });
  const auto g = sh_synthesize_scalar(sh_analyze(f));
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(std::abs(g.values[i] - f.values[i]) < 1e-11);

  const auto v = testing::field(grid, [](const Vec3& x) {
    return Vec3(x[0] * x[2] * x[2], x[1] - x[0] * x[0] * x[1], 0.5 + x[2] * x[1]);
  });
  const auto w = sh_synthesize_vector(sh_analyze(v));
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK((w.values[i] - v.values[i]).norm() < 1e-11);
}

TEST_CASE("Parseval against direct quadrature") {
  const auto grid = SphereGrid::build(16);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const RandomPoly p(seed);
    const auto f = ScalarField::from_function(grid, p);
    const double direct = direct_average(*grid, [&](const Vec3& x) { return p(x) * p(x); });
    const auto e = sh_analyze(f);
    CHECK(std::abs(e.power() - direct) < 1e-10 * std::max(1.0, direct));
    for (int k = 5; k <= e.k_max(); ++k) CHECK(e.degree_power(k) < 1e-24);
  }
}

TEST_CASE("analysis above the grid resolution is rejected") {
  const auto grid = SphereGrid::build(10);
  const auto f = ScalarField::from_function(grid, [](const Vec3& x) { return x[0]; });
  CHECK_NOTHROW(sh_analyze(f, 8));
  CHECK_THROWS_AS(sh_analyze(f, 9), ResolutionError);
}

TEST_CASE("evaluation at arbitrary points") {
  const auto grid = SphereGrid::build(16);
  const RandomPoly p(11);
  const auto e = sh_analyze(ScalarField::from_function(grid, p));
  std::mt19937_64 rng(5);
  std::vector<Vec3> pts;
  for (int i = 0; i < 50; ++i) pts.push_back(testing::random_unit(rng));
  const auto vals = e.evaluate(pts);
  for (int i = 0; i < 50; ++i) CHECK(std::abs(vals[i] - p(pts[i])) < 1e-11);
}

TEST_CASE("projections") {
  const auto grid = SphereGrid::build(16);
  const auto id = testing::field(grid, [](const Vec3& x) { return x; });
  const auto p0 = project(id, 0);
  for (const auto& v : p0.values) CHECK(v.norm() < 1e-14);
  const auto p1 = project(id, 1);
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK((p1.values[i] - id.values[i]).norm() < 1e-13);

  const auto q = ScalarField::from_function(grid, [](const Vec3& x) { return x[0] * x[1]; });
  const auto q2 = project(q, 2);
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(std::abs(q2.values[i] - q.values[i]) < 1e-13);

  // Pi_0 is the mean; projections of distinct degrees sum back to the field.
  const RandomPoly p(4);
  const auto f = ScalarField::from_function(grid, p);
  CHECK(std::abs(project(f, 0).values[0] - mean(f)) < 1e-13);
  std::vector<double> sum(grid->size(), 0.0);
  for (int k = 0; k <= 4; ++k) {
    const auto fk = project(f, k);
    const auto fkk = project(fk, k);
    for (std::size_t i = 0; i < grid->size(); ++i) {
      sum[i] += fk.values[i];
      CHECK(std::abs(fkk.values[i] - fk.values[i]) < 1e-12);
    }
  }
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(std::abs(sum[i] - f.values[i]) < 1e-11);
}

TEST_CASE("tangential gradient of coordinate functions and identity") {
  const auto grid = SphereGrid::build(16);
  const auto g = tangential_gradient(ScalarField::from_function(grid, [](const Vec3& x) { return x[2]; }));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& x = grid->nodes()[i];
    CHECK((g.values[i] - (Vec3::UnitZ() - x[2] * x)).norm() < 1e-10);
  }
  const auto du = tangential_gradient(testing::field(grid, [](const Vec3& x) { return x; }));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const Vec3& x = grid->nodes()[i];
    const Mat3 pt = Mat3::Identity() - x * x.transpose();
    CHECK((du[i] - pt).norm() < 1e-10);
    CHECK(std::abs(du[i].squaredNorm() - 2.0) < 1e-10);
  }
}

TEST_CASE("tangential gradient matches finite differences along great circles") {
  const auto grid = SphereGrid::build(16);
  auto f = [](const Vec3& x) { return x[0] * x[1]; };
  const auto g = tangential_gradient(ScalarField::from_function(grid, f));
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::size_t> pick(0, grid->size() - 1);
  const double h = 1e-4;
  for (int k = 0; k < 20; ++k) {
    const std::size_t i = pick(rng);
    const Vec3& x = grid->nodes()[i];
    for (const Vec3& t : {grid->tau1()[i], grid->tau2()[i]}) {
      auto along = [&](double s) { return f(std::cos(s) * x + std::sin(s) * t); };
      const double fd = (along(h) - along(-h)) / (2 * h);
      CHECK(std::abs(g.values[i].dot(t) - fd) < 1e-6);
    }
    CHECK(std::abs(g.values[i].dot(x)) < 1e-10);
  }
}

TEST_CASE("gradients are tangent") {
  const auto grid = SphereGrid::build(20);
  const RandomPoly p(8);
  const auto g = tangential_gradient(ScalarField::from_function(grid, p));
  for (std::size_t i = 0; i < grid->size(); ++i) CHECK(std::abs(g.values[i].dot(grid->nodes()[i])) < 1e-10);
}

TEST_CASE("Laplace eigenvalues by Rayleigh quotient") {
  const auto grid = SphereGrid::build(16);
  CHECK(std::abs(laplace_eigencheck(grid, 1) - 2.0) < 1e-10);
  CHECK(std::abs(laplace_eigencheck(grid, 2) - 6.0) < 1e-10);
  CHECK(std::abs(rayleigh_quotient(ScalarField::from_function(grid, [](const Vec3& x) { return x[0]; })) -
                 2.0) < 1e-10);
  CHECK_THROWS_AS(laplace_eigencheck(grid, 3), InvalidArgument);
}

TEST_CASE("spectral differentiation is consistent with the eigenvalue sum") {
  const auto grid = SphereGrid::build(20);
  const int k_max = 7;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  SHExpansion ef(grid, k_max, 1), eg(grid, k_max, 1);
  for (int l = 0; l <= k_max; ++l)
    for (int m = -l; m <= l; ++m) {
      ef.coeff(0, l, m) = u(rng);
      eg.coeff(0, l, m) = u(rng);
    }
  const auto f = sh_synthesize_scalar(ef);
  const auto g = sh_synthesize_scalar(eg);
  const auto df = tangential_gradient(f);
  const auto dg = tangential_gradient(g);
  std::vector<double> inner(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) inner[i] = df.values[i].dot(dg.values[i]);
  const double lhs = grid_average(*grid, inner);

  const auto af = sh_analyze(f, k_max);
  const auto ag = sh_analyze(g, k_max);
  double rhs = 0.0;
  for (int l = 0; l <= k_max; ++l)
    for (int m = -l; m <= l; ++m) rhs += laplace_eigenvalue(l) * af.coeff(0, l, m) * ag.coeff(0, l, m);
  CHECK(std::abs(lhs - rhs) < 1e-9);
}

TEST_CASE("gauss-legendre nodes and weights") {
  std::vector<double> x, w;
  gauss_legendre(5, x, w);
  double s = 0.0;
  for (double wi : w) s += wi;
  CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
  // exact for x^8 with 5 nodes: integral over [-1,1] is 2/9
  double q = 0.0;
  for (int i = 0; i < 5; ++i) q += w[i] * std::pow(x[i], 8);
  CHECK(std::abs(q - 2.0 / 9.0) < 1e-15);
}
