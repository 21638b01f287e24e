#include "sphererig/centering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sphererig/errors.hpp"

namespace sphererig {

namespace {

class MeanOfComposition {
 public:
  explicit MeanOfComposition(const SphereMap& u) : u_(u) { u_.expansion(); }

  Vec3 operator()(const Vec3& boost) const {
    return mean(compose_map(u_, MoebiusTransform::from_boost(Mat3::Identity(), boost))
                    .as_field());
  }

 private:
  const SphereMap& u_;
};

struct NewtonOutcome {
  Vec3 boost;
  Vec3 residual;
  int iterations = 0;
};

NewtonOutcome newton(const MeanOfComposition& f, Vec3 b, const CenteringOptions& opt) {
  const double max_boost = -std::log(opt.min_lambda);
  Vec3 fb = f(b);
  int it = 0;
  for (; it < opt.max_iterations && fb.norm() > opt.target; ++it) {
    const double h = opt.fd_step * std::max(1.0, b.norm());
    Mat3 jac;
    for (int k = 0; k < 3; ++k) {
      Vec3 bk = b;
      bk[k] += h;
      jac.col(k) = (f(bk) - fb) / h;
    }
    const Eigen::FullPivLU<Mat3> lu(jac);
    if (!lu.isInvertible()) break;
    const Vec3 step = -lu.solve(fb);

    bool accepted = false;
    double alpha = 1.0;
    for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
      Vec3 trial = b + alpha * step;
      // never leave the admissible dilation range
      if (trial.norm() > max_boost) trial *= max_boost / trial.norm();
      const Vec3 ft = f(trial);
      if (ft.norm() < (1.0 - 1e-4 * alpha) * fb.norm()) {
        b = trial;
        fb = ft;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return {b, fb, it};
}

}  // namespace

Vec3 homotopy_F(const SphereMap& u, const Vec3& xi, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw InvalidArgument("homotopy_F: lambda must lie in (0, 1]");
  }
  return mean(compose_map(u, MoebiusTransform::dilation(xi.normalized(), lambda)).as_field());
}

CenteringResult center_map(const SphereMap& u, const CenteringOptions& opt) {
  const double deg = degree(u);
  if (!(std::abs(deg - 1.0) <= opt.degree_tolerance)) {
    throw InadmissibleMap("center_map: degree " + std::to_string(deg) + " is not 1", deg);
  }
  const MeanOfComposition f(u);
  const double max_boost = -std::log(opt.min_lambda);

  // Restart schedule: identity first, then grid-search seeds.
  std::vector<Vec3> starts{Vec3::Zero()};
  int total_iterations = 0;
  double best = std::numeric_limits<double>::infinity();
  Vec3 best_boost = Vec3::Zero();

  auto try_start = [&](const Vec3& b0, int index) -> std::optional<CenteringResult> {
    const auto out = newton(f, b0, opt);
    total_iterations += out.iterations;
    const double r = out.residual.norm();
    if (r < best) {
      best = r;
      best_boost = out.boost;
    }
    const bool bubbling = out.boost.norm() >= max_boost * (1.0 - 1e-12);
    if (r <= opt.tolerance && !bubbling) {
      return CenteringResult{MoebiusTransform::from_boost(Mat3::Identity(), out.boost),
                             out.residual, total_iterations, index};
    }
    return std::nullopt;
  };

  if (auto ok = try_start(starts[0], 0)) return *ok;

  struct Seed {
    double residual;
    int order;
    Vec3 boost;
  };
  std::vector<Seed> seeds;
  const auto dirs = fibonacci_sphere(26);
  int order = 0;
  for (int e = 6; e >= 1; --e) {
    const double t = e * std::log(2.0);
    for (const auto& xi : dirs) {
      const Vec3 b = t * xi;
      seeds.push_back({f(b).norm(), order++, b});
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Seed& a, const Seed& b) { return a.residual < b.residual; });
  const int n = std::min<int>(opt.max_restarts, static_cast<int>(seeds.size()));
  for (int k = 0; k < n; ++k) {
    if (auto ok = try_start(seeds[k].boost, k + 1)) return *ok;
  }

  const bool bubbling = best_boost.norm() >= max_boost * (1.0 - 1e-12);
  throw CenteringFailure(std::string("center_map: no mean-zero reparametrization found") +
                             (bubbling ? " (dilation hit the bubbling bound)" : "") +
                             "; best residual " + std::to_string(best),
                         best, best_boost);
}

}  // namespace sphererig
