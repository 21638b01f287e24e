#include "sphererig/harmonics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphererig/errors.hpp"

namespace sphererig {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

inline double m_scale(int m) { return m == 0 ? 1.0 : kSqrt2; }

void check_degree(const SphereGrid& grid, int k_max) {
  if (k_max < 0 || k_max > grid.max_degree()) {
    throw ResolutionError("harmonic degree " + std::to_string(k_max) +
                          " exceeds grid resolution (max " +
                          std::to_string(grid.max_degree()) + " for " +
                          std::to_string(grid.n_theta()) + "x" +
                          std::to_string(grid.n_phi()) + ")");
  }
}

// Forward transform of one scalar component stored with stride in `values`.
template <typename Get>
void analyze_component(const SphereGrid& grid, int k_max, Get get, double* out) {
  const SHBasis& basis = grid.basis();
  const int nt = grid.n_theta(), np = grid.n_phi();
  std::vector<double> a(k_max + 1), b(k_max + 1);
  for (int i = 0; i < nt; ++i) {
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (int j = 0; j < np; ++j) {
      const double f = get(static_cast<std::size_t>(i) * np + j);
      for (int m = 0; m <= k_max; ++m) {
        a[m] += f * basis.cos_mphi(j, m);
        b[m] += f * basis.sin_mphi(j, m);
      }
    }
    const double w = grid.ring_weight(i);
    for (int m = 0; m <= k_max; ++m) {
      const double sa = w * m_scale(m) * a[m];
      const double sb = w * m_scale(m) * b[m];
      for (int l = m; l <= k_max; ++l) {
        const double p = basis.p(i, l, m);
        out[sh_index(l, m)] += sa * p;
        if (m > 0) out[sh_index(l, -m)] += sb * p;
      }
    }
  }
}

// Synthesis of value (and optionally gradient) of one component on the grid.
void synthesize_component(const SphereGrid& grid, int k_max, const double* c,
                          double* values, Vec3* gradient) {
  const SHBasis& basis = grid.basis();
  const int nt = grid.n_theta(), np = grid.n_phi();
  std::vector<double> vc(k_max + 1), vs(k_max + 1), dc(k_max + 1), ds(k_max + 1);
  const auto& tau1 = grid.tau1();
  const auto& tau2 = grid.tau2();
  for (int i = 0; i < nt; ++i) {
    for (int m = 0; m <= k_max; ++m) {
      double sc = 0.0, ss = 0.0, tc = 0.0, ts = 0.0;
      for (int l = m; l <= k_max; ++l) {
        const double p = basis.p(i, l, m);
        const double dp = basis.dp(i, l, m);
        const double cc = c[sh_index(l, m)];
        const double cs = m > 0 ? c[sh_index(l, -m)] : 0.0;
        sc += cc * p;
        ss += cs * p;
        tc += cc * dp;
        ts += cs * dp;
      }
      const double sm = m_scale(m);
      vc[m] = sm * sc;
      vs[m] = sm * ss;
      dc[m] = sm * tc;
      ds[m] = sm * ts;
    }
    const double inv_s = 1.0 / grid.sin_theta(i);
    for (int j = 0; j < np; ++j) {
      double f = 0.0, g_theta = 0.0, g_phi = 0.0;
      for (int m = 0; m <= k_max; ++m) {
        const double cm = basis.cos_mphi(j, m), sm = basis.sin_mphi(j, m);
        f += vc[m] * cm + vs[m] * sm;
        g_theta += dc[m] * cm + ds[m] * sm;
        g_phi += m * (vs[m] * cm - vc[m] * sm);
      }
      const std::size_t k = static_cast<std::size_t>(i) * np + j;
      if (values) values[k] = f;
      if (gradient) gradient[k] = g_theta * tau1[k] + (g_phi * inv_s) * tau2[k];
    }
  }
}

}  // namespace

SHBasis::SHBasis(int k_max, std::span<const double> cos_theta,
                 std::span<const double> sin_theta, std::span<const double> phi)
    : k_max_(k_max) {
  offset_.resize(k_max + 2);
  offset_[0] = 0;
  for (int m = 0; m <= k_max; ++m) offset_[m + 1] = offset_[m] + (k_max - m + 1);
  packed_count_ = offset_[k_max + 1];

  a_.assign(packed_count_, 0.0);
  b_.assign(packed_count_, 0.0);
  for (int m = 0; m <= k_max; ++m) {
    for (int l = m + 2; l <= k_max; ++l) {
      const double ll = l, mm = m;
      a_[packed(l, m)] = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      b_[packed(l, m)] = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                   (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
    }
  }

  const std::size_t nt = cos_theta.size();
  p_.resize(nt * packed_count_);
  dp_.resize(nt * packed_count_);
  std::vector<double> ring;
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = cos_theta[i], s = sin_theta[i];
    legendre(t, s, k_max, ring);
    std::copy(ring.begin(), ring.end(), p_.begin() + i * packed_count_);
    double* d = &dp_[i * packed_count_];
    for (int m = 0; m <= k_max; ++m) {
      for (int l = m; l <= k_max; ++l) {
        const double ll = l, mm = m;
        const double prev = l > m ? ring[packed(l - 1, m)] : 0.0;
        const double c = l > m ? std::sqrt((2.0 * ll + 1.0) * (ll * ll - mm * mm) /
                                           (2.0 * ll - 1.0))
                               : 0.0;
        d[packed(l, m)] = (ll * t * ring[packed(l, m)] - c * prev) / s;
      }
    }
  }

  const std::size_t np = phi.size();
  cos_.resize(np * (k_max + 1));
  sin_.resize(np * (k_max + 1));
  for (std::size_t j = 0; j < np; ++j) {
    for (int m = 0; m <= k_max; ++m) {
      cos_[j * (k_max + 1) + m] = std::cos(m * phi[j]);
      sin_[j * (k_max + 1) + m] = std::sin(m * phi[j]);
    }
  }
}

void SHBasis::legendre(double t, double s, int k_max, std::vector<double>& out) const {
  out.assign(packed_count_, 0.0);
  double pmm = 1.0;
  for (int m = 0; m <= k_max; ++m) {
    if (m > 0) pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    const int base = offset_[m];
    out[base] = pmm;
    if (m + 1 <= k_max) {
      out[base + 1] = std::sqrt(2.0 * m + 3.0) * t * pmm;
      for (int l = m + 2; l <= k_max; ++l) {
        const int k = base + (l - m);
        out[k] = a_[k] * (t * out[k - 1] - b_[k] * out[k - 2]);
      }
    }
  }
}

SHExpansion::SHExpansion(GridPtr grid, int k_max, int components)
    : grid_(std::move(grid)),
      k_max_(k_max),
      components_(components),
      coeffs_(static_cast<std::size_t>(components) * sh_count(k_max), 0.0) {}

double SHExpansion::degree_power(int k) const {
  double acc = 0.0;
  if (k > k_max_) return 0.0;
  for (int c = 0; c < components_; ++c) {
    for (int m = -k; m <= k; ++m) acc += coeff(c, k, m) * coeff(c, k, m);
  }
  return acc;
}

double SHExpansion::power() const {
  CompensatedSum acc;
  for (double v : coeffs_) acc.add(v * v);
  return acc.value();
}

SHExpansion SHExpansion::band(int k) const {
  SHExpansion out(grid_, k_max_, components_);
  if (k > k_max_) return out;
  for (int c = 0; c < components_; ++c) {
    for (int m = -k; m <= k; ++m) out.coeff(c, k, m) = coeff(c, k, m);
  }
  return out;
}

std::vector<double> SHExpansion::evaluate(std::span<const Vec3> points) const {
  const SHBasis& basis = grid_->basis();
  const int nc = components_;
  const int pc = basis.packed_count();
  // Repack as [component][cos|sin][packed(l, m)] with the sqrt2 folded in.
  std::vector<double> cc(static_cast<std::size_t>(nc) * pc, 0.0), cs(cc.size(), 0.0);
  for (int c = 0; c < nc; ++c) {
    for (int m = 0; m <= k_max_; ++m) {
      for (int l = m; l <= k_max_; ++l) {
        cc[c * pc + basis.packed(l, m)] = m_scale(m) * coeff(c, l, m);
        if (m > 0) cs[c * pc + basis.packed(l, m)] = m_scale(m) * coeff(c, l, -m);
      }
    }
  }

  std::vector<double> out(points.size() * nc, 0.0);
  std::vector<double> leg;
  std::vector<double> acc_c(nc), acc_s(nc);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vec3& x = points[k];
    const double s = std::hypot(x[0], x[1]);
    const double t = x[2];
    const double c1 = s > 0.0 ? x[0] / s : 1.0;
    const double s1 = s > 0.0 ? x[1] / s : 0.0;
    basis.legendre(t, s, k_max_, leg);
    double cm = 1.0, sm = 0.0;  // cos(m phi), sin(m phi)
    for (int m = 0; m <= k_max_; ++m) {
      const int lo = basis.packed(m, m), hi = basis.packed(k_max_, m);
      for (int c = 0; c < nc; ++c) {
        double a = 0.0, b = 0.0;
        const double* pcc = &cc[c * pc];
        const double* pcs = &cs[c * pc];
        for (int q = lo; q <= hi; ++q) {
          a += pcc[q] * leg[q];
          b += pcs[q] * leg[q];
        }
        out[k * nc + c] += a * cm + b * sm;
      }
      const double cn = cm * c1 - sm * s1;
      sm = sm * c1 + cm * s1;
      cm = cn;
    }
  }
  return out;
}

std::vector<Vec3> SHExpansion::evaluate_vector(std::span<const Vec3> points) const {
  if (components_ != 3) throw InvalidArgument("evaluate_vector needs a 3-component expansion");
  const auto flat = evaluate(points);
  std::vector<Vec3> out(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    out[k] = Vec3(flat[3 * k], flat[3 * k + 1], flat[3 * k + 2]);
  }
  return out;
}

SHExpansion sh_analyze(const ScalarField& field, int k_max) {
  const SphereGrid& grid = *field.grid;
  check_degree(grid, k_max);
  if (field.values.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  SHExpansion out(field.grid, k_max, 1);
  analyze_component(grid, k_max, [&](std::size_t k) { return field.values[k]; },
                    &out.coeff(0, 0, 0));
  return out;
}

SHExpansion sh_analyze(const VectorField& field, int k_max) {
  const SphereGrid& grid = *field.grid;
  check_degree(grid, k_max);
  if (field.values.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  SHExpansion out(field.grid, k_max, 3);
  for (int c = 0; c < 3; ++c) {
    analyze_component(grid, k_max, [&](std::size_t k) { return field.values[k][c]; },
                      &out.coeff(c, 0, 0));
  }
  return out;
}

SHExpansion sh_analyze(const ScalarField& field) {
  return sh_analyze(field, field.grid->max_degree());
}

SHExpansion sh_analyze(const VectorField& field) {
  return sh_analyze(field, field.grid->max_degree());
}

ScalarField sh_synthesize_scalar(const SHExpansion& e) {
  if (e.components() != 1) throw InvalidArgument("scalar synthesis needs a 1-component expansion");
  ScalarField out{e.grid(), std::vector<double>(e.grid()->size())};
  synthesize_component(*e.grid(), e.k_max(), e.component(0).data(), out.values.data(), nullptr);
  return out;
}

VectorField sh_synthesize_vector(const SHExpansion& e) {
  if (e.components() != 3) throw InvalidArgument("vector synthesis needs a 3-component expansion");
  const std::size_t n = e.grid()->size();
  VectorField out{e.grid(), std::vector<Vec3>(n)};
  std::vector<double> tmp(n);
  for (int c = 0; c < 3; ++c) {
    synthesize_component(*e.grid(), e.k_max(), e.component(c).data(), tmp.data(), nullptr);
    for (std::size_t k = 0; k < n; ++k) out.values[k][c] = tmp[k];
  }
  return out;
}

ScalarField project(const ScalarField& field, int k) {
  return sh_synthesize_scalar(sh_analyze(field).band(k));
}

VectorField project(const VectorField& field, int k) {
  return sh_synthesize_vector(sh_analyze(field).band(k));
}

std::vector<Vec3> gradient_from_expansion(const SHExpansion& e, int component) {
  std::vector<Vec3> out(e.grid()->size());
  synthesize_component(*e.grid(), e.k_max(), e.component(component).data(), nullptr,
                       out.data());
  return out;
}

JacobianField jacobian_from_expansion(const SHExpansion& e) {
  if (e.components() != 3) throw InvalidArgument("Jacobian needs a 3-component expansion");
  const std::size_t n = e.grid()->size();
  JacobianField out(n, Mat3::Zero());
  for (int c = 0; c < 3; ++c) {
    const auto g = gradient_from_expansion(e, c);
    for (std::size_t k = 0; k < n; ++k) out[k].row(c) = g[k].transpose();
  }
  return out;
}

VectorField tangential_gradient(const ScalarField& field) {
  return {field.grid, gradient_from_expansion(sh_analyze(field), 0)};
}

JacobianField tangential_gradient(const VectorField& field) {
  return jacobian_from_expansion(sh_analyze(field));
}

double rayleigh_quotient(const ScalarField& field) {
  const auto grad = tangential_gradient(field);
  std::vector<double> g2(grad.values.size()), f2(field.values.size());
  for (std::size_t k = 0; k < g2.size(); ++k) {
    g2[k] = grad.values[k].squaredNorm();
    f2[k] = field.values[k] * field.values[k];
  }
  return grid_average(*field.grid, g2) / grid_average(*field.grid, f2);
}

double laplace_eigencheck(const GridPtr& grid, int k) {
  if (k == 1) {
    return rayleigh_quotient(ScalarField::from_function(grid, [](const Vec3& x) { return x[2]; }));
  }
  if (k == 2) {
    return rayleigh_quotient(
        ScalarField::from_function(grid, [](const Vec3& x) { return x[0] * x[1]; }));
  }
  throw InvalidArgument("laplace_eigencheck supports k in {1, 2}");
}

}  // namespace sphererig
