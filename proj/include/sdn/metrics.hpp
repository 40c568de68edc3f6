#pragma once

#include <optional>
#include <random>
#include <vector>

#include "sdn/grid.hpp"
#include "sdn/scene.hpp"

namespace sdn {

constexpr double kRadToDeg = 180.0 / 3.14159265358979323846;

namespace detail {

inline double angular_error_deg(const Vec3& a, const Vec3& b) {
  const double na = norm(a), nb = norm(b);
  double c = dot(a, b) / (na * nb);
  c = std::clamp(c, -1.0, 1.0);
  return std::acos(c) * kRadToDeg;
}

template <typename Fn>
void for_each_joint_pixel(const NormalMap& gt, const NormalMap& est, const Mask* region, Fn&& fn) {
  if (gt.width() != est.width() || gt.height() != est.height())
    throw ArgumentError("normal map dimension mismatch");
  if (region && (region->width() != gt.width() || region->height() != gt.height()))
    throw ArgumentError("region mask dimension mismatch");
  for (int v = 0; v < gt.height(); ++v)
    for (int u = 0; u < gt.width(); ++u) {
      if (!gt.valid(u, v) || !est.valid(u, v)) continue;
      if (region && !(*region)(u, v)) continue;
      fn(u, v);
    }
}

}  // namespace detail

// Mean angular error in degrees over jointly valid pixels (optionally
// restricted to a region mask).
inline double aae(const NormalMap& gt, const NormalMap& est, const Mask* region = nullptr) {
  double sum = 0.0;
  size_t count = 0;
  detail::for_each_joint_pixel(gt, est, region, [&](int u, int v) {
    sum += detail::angular_error_deg(gt.normals(u, v), est.normals(u, v));
    ++count;
  });
  if (count == 0) throw EmptyEvaluationError("aae: no jointly valid pixels");
  return sum / double(count);
}

// Fraction of jointly valid pixels with angular error <= tolerance (degrees).
inline double pgp(const NormalMap& gt, const NormalMap& est, double tolerance_deg, const Mask* region = nullptr) {
  size_t good = 0, count = 0;
  detail::for_each_joint_pixel(gt, est, region, [&](int u, int v) {
    if (detail::angular_error_deg(gt.normals(u, v), est.normals(u, v)) <= tolerance_deg) ++good;
    ++count;
  });
  if (count == 0) throw EmptyEvaluationError("pgp: no jointly valid pixels");
  return double(good) / double(count);
}

// Cross accuracy ratio e1/e2; > 1 means the second method is better.
inline double car(double e1, double e2) {
  if (e2 > 0.0) return e1 / e2;
  if (e1 > 0.0) return std::numeric_limits<double>::infinity();
  return 1.0;
}

struct MetricReport {
  double aae_degrees = 0.0;
  double pgp10 = 0.0, pgp20 = 0.0, pgp30 = 0.0;
  std::size_t pixel_count = 0;
  std::optional<Grid<double>> angular_error;
};

inline MetricReport evaluate(const NormalMap& gt, const NormalMap& est, const Mask* region = nullptr,
                             bool keep_error_grid = false) {
  MetricReport r;
  Grid<double> err;
  if (keep_error_grid) err = Grid<double>(gt.width(), gt.height(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  size_t g10 = 0, g20 = 0, g30 = 0, count = 0;
  detail::for_each_joint_pixel(gt, est, region, [&](int u, int v) {
    const double e = detail::angular_error_deg(gt.normals(u, v), est.normals(u, v));
    sum += e;
    if (e <= 10.0) ++g10;
    if (e <= 20.0) ++g20;
    if (e <= 30.0) ++g30;
    ++count;
    if (keep_error_grid) err(u, v) = e;
  });
  if (count == 0) throw EmptyEvaluationError("evaluate: no jointly valid pixels");
  r.aae_degrees = sum / double(count);
  r.pgp10 = double(g10) / double(count);
  r.pgp20 = double(g20) / double(count);
  r.pgp30 = double(g30) / double(count);
  r.pixel_count = count;
  if (keep_error_grid) r.angular_error = std::move(err);
  return r;
}

// Axis-aligned unit-step pixel path.
struct PathSpec {
  std::vector<Pixel> points;

  void validate(int w, int h) const {
    for (size_t i = 0; i < points.size(); ++i) {
      const Pixel p = points[i];
      if (p.u < 0 || p.u >= w || p.v < 0 || p.v >= h) throw IndexError("path pixel out of bounds");
      if (i > 0) {
        const int du = std::abs(p.u - points[i - 1].u);
        const int dv = std::abs(p.v - points[i - 1].v);
        if (du + dv != 1) throw ArgumentError("path steps must be axis-aligned unit moves");
      }
    }
  }
};

// Discrete path-discontinuity norm: per step, the second-derivative magnitude
// along the step axis sampled at the step's destination pixel.
inline double pd_norm(const PathSpec& path, const Grid<double>& zuu, const Grid<double>& zvv) {
  path.validate(zuu.width(), zuu.height());
  double sum = 0.0;
  for (size_t i = 1; i < path.points.size(); ++i) {
    const Pixel p = path.points[i];
    const bool u_step = path.points[i].u != path.points[i - 1].u;
    sum += std::abs(u_step ? zuu(p) : zvv(p));
  }
  return sum;
}

struct BoundCheckResult {
  double transfer_error = 0.0;
  double pd_bound = 0.0;
  bool holds = false;
};

// Collinear transfer error |int_0^1 t * z_aa dt| against the continuum
// path-discontinuity norm of the same unit step, by midpoint quadrature.
inline BoundCheckResult check_collinear_bound(const AnalyticField& f, Pixel p, Axis axis, int dir,
                                              int samples = 100) {
  if (dir != 1 && dir != -1) throw ArgumentError("direction must be +1 or -1");
  const auto& second = axis == Axis::U ? f.zuu : f.zvv;
  double err = 0.0, bound = 0.0;
  const double dt = 1.0 / samples;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) * dt;
    const double u = axis == Axis::U ? p.u + dir * t : p.u;
    const double v = axis == Axis::U ? p.v : p.v + dir * t;
    const double s = second(u, v);
    err += t * s * dt;
    bound += std::abs(s) * dt;
  }
  BoundCheckResult r;
  r.transfer_error = std::abs(err);
  r.pd_bound = bound;
  r.holds = r.transfer_error <= r.pd_bound + 1e-9;
  return r;
}

// Non-collinear (two-path loop) transfer error against the continuum
// path-discontinuity norm over both L-paths to the diagonal neighbor.
inline BoundCheckResult check_noncollinear_bound(const AnalyticField& f, Pixel p, int du, int dv,
                                                 int samples = 100) {
  if ((du != 1 && du != -1) || (dv != 1 && dv != -1)) throw ArgumentError("diagonal offsets must be +-1");
  const double u0 = p.u, v0 = p.v;
  const double u1 = p.u + du, v1 = p.v + dv;
  const double dt = 1.0 / samples;
  double i1 = 0.0, i2 = 0.0, bound = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = (i + 0.5) * dt;
    // L1: v-leg at u0, then u-leg at v1; weights (v - v1) and (u - u0)
    {
      const double v = v0 + dv * t;
      const double s = f.zvv(u0, v);
      i1 += (v - v1) * s * (dv * dt);
      bound += std::abs(s) * dt;
    }
    {
      const double u = u0 + du * t;
      const double s = f.zuu(u, v1);
      i1 += (u - u0) * s * (du * dt);
      bound += std::abs(s) * dt;
    }
    // L2: u-leg at v0, then v-leg at u1; weights (u - u1) and (v - v0)
    {
      const double u = u0 + du * t;
      const double s = f.zuu(u, v0);
      i2 += (u - u1) * s * (du * dt);
      bound += std::abs(s) * dt;
    }
    {
      const double v = v0 + dv * t;
      const double s = f.zvv(u1, v);
      i2 += (v - v0) * s * (dv * dt);
      bound += std::abs(s) * dt;
    }
  }
  BoundCheckResult r;
  r.transfer_error = std::abs(i1 - i2);
  r.pd_bound = bound;
  r.holds = r.transfer_error <= r.pd_bound + 1e-9;
  return r;
}

// Adds i.i.d. zero-mean Gaussian noise with variance `sigma_variance` to every
// valid pixel; masks pixels the noise drives non-positive. Deterministic for a
// fixed seed.
inline DepthGrid add_gaussian_noise(const DepthGrid& g, double sigma_variance, std::uint64_t seed) {
  if (sigma_variance < 0.0) throw ArgumentError("noise variance must be >= 0");
  if (sigma_variance == 0.0) return g;
  DepthGrid out = g;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_variance));
  for (int v = 0; v < g.height(); ++v)
    for (int u = 0; u < g.width(); ++u) {
      if (!out.valid(u, v)) continue;
      out.values(u, v) += gauss(rng);
      if (!(out.values(u, v) > 0.0)) {
        out.mask(u, v) = 0;
        out.values(u, v) = 0.0;
      }
    }
  return out;
}

}  // namespace sdn
