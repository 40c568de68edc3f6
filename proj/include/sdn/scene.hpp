#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "sdn/grid.hpp"
#include "sdn/normals.hpp"

namespace sdn {

struct UndefinedDerivativeError : Error {
  using Error::Error;
};
struct EmptySceneError : Error {
  using Error::Error;
};

// Continuum scalar field with closed-form first and second derivatives, in
// pixel coordinates. Used by the transfer-error bound checks and as the
// ground-truth reference for sampled scenes.
struct AnalyticField {
  std::function<double(double, double)> z;
  std::function<double(double, double)> zu, zv;
  std::function<double(double, double)> zuu, zvv;
};

enum class SceneKind { FrontoPlane, TiltedPlane, StepEdge, Ridge, Sphere, BoxCorner };

inline const char* to_string(SceneKind k) {
  switch (k) {
    case SceneKind::FrontoPlane: return "fronto-plane";
    case SceneKind::TiltedPlane: return "tilted-plane";
    case SceneKind::StepEdge: return "step-edge";
    case SceneKind::Ridge: return "ridge";
    case SceneKind::Sphere: return "sphere";
    case SceneKind::BoxCorner: return "box-corner";
  }
  return "?";
}

// Desk-scale scene description. Geometry parameters are only meaningful for
// their own kind; unset parameters keep the defaults below.
struct SceneSpec {
  SceneKind kind = SceneKind::FrontoPlane;
  int width = 160;
  int height = 120;
  CameraIntrinsics intrinsics{120.0, 120.0, 79.5, 59.5};
  double band_radius = 2.0;

  // fronto-plane / step-edge depths (near, far); sphere background wall uses `wall`
  double z0 = 2.0;
  double z1 = 3.0;

  // tilted plane n . x = d
  Vec3 plane_normal{0.35, -0.25, -1.0};
  double plane_offset = -2.0;

  // discontinuity line for step-edge and ridge: passes through (line_u, line_v)
  // (default: image center), normal direction at `angle` degrees from the
  // u-axis, with an optional sinusoidal wobble of `wave` pixels amplitude and
  // `wavelen` pixels period along the line.
  double line_u = -1.0;  // -1: use image center
  double line_v = -1.0;
  double angle_deg = 0.0;
  double wave = 0.0;
  double wavelen = 16.0;

  // ridge: inverse depth d0 + pu*(u-cu) + pv*(v-cv) + fold_lo*min(l,0) + fold_hi*max(l,0)
  double d0 = 0.5;
  double pu = 0.0008;
  double pv = -0.0005;
  double fold_lo = -0.004;
  double fold_hi = 0.004;

  // sphere
  Vec3 sphere_center{0.0, 0.0, 2.5};
  double sphere_radius = 1.0;
  double wall = 4.0;  // background plane depth; 0 disables (rays that miss are masked)

  // box corner: back wall depth z0 is shared; lateral offsets and roll angle
  double corner_a = 1.2;
  double corner_b = 0.9;
  double corner_theta_deg = 20.0;

  static SceneSpec parse(const std::string& text);
  std::string name() const { return to_string(kind); }
};

struct SceneSample {
  DepthGrid depth;
  NormalMap gt_normals;
  CameraIntrinsics intrinsics;
  Mask discontinuity_band;
  Mask on_discontinuity;  // pixels whose 8-neighborhood crosses a surface change
  Grid<int> owner;        // surface id per pixel, -1 where masked
  std::optional<AnalyticField> analytic;
  // exact (dz/du, dz/dv) at a pixel center, defined away from discontinuities
  std::function<std::pair<double, double>(Pixel)> grad_fn;
};

inline std::pair<double, double> analytic_gradient(const SceneSample& s, Pixel p) {
  if (!s.depth.values.in_bounds(p)) throw IndexError("analytic_gradient: pixel out of bounds");
  if (s.on_discontinuity(p)) throw UndefinedDerivativeError("analytic_gradient: pixel on a discontinuity");
  if (!s.grad_fn) throw ArgumentError("scene provides no analytic gradient");
  return s.grad_fn(p);
}

namespace detail {

// Signed wavy-line function and its gradient. l = 0 is the discontinuity
// locus; |l| / |grad l| approximates the distance to it.
struct WavyLine {
  double u0 = 0, v0 = 0;
  double c = 1, s = 0;  // line normal direction (cos, sin)
  double amp = 0, omega = 0;

  double value(double u, double v) const {
    const double t = -s * (u - u0) + c * (v - v0);
    return c * (u - u0) + s * (v - v0) - amp * std::sin(omega * t);
  }
  void gradient(double u, double v, double& lu, double& lv) const {
    const double t = -s * (u - u0) + c * (v - v0);
    const double w = amp * omega * std::cos(omega * t);
    lu = c + w * s;
    lv = s - w * c;
  }
  double distance(double u, double v) const {
    double lu, lv;
    gradient(u, v, lu, lv);
    const double g = std::hypot(lu, lv);
    return std::abs(value(u, v)) / (g > 1e-9 ? g : 1.0);
  }
};

inline WavyLine make_line(const SceneSpec& spec) {
  WavyLine l;
  l.u0 = spec.line_u >= 0 ? spec.line_u : (spec.width - 1) / 2.0;
  l.v0 = spec.line_v >= 0 ? spec.line_v : (spec.height - 1) / 2.0;
  const double a = spec.angle_deg * std::numbers::pi / 180.0;
  l.c = std::cos(a);
  l.s = std::sin(a);
  l.amp = spec.wave;
  l.omega = spec.wavelen > 0 ? 2.0 * std::numbers::pi / spec.wavelen : 0.0;
  return l;
}

// Exact surface normal of the graph surface z(u,v) from its pixel-space
// partial derivatives (tangent cross product), oriented toward the camera.
inline Vec3 graph_normal(double u, double v, double z, double zu, double zv, const CameraIntrinsics& k) {
  const double ru = (u - k.cu) / k.fu;
  const double rv = (v - k.cv) / k.fv;
  const Vec3 tu{z / k.fu + ru * zu, rv * zu, zu};
  const Vec3 tv{ru * zv, z / k.fv + rv * zv, zv};
  return orient_normalize(cross(tu, tv), back_project(u, v, z, k));
}

}  // namespace detail

inline SceneSample render(const SceneSpec& spec) {
  spec.intrinsics.validate();
  if (spec.width <= 0 || spec.height <= 0) throw ArgumentError("scene dimensions must be positive");
  const int w = spec.width, h = spec.height;
  const CameraIntrinsics k = spec.intrinsics;

  SceneSample out;
  out.intrinsics = k;
  out.depth = DepthGrid(w, h, DepthKind::Depth);
  out.gt_normals = NormalMap(w, h);
  out.owner = Grid<int>(w, h, -1);
  out.discontinuity_band = Mask(w, h, 0);
  out.on_discontinuity = Mask(w, h, 0);

  // per-pixel evaluation: depth, surface id, exact gradient of the owning surface
  std::function<bool(double, double, double&, int&, double&, double&)> eval;
  std::optional<detail::WavyLine> line;

  switch (spec.kind) {
    case SceneKind::FrontoPlane: {
      const double z = spec.z0;
      if (!(z > 0)) throw ArgumentError("fronto-plane depth must be positive");
      eval = [z](double, double, double& depth, int& id, double& zu, double& zv) {
        depth = z;
        id = 0;
        zu = zv = 0.0;
        return true;
      };
      AnalyticField f;
      f.z = [z](double, double) { return z; };
      f.zu = f.zv = f.zuu = f.zvv = [](double, double) { return 0.0; };
      out.analytic = f;
      break;
    }
    case SceneKind::TiltedPlane: {
      const Vec3 n = spec.plane_normal;
      const double d = spec.plane_offset;
      auto den = [n, k](double u, double v) { return n.x * (u - k.cu) / k.fu + n.y * (v - k.cv) / k.fv + n.z; };
      eval = [n, d, k, den](double u, double v, double& depth, int& id, double& zu, double& zv) {
        const double D = den(u, v);
        if (D == 0.0) return false;
        depth = d / D;
        if (!(depth > 0)) return false;
        id = 0;
        zu = -d * n.x / (k.fu * D * D);
        zv = -d * n.y / (k.fv * D * D);
        return true;
      };
      AnalyticField f;
      f.z = [d, den](double u, double v) { return d / den(u, v); };
      f.zu = [n, d, k, den](double u, double v) {
        const double D = den(u, v);
        return -d * n.x / (k.fu * D * D);
      };
      f.zv = [n, d, k, den](double u, double v) {
        const double D = den(u, v);
        return -d * n.y / (k.fv * D * D);
      };
      f.zuu = [n, d, k, den](double u, double v) {
        const double D = den(u, v);
        return 2.0 * d * n.x * n.x / (k.fu * k.fu * D * D * D);
      };
      f.zvv = [n, d, k, den](double u, double v) {
        const double D = den(u, v);
        return 2.0 * d * n.y * n.y / (k.fv * k.fv * D * D * D);
      };
      out.analytic = f;
      break;
    }
    case SceneKind::StepEdge: {
      if (!(spec.z0 > 0) || !(spec.z1 > 0)) throw ArgumentError("step depths must be positive");
      line = detail::make_line(spec);
      const detail::WavyLine l = *line;
      const double za = spec.z0, zb = spec.z1;
      eval = [l, za, zb](double u, double v, double& depth, int& id, double& zu, double& zv) {
        const bool far_side = l.value(u, v) >= 0.0;
        depth = far_side ? zb : za;
        id = far_side ? 1 : 0;
        zu = zv = 0.0;
        return true;
      };
      break;
    }
    case SceneKind::Ridge: {
      line = detail::make_line(spec);
      const detail::WavyLine l = *line;
      const SceneSpec sp = spec;
      eval = [l, sp, k](double u, double v, double& depth, int& id, double& zu, double& zv) {
        const double lv_ = l.value(u, v);
        const double fold = lv_ >= 0.0 ? sp.fold_hi : sp.fold_lo;
        const double d = sp.d0 + sp.pu * (u - k.cu) + sp.pv * (v - k.cv) + fold * lv_;
        if (!(d > 0)) return false;
        double lu_g, lv_g;
        l.gradient(u, v, lu_g, lv_g);
        const double du_ = sp.pu + fold * lu_g;
        const double dv_ = sp.pv + fold * lv_g;
        depth = 1.0 / d;
        id = lv_ >= 0.0 ? 1 : 0;
        zu = -du_ / (d * d);
        zv = -dv_ / (d * d);
        return true;
      };
      break;
    }
    case SceneKind::Sphere: {
      const Vec3 C = spec.sphere_center;
      const double R = spec.sphere_radius;
      const double wall = spec.wall;
      if (!(R > 0)) throw ArgumentError("sphere radius must be positive");
      eval = [C, R, wall, k](double u, double v, double& depth, int& id, double& zu, double& zv) {
        const double ru = (u - k.cu) / k.fu;
        const double rv = (v - k.cv) / k.fv;
        const double a = ru * ru + rv * rv + 1.0;
        const double b = ru * C.x + rv * C.y + C.z;
        const double c = dot(C, C) - R * R;
        const double disc = b * b - a * c;
        if (disc > 0.0) {
          const double s = std::sqrt(disc);
          const double z = (b - s) / a;
          if (z > 0.0) {
            // implicit differentiation of a z^2 - 2 b z + c = 0
            const double da_du = 2.0 * ru / k.fu, da_dv = 2.0 * rv / k.fv;
            const double db_du = C.x / k.fu, db_dv = C.y / k.fv;
            const double denom = 2.0 * a * z - 2.0 * b;
            depth = z;
            id = 0;
            zu = -(da_du * z * z - 2.0 * db_du * z) / denom;
            zv = -(da_dv * z * z - 2.0 * db_dv * z) / denom;
            return true;
          }
        }
        if (wall > 0.0) {
          depth = wall;
          id = 1;
          zu = zv = 0.0;
          return true;
        }
        return false;
      };
      break;
    }
    case SceneKind::BoxCorner: {
      const double th = spec.corner_theta_deg * std::numbers::pi / 180.0;
      const Vec3 n1{std::cos(th), std::sin(th), 0.0};
      const Vec3 n2{-std::sin(th), std::cos(th), 0.0};
      const Vec3 n3{0.0, 0.0, 1.0};
      const std::array<Vec3, 3> ns{n1, n2, n3};
      const std::array<double, 3> ds{spec.corner_a, spec.corner_b, spec.z0};
      eval = [ns, ds, k](double u, double v, double& depth, int& id, double& zu, double& zv) {
        const Vec3 r{(u - k.cu) / k.fu, (v - k.cv) / k.fv, 1.0};
        double best = std::numeric_limits<double>::infinity();
        int best_i = -1;
        for (int i = 0; i < 3; ++i) {
          const double den = dot(ns[i], r);
          if (den <= 0.0) continue;
          const double z = ds[i] / den;
          if (z > 0.0 && z < best) {
            best = z;
            best_i = i;
          }
        }
        if (best_i < 0) return false;
        const Vec3 n = ns[best_i];
        const double den = dot(n, r);
        depth = best;
        id = best_i;
        zu = -ds[best_i] * n.x / (k.fu * den * den);
        zv = -ds[best_i] * n.y / (k.fv * den * den);
        return true;
      };
      break;
    }
  }

  Grid<double> gu(w, h, 0.0), gv(w, h, 0.0);
  bool any = false;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      double z, zu, zv;
      int id;
      if (!eval(double(u), double(v), z, id, zu, zv)) {
        out.depth.mask(u, v) = 0;
        continue;
      }
      any = true;
      out.depth.values(u, v) = z;
      out.owner(u, v) = id;
      gu(u, v) = zu;
      gv(u, v) = zv;
      out.gt_normals.normals(u, v) = detail::graph_normal(u, v, z, zu, zv, k);
      out.gt_normals.mask(u, v) = 1;
    }
  if (!any) throw EmptySceneError("scene has no visible geometry");

  // discontinuity marks: owner changes within the 8-neighborhood
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const int id = out.owner(u, v);
      for (int dv = -1; dv <= 1 && !out.on_discontinuity(u, v); ++dv)
        for (int du = -1; du <= 1; ++du) {
          const int uu = u + du, vv = v + dv;
          if (!out.owner.in_bounds(uu, vv)) continue;
          if (out.owner(uu, vv) != id) {
            out.on_discontinuity(u, v) = 1;
            break;
          }
        }
    }

  // band: distance to the discontinuity locus (line scenes use the signed
  // line function; others dilate the owner-change set)
  const double r = spec.band_radius;
  if (line) {
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u)
        if (line->distance(u, v) <= r) out.discontinuity_band(u, v) = 1;
  } else {
    const int ri = int(std::ceil(r));
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u) {
        if (!out.on_discontinuity(u, v)) continue;
        for (int dv = -ri; dv <= ri; ++dv)
          for (int du = -ri; du <= ri; ++du) {
            if (du * du + dv * dv > r * r) continue;
            const int uu = u + du, vv = v + dv;
            if (out.discontinuity_band.in_bounds(uu, vv)) out.discontinuity_band(uu, vv) = 1;
          }
      }
  }

  auto eval_copy = eval;
  out.grad_fn = [eval_copy](Pixel p) {
    double z, zu, zv;
    int id;
    if (!eval_copy(double(p.u), double(p.v), z, id, zu, zv))
      throw UndefinedDerivativeError("no surface at pixel");
    return std::pair<double, double>{zu, zv};
  };
  return out;
}

// ---- scene spec parsing ("name" or "name:key=val,key=val,...") ----

inline SceneSpec SceneSpec::parse(const std::string& text) {
  SceneSpec spec;
  const auto colon = text.find(':');
  const std::string name = text.substr(0, colon);
  static const std::map<std::string, SceneKind> kinds = {
      {"fronto-plane", SceneKind::FrontoPlane}, {"tilted-plane", SceneKind::TiltedPlane},
      {"step-edge", SceneKind::StepEdge},       {"ridge", SceneKind::Ridge},
      {"sphere", SceneKind::Sphere},            {"box-corner", SceneKind::BoxCorner}};
  const auto it = kinds.find(name);
  if (it == kinds.end()) throw ArgumentError("unknown scene kind: " + name);
  spec.kind = it->second;

  // kind-specific defaults; the shipped edge scenes carry a gently wavy
  // discontinuity line so their bands contain the double-crossing windows
  // that defeat one-sided initialization
  switch (spec.kind) {
    case SceneKind::StepEdge:
      spec.z0 = 1.5;
      spec.z1 = 2.5;
      spec.angle_deg = 25.0;
      spec.wave = 1.5;
      spec.wavelen = 18.0;
      break;
    case SceneKind::Ridge:
      spec.angle_deg = 55.0;
      spec.wave = 1.2;
      spec.wavelen = 14.0;
      break;
    case SceneKind::BoxCorner:
      spec.z0 = 3.0;
      break;
    default:
      break;
  }

  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ArgumentError("bad scene parameter: " + item);
    const std::string key = item.substr(0, eq);
    const double val = std::stod(item.substr(eq + 1));
    if (key == "w") spec.width = int(val);
    else if (key == "h") spec.height = int(val);
    else if (key == "fu") spec.intrinsics.fu = val;
    else if (key == "fv") spec.intrinsics.fv = val;
    else if (key == "cu") spec.intrinsics.cu = val;
    else if (key == "cv") spec.intrinsics.cv = val;
    else if (key == "band") spec.band_radius = val;
    else if (key == "z" || key == "z0") spec.z0 = val;
    else if (key == "z1") spec.z1 = val;
    else if (key == "nx") spec.plane_normal.x = val;
    else if (key == "ny") spec.plane_normal.y = val;
    else if (key == "nz") spec.plane_normal.z = val;
    else if (key == "d") spec.plane_offset = val;
    else if (key == "col" || key == "u0") spec.line_u = val;
    else if (key == "v0") spec.line_v = val;
    else if (key == "angle") spec.angle_deg = val;
    else if (key == "wave") spec.wave = val;
    else if (key == "wavelen") spec.wavelen = val;
    else if (key == "d0") spec.d0 = val;
    else if (key == "pu") spec.pu = val;
    else if (key == "pv") spec.pv = val;
    else if (key == "fold_lo") spec.fold_lo = val;
    else if (key == "fold_hi") spec.fold_hi = val;
    else if (key == "cx") spec.sphere_center.x = val;
    else if (key == "cy") spec.sphere_center.y = val;
    else if (key == "cz") spec.sphere_center.z = val;
    else if (key == "r") spec.sphere_radius = val;
    else if (key == "wall") spec.wall = val;
    else if (key == "a") spec.corner_a = val;
    else if (key == "b") spec.corner_b = val;
    else if (key == "theta") spec.corner_theta_deg = val;
    else throw ArgumentError("unknown scene parameter: " + key);
  }
  return spec;
}

// Random globally-smooth analytic field (polynomial plus two separable sine
// products) for transfer-error bound checks.
inline AnalyticField make_smooth_test_field(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double a0 = 2.0 + uni(rng);
  const double a1 = 0.05 * uni(rng), a2 = 0.05 * uni(rng);
  const double a3 = 0.002 * uni(rng), a4 = 0.002 * uni(rng), a5 = 0.002 * uni(rng);
  struct Wave {
    double amp, wu, wv, pu, pv;
  };
  std::array<Wave, 2> waves;
  for (auto& w : waves) {
    w.amp = 0.3 + 0.3 * uni(rng);
    w.wu = 0.08 + 0.07 * uni(rng);
    w.wv = 0.08 + 0.07 * uni(rng);
    w.pu = 3.0 * uni(rng);
    w.pv = 3.0 * uni(rng);
  }
  AnalyticField f;
  f.z = [=](double u, double v) {
    double s = a0 + a1 * u + a2 * v + a3 * u * v + a4 * u * u + a5 * v * v;
    for (const auto& w : waves) s += w.amp * std::sin(w.wu * u + w.pu) * std::sin(w.wv * v + w.pv);
    return s;
  };
  f.zu = [=](double u, double v) {
    double s = a1 + a3 * v + 2.0 * a4 * u;
    for (const auto& w : waves) s += w.amp * w.wu * std::cos(w.wu * u + w.pu) * std::sin(w.wv * v + w.pv);
    return s;
  };
  f.zv = [=](double u, double v) {
    double s = a2 + a3 * u + 2.0 * a5 * v;
    for (const auto& w : waves) s += w.amp * w.wv * std::sin(w.wu * u + w.pu) * std::cos(w.wv * v + w.pv);
    return s;
  };
  f.zuu = [=](double u, double v) {
    double s = 2.0 * a4;
    for (const auto& w : waves) s -= w.amp * w.wu * w.wu * std::sin(w.wu * u + w.pu) * std::sin(w.wv * v + w.pv);
    return s;
  };
  f.zvv = [=](double u, double v) {
    double s = 2.0 * a5;
    for (const auto& w : waves) s -= w.amp * w.wv * w.wv * std::sin(w.wu * u + w.pu) * std::sin(w.wv * v + w.pv);
    return s;
  };
  return f;
}

}  // namespace sdn
