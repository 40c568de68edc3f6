#pragma once

#include <vector>

#include "sdn/grid.hpp"
#include "sdn/init.hpp"

namespace sdn {

enum class BackendKind { ThreeF2N, Cp2tv };
enum class Phi { Median, Mean };

struct BackendChoice {
  BackendKind kind = BackendKind::ThreeF2N;
  Phi phi = Phi::Median;  // central tendency filter, ThreeF2N only
};

inline const char* to_string(BackendKind k) { return k == BackendKind::ThreeF2N ? "3f2n" : "cp2tv"; }

// Unit-length normal flipped toward the camera (n . p3d <= 0).
inline Vec3 orient_normalize(Vec3 n, const Vec3& p3d) {
  n = normalized(n);
  if (dot(n, p3d) > 0.0) n = -n;
  return n;
}

namespace detail {

inline double central_tendency(std::vector<double>& xs, Phi phi) {
  if (phi == Phi::Mean) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / double(xs.size());
  }
  std::sort(xs.begin(), xs.end());
  const size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace detail

// Cross product of the two tangent vectors built from depth gradients and the
// camera intrinsics.
inline NormalMap normals_cp2tv(const DepthGrid& depth, const GradientField& grad, const CameraIntrinsics& k) {
  if (depth.kind != DepthKind::Depth) throw ArgumentError("normals_cp2tv expects a depth grid");
  k.validate();
  const int w = depth.width(), h = depth.height();
  NormalMap out(w, h);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      if (!depth.valid(u, v) || !grad.valid(u, v)) continue;
      const double z = depth.values(u, v);
      const double zu = grad.zu(u, v);
      const double zv = grad.zv(u, v);
      const double ru = (u - k.cu) / k.fu;
      const double rv = (v - k.cv) / k.fv;
      const Vec3 tu{z / k.fu + ru * zu, rv * zu, zu};
      const Vec3 tv{ru * zv, z / k.fv + rv * zv, zv};
      const Vec3 n = cross(tu, tv);
      if (n.x == 0.0 && n.y == 0.0 && n.z == 0.0) continue;  // degenerate tangents
      out.normals(u, v) = orient_normalize(n, back_project(Pixel{u, v}, z, k));
      out.mask(u, v) = 1;
    }
  return out;
}

// Gradient-filter back-end: nx, ny are the inverse-depth gradients, nz comes
// from a central tendency filter over the valid 8-neighborhood ratios
//   ((x_i - x) nx + (y_i - y) ny) / (z_i - z),
// skipping neighbors with |z_i - z| below eps_z. A pixel with nx = ny = 0 is a
// fronto-parallel patch and maps straight to (0, 0, -1).
inline NormalMap normals_3f2n(const DepthGrid& inv_depth, const GradientField& grad_d, const DepthGrid& depth,
                              const CameraIntrinsics& k, Phi phi = Phi::Median, double eps_z = 1e-12) {
  if (inv_depth.kind != DepthKind::InverseDepth) throw ArgumentError("normals_3f2n expects an inverse-depth grid");
  if (depth.kind != DepthKind::Depth) throw ArgumentError("normals_3f2n expects the paired depth grid");
  k.validate();
  const int w = depth.width(), h = depth.height();
  NormalMap out(w, h);
  std::array<Pixel, 8> nbr;
  std::vector<double> ratios;
  ratios.reserve(8);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      if (!depth.valid(u, v) || !grad_d.valid(u, v)) continue;
      const double nx = grad_d.zu(u, v);
      const double ny = grad_d.zv(u, v);
      const double z = depth.values(u, v);
      const Vec3 pc = back_project(Pixel{u, v}, z, k);
      if (nx == 0.0 && ny == 0.0) {
        out.normals(u, v) = orient_normalize(Vec3{0.0, 0.0, -1.0}, pc);
        out.mask(u, v) = 1;
        continue;
      }
      ratios.clear();
      const int cnt = neighbors8(Pixel{u, v}, w, h, nbr);
      for (int i = 0; i < cnt; ++i) {
        const Pixel q = nbr[i];
        if (!depth.valid(q)) continue;
        const double zi = depth.values(q);
        if (std::abs(zi - z) < eps_z) continue;
        const Vec3 pi = back_project(q, zi, k);
        ratios.push_back(((pi.x - pc.x) * nx + (pi.y - pc.y) * ny) / (pi.z - pc.z));
      }
      if (ratios.empty()) continue;  // no usable neighbor for nz
      const double nz = -detail::central_tendency(ratios, phi);
      out.normals(u, v) = orient_normalize(Vec3{nx, ny, nz}, pc);
      out.mask(u, v) = 1;
    }
  return out;
}

}  // namespace sdn
