#pragma once

#include <limits>

#include "sdn/grid.hpp"

namespace sdn {

// First derivatives (per pixel step) plus the cached second derivatives the
// dynamic program keeps reading. Dimensions match the source grid.
struct GradientField {
  Grid<double> zu, zv;
  Grid<double> zuu, zvv;
  Mask mask;

  int width() const { return zu.width(); }
  int height() const { return zu.height(); }
  bool valid(int u, int v) const { return mask(u, v) != 0; }
  bool valid(Pixel p) const { return mask(p) != 0; }
};

// Offset to the neighbor chosen by the dynamic program, one per axis.
struct StateOffset {
  std::int8_t du = 0;
  std::int8_t dv = 0;
  bool zero() const { return du == 0 && dv == 0; }
  bool operator==(const StateOffset&) const = default;
};

enum class CostKind { PathDiscontinuity, TotalVariation };

inline const char* to_string(CostKind c) { return c == CostKind::PathDiscontinuity ? "pd" : "tv"; }

struct FiniteDiffs {
  Grid<double> fwd_u, bwd_u, fwd_v, bwd_v;
  Mask mask;
};

namespace detail {

inline int clampi(int x, int lo, int hi) { return x < lo ? lo : (x > hi ? hi : x); }

// Validity of the 3-tap cross stencil around (u,v): a pixel is valid only if
// every pixel its difference stencils touch (after border clamping) is valid.
inline bool stencil_valid(const DepthGrid& g, int u, int v) {
  const int w = g.width(), h = g.height();
  if (!g.valid(u, v)) return false;
  if (!g.valid(clampi(u - 1, 0, w - 1), v)) return false;
  if (!g.valid(clampi(u + 1, 0, w - 1), v)) return false;
  if (!g.valid(u, clampi(v - 1, 0, h - 1))) return false;
  if (!g.valid(u, clampi(v + 1, 0, h - 1))) return false;
  return true;
}

}  // namespace detail

// Second derivatives with the [-1, 2, -1] kernel; border pixels replicate z.
inline void second_derivatives(const DepthGrid& g, Grid<double>& zuu, Grid<double>& zvv, Mask& mask) {
  const int w = g.width(), h = g.height();
  zuu = Grid<double>(w, h, 0.0);
  zvv = Grid<double>(w, h, 0.0);
  mask = Mask(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      if (!detail::stencil_valid(g, u, v)) continue;
      const double zc = g.values(u, v);
      const double zl = g.values(detail::clampi(u - 1, 0, w - 1), v);
      const double zr = g.values(detail::clampi(u + 1, 0, w - 1), v);
      const double zt = g.values(u, detail::clampi(v - 1, 0, h - 1));
      const double zb = g.values(u, detail::clampi(v + 1, 0, h - 1));
      zuu(u, v) = -zl + 2.0 * zc - zr;
      zvv(u, v) = -zt + 2.0 * zc - zb;
      mask(u, v) = 1;
    }
}

// Forward [0,-1,1] and backward [-1,1,0] differences per axis. At a border the
// missing difference takes the value of the one-sided difference that exists,
// so fwd == bwd there.
inline FiniteDiffs finite_differences(const DepthGrid& g) {
  const int w = g.width(), h = g.height();
  FiniteDiffs d;
  d.fwd_u = Grid<double>(w, h, 0.0);
  d.bwd_u = Grid<double>(w, h, 0.0);
  d.fwd_v = Grid<double>(w, h, 0.0);
  d.bwd_v = Grid<double>(w, h, 0.0);
  d.mask = Mask(w, h, 0);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      if (!detail::stencil_valid(g, u, v)) continue;
      const double zc = g.values(u, v);
      double fu = u + 1 < w ? g.values(u + 1, v) - zc : 0.0;
      double bu = u - 1 >= 0 ? zc - g.values(u - 1, v) : 0.0;
      if (u + 1 >= w) fu = bu;
      if (u - 1 < 0) bu = fu;
      double fv = v + 1 < h ? g.values(u, v + 1) - zc : 0.0;
      double bv = v - 1 >= 0 ? zc - g.values(u, v - 1) : 0.0;
      if (v + 1 >= h) fv = bv;
      if (v - 1 < 0) bv = fv;
      d.fwd_u(u, v) = fu;
      d.bwd_u(u, v) = bu;
      d.fwd_v(u, v) = fv;
      d.bwd_v(u, v) = bv;
      d.mask(u, v) = 1;
    }
  return d;
}

struct EtaPair {
  int u = 0;
  int v = 0;
};

namespace detail {

// argmin of |field| over the in-bounds valid triple along one axis.
// Tie-break prefers offset 0, then -1, then +1.
inline int smoothest_offset(const Grid<double>& field, const Mask& valid, Pixel p, Axis axis, double* min_abs) {
  static constexpr int order[3] = {0, -1, 1};
  int best = 0;
  double best_abs = std::numeric_limits<double>::infinity();
  bool found = false;
  for (int i : order) {
    const int u = axis == Axis::U ? p.u + i : p.u;
    const int v = axis == Axis::U ? p.v : p.v + i;
    if (!field.in_bounds(u, v) || !valid(u, v)) continue;
    const double a = std::abs(field(u, v));
    if (!found || a < best_abs) {
      found = true;
      best_abs = a;
      best = i;
    }
  }
  if (!found) throw ContractViolation("smoothest_offset: no valid candidate");
  if (min_abs) *min_abs = best_abs;
  return best;
}

}  // namespace detail

// Per-axis argmin of the second-derivative magnitude over {-1, 0, +1}.
inline EtaPair select_eta(const Grid<double>& zuu, const Grid<double>& zvv, const Mask& valid, Pixel p) {
  if (!zuu.in_bounds(p)) throw IndexError("select_eta: pixel out of bounds");
  EtaPair eta;
  eta.u = detail::smoothest_offset(zuu, valid, p, Axis::U, nullptr);
  eta.v = detail::smoothest_offset(zvv, valid, p, Axis::V, nullptr);
  return eta;
}

// Initial gradients, smoothness energies, transfer costs, states and
// interpolation-order counters for the dynamic program.
struct InitBundle {
  GradientField grad;
  Grid<double> e_u, e_v;        // initial smoothness energies
  Grid<double> cost_u, cost_v;  // per-pixel per-axis transfer cost (|z_aa|, or first-variation for TV)
  Grid<StateOffset> s_u, s_v;
  Grid<std::int32_t> n_u, n_v;  // collinear interpolation order counters
  Grid<double> d_u, d_v;        // running collinear differences feeding the refinement
};

inline InitBundle init_bundle(const DepthGrid& g, CostKind cost = CostKind::PathDiscontinuity) {
  const int w = g.width(), h = g.height();
  InitBundle b;
  second_derivatives(g, b.grad.zuu, b.grad.zvv, b.grad.mask);
  const FiniteDiffs fd = finite_differences(g);
  b.grad.zu = Grid<double>(w, h, 0.0);
  b.grad.zv = Grid<double>(w, h, 0.0);
  b.e_u = Grid<double>(w, h, 0.0);
  b.e_v = Grid<double>(w, h, 0.0);
  b.cost_u = Grid<double>(w, h, 0.0);
  b.cost_v = Grid<double>(w, h, 0.0);
  b.s_u = Grid<StateOffset>(w, h);
  b.s_v = Grid<StateOffset>(w, h);
  b.n_u = Grid<std::int32_t>(w, h, 1);
  b.n_v = Grid<std::int32_t>(w, h, 1);
  b.d_u = Grid<double>(w, h, 0.0);
  b.d_v = Grid<double>(w, h, 0.0);

  if (cost == CostKind::PathDiscontinuity) {
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u) {
        b.cost_u(u, v) = std::abs(b.grad.zuu(u, v));
        b.cost_v(u, v) = std::abs(b.grad.zvv(u, v));
      }
  } else {
    // Total-variation ablation: the transfer cost is the mean one-step
    // first-variation magnitude along the axis instead of |z_aa|.
    for (int v = 0; v < h; ++v)
      for (int u = 0; u < w; ++u) {
        b.cost_u(u, v) = 0.5 * (std::abs(fd.fwd_u(u, v)) + std::abs(fd.bwd_u(u, v)));
        b.cost_v(u, v) = 0.5 * (std::abs(fd.fwd_v(u, v)) + std::abs(fd.bwd_v(u, v)));
      }
  }

  bool any_valid = false;
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      if (!b.grad.valid(u, v)) continue;
      any_valid = true;
      const Pixel p{u, v};
      const EtaPair eta = select_eta(b.grad.zuu, b.grad.zvv, b.grad.mask, p);
      b.grad.zu(u, v) = 0.5 * (1 + eta.u) * fd.fwd_u(u, v) + 0.5 * (1 - eta.u) * fd.bwd_u(u, v);
      b.grad.zv(u, v) = 0.5 * (1 + eta.v) * fd.fwd_v(u, v) + 0.5 * (1 - eta.v) * fd.bwd_v(u, v);
      double e;
      detail::smoothest_offset(b.cost_u, b.grad.mask, p, Axis::U, &e);
      b.e_u(u, v) = e;
      detail::smoothest_offset(b.cost_v, b.grad.mask, p, Axis::V, &e);
      b.e_v(u, v) = e;
      b.s_u(u, v) = StateOffset{std::int8_t(eta.u), 0};
      b.s_v(u, v) = StateOffset{0, std::int8_t(eta.v)};
      b.d_u(u, v) = b.grad.zu(u, v);
      b.d_v(u, v) = b.grad.zv(u, v);
    }
  if (!any_valid) throw EmptyEvaluationError("init_bundle: no valid pixels");
  return b;
}

}  // namespace sdn
