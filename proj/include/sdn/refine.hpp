#pragma once

#include "sdn/init.hpp"

namespace sdn {

// Per-pixel per-axis state of a collinear refinement run. `gradient` is the
// derivative estimate at the pixel; `diff` is the run's highest-order finite
// difference, kept in the direction-local frame (for a run consuming toward
// -u the samples are read right-to-left before differencing). At order 1
// both equal the one-sided finite difference, up to the frame sign.
struct RpiState {
  double gradient = 0.0;
  double diff = 0.0;

  static RpiState from_difference(double fd, int dir) { return {fd, dir * fd}; }
};

// One recursive refinement of the gradient at a pixel, consuming its parallel
// neighbor's same-order state. `order` counts completed refinements for this
// pixel/axis (the implicit interpolating polynomial has degree order+1). The
// recursion is the Newton forward-difference derivative series
//   g' = g + (-1)^order * D / (order + 1),   D = n.diff - p.diff,
// which reproduces the derivative of the unique polynomial through the run's
// order+2 samples. At order 1 it is algebraically identical to refining with
//   g' = g_p + dir*(z_n - z_p)/(order+1) - g_n/(order+1).
inline RpiState rpi_step(const RpiState& p, const RpiState& n, int order, int dir) {
  if (order < 1) throw ArgumentError("rpi_step: order must be >= 1");
  if (dir != 1 && dir != -1) throw ArgumentError("rpi_step: dir must be +1 or -1");
  const double d_next = n.diff - p.diff;
  const double g_local = dir * p.gradient + (order % 2 ? -1.0 : 1.0) * d_next / (order + 1);
  return {dir * g_local, d_next};
}

struct GradientUpdate {
  double value = 0.0;
  std::int32_t order = 1;
  double diff = 0.0;
};

namespace detail {

inline bool usable(const DepthGrid& depth, const GradientField& grad, int u, int v) {
  return grad.mask.in_bounds(u, v) && grad.valid(u, v) && depth.valid(u, v);
}

}  // namespace detail

// Applies the update for the state selected this sweep, for one pixel and one
// axis. Reads only previous-iteration buffers. Cases:
//   zero state      -> unchanged
//   parallel        -> rpi_step at the pixel's current interpolation order, order + 1
//   orthogonal      -> copy the orthogonal neighbor's gradient, order resets to 1
//   diagonal (a,b)  -> gradient-theorem two-path closure:
//                      g_p(p'_o) + a*b * (g_o(p) - g_o(p'_d)), order resets to 1
inline GradientUpdate update_gradients(const DepthGrid& depth, const GradientField& grad_prev,
                                       const Grid<std::int32_t>& order_prev, const Grid<double>& diff_prev,
                                       Pixel p, Axis axis, StateOffset s) {
  const Grid<double>& gp = axis == Axis::U ? grad_prev.zu : grad_prev.zv;
  const Grid<double>& go = axis == Axis::U ? grad_prev.zv : grad_prev.zu;
  const int par = axis == Axis::U ? s.du : s.dv;  // offset along the parallel axis
  const int ort = axis == Axis::U ? s.dv : s.du;  // offset along the orthogonal axis

  if (par == 0 && ort == 0) return {gp(p), order_prev(p), diff_prev(p)};

  if (ort == 0) {  // parallel: collinear refinement
    const Pixel n{p.u + (axis == Axis::U ? par : 0), p.v + (axis == Axis::U ? 0 : par)};
    if (!detail::usable(depth, grad_prev, n.u, n.v)) throw ContractViolation("parallel state points off the grid");
    const std::int32_t k = order_prev(p);
    RpiState ps{gp(p), diff_prev(p)};
    RpiState ns{gp(n), diff_prev(n)};
    if (k == 1) {
      // order-1 differences are recoverable from depth; refresh them so a run
      // restarted by a non-collinear update starts from clean state
      ps.diff = depth.values(n) - depth.values(p);
      const Pixel nn{n.u + (axis == Axis::U ? par : 0), n.v + (axis == Axis::U ? 0 : par)};
      if (detail::usable(depth, grad_prev, nn.u, nn.v)) ns.diff = depth.values(nn) - depth.values(n);
    }
    const RpiState next = rpi_step(ps, ns, k, par);
    return {next.gradient, k + 1, next.diff};
  }

  const Pixel po{p.u + (axis == Axis::U ? 0 : ort), p.v + (axis == Axis::U ? ort : 0)};
  if (!detail::usable(depth, grad_prev, po.u, po.v)) throw ContractViolation("orthogonal state points off the grid");

  if (par == 0) return {gp(po), 1, gp(po)};  // orthogonal: replace from the smoother row/column

  const Pixel pd{p.u + s.du, p.v + s.dv};
  if (!detail::usable(depth, grad_prev, pd.u, pd.v)) throw ContractViolation("diagonal state points off the grid");
  const double sign = double(par) * double(ort);
  const double value = gp(po) + sign * (go(p) - go(pd));
  return {value, 1, value};
}

}  // namespace sdn
