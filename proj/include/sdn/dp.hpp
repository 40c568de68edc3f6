#pragma once

#include <functional>
#include <limits>
#include <utility>

#include "sdn/refine.hpp"

namespace sdn {

constexpr double kInfEnergy = std::numeric_limits<double>::infinity();

// Tie-break policy. Candidates are scanned keep, parallel, orthogonal,
// diagonal, with the negative offset before the positive within a class; the
// first strict minimum wins, so keep is absorbing and sweeps are reproducible.
enum class TieBreak { KeepParallelOrthogonalDiagonal };

enum class ConvergenceMode { AllStatesZero, IterationCapOnly };

struct DpConfig {
  int max_iterations = 3;
  CostKind cost = CostKind::PathDiscontinuity;
  TieBreak tie_break = TieBreak::KeepParallelOrthogonalDiagonal;
  ConvergenceMode convergence = ConvergenceMode::AllStatesZero;

  void validate() const {
    if (max_iterations < 0) throw ArgumentError("max_iterations must be >= 0");
  }
};

// Per-pixel per-axis DP state for one iteration. During a sweep the previous
// iteration's instance is the read buffer (it also serves as the
// previous-iteration state the indicator compares against). d_u, d_v hold the
// running collinear differences of the refinement runs.
struct DpFields {
  Grid<double> e_u, e_v;
  Grid<StateOffset> s_u, s_v;
  Grid<std::int32_t> n_u, n_v;
  Grid<double> d_u, d_v;
};

// Resolves the parallel/orthogonal/diagonal subscripts for one axis.
struct AxisView {
  Axis axis;

  const Grid<double>& parallel_energy(const DpFields& f) const { return axis == Axis::U ? f.e_u : f.e_v; }
  const Grid<double>& orthogonal_energy(const DpFields& f) const { return axis == Axis::U ? f.e_v : f.e_u; }
  const Grid<StateOffset>& parallel_state(const DpFields& f) const { return axis == Axis::U ? f.s_u : f.s_v; }
  const Grid<double>& parallel_curvature(const GradientField& g) const { return axis == Axis::U ? g.zuu : g.zvv; }
  const Grid<double>& orthogonal_curvature(const GradientField& g) const { return axis == Axis::U ? g.zvv : g.zuu; }

  Pixel parallel_neighbor(Pixel p, int step) const {
    return axis == Axis::U ? Pixel{p.u + step, p.v} : Pixel{p.u, p.v + step};
  }
  Pixel orthogonal_neighbor(Pixel p, int step) const {
    return axis == Axis::U ? Pixel{p.u, p.v + step} : Pixel{p.u + step, p.v};
  }
  StateOffset make_state(int par, int ort) const {
    return axis == Axis::U ? StateOffset{std::int8_t(par), std::int8_t(ort)}
                           : StateOffset{std::int8_t(ort), std::int8_t(par)};
  }
};

// Immutable context shared by all sweeps of one run.
struct DpContext {
  const DepthGrid* depth = nullptr;
  const GradientField* curvature = nullptr;  // zuu/zvv and the validity mask
  Grid<double> cost_u, cost_v;               // per-pixel transfer costs

  const Grid<double>& parallel_cost(Axis a) const { return a == Axis::U ? cost_u : cost_v; }
  const Grid<double>& orthogonal_cost(Axis a) const { return a == Axis::U ? cost_v : cost_u; }
  bool usable(Pixel p) const {
    return curvature->mask.in_bounds(p) && curvature->valid(p) && depth->valid(p);
  }
};

// Monotonicity/convexity gate for collinear extension. Returns 0 when the
// second derivatives probed one state-step ahead share a strict sign and the
// pixel's state matches the neighbor's previous-iteration state; +inf
// otherwise (including any out-of-bounds or masked probe).
inline double indicator(const DpFields& prev, const GradientField& grad, Pixel p, Pixel pp, Axis axis) {
  const AxisView view{axis};
  const StateOffset sp = view.parallel_state(prev)(p);
  const Pixel probe_a{p.u + sp.du, p.v + sp.dv};
  const Pixel probe_b{pp.u + sp.du, pp.v + sp.dv};
  const Grid<double>& zpp = view.parallel_curvature(grad);
  if (!zpp.in_bounds(probe_a) || !grad.valid(probe_a)) return kInfEnergy;
  if (!zpp.in_bounds(probe_b) || !grad.valid(probe_b)) return kInfEnergy;
  if (!(zpp(probe_a) * zpp(probe_b) > 0.0)) return kInfEnergy;
  if (!(sp == view.parallel_state(prev)(pp))) return kInfEnergy;
  return 0.0;
}

struct Candidate {
  enum class Cls : std::uint8_t { Keep, Parallel, Orthogonal, Diagonal };
  double energy = kInfEnergy;
  StateOffset state;
  Cls cls = Cls::Keep;
};

// Labeled candidate set for one pixel and axis, emitted in tie-break order:
//   keep:        E_p(p)
//   parallel:    c_p(p'_p) + indicator(p, p'_p)
//   orthogonal:  2 * (c_o(p'_o) + E_p(p'_o))
//   diagonal:    c_o(p'_o) + E_p(p'_o) + c_p(p'_d) + E_o(p'_d)
// where c_* are the transfer costs (|z_aa| for the PD cost) and p'_o in the
// diagonal term shares the diagonal's orthogonal sign. Out-of-bounds or
// masked candidates are omitted; keep is always present.
inline void candidate_energies(const DpContext& ctx, const DpFields& prev, const GradientField& grad, Pixel p,
                               Axis axis, std::vector<Candidate>& out) {
  out.clear();
  const AxisView view{axis};
  const Grid<double>& e_p = view.parallel_energy(prev);
  const Grid<double>& e_o = view.orthogonal_energy(prev);
  const Grid<double>& c_p = ctx.parallel_cost(axis);
  const Grid<double>& c_o = ctx.orthogonal_cost(axis);

  out.push_back({e_p(p), view.make_state(0, 0), Candidate::Cls::Keep});

  for (int step : {-1, 1}) {
    const Pixel pp = view.parallel_neighbor(p, step);
    if (!ctx.usable(pp)) continue;
    out.push_back({c_p(pp) + indicator(prev, grad, p, pp, axis), view.make_state(step, 0), Candidate::Cls::Parallel});
  }
  for (int step : {-1, 1}) {
    const Pixel po = view.orthogonal_neighbor(p, step);
    if (!ctx.usable(po)) continue;
    out.push_back({2.0 * (c_o(po) + e_p(po)), view.make_state(0, step), Candidate::Cls::Orthogonal});
  }
  for (int par : {-1, 1})
    for (int ort : {-1, 1}) {
      const Pixel po = view.orthogonal_neighbor(p, ort);
      const Pixel pd = view.parallel_neighbor(po, par);
      if (!ctx.usable(po) || !ctx.usable(pd)) continue;
      out.push_back(
          {c_o(po) + e_p(po) + c_p(pd) + e_o(pd), view.make_state(par, ort), Candidate::Cls::Diagonal});
    }
}

// Minimum-energy candidate under the fixed tie-break (first strict minimum in
// emission order).
inline std::pair<double, StateOffset> select_state(const std::vector<Candidate>& omega) {
  if (omega.empty()) throw ContractViolation("select_state: empty candidate set");
  const Candidate* best = &omega.front();
  for (const Candidate& c : omega)
    if (c.energy < best->energy) best = &c;
  return {best->energy, best->state};
}

// One sweep's read/write buffers: DP fields plus the gradient channels.
struct DpBuffers {
  DpFields fields;
  Grid<double> zu, zv;
};

// One full Jacobi sweep: per valid pixel and per axis, build the candidate
// set, select the state/energy, then apply the gradient update. All reads hit
// `prev`, all writes go to `next`. Returns true when any selected state is
// nonzero.
inline bool dp_iterate(const DpContext& ctx, const DpBuffers& prev, DpBuffers& next) {
  const int w = ctx.curvature->width(), h = ctx.curvature->height();
  if (prev.zu.width() != w || prev.zu.height() != h) throw ContractViolation("dp_iterate: dimension mismatch");
  next = prev;  // masked pixels keep their previous (inert) values

  GradientField grad_prev;  // view of the k-1 gradients over the static curvature
  grad_prev.zu = prev.zu;
  grad_prev.zv = prev.zv;
  grad_prev.zuu = ctx.curvature->zuu;
  grad_prev.zvv = ctx.curvature->zvv;
  grad_prev.mask = ctx.curvature->mask;

  bool any_nonzero = false;
  std::vector<Candidate> omega;
  omega.reserve(9);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      const Pixel p{u, v};
      if (!ctx.usable(p)) continue;
      for (Axis axis : {Axis::U, Axis::V}) {
        candidate_energies(ctx, prev.fields, grad_prev, p, axis, omega);
        const auto [energy, state] = select_state(omega);
        const Grid<std::int32_t>& order_prev = axis == Axis::U ? prev.fields.n_u : prev.fields.n_v;
        const Grid<double>& diff_prev = axis == Axis::U ? prev.fields.d_u : prev.fields.d_v;
        const GradientUpdate upd = update_gradients(*ctx.depth, grad_prev, order_prev, diff_prev, p, axis, state);
        if (axis == Axis::U) {
          next.fields.e_u(p) = energy;
          next.fields.s_u(p) = state;
          next.fields.n_u(p) = upd.order;
          next.fields.d_u(p) = upd.diff;
          next.zu(p) = upd.value;
        } else {
          next.fields.e_v(p) = energy;
          next.fields.s_v(p) = state;
          next.fields.n_v(p) = upd.order;
          next.fields.d_v(p) = upd.diff;
          next.zv(p) = upd.value;
        }
        if (!state.zero()) any_nonzero = true;
      }
    }
  return any_nonzero;
}

// Called after each sweep with the sweep index (1-based), the post-sweep
// fields and gradients, and the nonzero-state flag.
using SweepObserver =
    std::function<void(int sweep, const DpFields& fields, const Grid<double>& zu, const Grid<double>& zv, bool)>;

// Full multi-directional DP: initialize, then sweep until every state is zero
// or the iteration cap is reached. Returns the refined gradient field.
inline GradientField run_dp(const DepthGrid& depth, const DpConfig& cfg, const SweepObserver& observer = {}) {
  cfg.validate();
  InitBundle bundle = init_bundle(depth, cfg.cost);

  DpContext ctx;
  ctx.depth = &depth;
  ctx.curvature = &bundle.grad;
  ctx.cost_u = std::move(bundle.cost_u);
  ctx.cost_v = std::move(bundle.cost_v);

  DpBuffers a, b;
  a.fields = DpFields{std::move(bundle.e_u), std::move(bundle.e_v), std::move(bundle.s_u),
                      std::move(bundle.s_v), std::move(bundle.n_u), std::move(bundle.n_v),
                      std::move(bundle.d_u), std::move(bundle.d_v)};
  a.zu = bundle.grad.zu;
  a.zv = bundle.grad.zv;
  b = a;

  DpBuffers* prev = &a;
  DpBuffers* next = &b;
  for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
    const bool any_nonzero = dp_iterate(ctx, *prev, *next);
    std::swap(prev, next);
    if (observer) observer(sweep, prev->fields, prev->zu, prev->zv, any_nonzero);
    if (cfg.convergence == ConvergenceMode::AllStatesZero && !any_nonzero) break;
  }

  GradientField out;
  out.zu = std::move(prev->zu);
  out.zv = std::move(prev->zv);
  out.zuu = std::move(bundle.grad.zuu);
  out.zvv = std::move(bundle.grad.zvv);
  out.mask = std::move(bundle.grad.mask);
  return out;
}

}  // namespace sdn
