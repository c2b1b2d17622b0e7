#include "llg/state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llg/errors.hpp"

namespace llg {

namespace {

void check_blowup(const VectorField3& f, std::size_t step) {
  if (!f.all_finite() || f.max_abs() > kBlowupThreshold) {
    throw BlowupError("numerical blowup at step " + std::to_string(step), step);
  }
}

// m x E - m x (m x E), pointwise.
VectorField3 llg_torque(const VectorField3& m, const VectorField3& e) {
  VectorField3 out(m.grid());
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 mi = m.at(i);
    const Vec3 mxe = cross(mi, e.at(i));
    const Vec3 mmxe = cross(mi, mxe);
    out.set(i, {mxe[0] - mmxe[0], mxe[1] - mmxe[1], mxe[2] - mmxe[2]});
  }
  return out;
}

FrameDiagnostics frame_diagnostics(double t, const VectorField3& m, const Derivatives& dm) {
  FrameDiagnostics d;
  d.t = t;
  d.sphere_defect = sphere_defect(m);
  d.grad_l2sq = l2_norm_sq(dm.grad.dx) + l2_norm_sq(dm.grad.dy);
  d.lap_l2sq = l2_norm_sq(dm.lap);
  d.mxlap_l2sq = l2_norm_sq(cross(m, dm.lap));
  return d;
}

VectorField3 advance(const VectorField3& m, const Derivatives& dm, const VectorField3& u, double dt,
                     const SolverConfig& cfg, std::size_t k) {
  VectorField3 next;
  if (cfg.formulation == Formulation::EP) {
    VectorField3 explicit_part = ep_nonlinear(m, dm, u);
    if (cfg.dealias) explicit_part = dealias_two_thirds(explicit_part);
    explicit_part *= dt;
    explicit_part += m;
    next = implicit_heat_solve(explicit_part, dt);
  } else {
    const double cap = nlp_max_dt(m.grid());
    if (dt > cap * (1.0 + 1e-12)) {
      throw StabilityError("explicit NLP step dt = " + std::to_string(dt) + " exceeds stability cap " +
                           std::to_string(cap) + " (1/lambda_max)");
    }
    VectorField3 f = llg_torque(m, dm.lap + u);
    if (cfg.dealias) f = dealias_two_thirds(f);
    next = m;
    next.axpy(dt, f);
  }
  check_blowup(next, k + 1);
  if (cfg.renormalize_every && (k + 1) % *cfg.renormalize_every == 0) {
    next = renormalize(next);
  }
  return next;
}

void check_inputs(const VectorField3& m0, const Trajectory& u, double horizon, const SolverConfig& cfg) {
  cfg.validate();
  require_conforming(m0.grid(), u.grid(), "solve_forward");
  if (u.steps() != cfg.nt) {
    throw ShapeError("control has " + std::to_string(u.steps()) + " steps, solver expects nt = " +
                     std::to_string(cfg.nt));
  }
  if (std::abs(u.horizon() - horizon) > 1e-12 * horizon) {
    throw ShapeError("control horizon does not match the requested horizon");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (nt < 1) throw ConfigError("time.nt", "must be >= 1");
  if (renormalize_every && *renormalize_every < 1) {
    throw ConfigError("solver.renormalize_every", "must be >= 1 when present");
  }
}

VectorField3 ep_nonlinear(const VectorField3& m, const Derivatives& dm, const VectorField3& u) {
  require_conforming(m.grid(), u.grid(), "ep_nonlinear");
  const ScalarField grad_sq = gradient_contract(dm.grad, dm.grad);
  VectorField3 out(m.grid());
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 mi = m.at(i);
    const Vec3 ui = u.at(i);
    const Vec3 mxl = cross(mi, dm.lap.at(i));
    const Vec3 mxu = cross(mi, ui);
    const Vec3 mmxu = cross(mi, mxu);
    const double g = grad_sq[i];
    out.set(i, {g * mi[0] + mxl[0] + mxu[0] - mmxu[0], g * mi[1] + mxl[1] + mxu[1] - mmxu[1],
                g * mi[2] + mxl[2] + mxu[2] - mmxu[2]});
  }
  return out;
}

VectorField3 rhs(const VectorField3& m, const VectorField3& u, const SolverConfig& cfg) {
  require_conforming(m.grid(), u.grid(), "rhs");
  const Derivatives dm = derivatives(m);
  VectorField3 out;
  if (cfg.formulation == Formulation::EP) {
    out = ep_nonlinear(m, dm, u);
    out += dm.lap;
  } else {
    out = llg_torque(m, dm.lap + u);
  }
  if (!out.all_finite()) {
    throw BlowupError("non-finite right-hand side", 0);
  }
  return out;
}

FrameDiagnostics diagnose_frame(double t, const VectorField3& m) { return frame_diagnostics(t, m, derivatives(m)); }

double nlp_max_dt(const Grid& grid) { return 1.0 / grid.lambda_max(); }

VectorField3 step(const VectorField3& m, const VectorField3& u, double dt, const SolverConfig& cfg) {
  require_conforming(m.grid(), u.grid(), "step");
  if (!(dt > 0.0)) throw ConfigError("dt", "time step must be positive");
  return advance(m, derivatives(m), u, dt, cfg, 0);
}

void march_forward(const VectorField3& m0, const Trajectory& u, double horizon, const SolverConfig& cfg,
                   const StateVisitor& visit) {
  check_inputs(m0, u, horizon, cfg);
  const std::size_t nt = u.steps();
  const double dt = u.dt();
  VectorField3 m = m0;
  for (std::size_t k = 0; k < nt; ++k) {
    const Derivatives dm = derivatives(m);
    visit(k, m, frame_diagnostics(u.time(k), m, dm));
    m = advance(m, dm, u[k], dt, cfg, k);
  }
  visit(nt, m, frame_diagnostics(u.time(nt), m, derivatives(m)));
}

ForwardSolution solve_forward(const VectorField3& m0, const Trajectory& u, double horizon, const SolverConfig& cfg) {
  std::vector<VectorField3> frames;
  std::vector<FrameDiagnostics> diag;
  frames.reserve(u.size());
  diag.reserve(u.size());
  march_forward(m0, u, horizon, cfg, [&](std::size_t, const VectorField3& m, const FrameDiagnostics& d) {
    frames.push_back(m);
    diag.push_back(d);
  });
  return {Trajectory(horizon, std::move(frames)), std::move(diag)};
}

VectorField3 make_initial_data(const SpectralField& theta, const SpectralField& phi_ang) {
  require_conforming(theta.grid(), phi_ang.grid(), "make_initial_data");
  const ScalarField t = to_nodal(theta);
  const ScalarField p = to_nodal(phi_ang);
  VectorField3 m0(theta.grid());
  for (std::size_t i = 0; i < m0.nodes(); ++i) {
    const double st = std::sin(t[i]);
    m0.set(i, {st * std::cos(p[i]), st * std::sin(p[i]), std::cos(t[i])});
  }
  return m0;
}

CheckpointedState::CheckpointedState(const VectorField3& m0, Trajectory u, const SolverConfig& cfg,
                                     std::size_t stride)
    : u_(std::move(u)), cfg_(cfg), stride_(stride < 1 ? 1 : stride) {
  const std::size_t nt = u_.steps();
  diagnostics_.reserve(nt + 1);
  march_forward(m0, u_, u_.horizon(), cfg_, [&](std::size_t k, const VectorField3& m, const FrameDiagnostics& d) {
    if (k == nt) {
      final_frame_ = m;
    } else if (k % stride_ == 0) {
      checkpoints_.push_back(m);
    }
    diagnostics_.push_back(d);
  });
}

void CheckpointedState::load_segment(std::size_t segment) {
  const std::size_t nt = u_.steps();
  const std::size_t first = segment * stride_;
  const std::size_t last = std::min(first + stride_, nt);
  const double dt = u_.dt();
  segment_frames_.clear();
  segment_frames_.reserve(stride_ + 1);
  segment_frames_.push_back(checkpoints_[segment]);
  for (std::size_t k = first; k < last; ++k) {
    const VectorField3& m = segment_frames_.back();
    segment_frames_.push_back(advance(m, derivatives(m), u_[k], dt, cfg_, k));
  }
  loaded_segment_ = segment;
  ++recomputed_;
}

const VectorField3& CheckpointedState::frame(std::size_t k) {
  if (k > u_.steps()) throw ShapeError("frame index out of range");
  if (k == u_.steps()) return final_frame_;
  const std::size_t segment = k / stride_;
  if (segment != loaded_segment_) load_segment(segment);
  return segment_frames_[k - segment * stride_];
}

std::size_t choose_checkpoint_stride(std::size_t steps, const Grid& grid, std::size_t budget_bytes) {
  const std::size_t frame_bytes = 3 * grid.nodes() * sizeof(double);
  if (budget_bytes == 0 || (steps + 1) * frame_bytes <= budget_bytes) return 0;
  const auto root = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(steps + 1))));
  return std::max<std::size_t>(2, root);
}

}  // namespace llg
