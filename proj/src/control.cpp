#include "llg/control.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include "llg/adjoint.hpp"
#include "llg/errors.hpp"
#include "llg/spectral.hpp"

namespace llg {

namespace {

// One frame of the control part of the cost: (||u||^2, ||grad u||^2).
std::pair<double, double> control_frame_norms(const VectorField3& u) {
  const Gradient g = gradient(u);
  return {l2_norm_sq(u), l2_norm_sq(g.dx) + l2_norm_sq(g.dy)};
}

void add_control_terms(const Trajectory& u, CostBreakdown& cost) {
  const double dt = u.dt();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const auto [l2, h1] = control_frame_norms(u[k]);
    const double w = trapezoid_weight(k, u.steps(), dt);
    cost.control_l2 += 0.5 * w * l2;
    cost.control_h1 += 0.5 * w * h1;
  }
}

// Accumulates the state-dependent terms frame by frame.
void add_state_frame(const OcpSpec& spec, std::size_t k, std::size_t steps, double dt, const VectorField3& m,
                     CostBreakdown& cost) {
  cost.tracking += 0.5 * trapezoid_weight(k, steps, dt) * l2_norm_sq(m - spec.m_d[k]);
  if (k == steps) cost.terminal = 0.5 * l2_norm_sq(m - spec.m_omega);
}

void finish(CostBreakdown& cost) { cost.total = cost.tracking + cost.terminal + cost.control_l2 + cost.control_h1; }

VectorField3 gradient_frame(const VectorField3& u, const VectorField3& phi, const VectorField3& m,
                            GradientMetric metric) {
  VectorField3 w = state_sensitivity(phi, m);
  if (metric == GradientMetric::H1) {
    return u + helmholtz_inverse(w);
  }
  w += u;
  w -= laplacian(u);
  return w;
}

void check_control(const OcpSpec& spec, const Trajectory& u) {
  require_conforming(u, spec.m_d, "control");
  if (std::abs(u.horizon() - spec.horizon) > 1e-12 * spec.horizon) {
    throw ShapeError("control horizon does not match the problem horizon");
  }
}

}  // namespace

void OcpSpec::validate() const {
  if (!(horizon > 0.0)) throw ConfigError("time.T", "must be positive");
  if (nt < 1) throw ConfigError("time.nt", "must be >= 1");
  if (!(e_mf > 0.0)) throw ConfigError("control.e_mf", "must be positive");
  require_conforming(grid, m0.grid(), "OcpSpec.m0");
  require_conforming(grid, m_omega.grid(), "OcpSpec.m_omega");
  require_conforming(grid, m_d.grid(), "OcpSpec.m_d");
  if (m_d.steps() != nt) throw ShapeError("OcpSpec.m_d: step count differs from nt");
  if (sphere_defect(m0) > 1e-10) throw ConfigError("scenario.m0", "initial magnetization is not unit length");
}

CostBreakdown evaluate_cost(const Trajectory& m, const Trajectory& u, const OcpSpec& spec) {
  require_conforming(m, u, "evaluate_cost");
  require_conforming(m, spec.m_d, "evaluate_cost");
  require_conforming(m.grid(), spec.m_omega.grid(), "evaluate_cost");
  CostBreakdown cost;
  for (std::size_t k = 0; k < m.size(); ++k) add_state_frame(spec, k, m.steps(), m.dt(), m[k], cost);
  add_control_terms(u, cost);
  finish(cost);
  return cost;
}

VectorField3 state_sensitivity(const VectorField3& phi, const VectorField3& m) {
  require_conforming(phi.grid(), m.grid(), "state_sensitivity");
  VectorField3 out(m.grid());
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 mi = m.at(i);
    const Vec3 pxm = cross(phi.at(i), mi);
    const Vec3 m_pxm = cross(mi, pxm);
    out.set(i, {pxm[0] + m_pxm[0], pxm[1] + m_pxm[1], pxm[2] + m_pxm[2]});
  }
  return out;
}

Trajectory reduced_gradient(const Trajectory& u, const Trajectory& phi, const Trajectory& m, GradientMetric metric) {
  require_conforming(u, phi, "reduced_gradient");
  require_conforming(u, m, "reduced_gradient");
  std::vector<VectorField3> frames;
  frames.reserve(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) frames.push_back(gradient_frame(u[k], phi[k], m[k], metric));
  return Trajectory(u.horizon(), std::move(frames));
}

double directional_derivative(const Trajectory& u, const Trajectory& phi, const Trajectory& m, const Trajectory& h) {
  require_conforming(u, phi, "directional_derivative");
  require_conforming(u, m, "directional_derivative");
  require_conforming(u, h, "directional_derivative");
  double sum = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const Gradient gu = gradient(u[k]);
    const Gradient gh = gradient(h[k]);
    const double frame = l2_inner(u[k], h[k]) + l2_inner(gu.dx, gh.dx) + l2_inner(gu.dy, gh.dy) +
                         l2_inner(state_sensitivity(phi[k], m[k]), h[k]);
    sum += trapezoid_weight(k, u.steps(), u.dt()) * frame;
  }
  return sum;
}

double l2_inner_time(const Trajectory& a, const Trajectory& b) {
  require_conforming(a, b, "l2_inner_time");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += trapezoid_weight(k, a.steps(), a.dt()) * l2_inner(a[k], b[k]);
  return sum;
}

double h1_inner_time(const Trajectory& a, const Trajectory& b) {
  require_conforming(a, b, "h1_inner_time");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const Gradient ga = gradient(a[k]);
    const Gradient gb = gradient(b[k]);
    const double frame = l2_inner(a[k], b[k]) + l2_inner(ga.dx, gb.dx) + l2_inner(ga.dy, gb.dy);
    sum += trapezoid_weight(k, a.steps(), a.dt()) * frame;
  }
  return sum;
}

double metric_inner(const Trajectory& a, const Trajectory& b, GradientMetric metric) {
  return metric == GradientMetric::H1 ? h1_inner_time(a, b) : l2_inner_time(a, b);
}

double budget_norm_sq(const Trajectory& u) { return l2_inner_time(u, u); }

Trajectory project_uad(const Trajectory& u, double e_mf) {
  if (!(e_mf > 0.0)) throw ConfigError("control.e_mf", "must be positive");
  const double norm_sq = budget_norm_sq(u);
  if (norm_sq <= e_mf) return u;
  Trajectory out = u;
  out *= std::sqrt(e_mf / norm_sq);
  return out;
}

void OptimizerOptions::validate() const {
  if (!(grad_tol >= 0.0)) throw ConfigError("optimizer.grad_tol", "must be non-negative");
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) throw ConfigError("optimizer.armijo_c", "must lie in (0,1)");
  if (!(backtrack_ratio > 0.0 && backtrack_ratio < 1.0)) {
    throw ConfigError("optimizer.backtrack_ratio", "must lie in (0,1)");
  }
  if (!(initial_step > 0.0)) throw ConfigError("optimizer.initial_step", "must be positive");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::GradTol:
      return "grad_tol";
    case StopReason::MaxIter:
      return "max_iter";
    case StopReason::LineSearchFail:
      return "line_search_fail";
    case StopReason::BudgetBoundaryStall:
      return "budget_boundary_stall";
  }
  return "unknown";
}

CostBreakdown reduced_cost(const OcpSpec& spec, const Trajectory& u, const SolverConfig& cfg) {
  check_control(spec, u);
  CostBreakdown cost;
  march_forward(spec.m0, u, spec.horizon, cfg, [&](std::size_t k, const VectorField3& m, const FrameDiagnostics&) {
    add_state_frame(spec, k, u.steps(), u.dt(), m, cost);
  });
  add_control_terms(u, cost);
  finish(cost);
  return cost;
}

GradientEvaluation evaluate_gradient(const OcpSpec& spec, const Trajectory& u, const SolverConfig& cfg,
                                     GradientMetric metric) {
  check_control(spec, u);
  GradientEvaluation out;
  const std::size_t stride = choose_checkpoint_stride(u.steps(), spec.grid, cfg.memory_budget_bytes);
  if (stride == 0) {
    out.m = solve_forward(spec.m0, u, spec.horizon, cfg).m;
    out.cost = evaluate_cost(out.m, u, spec);
    out.phi = solve_adjoint({out.m, u, spec.m_d, spec.m_omega}, cfg);
    out.gradient = reduced_gradient(u, out.phi, out.m, metric);
    return out;
  }

  // Checkpointed route: state frames are recomputed segment by segment during the
  // backward sweep; neither m nor phi is kept.
  CheckpointedState states(spec.m0, u, cfg, stride);
  std::vector<VectorField3> grad_frames(u.size());
  sweep_adjoint(states, u, spec.m_d, spec.m_omega, cfg,
                [&](std::size_t k, const VectorField3& phi, const VectorField3& m) {
                  add_state_frame(spec, k, u.steps(), u.dt(), m, out.cost);
                  grad_frames[k] = gradient_frame(u[k], phi, m, metric);
                });
  add_control_terms(u, out.cost);
  finish(out.cost);
  out.gradient = Trajectory(u.horizon(), std::move(grad_frames));
  return out;
}

OptResult optimize(const OcpSpec& spec, const Trajectory& u_init, const OptimizerOptions& opts,
                   const SolverConfig& cfg) {
  spec.validate();
  opts.validate();
  check_control(spec, u_init);
  if (budget_norm_sq(u_init) > spec.e_mf * (1.0 + 1e-12)) {
    throw ConfigError("control.u_init", "initial control violates the budget");
  }

  OptResult result;
  OptReport& report = result.report;
  Trajectory u = u_init;
  GradientEvaluation eval = evaluate_gradient(spec, u, cfg, opts.metric);
  report.initial_gradient_norm = std::sqrt(std::max(0.0, h1_inner_time(eval.gradient, eval.gradient)));
  const double s0 = opts.initial_step;
  double last_step = 0.0;
  std::optional<Trajectory> prev_u;
  std::optional<Trajectory> prev_g;

  for (std::size_t iter = 0;; ++iter) {
    Trajectory trial_dir = u;
    trial_dir.axpy(-s0, eval.gradient);
    const bool active = budget_norm_sq(trial_dir) > spec.e_mf;
    Trajectory pg = project_uad(trial_dir, spec.e_mf);
    pg.axpy(-1.0, u);
    const double grad_norm = std::sqrt(budget_norm_sq(pg)) / s0;
    report.iterations.push_back({iter, eval.cost, grad_norm, last_step, active});

    if (grad_norm <= opts.grad_tol) {
      report.stopping_reason = StopReason::GradTol;
      break;
    }
    if (iter >= opts.max_iter) {
      report.stopping_reason = StopReason::MaxIter;
      break;
    }

    double s = s0;
    if (opts.bb_step && prev_u) {
      Trajectory du = u;
      du.axpy(-1.0, *prev_u);
      Trajectory dg = eval.gradient;
      dg.axpy(-1.0, *prev_g);
      const double num = metric_inner(du, du, opts.metric);
      const double den = metric_inner(du, dg, opts.metric);
      if (den > 0.0 && num > 0.0) s = std::clamp(num / den, 1e-3 * s0, 1e3 * s0);
    }
    bool accepted = false;
    Trajectory u_next;
    CostBreakdown next_cost;
    for (std::size_t bt = 0; bt <= opts.max_backtracks; ++bt, s *= opts.backtrack_ratio) {
      Trajectory candidate = u;
      candidate.axpy(-s, eval.gradient);
      candidate = project_uad(candidate, spec.e_mf);
      Trajectory step_vec = u;
      step_vec.axpy(-1.0, candidate);
      const double predicted = metric_inner(eval.gradient, step_vec, opts.metric);
      try {
        next_cost = reduced_cost(spec, candidate, cfg);
      } catch (const BlowupError&) {
        continue;
      }
      if (next_cost.total <= eval.cost.total - opts.armijo_c * std::max(0.0, predicted)) {
        u_next = std::move(candidate);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.stopping_reason = StopReason::LineSearchFail;
      break;
    }

    const double decrease = eval.cost.total - next_cost.total;
    prev_u = std::move(u);
    prev_g = std::move(eval.gradient);
    u = std::move(u_next);
    last_step = s;
    eval = evaluate_gradient(spec, u, cfg, opts.metric);
    if (active && decrease <= 1e-12 * std::max(1.0, std::abs(eval.cost.total))) {
      trial_dir = u;
      trial_dir.axpy(-s0, eval.gradient);
      pg = project_uad(trial_dir, spec.e_mf);
      pg.axpy(-1.0, u);
      report.iterations.push_back({iter + 1, eval.cost, std::sqrt(budget_norm_sq(pg)) / s0, last_step,
                                   budget_norm_sq(trial_dir) > spec.e_mf});
      report.stopping_reason = StopReason::BudgetBoundaryStall;
      break;
    }
  }

  result.u_star = u;
  if (eval.m.size() == 0) {
    ForwardSolution fwd = solve_forward(spec.m0, u, spec.horizon, cfg);
    result.m_star = std::move(fwd.m);
    result.phi_star = solve_adjoint({result.m_star, u, spec.m_d, spec.m_omega}, cfg);
  } else {
    result.m_star = std::move(eval.m);
    result.phi_star = std::move(eval.phi);
  }
  return result;
}

Trajectory random_smooth_trajectory(const Grid& grid, double horizon, std::size_t nt, std::mt19937_64& rng,
                                    std::size_t max_mode) {
  std::normal_distribution<double> normal(0.0, 1.0);
  constexpr std::size_t kTimeModes = 3;
  const std::size_t modes = max_mode + 1;
  std::vector<double> a(3 * modes * modes * kTimeModes);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t j = 0; j < modes; ++j) {
      for (std::size_t k = 0; k < modes; ++k) {
        for (std::size_t l = 0; l < kTimeModes; ++l) {
          const double decay = 1.0 + static_cast<double>(j + k + l);
          a[((c * modes + j) * modes + k) * kTimeModes + l] = normal(rng) / (decay * decay);
        }
      }
    }
  }
  std::vector<double> cx(grid.nx * modes);
  std::vector<double> cy(grid.ny * modes);
  for (std::size_t i = 0; i < grid.nx; ++i) {
    for (std::size_t j = 0; j < modes; ++j) cx[i * modes + j] = std::cos(std::numbers::pi * j * grid.x(i) / grid.lx);
  }
  for (std::size_t i = 0; i < grid.ny; ++i) {
    for (std::size_t k = 0; k < modes; ++k) cy[i * modes + k] = std::cos(std::numbers::pi * k * grid.y(i) / grid.ly);
  }

  std::vector<VectorField3> frames;
  frames.reserve(nt + 1);
  std::vector<double> spatial(3 * modes * modes);
  for (std::size_t step = 0; step <= nt; ++step) {
    const double t = horizon * static_cast<double>(step) / static_cast<double>(nt);
    for (std::size_t q = 0; q < spatial.size(); ++q) {
      double s = 0.0;
      for (std::size_t l = 0; l < kTimeModes; ++l) s += a[q * kTimeModes + l] * std::cos(std::numbers::pi * l * t / horizon);
      spatial[q] = s;
    }
    VectorField3 f(grid);
    for (std::size_t c = 0; c < 3; ++c) {
      auto comp = f.component(c);
      for (std::size_t ix = 0; ix < grid.nx; ++ix) {
        for (std::size_t iy = 0; iy < grid.ny; ++iy) {
          double v = 0.0;
          for (std::size_t j = 0; j < modes; ++j) {
            for (std::size_t k = 0; k < modes; ++k) {
              v += spatial[(c * modes + j) * modes + k] * cx[ix * modes + j] * cy[iy * modes + k];
            }
          }
          comp[grid.index(ix, iy)] = v;
        }
      }
    }
    frames.push_back(std::move(f));
  }
  return Trajectory(horizon, std::move(frames));
}

ViReport variational_inequality_check(const OcpSpec& spec, const Trajectory& u_tilde, const Trajectory& m_tilde,
                                      const Trajectory& phi, double scale, std::size_t probes, std::uint64_t seed,
                                      double tolerance) {
  ViReport report;
  report.probes = probes;
  report.scale = scale > 0.0 ? scale : 1.0;
  report.tolerance = tolerance;
  report.min_normalized = std::numeric_limits<double>::infinity();
  report.min_raw = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t p = 0; p < probes; ++p) {
    Trajectory u = random_smooth_trajectory(spec.grid, spec.horizon, spec.nt, rng);
    const double radius = std::sqrt(spec.e_mf) * unit(rng);
    u *= radius / std::sqrt(budget_norm_sq(u));
    Trajectory diff = u;
    diff.axpy(-1.0, u_tilde);
    const double value = directional_derivative(u_tilde, phi, m_tilde, diff);
    const double dist = std::sqrt(h1_inner_time(diff, diff));
    const double normalized = dist > 0.0 ? value / (report.scale * dist) : 0.0;
    report.min_raw = std::min(report.min_raw, value);
    report.min_normalized = std::min(report.min_normalized, normalized);
  }
  report.passed = report.min_normalized >= -tolerance;
  return report;
}

}  // namespace llg
