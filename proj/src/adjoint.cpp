#include "llg/adjoint.hpp"

#include <string>

#include "llg/errors.hpp"

namespace llg {

VectorField3 adjoint_explicit(const VectorField3& phi, const VectorField3& m, const Derivatives& dm,
                              const VectorField3& u) {
  require_conforming(phi.grid(), m.grid(), "adjoint_explicit");
  require_conforming(phi.grid(), u.grid(), "adjoint_explicit");
  const Grid& grid = phi.grid();
  VectorField3 out = laplacian(cross(phi, m));

  // -2 div((m . phi) grad m), one component at a time.
  const ScalarField m_dot_phi = dot(m, phi);
  ScalarField fx(grid);
  ScalarField fy(grid);
  for (std::size_t c = 0; c < 3; ++c) {
    const auto dxc = dm.grad.dx.component(c);
    const auto dyc = dm.grad.dy.component(c);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
      fx[i] = m_dot_phi[i] * dxc[i];
      fy[i] = m_dot_phi[i] * dyc[i];
    }
    const ScalarField div = divergence(fx, fy);
    auto oc = out.component(c);
    for (std::size_t i = 0; i < grid.nodes(); ++i) oc[i] -= 2.0 * div[i];
  }

  const ScalarField grad_sq = gradient_contract(dm.grad, dm.grad);
  for (std::size_t i = 0; i < grid.nodes(); ++i) {
    const Vec3 p = phi.at(i);
    const Vec3 mi = m.at(i);
    const Vec3 ui = u.at(i);
    const Vec3 lapm_x_p = cross(dm.lap.at(i), p);
    const Vec3 u_x_p = cross(ui, p);
    const Vec3 pxm_x_u = cross(cross(p, mi), ui);
    const Vec3 p_x_mxu = cross(p, cross(mi, ui));
    Vec3 r = out.at(i);
    for (std::size_t c = 0; c < 3; ++c) {
      r[c] += lapm_x_p[c] + u_x_p[c] + grad_sq[i] * p[c] + pxm_x_u[c] + p_x_mxu[c];
    }
    out.set(i, r);
  }
  return out;
}

VectorField3 adjoint_rhs(const VectorField3& phi, const VectorField3& m, const VectorField3& u,
                         const VectorField3& m_d_frame) {
  require_conforming(phi.grid(), m_d_frame.grid(), "adjoint_rhs");
  VectorField3 out = adjoint_explicit(phi, m, derivatives(m), u);
  out += laplacian(phi);
  out += m;
  out -= m_d_frame;
  return out;
}

VectorField3 terminal_condition(const VectorField3& m_T, const VectorField3& m_omega) {
  require_conforming(m_T.grid(), m_omega.grid(), "terminal_condition");
  return m_T - m_omega;
}

void sweep_adjoint(FrameSource& states, const Trajectory& u, const Trajectory& m_d, const VectorField3& m_omega,
                   const SolverConfig& cfg, const AdjointVisitor& visit) {
  cfg.validate();
  if (cfg.formulation != Formulation::EP) {
    throw ConfigError("solver.formulation", "the adjoint solver is defined for the EP form only");
  }
  require_conforming(u, m_d, "sweep_adjoint");
  const std::size_t nt = u.steps();
  if (states.steps() != nt) throw ShapeError("sweep_adjoint: state and control step counts differ");
  const double dt = u.dt();

  VectorField3 phi = terminal_condition(states.frame(nt), m_omega);
  visit(nt, phi, states.frame(nt));
  for (std::size_t k = nt; k-- > 0;) {
    const VectorField3& m = states.frame(k);
    VectorField3 expl = adjoint_explicit(phi, m, derivatives(m), u[k]);
    expl += m;
    expl -= m_d[k];
    if (cfg.dealias) expl = dealias_two_thirds(expl);
    expl *= dt;
    expl += phi;
    phi = implicit_heat_solve(expl, dt);
    if (!phi.all_finite() || phi.max_abs() > kBlowupThreshold) {
      throw BlowupError("adjoint solve blew up at step " + std::to_string(k), k);
    }
    visit(k, phi, m);
  }
}

Trajectory solve_adjoint(const AdjointInput& inp, const SolverConfig& cfg) {
  require_conforming(inp.m_traj, inp.u_traj, "solve_adjoint");
  TrajectoryFrames states(inp.m_traj);
  std::vector<VectorField3> frames(inp.m_traj.size());
  sweep_adjoint(states, inp.u_traj, inp.m_d, inp.m_omega, cfg,
                [&frames](std::size_t k, const VectorField3& phi, const VectorField3&) { frames[k] = phi; });
  return Trajectory(inp.m_traj.horizon(), std::move(frames));
}

}  // namespace llg
