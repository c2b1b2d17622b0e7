#include "llg/tangent.hpp"

#include <string>

#include "llg/errors.hpp"

namespace llg {

namespace {

void check_blowup(const VectorField3& f, std::size_t step) {
  if (!f.all_finite() || f.max_abs() > kBlowupThreshold) {
    throw BlowupError("tangent solve blew up at step " + std::to_string(step), step);
  }
}

}  // namespace

VectorField3 tangent_explicit(const VectorField3& v, const Derivatives& dv, const VectorField3& m,
                              const Derivatives& dm, const VectorField3& u) {
  require_conforming(v.grid(), m.grid(), "tangent_explicit");
  require_conforming(v.grid(), u.grid(), "tangent_explicit");
  const ScalarField grad_mv = gradient_contract(dm.grad, dv.grad);
  const ScalarField grad_mm = gradient_contract(dm.grad, dm.grad);
  VectorField3 out(v.grid());
  for (std::size_t i = 0; i < v.nodes(); ++i) {
    const Vec3 mi = m.at(i);
    const Vec3 vi = v.at(i);
    const Vec3 ui = u.at(i);
    const Vec3 v_x_lapm = cross(vi, dm.lap.at(i));
    const Vec3 m_x_lapv = cross(mi, dv.lap.at(i));
    const Vec3 v_x_u = cross(vi, ui);
    const Vec3 v_x_mxu = cross(vi, cross(mi, ui));
    const Vec3 m_x_vxu = cross(mi, v_x_u);
    Vec3 r{};
    for (std::size_t c = 0; c < 3; ++c) {
      r[c] = 2.0 * grad_mv[i] * mi[c] + grad_mm[i] * vi[c] + v_x_lapm[c] + m_x_lapv[c] + v_x_u[c] - v_x_mxu[c] -
             m_x_vxu[c];
    }
    out.set(i, r);
  }
  return out;
}

VectorField3 tangent_rhs(const VectorField3& v, const VectorField3& m, const VectorField3& u, const VectorField3& g) {
  require_conforming(v.grid(), g.grid(), "tangent_rhs");
  const Derivatives dv = derivatives(v);
  VectorField3 out = tangent_explicit(v, dv, m, derivatives(m), u);
  out += dv.lap;
  out += g;
  return out;
}

VectorField3 control_derivative_source(const VectorField3& m, const VectorField3& h) {
  require_conforming(m.grid(), h.grid(), "control_derivative_source");
  VectorField3 out(m.grid());
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 mi = m.at(i);
    const Vec3 mxh = cross(mi, h.at(i));
    const Vec3 mmxh = cross(mi, mxh);
    out.set(i, {mxh[0] - mmxh[0], mxh[1] - mmxh[1], mxh[2] - mmxh[2]});
  }
  return out;
}

Trajectory solve_tangent(const TangentInput& inp, const SolverConfig& cfg) {
  cfg.validate();
  if (cfg.formulation != Formulation::EP) {
    throw ConfigError("solver.formulation", "the linearized solver is defined for the EP form only");
  }
  require_conforming(inp.base_m, inp.base_u, "solve_tangent");
  require_conforming(inp.base_m, inp.data, "solve_tangent");
  const std::size_t nt = inp.base_m.steps();
  const double dt = inp.base_m.dt();
  const Grid& grid = inp.base_m.grid();

  VectorField3 v(grid);
  if (inp.mode == TangentMode::General && inp.v0) {
    require_conforming(grid, inp.v0->grid(), "solve_tangent");
    v = *inp.v0;
  }

  std::vector<VectorField3> frames;
  frames.reserve(nt + 1);
  frames.push_back(v);
  for (std::size_t k = 0; k < nt; ++k) {
    const VectorField3& m = inp.base_m[k];
    const VectorField3& cur = frames.back();
    VectorField3 expl = tangent_explicit(cur, derivatives(cur), m, derivatives(m), inp.base_u[k]);
    if (inp.mode == TangentMode::General) {
      expl += inp.data[k];
    } else {
      expl += control_derivative_source(m, inp.data[k]);
    }
    if (cfg.dealias) expl = dealias_two_thirds(expl);
    expl *= dt;
    expl += cur;
    VectorField3 next = implicit_heat_solve(expl, dt);
    check_blowup(next, k + 1);
    frames.push_back(std::move(next));
  }
  return Trajectory(inp.base_m.horizon(), std::move(frames));
}

}  // namespace llg
