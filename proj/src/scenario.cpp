#include "llg/scenario.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "llg/spectral.hpp"

namespace llg {

Trajectory Scenario::sample_control(std::size_t nt) const {
  std::vector<VectorField3> frames;
  frames.reserve(nt + 1);
  for (std::size_t k = 0; k <= nt; ++k) {
    frames.push_back(control(horizon * static_cast<double>(k) / static_cast<double>(nt)));
  }
  return Trajectory(horizon, std::move(frames));
}

Scenario stationary_scenario(const Grid& grid, double horizon) {
  return {"stationary", grid, horizon, VectorField3::uniform(grid, {0.0, 0.0, 1.0}),
          [grid](double) { return VectorField3(grid); }};
}

Scenario macrospin_scenario(const Grid& grid, double horizon, double theta0, double h) {
  const VectorField3 m0 = VectorField3::uniform(grid, {std::sin(theta0), 0.0, std::cos(theta0)});
  const VectorField3 u = VectorField3::uniform(grid, {0.0, 0.0, h});
  return {"macrospin", grid, horizon, m0, [u](double) { return u; }};
}

Vec3 macrospin_exact(double theta0, double h, double t) {
  const double theta = 2.0 * std::atan(std::tan(0.5 * theta0) * std::exp(-h * t));
  const double az = -h * t;
  return {std::sin(theta) * std::cos(az), std::sin(theta) * std::sin(az), std::cos(theta)};
}

Scenario perturbed_scenario(const Grid& grid, double horizon, double scale, double control_amp) {
  SpectralField theta(grid);
  SpectralField phi(grid);
  theta(1, 0) = 0.3 * scale;
  phi(0, 1) = 0.2 * scale;
  const VectorField3 m0 = make_initial_data(theta, phi);

  VectorField3 shape(grid);
  for (std::size_t ix = 0; ix < grid.nx; ++ix) {
    for (std::size_t iy = 0; iy < grid.ny; ++iy) {
      shape.set(grid.index(ix, iy), {std::cos(std::numbers::pi * grid.y(iy) / grid.ly), 0.0,
                                     std::cos(std::numbers::pi * grid.x(ix) / grid.lx)});
    }
  }
  shape *= scale * control_amp;
  return {"perturbed", grid, horizon, m0, [shape, horizon](double t) {
            VectorField3 u = shape;
            u *= std::cos(std::numbers::pi * t / horizon);
            return u;
          }};
}

InverseCrime inverse_crime_problem(const Grid& grid, double horizon, const SolverConfig& cfg, std::uint64_t seed,
                                   double amplitude, double budget_factor) {
  std::mt19937_64 rng(seed);
  Trajectory u_dagger = random_smooth_trajectory(grid, horizon, cfg.nt, rng);
  u_dagger *= amplitude / std::sqrt(budget_norm_sq(u_dagger));

  const Scenario base = perturbed_scenario(grid, horizon, 1.0);
  ForwardSolution truth = solve_forward(base.m0, u_dagger, horizon, cfg);
  OcpSpec spec;
  spec.grid = grid;
  spec.horizon = horizon;
  spec.nt = cfg.nt;
  spec.m0 = base.m0;
  spec.m_omega = truth.m.back();
  spec.m_d = std::move(truth.m);
  spec.e_mf = budget_factor * amplitude * amplitude;
  return {std::move(spec), std::move(u_dagger)};
}

OcpSpec attainable_problem(const VectorField3& m0, double horizon, const SolverConfig& cfg, double e_mf) {
  const Trajectory zero = Trajectory::zeros(m0.grid(), horizon, cfg.nt);
  ForwardSolution run = solve_forward(m0, zero, horizon, cfg);
  OcpSpec spec;
  spec.grid = m0.grid();
  spec.horizon = horizon;
  spec.nt = cfg.nt;
  spec.m0 = m0;
  spec.m_omega = run.m.back();
  spec.m_d = std::move(run.m);
  spec.e_mf = e_mf;
  return spec;
}

}  // namespace llg
