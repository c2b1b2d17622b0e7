#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "llg/control.hpp"
#include "llg/fields.hpp"
#include "llg/state.hpp"

namespace llg {

/// Initial data and an applied field u(x, t) given as a function of time.
struct Scenario {
  std::string name;
  Grid grid;
  double horizon = 1.0;
  VectorField3 m0;
  std::function<VectorField3(double t)> control;

  /// Samples the control on t_k = k T / nt, k = 0..nt.
  Trajectory sample_control(std::size_t nt) const;
};

/// m0 = e3, u = 0.
Scenario stationary_scenario(const Grid& grid, double horizon);

/// Uniform m0 = (sin theta0, 0, cos theta0) under the uniform field u = h e3.
Scenario macrospin_scenario(const Grid& grid, double horizon, double theta0, double h);

/// Exact macrospin state: tan(theta/2) = tan(theta0/2) exp(-h t), azimuth -h t.
Vec3 macrospin_exact(double theta0, double h, double t);

/// theta = 0.3 s cos(pi x / lx), phi = 0.2 s cos(pi y / ly); u = s * control_amp *
/// (cos(pi y / ly), 0, cos(pi x / lx)) cos(pi t / T).
Scenario perturbed_scenario(const Grid& grid, double horizon, double scale, double control_amp = 0.0);

/// Synthetic tracking problem: m_d = G(u_dagger), m_omega = m_d(T), starting from the
/// unit-scale perturbed m0.
struct InverseCrime {
  OcpSpec spec;
  Trajectory u_dagger;
};

/// u_dagger is a random smooth trajectory drawn from `seed`, rescaled so that
/// ||u_dagger||_{L2(Omega_T)} = amplitude; e_mf = budget_factor * amplitude^2.
InverseCrime inverse_crime_problem(const Grid& grid, double horizon, const SolverConfig& cfg, std::uint64_t seed,
                                   double amplitude = 1.0, double budget_factor = 10.0);

/// m_d = G(0) and m_omega = m_d(T): u = 0 is an exact minimizer.
OcpSpec attainable_problem(const VectorField3& m0, double horizon, const SolverConfig& cfg, double e_mf = 1.0);

}  // namespace llg
