#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "llg/control.hpp"
#include "llg/fields.hpp"
#include "llg/scenario.hpp"
#include "llg/state.hpp"

namespace llg {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  /// Values at successive resolutions (coarse to fine) when the check is a refinement study.
  std::vector<double> series;
  /// Observed convergence order; only set when the series has at least three points.
  std::optional<double> order;
  std::string note;
};

/// Smallest pairwise order log2(e_i / e_{i+1}) of a halving ladder; empty below three points.
std::optional<double> observed_order(const std::vector<double>& series);

// Independent oracles

/// Random cosine polynomial with modes j, k <= max_mode; the coefficients depend on the
/// seed only, so the same continuous field can be sampled on different grids.
VectorField3 band_limited_field(const Grid& grid, std::uint64_t seed, std::size_t max_mode = 4);

/// Five-point Laplacian with mirror ghost nodes (the Neumann closure of a cell-centred grid).
VectorField3 fd_laplacian(const VectorField3& f);

/// Central-difference |grad f|^2 with the same ghost closure.
ScalarField fd_gradient_sq(const VectorField3& f);

/// Classical RK4 for the uniform-field ODE m' = m x h - m x (m x h).
Vec3 macrospin_rk4(const Vec3& m0, const Vec3& h, double horizon, std::size_t steps);

// Checks

/// Max-over-time sphere defect of a trajectory; passes when it is at most `tolerance`.
CheckResult check_sphere_constraint(const Trajectory& traj, double tolerance);

/// Sphere-defect ratio between runs with nt and 2 nt steps; passes inside [1.6, 2.4].
CheckResult check_sphere_drift(const Scenario& scenario, const SolverConfig& cfg);

/// Max-over-frames relative error of the macrospin run against the closed form.
CheckResult check_macrospin(double theta0, double h, double horizon, const SolverConfig& cfg, double tolerance = 1e-3);

/// Energy monitor series on the frame grid (trapezoidal time integrals).
///   E1: ||grad m(t)||^2 + int_0^t ||m x Laplace m||^2  vs  4 (||grad m0||^2 + int_0^t ||u||^2)
///   E2: ||grad m(t)||^2 + 1/2 int_0^t ||Laplace m||^2  vs  the same bound
struct EnergySeries {
  std::vector<double> t;
  std::vector<double> e1_lhs;
  std::vector<double> e1_rhs;
  std::vector<double> e2_lhs;
  std::vector<double> e2_rhs;
};

EnergySeries energy_series(const std::vector<FrameDiagnostics>& diag, const Trajectory& u);

CheckResult check_energy_e1(const Trajectory& m, const Trajectory& u, double slack = 1e-2);
CheckResult check_energy_e2(const Trajectory& m, const Trajectory& u, double slack = 1e-2);

/// L-infinity residual of Laplace|m|^2 = 2 m . Laplace m + 2 |grad m|^2, relative to the
/// size of the terms.
CheckResult check_vpi_identity(const VectorField3& m, double tolerance = 1e-8);

/// Central differences of the reduced cost against the adjoint directional derivative:
/// relative mismatch |(J(u+eh) - J(u-eh))/(2e) - dJ(u)h| / |dJ(u)h| for each e.
/// measured is the smallest mismatch over eps_list (the plateau).
CheckResult taylor_test_gradient(const OcpSpec& spec, const Trajectory& u, const Trajectory& h,
                                 const std::vector<double>& eps_list, const SolverConfig& cfg,
                                 double tolerance = 1e-2);

/// Taylor test on `pairs` random (u, h) pairs of an inverse-crime problem at nt and 2 nt.
/// Passes when every baseline mismatch is at most `tolerance` and every refined/baseline
/// ratio is at most 0.7.
CheckResult check_gradient_refinement(const Grid& grid, double horizon, const SolverConfig& cfg, std::uint64_t seed,
                                      std::size_t pairs = 3, double tolerance = 1e-2);

/// (g_H1, h)_{H1(Omega_T)} against the assembled directional derivative on random data.
CheckResult check_gradient_identity(const Grid& grid, double horizon, std::size_t nt, std::uint64_t seed,
                                    double tolerance = 1e-10);

/// Attainable target: the adjoint must vanish identically.
CheckResult check_zero_adjoint(const VectorField3& m0, double horizon, const SolverConfig& cfg);

/// max_k ||m_NLP(t_k) - m_EP(t_k)||_{L2} over an nt ladder (NLP steps must satisfy the cap).
/// Passes with observed order >= 0.9, or when every difference is below 1e-14.
CheckResult cross_check_formulations(const Scenario& scenario, const std::vector<std::size_t>& nts,
                                     const SolverConfig& cfg);

/// Bisection over the perturbed-scenario scale factor in [lo, hi] for the largest scale
/// at which a run stays finite and (E1), (E2) hold at every frame.
CheckResult empirical_smallness_budget(const Grid& grid, double horizon, const SolverConfig& cfg,
                                       double control_amp, double lo = 1.0, double hi = 50.0,
                                       std::size_t iterations = 8);

/// Settings shared by the suite runner.
struct VerifyOptions {
  Grid grid{1.0, 1.0, 32, 32};
  double horizon = 1.0;
  SolverConfig solver;
  std::uint64_t seed = 1;
  /// Scale of the perturbed scenario used by the energy suite.
  double energy_scale = 1.0;
  double control_amp = 0.5;
  OptimizerOptions optimizer;
  /// grad_tol of the optimality suite, relative to the initial gradient norm.
  double relative_grad_tol = 1e-4;
  std::size_t vi_probes = 100;
};

/// transforms, sphere, equivalence, energy, gradient, optimality, all.
const std::vector<std::string>& suite_names();

/// Throws ConfigError("verify.suite") for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& suite, const VerifyOptions& opts);

// Individual suites
std::vector<CheckResult> transforms_suite(const VerifyOptions& opts);
std::vector<CheckResult> sphere_suite(const VerifyOptions& opts);
std::vector<CheckResult> equivalence_suite(const VerifyOptions& opts);
std::vector<CheckResult> energy_suite(const VerifyOptions& opts);
std::vector<CheckResult> gradient_suite(const VerifyOptions& opts);
std::vector<CheckResult> optimality_suite(const VerifyOptions& opts);

/// "PASS name measured=... tol=... [order=...] [note]"
std::string format_result_line(const CheckResult& r);

/// CSV with header name,passed,measured,tolerance,order,series,note.
void write_results_csv(std::ostream& out, const std::vector<CheckResult>& results);

}  // namespace llg
