#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "llg/fields.hpp"
#include "llg/state.hpp"

namespace llg {

/// Tracking problem: minimize
///   1/2 ||m - m_d||^2_{L2(Omega_T)} + 1/2 ||m(T) - m_omega||^2 + 1/2 ||u||^2_{L2(Omega_T)} + 1/2 ||grad u||^2
/// over controls with ||u||^2_{L2(Omega_T)} <= e_mf.
struct OcpSpec {
  Grid grid;
  double horizon = 1.0;
  std::size_t nt = 1024;
  VectorField3 m0;
  Trajectory m_d;
  VectorField3 m_omega;
  double e_mf = 1.0;

  void validate() const;
};

struct CostBreakdown {
  double tracking = 0.0;
  double terminal = 0.0;
  double control_l2 = 0.0;
  double control_h1 = 0.0;
  double total = 0.0;
};

/// Trapezoidal time quadrature of all four cost terms.
CostBreakdown evaluate_cost(const Trajectory& m, const Trajectory& u, const OcpSpec& spec);

enum class GradientMetric { L2, H1 };

/// phi x m + m x (phi x m): the state part of the reduced gradient.
VectorField3 state_sensitivity(const VectorField3& phi, const VectorField3& m);

/// Frame-wise gradient representative.
///   H1: g = u + (I - Laplace)^{-1}(phi x m + m x (phi x m))
///   L2: g = u - Laplace u + phi x m + m x (phi x m)
Trajectory reduced_gradient(const Trajectory& u, const Trajectory& phi, const Trajectory& m, GradientMetric metric);

/// int_{Omega_T} u.h + grad u : grad h + (phi x m + m x (phi x m)).h, trapezoidal in time.
double directional_derivative(const Trajectory& u, const Trajectory& phi, const Trajectory& m, const Trajectory& h);

/// Space-time inner products (trapezoidal in time).
double l2_inner_time(const Trajectory& a, const Trajectory& b);
double h1_inner_time(const Trajectory& a, const Trajectory& b);
double metric_inner(const Trajectory& a, const Trajectory& b, GradientMetric metric);

/// ||u||^2_{L2(Omega_T)}, the quantity bounded by the control budget.
double budget_norm_sq(const Trajectory& u);

/// Radial projection onto the L2(Omega_T) ball of squared radius e_mf.
Trajectory project_uad(const Trajectory& u, double e_mf);

struct OptimizerOptions {
  std::size_t max_iter = 50;
  double grad_tol = 1e-5;
  double armijo_c = 1e-4;
  double backtrack_ratio = 0.5;
  double initial_step = 1.0;
  std::size_t max_backtracks = 40;
  GradientMetric metric = GradientMetric::H1;
  /// From the second iteration on, start the line search at the Barzilai-Borwein step
  /// (du, du) / (du, dg) in the gradient metric, clamped to [1e-3, 1e3] * initial_step.
  bool bb_step = true;

  void validate() const;
};

enum class StopReason { GradTol, MaxIter, LineSearchFail, BudgetBoundaryStall };

std::string to_string(StopReason reason);

struct IterationRecord {
  std::size_t iter = 0;
  CostBreakdown cost;
  /// ||P(u - s0 g) - u|| / s0 in L2(Omega_T), s0 = initial_step.
  double grad_norm = 0.0;
  /// Step accepted to reach this iterate (0 for the initial one).
  double step = 0.0;
  /// The projection clips u - s0 g at this iterate.
  bool budget_active = false;
};

struct OptReport {
  std::vector<IterationRecord> iterations;
  StopReason stopping_reason = StopReason::MaxIter;
  /// H1(Omega_T) norm of the gradient at the initial iterate.
  double initial_gradient_norm = 0.0;
};

struct OptResult {
  Trajectory u_star;
  Trajectory m_star;
  Trajectory phi_star;
  OptReport report;
};

/// Cost, state, adjoint and gradient at one control.
struct GradientEvaluation {
  CostBreakdown cost;
  Trajectory m;
  Trajectory phi;
  Trajectory gradient;
};

/// Forward solve, cost, backward adjoint sweep and gradient assembly. Uses
/// checkpointed state storage when the trajectory exceeds cfg.memory_budget_bytes.
GradientEvaluation evaluate_gradient(const OcpSpec& spec, const Trajectory& u, const SolverConfig& cfg,
                                     GradientMetric metric);

/// Reduced cost J(G(u), u) with a streaming forward solve.
CostBreakdown reduced_cost(const OcpSpec& spec, const Trajectory& u, const SolverConfig& cfg);

/// Projected gradient descent with backtracking Armijo line search (monotone).
OptResult optimize(const OcpSpec& spec, const Trajectory& u_init, const OptimizerOptions& opts,
                   const SolverConfig& cfg);

/// Random trajectory built from low cosine modes in space and time; smooth and Neumann-compatible.
Trajectory random_smooth_trajectory(const Grid& grid, double horizon, std::size_t nt, std::mt19937_64& rng,
                                    std::size_t max_mode = 3);

/// Sampled check of the first-order condition
///   int u~.(u - u~) + grad u~ : grad(u - u~) + (phi x m~ + m~ x (phi x m~)).(u - u~) >= 0
/// over random admissible probes u.
struct ViReport {
  std::size_t probes = 0;
  /// Smallest value of the left-hand side divided by scale * ||u - u~||_{H1(Omega_T)}.
  double min_normalized = 0.0;
  double min_raw = 0.0;
  double scale = 1.0;
  double tolerance = 1e-3;
  bool passed = false;
};

ViReport variational_inequality_check(const OcpSpec& spec, const Trajectory& u_tilde, const Trajectory& m_tilde,
                                      const Trajectory& phi, double scale, std::size_t probes, std::uint64_t seed,
                                      double tolerance = 1e-3);

}  // namespace llg
