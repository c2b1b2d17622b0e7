#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "llg/fields.hpp"
#include "llg/spectral.hpp"

namespace llg {

/// Original form m_t = m x E - m x (m x E), or the semilinear rewrite with an
/// explicit Laplacian, m_t - Laplace m = |grad m|^2 m + m x Laplace m + m x u - m x (m x u).
/// Damping and gyromagnetic factor are both 1.
enum class Formulation { NLP, EP };

struct SolverConfig {
  Formulation formulation = Formulation::EP;
  std::size_t nt = 1024;
  /// Project onto the unit sphere after every `renormalize_every` steps; off when empty.
  std::optional<std::size_t> renormalize_every;
  bool dealias = false;
  /// Above this many bytes of stored state frames the adjoint sweep switches to
  /// checkpoint/recompute. Zero means unlimited.
  std::size_t memory_budget_bytes = 0;

  /// Throws ConfigError on nt == 0 or renormalize_every == 0.
  void validate() const;
};

/// Field magnitudes beyond this are treated as a blown-up solve.
inline constexpr double kBlowupThreshold = 1e6;

/// Per-frame quantities used by the energy monitors.
struct FrameDiagnostics {
  double t = 0.0;
  double sphere_defect = 0.0;
  double grad_l2sq = 0.0;   ///< ||grad m||^2
  double lap_l2sq = 0.0;    ///< ||Laplace m||^2
  double mxlap_l2sq = 0.0;  ///< ||m x Laplace m||^2
};

/// Diagnostics of a single state frame at time t.
FrameDiagnostics diagnose_frame(double t, const VectorField3& m);

struct ForwardSolution {
  Trajectory m;
  std::vector<FrameDiagnostics> diagnostics;
};

/// Full right-hand side F(m,u) of the chosen formulation.
VectorField3 rhs(const VectorField3& m, const VectorField3& u, const SolverConfig& cfg);

/// Everything in the EP right-hand side except the Laplacian, given precomputed derivatives of m.
VectorField3 ep_nonlinear(const VectorField3& m, const Derivatives& dm, const VectorField3& u);

/// One time step from t_k to t_k + dt with the control frame u(t_k).
/// EP: IMEX Euler with implicit Laplacian. NLP: explicit Euler, requires dt * lambda_max <= 1.
VectorField3 step(const VectorField3& m, const VectorField3& u, double dt, const SolverConfig& cfg);

/// Largest explicit-Euler step for the NLP form on this grid.
double nlp_max_dt(const Grid& grid);

/// Called for every frame k = 0..nt of a forward run, in order.
using StateVisitor = std::function<void(std::size_t k, const VectorField3& m, const FrameDiagnostics& diag)>;

/// Integrates from m0 over the time grid of u without storing frames.
void march_forward(const VectorField3& m0, const Trajectory& u, double horizon, const SolverConfig& cfg,
                   const StateVisitor& visit);

/// Integrates from m0 over the time grid of u (cfg.nt must equal u.steps()).
ForwardSolution solve_forward(const VectorField3& m0, const Trajectory& u, double horizon, const SolverConfig& cfg);

/// m0 = (sin t cos p, sin t sin p, cos t) from cosine-series angle fields t = theta, p = phi_ang.
VectorField3 make_initial_data(const SpectralField& theta, const SpectralField& phi_ang);

/// Random access to state frames during a backward sweep.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::size_t steps() const = 0;
  virtual const VectorField3& frame(std::size_t k) = 0;
};

class TrajectoryFrames final : public FrameSource {
 public:
  explicit TrajectoryFrames(const Trajectory& traj) : traj_(traj) {}
  std::size_t steps() const override { return traj_.steps(); }
  const VectorField3& frame(std::size_t k) override { return traj_[k]; }

 private:
  const Trajectory& traj_;
};

/// Two-level checkpointing: keeps every `stride`-th frame of the forward run and
/// recomputes one segment at a time on demand. Recomputed frames are bitwise
/// identical to the stored run.
class CheckpointedState final : public FrameSource {
 public:
  CheckpointedState(const VectorField3& m0, Trajectory u, const SolverConfig& cfg, std::size_t stride);

  std::size_t steps() const override { return u_.steps(); }
  const VectorField3& frame(std::size_t k) override;
  const std::vector<FrameDiagnostics>& diagnostics() const { return diagnostics_; }
  std::size_t stride() const { return stride_; }
  std::size_t recomputed_segments() const { return recomputed_; }

 private:
  void load_segment(std::size_t segment);

  Trajectory u_;
  SolverConfig cfg_;
  std::size_t stride_;
  std::vector<VectorField3> checkpoints_;
  std::vector<FrameDiagnostics> diagnostics_;
  std::size_t loaded_segment_ = static_cast<std::size_t>(-1);
  std::vector<VectorField3> segment_frames_;
  VectorField3 final_frame_;
  std::size_t recomputed_ = 0;
};

/// Zero when the full trajectory fits the budget, otherwise a stride near sqrt(nt).
std::size_t choose_checkpoint_stride(std::size_t steps, const Grid& grid, std::size_t budget_bytes);

}  // namespace llg
