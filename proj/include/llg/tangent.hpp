#pragma once

#include <optional>

#include "llg/fields.hpp"
#include "llg/spectral.hpp"
#include "llg/state.hpp"

namespace llg {

/// Linearization of the EP right-hand side at (m, u) applied to v, plus the source g:
///   Laplace v + 2 m (grad m : grad v) + |grad m|^2 v + v x Laplace m + m x Laplace v
///   + v x u - v x (m x u) - m x (v x u) + g
VectorField3 tangent_rhs(const VectorField3& v, const VectorField3& m, const VectorField3& u, const VectorField3& g);

/// Same operator without the Laplace v term, from precomputed derivatives.
VectorField3 tangent_explicit(const VectorField3& v, const Derivatives& dv, const VectorField3& m,
                              const Derivatives& dm, const VectorField3& u);

/// Source of the control-derivative system: m x h - m x (m x h).
VectorField3 control_derivative_source(const VectorField3& m, const VectorField3& h);

enum class TangentMode {
  General,           ///< v_t - ... = g, v(0) = v0
  ControlDirection,  ///< z = DG(u) h, z(0) = 0
};

/// Arguments of solve_tangent. Holds references; the trajectories must outlive it.
struct TangentInput {
  const Trajectory& base_m;
  const Trajectory& base_u;
  /// g for General, h for ControlDirection.
  const Trajectory& data;
  TangentMode mode;
  std::optional<VectorField3> v0;

  static TangentInput general(const Trajectory& m, const Trajectory& u, const Trajectory& g,
                              std::optional<VectorField3> v0 = std::nullopt) {
    return {m, u, g, TangentMode::General, std::move(v0)};
  }
  static TangentInput control(const Trajectory& m, const Trajectory& u, const Trajectory& h) {
    return {m, u, h, TangentMode::ControlDirection, std::nullopt};
  }
};

/// Forward IMEX-Euler sweep with the same step structure as the EP state solver
/// (implicit Laplacian, base-state terms from frame k). The result is the exact
/// derivative of the discrete state map when renormalization is off.
Trajectory solve_tangent(const TangentInput& inp, const SolverConfig& cfg);

}  // namespace llg
