#pragma once

#include <functional>

#include "llg/fields.hpp"
#include "llg/spectral.hpp"
#include "llg/state.hpp"

namespace llg {

/// Bilinear part of the adjoint right-hand side without the Laplace phi term:
///   Laplace(phi x m) + Laplace m x phi + u x phi - 2 div((m . phi) grad m)
///   + |grad m|^2 phi + (phi x m) x u + phi x (m x u)
/// Under the node inner product this is the exact transpose of tangent_explicit.
VectorField3 adjoint_explicit(const VectorField3& phi, const VectorField3& m, const Derivatives& dm,
                              const VectorField3& u);

/// Full right-hand side of -phi_t: Laplace phi + adjoint_explicit + (m - m_d).
VectorField3 adjoint_rhs(const VectorField3& phi, const VectorField3& m, const VectorField3& u,
                         const VectorField3& m_d_frame);

/// phi(T) = m(T) - m_omega.
VectorField3 terminal_condition(const VectorField3& m_T, const VectorField3& m_omega);

/// Arguments of solve_adjoint. Holds references; the data must outlive it.
struct AdjointInput {
  const Trajectory& m_traj;
  const Trajectory& u_traj;
  const Trajectory& m_d;
  const VectorField3& m_omega;
};

/// Called once per frame, from k = nt down to 0, with phi_k and the state frame m_k.
using AdjointVisitor = std::function<void(std::size_t k, const VectorField3& phi, const VectorField3& m)>;

/// Backward IMEX-Euler sweep for the adjoint system:
///   phi_k = (I - dt Laplace)^{-1} [phi_{k+1} + dt (adjoint_explicit(phi_{k+1}; m_k, u_k) + m_k - m_d(t_k))]
/// State frames are pulled from `states`, which may recompute them from checkpoints.
void sweep_adjoint(FrameSource& states, const Trajectory& u, const Trajectory& m_d, const VectorField3& m_omega,
                   const SolverConfig& cfg, const AdjointVisitor& visit);

/// Stores the whole adjoint trajectory.
Trajectory solve_adjoint(const AdjointInput& inp, const SolverConfig& cfg);

}  // namespace llg
