#pragma once

#include <array>
#include <span>
#include <vector>

#include "llg/fields.hpp"
#include "llg/grid.hpp"

namespace llg {

/// Coefficients c(j,k) of f = sum c(j,k) cos(j pi x / lx) cos(k pi y / ly), indexed like nodes.
///
/// The basis is the Neumann eigenbasis of -Laplace + I on the rectangle (up to
/// normalization). With the node quadrature of l2_inner, Parseval reads
///   integral f^2 = lx ly sum_jk w_j w_k c(j,k)^2,  w_0 = 1, w_{j>0} = 1/2.
class SpectralField {
 public:
  SpectralField() = default;
  explicit SpectralField(const Grid& grid);
  SpectralField(const Grid& grid, std::vector<double> coeffs);

  const Grid& grid() const { return grid_; }
  std::span<double> coeffs() { return coeffs_; }
  std::span<const double> coeffs() const { return coeffs_; }
  double& operator()(std::size_t j, std::size_t k) { return coeffs_[grid_.index(j, k)]; }
  double operator()(std::size_t j, std::size_t k) const { return coeffs_[grid_.index(j, k)]; }

  /// Parseval-weighted coefficient norm squared; equals the nodal L2 norm squared.
  double weighted_norm_sq() const;

 private:
  Grid grid_;
  std::vector<double> coeffs_;
};

SpectralField to_spectral(const ScalarField& f);
SpectralField to_spectral(std::span<const double> nodal, const Grid& grid);
ScalarField to_nodal(const SpectralField& c);

/// Evaluates the cosine series at an arbitrary point of the rectangle (direct summation).
double evaluate_series(const SpectralField& c, double x, double y);

/// Componentwise spectral Laplacian, -lambda(j,k) in coefficient space.
VectorField3 laplacian(const VectorField3& f);
ScalarField laplacian(const ScalarField& f);

/// Exact derivatives of the cosine series (d/dx, d/dy) evaluated at the nodes.
struct Gradient {
  VectorField3 dx;
  VectorField3 dy;
};
Gradient gradient(const VectorField3& f);

/// sum over components of (d_x f)^2 + (d_y f)^2.
ScalarField gradient_sq(const VectorField3& f);

/// Pointwise grad a : grad b = sum_c d_x a_c d_x b_c + d_y a_c d_y b_c.
ScalarField gradient_contract(const Gradient& a, const Gradient& b);

/// d_x px + d_y py for a flux whose normal component vanishes on the boundary
/// (px a sine series in x, py a sine series in y). Negative adjoint of `gradient`
/// under the node inner product.
ScalarField divergence(const ScalarField& px, const ScalarField& py);

/// Solves (I - Laplace) w = f with homogeneous Neumann data: division by rho(j,k).
VectorField3 helmholtz_inverse(const VectorField3& f);

/// Solves (I - dt Laplace) w = f.
VectorField3 implicit_heat_solve(const VectorField3& f, double dt);

/// Zeroes modes with j > 2(nx-1)/3 or k > 2(ny-1)/3.
VectorField3 dealias_two_thirds(const VectorField3& f);

/// Node-quadrature L2(Omega) inner product with weight lx*ly/(nx*ny).
double l2_inner(const VectorField3& f, const VectorField3& g);
double l2_inner(const ScalarField& f, const ScalarField& g);
double l2_norm_sq(const VectorField3& f);

/// Everything a nonlinear right-hand side needs from one field: Laplacian and gradient.
struct Derivatives {
  VectorField3 lap;
  Gradient grad;
};
Derivatives derivatives(const VectorField3& f);

}  // namespace llg
