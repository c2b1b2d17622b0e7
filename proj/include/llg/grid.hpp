#pragma once

#include <cstddef>
#include <vector>

namespace llg {

/// Rectangle [0,lx] x [0,ly] sampled at the cell-centred cosine-transform
/// nodes x_i = lx (i + 1/2) / nx, y_j = ly (j + 1/2) / ny.
struct Grid {
  double lx = 1.0;
  double ly = 1.0;
  std::size_t nx = 32;
  std::size_t ny = 32;

  Grid() = default;
  Grid(double lx_, double ly_, std::size_t nx_, std::size_t ny_);

  std::size_t nodes() const { return nx * ny; }
  /// Flat node index; x is the slow (row) index.
  std::size_t index(std::size_t ix, std::size_t iy) const { return ix * ny + iy; }
  double x(std::size_t ix) const { return lx * (static_cast<double>(ix) + 0.5) / static_cast<double>(nx); }
  double y(std::size_t iy) const { return ly * (static_cast<double>(iy) + 0.5) / static_cast<double>(ny); }
  double hx() const { return lx / static_cast<double>(nx); }
  double hy() const { return ly / static_cast<double>(ny); }
  double h_min() const;
  double area() const { return lx * ly; }
  /// Uniform midpoint quadrature weight lx*ly/(nx*ny).
  double cell_area() const { return area() / static_cast<double>(nodes()); }
  /// Largest eigenvalue of -Laplace resolved on this grid.
  double lambda_max() const;

  bool operator==(const Grid&) const = default;
};

/// Neumann eigenvalues of -Laplace (lambda) and -Laplace + I (rho), indexed like nodes.
struct EigenData {
  std::vector<double> lambda;
  std::vector<double> rho;
};

EigenData eigen_data(const Grid& grid);

double mode_lambda(const Grid& grid, std::size_t j, std::size_t k);

}  // namespace llg
