#include "llg/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "llg/errors.hpp"

namespace llg {

Grid::Grid(double lx_, double ly_, std::size_t nx_, std::size_t ny_) : lx(lx_), ly(ly_), nx(nx_), ny(ny_) {
  if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
    throw ShapeError("grid lengths must be positive and finite");
  }
  if (nx < 4 || ny < 4) {
    throw ShapeError("grid needs at least 4 nodes per direction, got " + std::to_string(nx) + "x" +
                     std::to_string(ny));
  }
}

double Grid::h_min() const { return std::min(hx(), hy()); }

double mode_lambda(const Grid& grid, std::size_t j, std::size_t k) {
  const double kx = static_cast<double>(j) * std::numbers::pi / grid.lx;
  const double ky = static_cast<double>(k) * std::numbers::pi / grid.ly;
  return kx * kx + ky * ky;
}

double Grid::lambda_max() const { return mode_lambda(*this, nx - 1, ny - 1); }

EigenData eigen_data(const Grid& grid) {
  EigenData out;
  out.lambda.resize(grid.nodes());
  out.rho.resize(grid.nodes());
  for (std::size_t j = 0; j < grid.nx; ++j) {
    for (std::size_t k = 0; k < grid.ny; ++k) {
      const double lam = mode_lambda(grid, j, k);
      out.lambda[grid.index(j, k)] = lam;
      out.rho[grid.index(j, k)] = lam + 1.0;
    }
  }
  return out;
}

}  // namespace llg
