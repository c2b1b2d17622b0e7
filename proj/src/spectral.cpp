#include "llg/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "llg/errors.hpp"
#include "spectral_engine.hpp"

namespace llg {

using detail::engine_for;
using detail::Parity;

namespace {

double wavenumber(std::size_t j, double length) { return static_cast<double>(j) * std::numbers::pi / length; }

// Cosine coefficients -> sine-in-x coefficients of d/dx.
void cos_to_dx(const Grid& g, std::span<const double> c, std::span<double> out) {
  for (std::size_t p = 0; p < g.nx; ++p) {
    const std::size_t j = p + 1;
    for (std::size_t k = 0; k < g.ny; ++k) {
      out[g.index(p, k)] = j < g.nx ? -wavenumber(j, g.lx) * c[g.index(j, k)] : 0.0;
    }
  }
}

void cos_to_dy(const Grid& g, std::span<const double> c, std::span<double> out) {
  for (std::size_t j = 0; j < g.nx; ++j) {
    for (std::size_t p = 0; p < g.ny; ++p) {
      const std::size_t k = p + 1;
      out[g.index(j, p)] = k < g.ny ? -wavenumber(k, g.ly) * c[g.index(j, k)] : 0.0;
    }
  }
}

// Sine-in-x coefficients -> cosine coefficients of d/dx. The top sine mode vanishes
// at every node after differentiation and is dropped.
void dx_sin_to_cos(const Grid& g, std::span<const double> s, std::span<double> out) {
  for (std::size_t j = 0; j < g.nx; ++j) {
    for (std::size_t k = 0; k < g.ny; ++k) {
      out[g.index(j, k)] = j == 0 ? 0.0 : wavenumber(j, g.lx) * s[g.index(j - 1, k)];
    }
  }
}

void dy_sin_to_cos(const Grid& g, std::span<const double> s, std::span<double> out) {
  for (std::size_t j = 0; j < g.nx; ++j) {
    for (std::size_t k = 0; k < g.ny; ++k) {
      out[g.index(j, k)] = k == 0 ? 0.0 : wavenumber(k, g.ly) * s[g.index(j, k - 1)];
    }
  }
}

template <typename Multiplier>
VectorField3 diagonal_operator(const VectorField3& f, Multiplier mult) {
  const Grid& g = f.grid();
  auto& engine = engine_for(g);
  VectorField3 out(g);
  std::vector<double> coeffs(g.nodes());
  for (std::size_t c = 0; c < 3; ++c) {
    engine.analyze(Parity::Cos, Parity::Cos, f.component(c), coeffs);
    for (std::size_t j = 0; j < g.nx; ++j) {
      for (std::size_t k = 0; k < g.ny; ++k) coeffs[g.index(j, k)] *= mult(j, k);
    }
    engine.synthesize(Parity::Cos, Parity::Cos, coeffs, out.component(c));
  }
  return out;
}

void check_size(std::size_t got, const Grid& g, const char* where) {
  if (got != g.nodes()) {
    throw ShapeError(std::string(where) + ": " + std::to_string(got) + " values for " + std::to_string(g.nodes()) +
                     " nodes");
  }
}

}  // namespace

SpectralField::SpectralField(const Grid& grid) : grid_(grid), coeffs_(grid.nodes(), 0.0) {}

SpectralField::SpectralField(const Grid& grid, std::vector<double> coeffs) : grid_(grid), coeffs_(std::move(coeffs)) {
  check_size(coeffs_.size(), grid_, "SpectralField");
}

double SpectralField::weighted_norm_sq() const {
  double sum = 0.0;
  for (std::size_t j = 0; j < grid_.nx; ++j) {
    const double wj = j == 0 ? 1.0 : 0.5;
    for (std::size_t k = 0; k < grid_.ny; ++k) {
      const double wk = k == 0 ? 1.0 : 0.5;
      const double c = coeffs_[grid_.index(j, k)];
      sum += wj * wk * c * c;
    }
  }
  return sum * grid_.area();
}

SpectralField to_spectral(std::span<const double> nodal, const Grid& grid) {
  check_size(nodal.size(), grid, "to_spectral");
  SpectralField out(grid);
  engine_for(grid).analyze(Parity::Cos, Parity::Cos, nodal, out.coeffs());
  return out;
}

SpectralField to_spectral(const ScalarField& f) { return to_spectral(f.values(), f.grid()); }

ScalarField to_nodal(const SpectralField& c) {
  ScalarField out(c.grid());
  engine_for(c.grid()).synthesize(Parity::Cos, Parity::Cos, c.coeffs(), out.values());
  return out;
}

double evaluate_series(const SpectralField& c, double x, double y) {
  const Grid& g = c.grid();
  std::vector<double> cy(g.ny);
  for (std::size_t k = 0; k < g.ny; ++k) cy[k] = std::cos(wavenumber(k, g.ly) * y);
  double sum = 0.0;
  for (std::size_t j = 0; j < g.nx; ++j) {
    const double cx = std::cos(wavenumber(j, g.lx) * x);
    for (std::size_t k = 0; k < g.ny; ++k) sum += c(j, k) * cx * cy[k];
  }
  return sum;
}

VectorField3 laplacian(const VectorField3& f) {
  const Grid& g = f.grid();
  return diagonal_operator(f, [&g](std::size_t j, std::size_t k) { return -mode_lambda(g, j, k); });
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  SpectralField c = to_spectral(f);
  for (std::size_t j = 0; j < g.nx; ++j) {
    for (std::size_t k = 0; k < g.ny; ++k) c(j, k) *= -mode_lambda(g, j, k);
  }
  return to_nodal(c);
}

VectorField3 helmholtz_inverse(const VectorField3& f) {
  const Grid& g = f.grid();
  return diagonal_operator(f, [&g](std::size_t j, std::size_t k) { return 1.0 / (1.0 + mode_lambda(g, j, k)); });
}

VectorField3 implicit_heat_solve(const VectorField3& f, double dt) {
  const Grid& g = f.grid();
  return diagonal_operator(f, [&g, dt](std::size_t j, std::size_t k) { return 1.0 / (1.0 + dt * mode_lambda(g, j, k)); });
}

VectorField3 dealias_two_thirds(const VectorField3& f) {
  const Grid& g = f.grid();
  const std::size_t jmax = 2 * (g.nx - 1) / 3;
  const std::size_t kmax = 2 * (g.ny - 1) / 3;
  return diagonal_operator(f, [=](std::size_t j, std::size_t k) { return (j > jmax || k > kmax) ? 0.0 : 1.0; });
}

Derivatives derivatives(const VectorField3& f) {
  const Grid& g = f.grid();
  auto& engine = engine_for(g);
  Derivatives out{VectorField3(g), {VectorField3(g), VectorField3(g)}};
  std::vector<double> coeffs(g.nodes());
  std::vector<double> work(g.nodes());
  for (std::size_t c = 0; c < 3; ++c) {
    engine.analyze(Parity::Cos, Parity::Cos, f.component(c), coeffs);
    cos_to_dx(g, coeffs, work);
    engine.synthesize(Parity::Sin, Parity::Cos, work, out.grad.dx.component(c));
    cos_to_dy(g, coeffs, work);
    engine.synthesize(Parity::Cos, Parity::Sin, work, out.grad.dy.component(c));
    for (std::size_t j = 0; j < g.nx; ++j) {
      for (std::size_t k = 0; k < g.ny; ++k) work[g.index(j, k)] = -mode_lambda(g, j, k) * coeffs[g.index(j, k)];
    }
    engine.synthesize(Parity::Cos, Parity::Cos, work, out.lap.component(c));
  }
  return out;
}

Gradient gradient(const VectorField3& f) {
  const Grid& g = f.grid();
  auto& engine = engine_for(g);
  Gradient out{VectorField3(g), VectorField3(g)};
  std::vector<double> coeffs(g.nodes());
  std::vector<double> work(g.nodes());
  for (std::size_t c = 0; c < 3; ++c) {
    engine.analyze(Parity::Cos, Parity::Cos, f.component(c), coeffs);
    cos_to_dx(g, coeffs, work);
    engine.synthesize(Parity::Sin, Parity::Cos, work, out.dx.component(c));
    cos_to_dy(g, coeffs, work);
    engine.synthesize(Parity::Cos, Parity::Sin, work, out.dy.component(c));
  }
  return out;
}

ScalarField gradient_contract(const Gradient& a, const Gradient& b) {
  require_conforming(a.dx.grid(), b.dx.grid(), "gradient_contract");
  ScalarField out = dot(a.dx, b.dx);
  const ScalarField yy = dot(a.dy, b.dy);
  for (std::size_t i = 0; i < out.values().size(); ++i) out[i] += yy[i];
  return out;
}

ScalarField gradient_sq(const VectorField3& f) {
  const Gradient g = gradient(f);
  return gradient_contract(g, g);
}

ScalarField divergence(const ScalarField& px, const ScalarField& py) {
  require_conforming(px.grid(), py.grid(), "divergence");
  const Grid& g = px.grid();
  auto& engine = engine_for(g);
  std::vector<double> s(g.nodes());
  std::vector<double> c(g.nodes());
  std::vector<double> total(g.nodes(), 0.0);

  engine.analyze(Parity::Sin, Parity::Cos, px.values(), s);
  dx_sin_to_cos(g, s, c);
  for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];

  engine.analyze(Parity::Cos, Parity::Sin, py.values(), s);
  dy_sin_to_cos(g, s, c);
  for (std::size_t i = 0; i < c.size(); ++i) total[i] += c[i];

  ScalarField out(g);
  engine.synthesize(Parity::Cos, Parity::Cos, total, out.values());
  return out;
}

double l2_inner(const VectorField3& f, const VectorField3& g) {
  require_conforming(f.grid(), g.grid(), "l2_inner");
  const auto a = f.data();
  const auto b = g.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * f.grid().cell_area();
}

double l2_inner(const ScalarField& f, const ScalarField& g) {
  require_conforming(f.grid(), g.grid(), "l2_inner");
  double sum = 0.0;
  for (std::size_t i = 0; i < f.values().size(); ++i) sum += f[i] * g[i];
  return sum * f.grid().cell_area();
}

double l2_norm_sq(const VectorField3& f) { return l2_inner(f, f); }

}  // namespace llg
