#include "llg/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "llg/errors.hpp"
#include "llg/spectral.hpp"

namespace llg {

ScalarField::ScalarField(const Grid& grid, double value) : grid_(grid), values_(grid.nodes(), value) {}

ScalarField::ScalarField(const Grid& grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodes()) {
    throw ShapeError("scalar field has " + std::to_string(values_.size()) + " values, grid has " +
                     std::to_string(grid_.nodes()) + " nodes");
  }
}

VectorField3::VectorField3(const Grid& grid) : grid_(grid), data_(3 * grid.nodes(), 0.0) {}

VectorField3::VectorField3(const Grid& grid, std::vector<double> data) : grid_(grid), data_(std::move(data)) {
  if (data_.size() != 3 * grid_.nodes()) {
    throw ShapeError("vector field has " + std::to_string(data_.size()) + " values, expected 3x" +
                     std::to_string(grid_.nodes()));
  }
}

VectorField3 VectorField3::uniform(const Grid& grid, const Vec3& value) {
  VectorField3 f(grid);
  for (std::size_t c = 0; c < 3; ++c) {
    std::ranges::fill(f.component(c), value[c]);
  }
  return f;
}

void require_conforming(const Grid& a, const Grid& b, std::string_view where) {
  if (!(a == b)) {
    throw ShapeError(std::string(where) + ": grids do not conform (" + std::to_string(a.nx) + "x" +
                     std::to_string(a.ny) + " vs " + std::to_string(b.nx) + "x" + std::to_string(b.ny) + ")");
  }
}

VectorField3& VectorField3::operator+=(const VectorField3& other) {
  require_conforming(grid_, other.grid_, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

VectorField3& VectorField3::operator-=(const VectorField3& other) {
  require_conforming(grid_, other.grid_, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

VectorField3& VectorField3::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

VectorField3& VectorField3::axpy(double a, const VectorField3& x) {
  require_conforming(grid_, x.grid_, "axpy");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += a * x.data_[i];
  return *this;
}

bool VectorField3::all_finite() const {
  return std::ranges::all_of(data_, [](double v) { return std::isfinite(v); });
}

double VectorField3::max_abs() const {
  double out = 0.0;
  for (double v : data_) out = std::max(out, std::abs(v));
  return out;
}

VectorField3 operator+(VectorField3 a, const VectorField3& b) { return a += b; }
VectorField3 operator-(VectorField3 a, const VectorField3& b) { return a -= b; }
VectorField3 operator*(double s, VectorField3 a) { return a *= s; }

Trajectory::Trajectory(double horizon, std::vector<VectorField3> frames)
    : horizon_(horizon), frames_(std::move(frames)) {
  if (frames_.size() < 2) {
    throw ShapeError("trajectory needs at least two frames");
  }
  if (!(horizon_ > 0.0)) {
    throw ShapeError("trajectory horizon must be positive");
  }
  for (const auto& f : frames_) {
    require_conforming(frames_.front().grid(), f.grid(), "Trajectory");
  }
}

Trajectory Trajectory::constant(const VectorField3& frame, double horizon, std::size_t steps) {
  return Trajectory(horizon, std::vector<VectorField3>(steps + 1, frame));
}

Trajectory Trajectory::zeros(const Grid& grid, double horizon, std::size_t steps) {
  return constant(VectorField3(grid), horizon, steps);
}

void require_conforming(const Trajectory& a, const Trajectory& b, std::string_view where) {
  if (a.steps() != b.steps()) {
    throw ShapeError(std::string(where) + ": trajectories have " + std::to_string(a.steps()) + " and " +
                     std::to_string(b.steps()) + " steps");
  }
  if (std::abs(a.horizon() - b.horizon()) > 1e-12 * std::max(a.horizon(), b.horizon())) {
    throw ShapeError(std::string(where) + ": trajectory horizons differ");
  }
  require_conforming(a.grid(), b.grid(), where);
}

Trajectory& Trajectory::operator+=(const Trajectory& other) {
  require_conforming(*this, other, "Trajectory::operator+=");
  for (std::size_t k = 0; k < frames_.size(); ++k) frames_[k] += other.frames_[k];
  return *this;
}

Trajectory& Trajectory::operator*=(double s) {
  for (auto& f : frames_) f *= s;
  return *this;
}

Trajectory& Trajectory::axpy(double a, const Trajectory& x) {
  require_conforming(*this, x, "Trajectory::axpy");
  for (std::size_t k = 0; k < frames_.size(); ++k) frames_[k].axpy(a, x.frames_[k]);
  return *this;
}

double trapezoid_weight(std::size_t k, std::size_t steps, double dt) {
  return (k == 0 || k == steps) ? 0.5 * dt : dt;
}

VectorField3 cross(const VectorField3& a, const VectorField3& b) {
  require_conforming(a.grid(), b.grid(), "cross");
  VectorField3 out(a.grid());
  const std::size_t n = a.nodes();
  const auto ad = a.data();
  const auto bd = b.data();
  auto od = out.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double a0 = ad[i], a1 = ad[n + i], a2 = ad[2 * n + i];
    const double b0 = bd[i], b1 = bd[n + i], b2 = bd[2 * n + i];
    od[i] = a1 * b2 - a2 * b1;
    od[n + i] = a2 * b0 - a0 * b2;
    od[2 * n + i] = a0 * b1 - a1 * b0;
  }
  return out;
}

ScalarField dot(const VectorField3& a, const VectorField3& b) {
  require_conforming(a.grid(), b.grid(), "dot");
  ScalarField out(a.grid());
  const std::size_t n = a.nodes();
  const auto ad = a.data();
  const auto bd = b.data();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = ad[i] * bd[i] + ad[n + i] * bd[n + i] + ad[2 * n + i] * bd[2 * n + i];
  }
  return out;
}

VectorField3 scale(const ScalarField& s, const VectorField3& a) {
  require_conforming(s.grid(), a.grid(), "scale");
  VectorField3 out = a;
  for (std::size_t c = 0; c < 3; ++c) {
    auto comp = out.component(c);
    for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= s[i];
  }
  return out;
}

VectorField3 effective_field(const VectorField3& m, const VectorField3& u) {
  require_conforming(m.grid(), u.grid(), "effective_field");
  return laplacian(m) += u;
}

double sphere_defect(const VectorField3& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 v = m.at(i);
    worst = std::max(worst, std::abs(dot(v, v) - 1.0));
  }
  return worst;
}

VectorField3 renormalize(const VectorField3& m) {
  VectorField3 out(m.grid());
  for (std::size_t i = 0; i < m.nodes(); ++i) {
    const Vec3 v = m.at(i);
    const double norm = std::sqrt(dot(v, v));
    if (!(norm > 0.0)) {
      throw DegenerateFieldError("renormalize: zero-magnitude node " + std::to_string(i));
    }
    out.set(i, {v[0] / norm, v[1] / norm, v[2] / norm});
  }
  return out;
}

}  // namespace llg
