#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "llg/grid.hpp"

namespace llg {

using Vec3 = std::array<double, 3>;

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Real nodal scalar field on a grid.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& grid, double value = 0.0);
  ScalarField(const Grid& grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Three-component nodal field, stored component-major: three nx*ny planes.
class VectorField3 {
 public:
  VectorField3() = default;
  explicit VectorField3(const Grid& grid);
  VectorField3(const Grid& grid, std::vector<double> data);

  static VectorField3 uniform(const Grid& grid, const Vec3& value);

  const Grid& grid() const { return grid_; }
  std::size_t nodes() const { return grid_.nodes(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> component(std::size_t c) { return {data_.data() + c * nodes(), nodes()}; }
  std::span<const double> component(std::size_t c) const { return {data_.data() + c * nodes(), nodes()}; }

  Vec3 at(std::size_t node) const {
    const std::size_t n = nodes();
    return {data_[node], data_[n + node], data_[2 * n + node]};
  }
  void set(std::size_t node, const Vec3& v) {
    const std::size_t n = nodes();
    data_[node] = v[0];
    data_[n + node] = v[1];
    data_[2 * n + node] = v[2];
  }

  VectorField3& operator+=(const VectorField3& other);
  VectorField3& operator-=(const VectorField3& other);
  VectorField3& operator*=(double s);
  /// this += a * x
  VectorField3& axpy(double a, const VectorField3& x);

  bool all_finite() const;
  double max_abs() const;

  bool operator==(const VectorField3&) const = default;

 private:
  Grid grid_;
  std::vector<double> data_;
};

VectorField3 operator+(VectorField3 a, const VectorField3& b);
VectorField3 operator-(VectorField3 a, const VectorField3& b);
VectorField3 operator*(double s, VectorField3 a);

/// Throws ShapeError unless both fields live on the same grid.
void require_conforming(const Grid& a, const Grid& b, std::string_view where);

/// Frames m(t_0), ..., m(t_nt) on the uniform time grid t_k = k T / nt.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(double horizon, std::vector<VectorField3> frames);

  static Trajectory constant(const VectorField3& frame, double horizon, std::size_t steps);
  static Trajectory zeros(const Grid& grid, double horizon, std::size_t steps);

  std::size_t steps() const { return frames_.empty() ? 0 : frames_.size() - 1; }
  std::size_t size() const { return frames_.size(); }
  double horizon() const { return horizon_; }
  double dt() const { return horizon_ / static_cast<double>(steps()); }
  double time(std::size_t k) const { return horizon_ * static_cast<double>(k) / static_cast<double>(steps()); }
  const Grid& grid() const { return frames_.front().grid(); }

  VectorField3& operator[](std::size_t k) { return frames_[k]; }
  const VectorField3& operator[](std::size_t k) const { return frames_[k]; }
  const VectorField3& back() const { return frames_.back(); }
  std::vector<VectorField3>& frames() { return frames_; }
  const std::vector<VectorField3>& frames() const { return frames_; }

  Trajectory& operator+=(const Trajectory& other);
  Trajectory& operator*=(double s);
  Trajectory& axpy(double a, const Trajectory& x);

  bool operator==(const Trajectory&) const = default;

 private:
  double horizon_ = 0.0;
  std::vector<VectorField3> frames_;
};

/// Throws ShapeError unless the trajectories share grid, horizon and step count.
void require_conforming(const Trajectory& a, const Trajectory& b, std::string_view where);

/// Trapezoidal weight of frame k in a time integral over [0,T].
double trapezoid_weight(std::size_t k, std::size_t steps, double dt);

// Pointwise algebra

VectorField3 cross(const VectorField3& a, const VectorField3& b);
ScalarField dot(const VectorField3& a, const VectorField3& b);
/// Pointwise s(x) * a(x).
VectorField3 scale(const ScalarField& s, const VectorField3& a);

/// E_eff(m) = Laplace m + u.
VectorField3 effective_field(const VectorField3& m, const VectorField3& u);

/// max over nodes of | |m(x)|^2 - 1 |.
double sphere_defect(const VectorField3& m);

/// Pointwise m / |m|; throws DegenerateFieldError at a zero node.
VectorField3 renormalize(const VectorField3& m);

}  // namespace llg
