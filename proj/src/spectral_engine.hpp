#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "llg/grid.hpp"

typedef struct fftw_plan_s* fftw_plan;

namespace llg::detail {

/// Basis along one axis: cos(j pi x / l), j = 0..n-1, or sin(j pi x / l), j = 1..n
/// (sine mode j stored at position j-1).
enum class Parity { Cos = 0, Sin = 1 };

/// FFTW-backed separable cosine/sine transforms for one grid size. Coefficients are
/// amplitudes of the plain (unnormalized) trigonometric basis functions.
class TransformEngine {
 public:
  TransformEngine(std::size_t nx, std::size_t ny);
  ~TransformEngine();
  TransformEngine(const TransformEngine&) = delete;
  TransformEngine& operator=(const TransformEngine&) = delete;

  void analyze(Parity px, Parity py, std::span<const double> nodal, std::span<double> coeffs);
  void synthesize(Parity px, Parity py, std::span<const double> coeffs, std::span<double> nodal);

 private:
  fftw_plan plan(bool forward, Parity px, Parity py);

  std::size_t nx_;
  std::size_t ny_;
  double* buffer_;
  std::array<fftw_plan, 8> plans_{};
};

/// Per-thread engine for the grid's node counts.
TransformEngine& engine_for(const Grid& grid);

}  // namespace llg::detail
