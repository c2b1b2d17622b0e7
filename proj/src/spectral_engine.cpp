#include "spectral_engine.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace llg::detail {
namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_r2r_kind kind_for(bool forward, Parity p) {
  if (forward) return p == Parity::Cos ? FFTW_REDFT10 : FFTW_RODFT10;
  return p == Parity::Cos ? FFTW_REDFT01 : FFTW_RODFT01;
}

// Analysis scale for position p along an axis of length n.
double analysis_scale(Parity parity, std::size_t p, std::size_t n) {
  const double base = 1.0 / static_cast<double>(n);
  const bool edge = parity == Parity::Cos ? p == 0 : p + 1 == n;
  return edge ? 0.5 * base : base;
}

double synthesis_scale(Parity parity, std::size_t p, std::size_t n) {
  const bool edge = parity == Parity::Cos ? p == 0 : p + 1 == n;
  return edge ? 1.0 : 0.5;
}

}  // namespace

TransformEngine::TransformEngine(std::size_t nx, std::size_t ny)
    : nx_(nx), ny_(ny), buffer_(static_cast<double*>(fftw_malloc(sizeof(double) * nx * ny))) {}

TransformEngine::~TransformEngine() {
  std::lock_guard lock(planner_mutex());
  for (auto& p : plans_) {
    if (p != nullptr) fftw_destroy_plan(p);
  }
  fftw_free(buffer_);
}

fftw_plan TransformEngine::plan(bool forward, Parity px, Parity py) {
  const std::size_t slot = (forward ? 4 : 0) + 2 * static_cast<std::size_t>(px) + static_cast<std::size_t>(py);
  if (plans_[slot] == nullptr) {
    std::lock_guard lock(planner_mutex());
    // FFTW_ESTIMATE keeps plan selection, and therefore rounding, reproducible run to run.
    plans_[slot] = fftw_plan_r2r_2d(static_cast<int>(nx_), static_cast<int>(ny_), buffer_, buffer_,
                                    kind_for(forward, px), kind_for(forward, py), FFTW_ESTIMATE);
  }
  return plans_[slot];
}

void TransformEngine::analyze(Parity px, Parity py, std::span<const double> nodal, std::span<double> coeffs) {
  std::copy(nodal.begin(), nodal.end(), buffer_);
  fftw_execute(plan(true, px, py));
  for (std::size_t j = 0; j < nx_; ++j) {
    const double sx = analysis_scale(px, j, nx_);
    for (std::size_t k = 0; k < ny_; ++k) {
      coeffs[j * ny_ + k] = buffer_[j * ny_ + k] * sx * analysis_scale(py, k, ny_);
    }
  }
}

void TransformEngine::synthesize(Parity px, Parity py, std::span<const double> coeffs, std::span<double> nodal) {
  for (std::size_t j = 0; j < nx_; ++j) {
    const double sx = synthesis_scale(px, j, nx_);
    for (std::size_t k = 0; k < ny_; ++k) {
      buffer_[j * ny_ + k] = coeffs[j * ny_ + k] * sx * synthesis_scale(py, k, ny_);
    }
  }
  fftw_execute(plan(false, px, py));
  std::copy(buffer_, buffer_ + nx_ * ny_, nodal.begin());
}

TransformEngine& engine_for(const Grid& grid) {
  thread_local std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<TransformEngine>> cache;
  auto& slot = cache[{grid.nx, grid.ny}];
  if (!slot) slot = std::make_unique<TransformEngine>(grid.nx, grid.ny);
  return *slot;
}

}  // namespace llg::detail
