#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "llg/fields.hpp"

namespace llg {

/// Binary field file:
///   "LLGF", u32 version, u32 nx, u32 ny, u32 ncomp, f64 lx, f64 ly, f64 t,
///   then ncomp*nx*ny f64 values, component-major and row-major (x slow) within a component.
/// Every number is little-endian.
struct FieldSnapshot {
  Grid grid;
  double t = 0.0;
  std::uint32_t ncomp = 3;
  std::vector<double> data;

  static FieldSnapshot from_field(const VectorField3& f, double t);
  /// Throws FormatError unless ncomp == 3.
  VectorField3 to_field() const;
};

inline constexpr std::uint32_t kSnapshotVersion = 1;

std::vector<std::uint8_t> encode_snapshot(const FieldSnapshot& snap);
/// Throws FormatError on bad magic, unknown version or a size mismatch.
FieldSnapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const FieldSnapshot& snap);
FieldSnapshot read_snapshot(const std::filesystem::path& path);

/// Writes frames 0, stride, 2 stride, ... and always the last one as frame_NNNNNN.llgf,
/// plus index.csv with columns step,t,file.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, std::size_t stride = 1);

/// Reads a directory written by write_trajectory. The listed frames must be evenly
/// spaced in time starting at t = 0.
Trajectory read_trajectory(const std::filesystem::path& dir);

/// Shortest-exact decimal rendering used in every CSV: 17 significant digits.
std::string format_double(double v);

}  // namespace llg
