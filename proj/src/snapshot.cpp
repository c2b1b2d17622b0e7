#include "llg/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "llg/errors.hpp"

namespace llg {

namespace {

constexpr char kMagic[4] = {'L', 'L', 'G', 'F'};
constexpr std::size_t kHeaderBytes = 4 + 4 * 4 + 3 * 8;

template <typename T>
void put(std::vector<std::uint8_t>& out, T value) {
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  out.insert(out.end(), std::begin(bytes), std::end(bytes));
}

template <typename T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw FormatError("snapshot truncated");
  std::uint8_t bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(std::begin(bytes), std::end(bytes));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

std::string frame_name(std::size_t step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.llgf", step);
  return buf;
}

}  // namespace

FieldSnapshot FieldSnapshot::from_field(const VectorField3& f, double t) {
  const auto d = f.data();
  return {f.grid(), t, 3, std::vector<double>(d.begin(), d.end())};
}

VectorField3 FieldSnapshot::to_field() const {
  if (ncomp != 3) throw FormatError("snapshot has " + std::to_string(ncomp) + " components, expected 3");
  return VectorField3(grid, data);
}

std::vector<std::uint8_t> encode_snapshot(const FieldSnapshot& snap) {
  if (snap.data.size() != snap.ncomp * snap.grid.nodes()) throw FormatError("snapshot payload size mismatch");
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * snap.data.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  put<std::uint32_t>(out, kSnapshotVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.grid.nx));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snap.grid.ny));
  put<std::uint32_t>(out, snap.ncomp);
  put<double>(out, snap.grid.lx);
  put<double>(out, snap.grid.ly);
  put<double>(out, snap.t);
  for (double v : snap.data) put<double>(out, v);
  return out;
}

FieldSnapshot decode_snapshot(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw FormatError("not an LLGF snapshot (bad magic)");
  }
  std::size_t pos = 4;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kSnapshotVersion) throw FormatError("unsupported snapshot version " + std::to_string(version));
  const auto nx = get<std::uint32_t>(bytes, pos);
  const auto ny = get<std::uint32_t>(bytes, pos);
  const auto ncomp = get<std::uint32_t>(bytes, pos);
  const double lx = get<double>(bytes, pos);
  const double ly = get<double>(bytes, pos);
  const double t = get<double>(bytes, pos);
  if (ncomp == 0) throw FormatError("snapshot has zero components");
  Grid grid;
  try {
    grid = Grid(lx, ly, nx, ny);
  } catch (const ShapeError& e) {
    throw FormatError(std::string("snapshot grid invalid: ") + e.what());
  }
  const std::size_t count = static_cast<std::size_t>(ncomp) * grid.nodes();
  if (bytes.size() != kHeaderBytes + 8 * count) throw FormatError("snapshot payload size mismatch");
  FieldSnapshot snap{grid, t, ncomp, std::vector<double>(count)};
  for (double& v : snap.data) v = get<double>(bytes, pos);
  return snap;
}

void write_snapshot(const std::filesystem::path& path, const FieldSnapshot& snap) {
  const auto bytes = encode_snapshot(snap);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed: " + path.string());
}

FieldSnapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

void write_trajectory(const std::filesystem::path& dir, const Trajectory& traj, std::size_t stride) {
  if (stride < 1) stride = 1;
  std::filesystem::create_directories(dir);
  std::ofstream index(dir / "index.csv", std::ios::trunc);
  if (!index) throw FormatError("cannot write " + (dir / "index.csv").string());
  index << "step,t,file\n";
  const std::size_t nt = traj.steps();
  for (std::size_t k = 0; k <= nt; ++k) {
    if (k % stride != 0 && k != nt) continue;
    const std::string name = frame_name(k);
    write_snapshot(dir / name, FieldSnapshot::from_field(traj[k], traj.time(k)));
    index << k << ',' << format_double(traj.time(k)) << ',' << name << '\n';
  }
}

Trajectory read_trajectory(const std::filesystem::path& dir) {
  std::ifstream index(dir / "index.csv");
  if (!index) throw FormatError("missing index.csv in " + dir.string());
  std::string line;
  std::getline(index, line);
  if (line != "step,t,file") throw FormatError("unexpected index.csv header in " + dir.string());
  std::vector<VectorField3> frames;
  std::vector<double> times;
  while (std::getline(index, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw FormatError("malformed index.csv line: " + line);
    const FieldSnapshot snap = read_snapshot(dir / line.substr(c2 + 1));
    frames.push_back(snap.to_field());
    times.push_back(snap.t);
  }
  if (frames.size() < 2) throw FormatError("trajectory needs at least two frames: " + dir.string());
  const double horizon = times.back();
  const double dt = horizon / static_cast<double>(frames.size() - 1);
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - dt * static_cast<double>(k)) > 1e-12 * std::max(1.0, horizon)) {
      throw FormatError("trajectory frames are not evenly spaced from t = 0: " + dir.string());
    }
  }
  return Trajectory(horizon, std::move(frames));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace llg
