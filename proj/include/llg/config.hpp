#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "llg/control.hpp"
#include "llg/grid.hpp"
#include "llg/scenario.hpp"
#include "llg/state.hpp"

namespace llg {

enum class ScenarioKind { Stationary, Macrospin, Perturbed, InverseCrime, Files };

std::string to_string(ScenarioKind kind);
/// Throws ConfigError("scenario.kind") for unknown names.
ScenarioKind parse_scenario_kind(const std::string& name);

struct ScenarioSettings {
  ScenarioKind kind = ScenarioKind::Perturbed;
  double theta0 = 0.7853981633974483;
  /// Macrospin field strength h (u = h e3).
  double field = 1.0;
  double scale = 1.0;
  double control_amp = 0.0;
  std::uint64_t seed = 1;
  /// ||u_dagger||_{L2(Omega_T)} of the inverse-crime generator.
  double amplitude = 1.0;
  /// Files scenario: initial magnetization snapshot.
  std::filesystem::path m0_file;
  /// Files scenario: applied field / generating control trajectory.
  std::filesystem::path control_dir;
  /// "synthetic" (m_d = G(u_dagger)) or "file".
  std::string m_d = "synthetic";
  std::filesystem::path m_d_dir;
  /// "final" (m_omega = m_d(T)) or "file".
  std::string m_omega = "final";
  std::filesystem::path m_omega_file;
};

struct ControlSettings {
  double e_mf = 10.0;
  /// "zero" or "file".
  std::string u_init = "zero";
  std::filesystem::path u_init_dir;
};

struct OutputSettings {
  std::filesystem::path directory = "out";
  std::size_t snapshot_stride = 0;  ///< 0: write only the first and last frame
};

/// Everything a run needs, read from an INI file with sections
/// [grid] [time] [solver] [scenario] [control] [optimizer] [output].
struct RunConfig {
  Grid grid{1.0, 1.0, 32, 32};
  double horizon = 1.0;
  SolverConfig solver;
  ScenarioSettings scenario;
  ControlSettings control;
  OptimizerOptions optimizer;
  std::size_t vi_probes = 100;
  OutputSettings output;

  /// Cross-field invariants; throws ConfigError naming the key.
  void validate() const;
};

/// Parses INI text; unknown sections or keys and malformed values raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// INI text that parse_config maps back to an equal configuration.
std::string render_config(const RunConfig& cfg);

/// Builds the scenario described by cfg (initial data and applied field).
Scenario build_scenario(const RunConfig& cfg);

/// Generating control u_dagger sampled on the configured time grid.
Trajectory generating_control(const RunConfig& cfg);

/// Tracking problem: m_d and m_omega from files or from G(u_dagger).
OcpSpec build_problem(const RunConfig& cfg);

}  // namespace llg
