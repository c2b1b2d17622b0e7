#include "llg/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include "llg/config.hpp"
#include "llg/control.hpp"
#include "llg/errors.hpp"
#include "llg/snapshot.hpp"
#include "llg/verify.hpp"

namespace llg {

namespace fs = std::filesystem;

namespace {

struct CommonArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out, "Output directory (overrides output.directory)");
  cmd->add_option("--seed", args.seed, "Random seed (overrides scenario.seed)");
  cmd->add_option("--threads", args.threads, "Worker threads; runs are sequential and deterministic")
      ->check(CLI::PositiveNumber);
}

RunConfig resolve_config(const CommonArgs& args) {
  RunConfig cfg = args.config.empty() ? RunConfig{} : load_config(args.config);
  if (!args.out.empty()) cfg.output.directory = args.out;
  if (args.seed) cfg.scenario.seed = *args.seed;
  cfg.validate();
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  return out;
}

std::size_t snapshot_stride(const RunConfig& cfg) {
  return cfg.output.snapshot_stride == 0 ? cfg.solver.nt : cfg.output.snapshot_stride;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Scenario sc = build_scenario(cfg);
  const Trajectory u = generating_control(cfg);
  const ForwardSolution run = solve_forward(sc.m0, u, cfg.horizon, cfg.solver);
  const EnergySeries es = energy_series(run.diagnostics, u);

  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  write_trajectory(dir / "m", run.m, snapshot_stride(cfg));
  std::ofstream csv = open_output(dir / "timeseries.csv");
  csv << "t,sphere_defect,grad_m_l2sq,lap_m_l2sq,mxlap_l2sq,e1_lhs,e1_rhs,e2_lhs,e2_rhs\n";
  for (std::size_t k = 0; k < run.diagnostics.size(); ++k) {
    const auto& d = run.diagnostics[k];
    csv << format_double(d.t) << ',' << format_double(d.sphere_defect) << ',' << format_double(d.grad_l2sq) << ','
        << format_double(d.lap_l2sq) << ',' << format_double(d.mxlap_l2sq) << ',' << format_double(es.e1_lhs[k])
        << ',' << format_double(es.e1_rhs[k]) << ',' << format_double(es.e2_lhs[k]) << ','
        << format_double(es.e2_rhs[k]) << '\n';
  }
  out << "simulate: " << sc.name << ", " << cfg.solver.nt << " steps, final sphere defect "
      << format_double(run.diagnostics.back().sphere_defect) << ", output in " << dir.string() << '\n';
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const OcpSpec spec = build_problem(cfg);
  Trajectory u_init;
  if (cfg.control.u_init == "file") {
    try {
      u_init = read_trajectory(cfg.control.u_init_dir);
      require_conforming(u_init, spec.m_d, "control.u_init_dir");
    } catch (const Error& e) {
      throw ConfigError("control.u_init_dir", e.what());
    }
  } else {
    u_init = Trajectory::zeros(cfg.grid, cfg.horizon, cfg.solver.nt);
  }
  const OptResult res = optimize(spec, u_init, cfg.optimizer, cfg.solver);

  const fs::path dir = cfg.output.directory;
  fs::create_directories(dir);
  std::ofstream csv = open_output(dir / "iterations.csv");
  csv << "iter,tracking,terminal,control_l2,control_h1,total,grad_norm,step,budget_active\n";
  for (const auto& it : res.report.iterations) {
    csv << it.iter << ',' << format_double(it.cost.tracking) << ',' << format_double(it.cost.terminal) << ','
        << format_double(it.cost.control_l2) << ',' << format_double(it.cost.control_h1) << ','
        << format_double(it.cost.total) << ',' << format_double(it.grad_norm) << ',' << format_double(it.step)
        << ',' << (it.budget_active ? "true" : "false") << '\n';
  }
  write_trajectory(dir / "u_star", res.u_star, snapshot_stride(cfg));
  write_trajectory(dir / "m_star", res.m_star, snapshot_stride(cfg));

  const ViReport vi = variational_inequality_check(spec, res.u_star, res.m_star, res.phi_star,
                                                   res.report.initial_gradient_norm, cfg.vi_probes,
                                                   cfg.scenario.seed);
  std::ofstream rep = open_output(dir / "vi_report.txt");
  rep << "stopping_reason = " << to_string(res.report.stopping_reason) << '\n'
      << "iterations = " << res.report.iterations.back().iter << '\n'
      << "final_grad_norm = " << format_double(res.report.iterations.back().grad_norm) << '\n'
      << "probes = " << vi.probes << '\n'
      << "probe_distribution = random smooth controls, radius sqrt(e_mf) * U(0,1]\n"
      << "scale = " << format_double(vi.scale) << '\n'
      << "min_raw = " << format_double(vi.min_raw) << '\n'
      << "min_normalized = " << format_double(vi.min_normalized) << '\n'
      << "tolerance = " << format_double(vi.tolerance) << '\n'
      << "passed = " << (vi.passed ? "true" : "false") << '\n';

  out << "optimize: " << res.report.iterations.size() - 1 << " iterations, stop " << to_string(res.report.stopping_reason)
      << ", total cost " << format_double(res.report.iterations.front().cost.total) << " -> "
      << format_double(res.report.iterations.back().cost.total) << ", VI min "
      << format_double(vi.min_normalized) << '\n';
  return res.report.stopping_reason == StopReason::LineSearchFail ? kExitLineSearch : kExitOk;
}

int cmd_verify(const RunConfig& cfg, const std::string& suite, bool write_csv, std::ostream& out) {
  VerifyOptions opts;
  opts.grid = cfg.grid;
  opts.horizon = cfg.horizon;
  opts.solver = cfg.solver;
  opts.seed = cfg.scenario.seed;
  opts.energy_scale = cfg.scenario.scale;
  opts.control_amp = cfg.scenario.control_amp;
  opts.optimizer = cfg.optimizer;
  opts.vi_probes = cfg.vi_probes;
  const auto results = run_suite(suite, opts);
  std::size_t failed = 0;
  for (const auto& r : results) {
    out << format_result_line(r) << '\n';
    if (!r.passed) ++failed;
  }
  out << "summary: " << results.size() - failed << " passed, " << failed << " failed\n";
  if (write_csv) {
    fs::create_directories(cfg.output.directory);
    std::ofstream csv = open_output(cfg.output.directory / "verify.csv");
    write_results_csv(csv, results);
  }
  return failed == 0 ? kExitOk : kExitCheckFailed;
}

int cmd_make_scenario(RunConfig cfg, const std::string& kind, std::ostream& out) {
  cfg.scenario.kind = parse_scenario_kind(kind);
  if (cfg.scenario.kind == ScenarioKind::Files) throw ConfigError("scenario.kind", "cannot generate kind files");
  const fs::path dir = fs::absolute(cfg.output.directory);
  const Scenario sc = build_scenario(cfg);
  const Trajectory u = generating_control(cfg);
  const Trajectory m_d = solve_forward(sc.m0, u, cfg.horizon, cfg.solver).m;

  fs::create_directories(dir);
  write_snapshot(dir / "m0.llgf", FieldSnapshot::from_field(sc.m0, 0.0));
  write_trajectory(dir / "u_dagger", u);
  write_trajectory(dir / "m_d", m_d);
  write_snapshot(dir / "m_omega.llgf", FieldSnapshot::from_field(m_d.back(), cfg.horizon));

  RunConfig next = cfg;
  next.scenario.kind = ScenarioKind::Files;
  next.scenario.m0_file = dir / "m0.llgf";
  next.scenario.control_dir = dir / "u_dagger";
  next.scenario.m_d = "file";
  next.scenario.m_d_dir = dir / "m_d";
  next.scenario.m_omega = "file";
  next.scenario.m_omega_file = dir / "m_omega.llgf";
  next.output.directory = dir / "run";
  std::ofstream ini = open_output(dir / "config.ini");
  ini << render_config(next);
  out << "make-scenario: " << kind << " written to " << dir.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"LLG optimal-control toolkit"};
  app.require_subcommand(1);
  CommonArgs args;
  std::string suite = "all";
  std::string kind;

  CLI::App* simulate = app.add_subcommand("simulate", "Forward solve with snapshots and energy monitors");
  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Projected-gradient optimal control");
  CLI::App* verify = app.add_subcommand("verify", "Run verification suites");
  CLI::App* make = app.add_subcommand("make-scenario", "Write scenario data and a ready-to-run config");
  CLI::App* adjoint_check = app.add_subcommand("adjoint-check", "Gradient verification suite");
  for (CLI::App* cmd : {simulate, optimize_cmd, verify, make, adjoint_check}) add_common(cmd, args);
  verify->add_option("--suite", suite, "Suite to run")->check(CLI::IsMember(suite_names()));
  make->add_option("--kind", kind, "stationary, macrospin, perturbed or inverse_crime")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    const RunConfig cfg = resolve_config(args);
    if (*simulate) return cmd_simulate(cfg, out);
    if (*optimize_cmd) return cmd_optimize(cfg, out);
    if (*verify) return cmd_verify(cfg, suite, !args.out.empty(), out);
    if (*adjoint_check) return cmd_verify(cfg, "gradient", !args.out.empty(), out);
    if (*make) return cmd_make_scenario(cfg, kind, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StabilityError& e) {
    err << "config error: time.nt: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BlowupError& e) {
    err << "numerical blowup: " << e.what() << '\n';
    return kExitBlowup;
  } catch (const LineSearchError& e) {
    err << "line search failed: " << e.what() << '\n';
    return kExitLineSearch;
  } catch (const ShapeError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    err << "file error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitConfig;
}

}  // namespace llg
