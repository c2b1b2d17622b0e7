#include "llg/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "llg/errors.hpp"
#include "llg/snapshot.hpp"

namespace llg {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"grid", {"lx", "ly", "nx", "ny"}},
      {"time", {"T", "nt"}},
      {"solver", {"formulation", "renormalize_every", "dealias", "memory_budget_bytes"}},
      {"scenario",
       {"kind", "theta0", "field", "scale", "control_amp", "seed", "amplitude", "m0_file", "control_dir", "m_d",
        "m_d_dir", "m_omega", "m_omega_file"}},
      {"control", {"e_mf", "u_init", "u_init_dir"}},
      {"optimizer",
       {"max_iter", "grad_tol", "armijo_c", "backtrack_ratio", "initial_step", "max_backtracks", "metric",
        "bb_step", "vi_probes"}},
      {"output", {"directory", "snapshot_stride"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return *v;
    return std::nullopt;
  }

  void real(const std::string& key, double& out) const {
    const auto v = raw(key);
    if (!v) return;
    const std::string s = trim(*v);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(value)) {
      throw ConfigError(key, "expected a finite number, got '" + *v + "'");
    }
    out = value;
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) const {
    const auto v = raw(key);
    if (!v) return;
    const std::string s = trim(*v);
    Int value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError(key, "expected a non-negative integer, got '" + *v + "'");
    }
    out = value;
  }

  void boolean(const std::string& key, bool& out) const {
    const auto v = raw(key);
    if (!v) return;
    const std::string s = trim(*v);
    if (s == "true" || s == "1") {
      out = true;
    } else if (s == "false" || s == "0") {
      out = false;
    } else {
      throw ConfigError(key, "expected true or false, got '" + *v + "'");
    }
  }

  void text(const std::string& key, std::string& out) const {
    if (const auto v = raw(key)) out = trim(*v);
  }

  void path(const std::string& key, std::filesystem::path& out) const {
    if (const auto v = raw(key)) out = trim(*v);
  }

 private:
  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  const pt::ptree& tree_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError(key, what);
}

Trajectory load_control_dir(const std::filesystem::path& dir, const RunConfig& cfg, const std::string& key) {
  Trajectory u;
  try {
    u = read_trajectory(dir);
  } catch (const FormatError& e) {
    throw ConfigError(key, e.what());
  }
  require(u.grid() == cfg.grid, key, "trajectory grid differs from [grid]");
  require(u.steps() == cfg.solver.nt, key, "trajectory step count differs from time.nt");
  require(std::abs(u.horizon() - cfg.horizon) <= 1e-12 * cfg.horizon, key, "trajectory horizon differs from time.T");
  return u;
}

VectorField3 load_field(const std::filesystem::path& file, const RunConfig& cfg, const std::string& key) {
  VectorField3 f;
  try {
    f = read_snapshot(file).to_field();
  } catch (const FormatError& e) {
    throw ConfigError(key, e.what());
  }
  require(f.grid() == cfg.grid, key, "snapshot grid differs from [grid]");
  return f;
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::Stationary:
      return "stationary";
    case ScenarioKind::Macrospin:
      return "macrospin";
    case ScenarioKind::Perturbed:
      return "perturbed";
    case ScenarioKind::InverseCrime:
      return "inverse_crime";
    case ScenarioKind::Files:
      return "files";
  }
  return "unknown";
}

ScenarioKind parse_scenario_kind(const std::string& name) {
  for (auto k : {ScenarioKind::Stationary, ScenarioKind::Macrospin, ScenarioKind::Perturbed,
                 ScenarioKind::InverseCrime, ScenarioKind::Files}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("scenario.kind", "unknown scenario kind '" + name + "'");
}

void RunConfig::validate() const {
  require(std::isfinite(grid.lx) && grid.lx > 0.0, "grid.lx", "must be positive");
  require(std::isfinite(grid.ly) && grid.ly > 0.0, "grid.ly", "must be positive");
  require(grid.nx >= 4, "grid.nx", "must be >= 4");
  require(grid.ny >= 4, "grid.ny", "must be >= 4");
  require(horizon > 0.0, "time.T", "must be positive");
  solver.validate();
  require(scenario.scale >= 0.0, "scenario.scale", "must be non-negative");
  require(scenario.amplitude >= 0.0, "scenario.amplitude", "must be non-negative");
  require(scenario.m_d == "synthetic" || scenario.m_d == "file", "scenario.m_d", "must be synthetic or file");
  require(scenario.m_omega == "final" || scenario.m_omega == "file", "scenario.m_omega", "must be final or file");
  require(scenario.m_d != "file" || !scenario.m_d_dir.empty(), "scenario.m_d_dir", "required when m_d = file");
  require(scenario.m_omega != "file" || !scenario.m_omega_file.empty(), "scenario.m_omega_file",
          "required when m_omega = file");
  if (scenario.kind == ScenarioKind::Files) {
    require(!scenario.m0_file.empty(), "scenario.m0_file", "required for kind = files");
    require(!scenario.control_dir.empty(), "scenario.control_dir", "required for kind = files");
  }
  require(control.e_mf > 0.0, "control.e_mf", "must be positive");
  require(control.u_init == "zero" || control.u_init == "file", "control.u_init", "must be zero or file");
  require(control.u_init != "file" || !control.u_init_dir.empty(), "control.u_init_dir",
          "required when u_init = file");
  optimizer.validate();
  require(vi_probes >= 1, "optimizer.vi_probes", "must be >= 1");
  require(!output.directory.empty(), "output.directory", "must not be empty");
}

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.message() + " (line " + std::to_string(e.line()) +
                              ")");
  }
  for (const auto& [section, body] : tree) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    if (body.empty() && !body.data().empty()) throw ConfigError(section, "key outside of a section");
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }

  const Reader r(tree);
  RunConfig cfg;
  double lx = cfg.grid.lx;
  double ly = cfg.grid.ly;
  std::size_t nx = cfg.grid.nx;
  std::size_t ny = cfg.grid.ny;
  r.real("grid.lx", lx);
  r.real("grid.ly", ly);
  r.integer("grid.nx", nx);
  r.integer("grid.ny", ny);
  require(lx > 0.0, "grid.lx", "must be positive");
  require(ly > 0.0, "grid.ly", "must be positive");
  require(nx >= 4, "grid.nx", "must be >= 4");
  require(ny >= 4, "grid.ny", "must be >= 4");
  cfg.grid = Grid(lx, ly, nx, ny);

  r.real("time.T", cfg.horizon);
  r.integer("time.nt", cfg.solver.nt);

  std::string formulation = "ep";
  r.text("solver.formulation", formulation);
  if (formulation == "ep") {
    cfg.solver.formulation = Formulation::EP;
  } else if (formulation == "nlp") {
    cfg.solver.formulation = Formulation::NLP;
  } else {
    throw ConfigError("solver.formulation", "must be ep or nlp, got '" + formulation + "'");
  }
  if (r.raw("solver.renormalize_every")) {
    std::size_t every = 0;
    r.integer("solver.renormalize_every", every);
    cfg.solver.renormalize_every = every;
  }
  r.boolean("solver.dealias", cfg.solver.dealias);
  r.integer("solver.memory_budget_bytes", cfg.solver.memory_budget_bytes);

  std::string kind = to_string(cfg.scenario.kind);
  r.text("scenario.kind", kind);
  cfg.scenario.kind = parse_scenario_kind(kind);
  r.real("scenario.theta0", cfg.scenario.theta0);
  r.real("scenario.field", cfg.scenario.field);
  r.real("scenario.scale", cfg.scenario.scale);
  r.real("scenario.control_amp", cfg.scenario.control_amp);
  r.integer("scenario.seed", cfg.scenario.seed);
  r.real("scenario.amplitude", cfg.scenario.amplitude);
  r.path("scenario.m0_file", cfg.scenario.m0_file);
  r.path("scenario.control_dir", cfg.scenario.control_dir);
  r.text("scenario.m_d", cfg.scenario.m_d);
  r.path("scenario.m_d_dir", cfg.scenario.m_d_dir);
  r.text("scenario.m_omega", cfg.scenario.m_omega);
  r.path("scenario.m_omega_file", cfg.scenario.m_omega_file);

  r.real("control.e_mf", cfg.control.e_mf);
  r.text("control.u_init", cfg.control.u_init);
  r.path("control.u_init_dir", cfg.control.u_init_dir);

  r.integer("optimizer.max_iter", cfg.optimizer.max_iter);
  r.real("optimizer.grad_tol", cfg.optimizer.grad_tol);
  r.real("optimizer.armijo_c", cfg.optimizer.armijo_c);
  r.real("optimizer.backtrack_ratio", cfg.optimizer.backtrack_ratio);
  r.real("optimizer.initial_step", cfg.optimizer.initial_step);
  r.integer("optimizer.max_backtracks", cfg.optimizer.max_backtracks);
  std::string metric = "h1";
  r.text("optimizer.metric", metric);
  if (metric == "h1") {
    cfg.optimizer.metric = GradientMetric::H1;
  } else if (metric == "l2") {
    cfg.optimizer.metric = GradientMetric::L2;
  } else {
    throw ConfigError("optimizer.metric", "must be h1 or l2, got '" + metric + "'");
  }
  r.boolean("optimizer.bb_step", cfg.optimizer.bb_step);
  r.integer("optimizer.vi_probes", cfg.vi_probes);

  r.path("output.directory", cfg.output.directory);
  r.integer("output.snapshot_stride", cfg.output.snapshot_stride);

  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string render_config(const RunConfig& cfg) {
  std::ostringstream out;
  const auto d = [](double v) { return format_double(v); };
  out << "[grid]\nlx = " << d(cfg.grid.lx) << "\nly = " << d(cfg.grid.ly) << "\nnx = " << cfg.grid.nx
      << "\nny = " << cfg.grid.ny << "\n\n";
  out << "[time]\nT = " << d(cfg.horizon) << "\nnt = " << cfg.solver.nt << "\n\n";
  out << "[solver]\nformulation = " << (cfg.solver.formulation == Formulation::EP ? "ep" : "nlp") << '\n';
  if (cfg.solver.renormalize_every) out << "renormalize_every = " << *cfg.solver.renormalize_every << '\n';
  out << "dealias = " << (cfg.solver.dealias ? "true" : "false") << "\nmemory_budget_bytes = "
      << cfg.solver.memory_budget_bytes << "\n\n";
  const auto& s = cfg.scenario;
  out << "[scenario]\nkind = " << to_string(s.kind) << "\ntheta0 = " << d(s.theta0) << "\nfield = " << d(s.field)
      << "\nscale = " << d(s.scale) << "\ncontrol_amp = " << d(s.control_amp) << "\nseed = " << s.seed
      << "\namplitude = " << d(s.amplitude) << '\n';
  if (!s.m0_file.empty()) out << "m0_file = " << s.m0_file.string() << '\n';
  if (!s.control_dir.empty()) out << "control_dir = " << s.control_dir.string() << '\n';
  out << "m_d = " << s.m_d << '\n';
  if (!s.m_d_dir.empty()) out << "m_d_dir = " << s.m_d_dir.string() << '\n';
  out << "m_omega = " << s.m_omega << '\n';
  if (!s.m_omega_file.empty()) out << "m_omega_file = " << s.m_omega_file.string() << '\n';
  out << "\n[control]\ne_mf = " << d(cfg.control.e_mf) << "\nu_init = " << cfg.control.u_init << '\n';
  if (!cfg.control.u_init_dir.empty()) out << "u_init_dir = " << cfg.control.u_init_dir.string() << '\n';
  const auto& o = cfg.optimizer;
  out << "\n[optimizer]\nmax_iter = " << o.max_iter << "\ngrad_tol = " << d(o.grad_tol) << "\narmijo_c = "
      << d(o.armijo_c) << "\nbacktrack_ratio = " << d(o.backtrack_ratio) << "\ninitial_step = "
      << d(o.initial_step) << "\nmax_backtracks = " << o.max_backtracks
      << "\nmetric = " << (o.metric == GradientMetric::H1 ? "h1" : "l2")
      << "\nbb_step = " << (o.bb_step ? "true" : "false") << "\nvi_probes = " << cfg.vi_probes
      << "\n\n";
  out << "[output]\ndirectory = " << cfg.output.directory.string() << "\nsnapshot_stride = "
      << cfg.output.snapshot_stride << '\n';
  return out.str();
}

Scenario build_scenario(const RunConfig& cfg) {
  const auto& s = cfg.scenario;
  switch (s.kind) {
    case ScenarioKind::Stationary:
      return stationary_scenario(cfg.grid, cfg.horizon);
    case ScenarioKind::Macrospin:
      return macrospin_scenario(cfg.grid, cfg.horizon, s.theta0, s.field);
    case ScenarioKind::Perturbed:
      return perturbed_scenario(cfg.grid, cfg.horizon, s.scale, s.control_amp);
    case ScenarioKind::InverseCrime: {
      Scenario sc = perturbed_scenario(cfg.grid, cfg.horizon, 1.0);
      sc.name = "inverse_crime";
      const Trajectory u = generating_control(cfg);
      sc.control = [u](double t) {
        const auto k = static_cast<std::size_t>(std::llround(t / u.dt()));
        return u[std::min(k, u.steps())];
      };
      return sc;
    }
    case ScenarioKind::Files: {
      const VectorField3 m0 = load_field(s.m0_file, cfg, "scenario.m0_file");
      require(sphere_defect(m0) <= 1e-10, "scenario.m0_file", "initial magnetization is not unit length");
      const Trajectory u = load_control_dir(s.control_dir, cfg, "scenario.control_dir");
      return {"files", cfg.grid, cfg.horizon, m0, [u](double t) {
                const auto k = static_cast<std::size_t>(std::llround(t / u.dt()));
                return u[std::min(k, u.steps())];
              }};
    }
  }
  throw ConfigError("scenario.kind", "unsupported");
}

Trajectory generating_control(const RunConfig& cfg) {
  const auto& s = cfg.scenario;
  if (s.kind == ScenarioKind::InverseCrime) {
    std::mt19937_64 rng(s.seed);
    Trajectory u = random_smooth_trajectory(cfg.grid, cfg.horizon, cfg.solver.nt, rng);
    u *= s.amplitude / std::sqrt(budget_norm_sq(u));
    return u;
  }
  if (s.kind == ScenarioKind::Files) return load_control_dir(s.control_dir, cfg, "scenario.control_dir");
  return build_scenario(cfg).sample_control(cfg.solver.nt);
}

OcpSpec build_problem(const RunConfig& cfg) {
  const Scenario sc = build_scenario(cfg);
  OcpSpec spec;
  spec.grid = cfg.grid;
  spec.horizon = cfg.horizon;
  spec.nt = cfg.solver.nt;
  spec.m0 = sc.m0;
  spec.e_mf = cfg.control.e_mf;
  if (cfg.scenario.m_d == "file") {
    spec.m_d = load_control_dir(cfg.scenario.m_d_dir, cfg, "scenario.m_d_dir");
  } else {
    spec.m_d = solve_forward(sc.m0, generating_control(cfg), cfg.horizon, cfg.solver).m;
  }
  if (cfg.scenario.m_omega == "file") {
    spec.m_omega = load_field(cfg.scenario.m_omega_file, cfg, "scenario.m_omega_file");
  } else {
    spec.m_omega = spec.m_d.back();
  }
  return spec;
}

}  // namespace llg
