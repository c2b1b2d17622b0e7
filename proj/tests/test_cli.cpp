#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "llg/cli.hpp"
#include "llg/config.hpp"
#include "llg/errors.hpp"
#include "llg/snapshot.hpp"
#include "llg/verify.hpp"

using namespace llg;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "llgctl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("llg_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_ini(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "config.ini";
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const std::string kSmall = R"([grid]
nx = 8
ny = 8
lx = 1.5
[time]
T = 0.25
nt = 16
)";

}  // namespace

TEST_CASE("argument handling") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({}).code == kExitConfig);
  CHECK(cli({"simulate", "--threads", "0"}).code == kExitConfig);
  CHECK(cli({"verify", "--suite", "nonsense"}).code == kExitConfig);
  CHECK(cli({"simulate", "--config", "/nonexistent/file.ini"}).code == kExitConfig);
  CHECK(cli({"make-scenario"}).code == kExitConfig);
}

TEST_CASE("invalid configurations exit 2 and name the key") {
  const fs::path dir = scratch("config");
  struct Case {
    std::string text;
    std::string key;
  };
  for (const Case& c : std::vector<Case>{{"[time]\nnt = 0\n", "time.nt"},
                                         {"[time]\nT = -1\n", "time.T"},
                                         {"[grid]\nfoo = 1\n", "grid.foo"},
                                         {"[bogus]\nx = 1\n", "bogus"},
                                         {"[grid]\nnx = abc\n", "grid.nx"},
                                         {"[grid]\nnx = 2\n", "grid.nx"},
                                         {"[solver]\nformulation = rk4\n", "solver.formulation"},
                                         {"[control]\ne_mf = 0\n", "control.e_mf"},
                                         {"[optimizer]\narmijo_c = 2\n", "optimizer.armijo_c"},
                                         {"[scenario]\nkind = spiral\n", "scenario.kind"}}) {
    const Run r = cli({"simulate", "--config", write_ini(dir, c.text).string(), "--out", (dir / "o").string()});
    CHECK_MESSAGE(r.code == kExitConfig, c.text);
    CHECK_MESSAGE(r.err.find(c.key) != std::string::npos, r.err);
  }
}

TEST_CASE("explicit NLP above the stability cap is a configuration error") {
  const fs::path dir = scratch("nlp");
  const Run r = cli({"simulate", "--config", write_ini(dir, kSmall + "[solver]\nformulation = nlp\n").string(),
                     "--out", (dir / "o").string()});
  CHECK(r.code == kExitConfig);
  CHECK(r.err.find("time.nt") != std::string::npos);
}

TEST_CASE("configuration text round trip") {
  RunConfig cfg = parse_config(kSmall + "[scenario]\nkind = macrospin\nfield = 2.5\n[optimizer]\nmetric = l2\n");
  CHECK(cfg.grid.lx == 1.5);
  CHECK(cfg.solver.nt == 16);
  CHECK(cfg.scenario.kind == ScenarioKind::Macrospin);
  CHECK(cfg.optimizer.metric == GradientMetric::L2);
  const std::string text = render_config(cfg);
  CHECK(render_config(parse_config(text)) == text);
}

TEST_CASE("snapshot encoding round trip") {
  const Grid g(2.0, 0.5, 6, 4);
  VectorField3 f(g);
  for (std::size_t i = 0; i < f.data().size(); ++i) f.data()[i] = 0.1 * static_cast<double>(i) - 1.0 / 3.0;
  const FieldSnapshot snap = FieldSnapshot::from_field(f, 0.125);
  const std::vector<std::uint8_t> bytes = encode_snapshot(snap);
  CHECK(bytes.size() == 44 + 8 * 3 * 24);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "LLGF");
  const FieldSnapshot back = decode_snapshot(bytes);
  CHECK(back.grid == g);
  CHECK(back.t == 0.125);
  CHECK(back.to_field() == f);
  CHECK(encode_snapshot(back) == bytes);

  const fs::path dir = scratch("snap");
  write_snapshot(dir / "a.llgf", snap);
  write_snapshot(dir / "b.llgf", read_snapshot(dir / "a.llgf"));
  CHECK(slurp(dir / "a.llgf") == slurp(dir / "b.llgf"));

  std::vector<std::uint8_t> bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(decode_snapshot(bad), FormatError);
  bad = bytes;
  bad[4] = 2;
  CHECK_THROWS_AS(decode_snapshot(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS(decode_snapshot(bad), FormatError);
  CHECK_THROWS_AS(read_snapshot(dir / "missing.llgf"), FormatError);
}

TEST_CASE("trajectory directories") {
  const Grid g(1.0, 1.0, 4, 4);
  std::vector<VectorField3> frames;
  for (int k = 0; k <= 6; ++k) frames.push_back(VectorField3::uniform(g, {0.0, 0.1 * k, 1.0}));
  const Trajectory t(0.6, frames);
  const fs::path dir = scratch("traj");
  write_trajectory(dir / "all", t);
  CHECK(read_trajectory(dir / "all") == t);
  write_trajectory(dir / "strided", t, 3);
  const Trajectory s = read_trajectory(dir / "strided");
  CHECK(s.steps() == 2);
  CHECK(s.back() == t.back());
  CHECK(slurp(dir / "all" / "index.csv").rfind("step,t,file\n", 0) == 0);
  write_trajectory(dir / "uneven", t, 4);
  CHECK_THROWS_AS(read_trajectory(dir / "uneven"), FormatError);
}

TEST_CASE("simulate writes snapshots and monitors") {
  const fs::path dir = scratch("sim");
  const fs::path ini = write_ini(dir, kSmall + "[scenario]\nkind = stationary\n[output]\nsnapshot_stride = 4\n");
  const Run r = cli({"simulate", "--config", ini.string(), "--out", (dir / "o").string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "o" / "timeseries.csv");
  CHECK(csv.rfind("t,sphere_defect,", 0) == 0);
  const Trajectory m = read_trajectory(dir / "o" / "m");
  CHECK(m.steps() == 4);
  CHECK(m.back() == VectorField3::uniform(m.grid(), {0, 0, 1}));
  CHECK(m.grid().lx == 1.5);
}

TEST_CASE("runs are byte-for-byte reproducible") {
  const fs::path dir = scratch("det");
  const fs::path ini = write_ini(dir, kSmall + "[scenario]\nkind = perturbed\ncontrol_amp = 0.5\n");
  REQUIRE(cli({"simulate", "--config", ini.string(), "--out", (dir / "a").string()}).code == kExitOk);
  REQUIRE(cli({"simulate", "--config", ini.string(), "--out", (dir / "b").string(), "--threads", "4"}).code ==
          kExitOk);
  CHECK(slurp(dir / "a" / "timeseries.csv") == slurp(dir / "b" / "timeseries.csv"));
  CHECK(slurp(dir / "a" / "m" / "frame_000016.llgf") == slurp(dir / "b" / "m" / "frame_000016.llgf"));
}

TEST_CASE("make-scenario output reproduces its data") {
  const fs::path dir = scratch("make");
  const fs::path ini = write_ini(dir, kSmall + "[scenario]\nseed = 9\n");
  const Run r = cli({"make-scenario", "--kind", "inverse_crime", "--config", ini.string(), "--out",
                     (dir / "sc").string()});
  REQUIRE(r.code == kExitOk);
  const fs::path generated = dir / "sc" / "config.ini";
  REQUIRE(fs::exists(generated));
  CHECK(load_config(generated).scenario.kind == ScenarioKind::Files);

  REQUIRE(cli({"simulate", "--config", generated.string(), "--out", (dir / "re").string()}).code == kExitOk);
  const Trajectory m_d = read_trajectory(dir / "sc" / "m_d");
  const Trajectory again = read_trajectory(dir / "re" / "m");
  CHECK(again.back() == m_d.back());
  CHECK(read_snapshot(dir / "sc" / "m_omega.llgf").to_field() == m_d.back());

  const Run opt = cli({"optimize", "--config", generated.string(), "--out", (dir / "opt").string()});
  CHECK(opt.code == kExitOk);
  CHECK(slurp(dir / "opt" / "iterations.csv").rfind("iter,tracking,terminal,", 0) == 0);
  const std::string vi = slurp(dir / "opt" / "vi_report.txt");
  CHECK(vi.find("passed = true") != std::string::npos);
  CHECK(fs::exists(dir / "opt" / "u_star" / "index.csv"));
  CHECK(fs::exists(dir / "opt" / "m_star" / "index.csv"));

  CHECK(cli({"make-scenario", "--kind", "files", "--out", (dir / "x").string()}).code == kExitConfig);
}

TEST_CASE("numerical blowup exits 3") {
  const fs::path dir = scratch("blow");
  const fs::path ini =
      write_ini(dir, "[grid]\nnx = 4\nny = 4\n[time]\nT = 1\nnt = 10\n[scenario]\nkind = macrospin\nfield = 1000\n");
  const Run r = cli({"simulate", "--config", ini.string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitBlowup);
  CHECK(r.err.find("blowup") != std::string::npos);
}

TEST_CASE("failed line search exits 4") {
  const fs::path dir = scratch("ls");
  const fs::path ini = write_ini(dir, kSmall +
                                          "[scenario]\nkind = inverse_crime\n[optimizer]\ninitial_step = 1000\n"
                                          "max_backtracks = 0\narmijo_c = 0.9\nbb_step = false\nmax_iter = 5\n");
  const Run r = cli({"optimize", "--config", ini.string(), "--out", (dir / "o").string()});
  CHECK(r.code == kExitLineSearch);
  CHECK(slurp(dir / "o" / "vi_report.txt").find("line_search_fail") != std::string::npos);
}

TEST_CASE("verify reports per check and writes a CSV on request") {
  const fs::path dir = scratch("verify");
  const Run r = cli({"verify", "--suite", "transforms", "--out", (dir / "o").string()});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("PASS ") != std::string::npos);
  CHECK(r.out.find("FAIL ") == std::string::npos);
  CHECK(r.out.find("summary: ") != std::string::npos);
  CHECK(fs::exists(dir / "o" / "verify.csv"));

  // Well outside the small-data regime the energy checks fail and say so.
  const fs::path ini = write_ini(dir, "[grid]\nnx = 16\nny = 16\n[time]\nnt = 256\n[scenario]\nscale = 50\n");
  const Run e = cli({"verify", "--suite", "energy", "--config", ini.string()});
  CHECK(e.code == kExitCheckFailed);
  CHECK(e.out.find("outside small-data regime") != std::string::npos);
}
