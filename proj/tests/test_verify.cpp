#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "llg/errors.hpp"
#include "llg/scenario.hpp"
#include "llg/verify.hpp"

using namespace llg;

namespace {

constexpr double kPi = std::numbers::pi;

SolverConfig ep(std::size_t nt) {
  SolverConfig c;
  c.nt = nt;
  return c;
}

}  // namespace

TEST_CASE("observed order") {
  CHECK_FALSE(observed_order({1.0, 0.5}).has_value());
  CHECK(*observed_order({1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
  CHECK(*observed_order({1.0, 0.5, 0.0625}) == doctest::Approx(1.0));
}

TEST_CASE("band-limited fields do not depend on the sampling grid") {
  const VectorField3 a = band_limited_field(Grid(1.0, 1.0, 8, 8), 3);
  const VectorField3 b = band_limited_field(Grid(1.0, 1.0, 8, 8), 3);
  CHECK(a == b);
  CHECK_FALSE(a == band_limited_field(Grid(1.0, 1.0, 8, 8), 4));
  // Node (0,0) of the 8-grid sits at x = 1/16, which is node (1,1) of a 24-grid.
  const VectorField3 fine = band_limited_field(Grid(1.0, 1.0, 24, 24), 3);
  for (int c = 0; c < 3; ++c) CHECK(fine.at(1 * 24 + 1)[c] == doctest::Approx(a.at(0)[c]).epsilon(1e-12));
}

TEST_CASE("finite-difference gradient oracle on a cosine") {
  const Grid g(1.0, 1.0, 64, 64);
  VectorField3 f(g);
  for (std::size_t ix = 0; ix < g.nx; ++ix) {
    for (std::size_t iy = 0; iy < g.ny; ++iy) f.set(g.index(ix, iy), {std::cos(kPi * g.x(ix)), 0, 0});
  }
  const ScalarField gs = fd_gradient_sq(f);
  for (std::size_t ix = 2; ix + 2 < g.nx; ++ix) {
    const double s = kPi * std::sin(kPi * g.x(ix));
    CHECK(gs[g.index(ix, 5)] == doctest::Approx(s * s).epsilon(5e-3).scale(1.0));
  }
}

TEST_CASE("RK4 macrospin oracle keeps unit length and converges") {
  const Vec3 a = macrospin_rk4({1, 0, 0}, {0, 0, 3}, 2.0, 1000);
  CHECK(dot(a, a) == doctest::Approx(1.0).epsilon(1e-10));
  const Vec3 ex = macrospin_exact(kPi / 2, 3.0, 2.0);
  for (int c = 0; c < 3; ++c) CHECK(a[c] == doctest::Approx(ex[c]).epsilon(1e-9).scale(1.0));
  // Zero field: nothing moves.
  const Vec3 still = macrospin_rk4({0.6, 0, 0.8}, {0, 0, 0}, 1.0, 10);
  CHECK(still[0] == 0.6);
  CHECK(still[2] == 0.8);
}

TEST_CASE("sphere constraint check") {
  const Grid g(1.0, 1.0, 8, 8);
  const Trajectory unit = Trajectory::constant(VectorField3::uniform(g, {0, 0, 1}), 1.0, 4);
  const CheckResult r = check_sphere_constraint(unit, 1e-12);
  CHECK(r.passed);
  CHECK(r.measured == 0.0);
  const Trajectory off = Trajectory::constant(VectorField3::uniform(g, {0, 0, 1.1}), 1.0, 4);
  CHECK_FALSE(check_sphere_constraint(off, 1e-3).passed);
}

TEST_CASE("energy monitors") {
  const Grid g(1.0, 1.0, 16, 16);
  // Stationary: everything is zero and the bound holds with equality.
  const Trajectory m = Trajectory::constant(VectorField3::uniform(g, {0, 0, 1}), 1.0, 8);
  const Trajectory u = Trajectory::zeros(g, 1.0, 8);
  CHECK(check_energy_e1(m, u).passed);
  CHECK(check_energy_e2(m, u).passed);

  // Small-data perturbed run.
  const Scenario sc = perturbed_scenario(g, 0.5, 1.0, 0.5);
  const Trajectory uc = sc.sample_control(64);
  const ForwardSolution sol = solve_forward(sc.m0, uc, 0.5, ep(64));
  CHECK(check_energy_e1(sol.m, uc).passed);
  CHECK(check_energy_e2(sol.m, uc).passed);
  const EnergySeries es = energy_series(sol.diagnostics, uc);
  REQUIRE(es.t.size() == 65);
  CHECK(es.e1_rhs[0] == doctest::Approx(4.0 * sol.diagnostics[0].grad_l2sq));
  CHECK(es.e1_lhs[0] == doctest::Approx(sol.diagnostics[0].grad_l2sq));
  for (std::size_t k = 1; k < es.t.size(); ++k) CHECK(es.e1_rhs[k] >= es.e1_rhs[k - 1]);
}

TEST_CASE("vector-product identity") {
  const Grid g(1.0, 1.0, 32, 32);
  CHECK(check_vpi_identity(VectorField3::uniform(g, {0.2, 0.3, 0.4})).measured < 1e-12);
  VectorField3 one_mode(g);
  for (std::size_t ix = 0; ix < g.nx; ++ix) {
    for (std::size_t iy = 0; iy < g.ny; ++iy) {
      one_mode.set(g.index(ix, iy), {std::cos(kPi * g.x(ix)), 0.5, std::cos(kPi * g.y(iy))});
    }
  }
  CHECK(check_vpi_identity(one_mode).passed);
  CHECK(check_vpi_identity(perturbed_scenario(g, 1.0, 1.0).m0).passed);
  // Under-resolved: modes at the top of the grid alias in the product.
  const Grid coarse(1.0, 1.0, 6, 6);
  VectorField3 rough(coarse);
  for (std::size_t ix = 0; ix < coarse.nx; ++ix) {
    for (std::size_t iy = 0; iy < coarse.ny; ++iy) rough.set(coarse.index(ix, iy), {std::cos(5 * kPi * coarse.x(ix)), 0, 0});
  }
  CHECK_FALSE(check_vpi_identity(rough).passed);
}

TEST_CASE("Taylor test in degenerate directions") {
  const Grid g(1.0, 1.0, 8, 8);
  const Scenario sc = perturbed_scenario(g, 0.25, 1.0);
  const OcpSpec spec = attainable_problem(sc.m0, 0.25, ep(16));
  const Trajectory u = Trajectory::zeros(g, 0.25, 16);
  // Zero direction: both sides vanish.
  const CheckResult zero = taylor_test_gradient(spec, u, Trajectory::zeros(g, 0.25, 16), {1e-3}, ep(16));
  CHECK(zero.passed);
  CHECK(check_zero_adjoint(sc.m0, 0.25, ep(16)).passed);
}

TEST_CASE("gradient checks on a small problem") {
  const Grid g(1.0, 1.0, 12, 12);
  const CheckResult r = check_gradient_refinement(g, 0.5, ep(64), 2, 1);
  CHECK(r.passed);
  CHECK(r.measured <= 1e-2);
  CHECK(check_gradient_identity(Grid(2.0, 1.0, 12, 8), 0.5, 8, 3).passed);
}

TEST_CASE("formulation cross-check on stationary data is exact") {
  const Grid g(1.0, 1.0, 8, 8);
  const CheckResult r = cross_check_formulations(stationary_scenario(g, 0.01), {64, 128, 256}, ep(64));
  CHECK(r.passed);
  CHECK(r.measured < 1e-14);
}

TEST_CASE("suite runner") {
  VerifyOptions o;
  const auto& names = suite_names();
  CHECK(std::find(names.begin(), names.end(), "transforms") != names.end());
  CHECK(std::find(names.begin(), names.end(), "all") != names.end());
  try {
    run_suite("nonsense", o);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "verify.suite");
  }
  const auto results = run_suite("transforms", o);
  REQUIRE_FALSE(results.empty());
  for (const CheckResult& r : results) CHECK_MESSAGE(r.passed, format_result_line(r));
}

TEST_CASE("result formatting") {
  CheckResult r;
  r.name = "demo";
  r.passed = true;
  r.measured = 0.5;
  r.tolerance = 1.0;
  r.series = {1.0, 0.5, 0.25};
  r.order = 1.0;
  const std::string line = format_result_line(r);
  CHECK(line.rfind("PASS demo", 0) == 0);
  CHECK(line.find("order=") != std::string::npos);
  r.passed = false;
  r.note = "outside small-data regime";
  CHECK(format_result_line(r).rfind("FAIL demo", 0) == 0);
  std::ostringstream csv;
  write_results_csv(csv, {r});
  CHECK(csv.str().rfind("name,passed,measured,tolerance,order,series,note\n", 0) == 0);
  CHECK(csv.str().find("outside small-data regime") != std::string::npos);
}

TEST_CASE("energy suite outside the small-data regime is labelled") {
  VerifyOptions o;
  o.grid = Grid(1.0, 1.0, 16, 16);
  o.solver.nt = 256;
  o.energy_scale = 50.0;
  const auto results = energy_suite(o);
  bool any_failed = false;
  for (const CheckResult& r : results) {
    if (!r.passed && r.name.find("budget") == std::string::npos) {
      any_failed = true;
      CHECK(r.note.find("outside small-data regime") != std::string::npos);
    }
  }
  CHECK(any_failed);
}
