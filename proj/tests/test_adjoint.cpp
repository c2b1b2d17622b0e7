#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "llg/adjoint.hpp"
#include "llg/control.hpp"
#include "llg/errors.hpp"
#include "llg/scenario.hpp"
#include "llg/tangent.hpp"
#include "llg/verify.hpp"

using namespace llg;

namespace {

SolverConfig ep(std::size_t nt) {
  SolverConfig c;
  c.nt = nt;
  return c;
}

struct Base {
  Trajectory u;
  Trajectory m;
};

Base perturbed_base(const Grid& g, double T, std::size_t nt) {
  const Scenario sc = perturbed_scenario(g, T, 1.0, 0.5);
  Base b{sc.sample_control(nt), {}};
  b.m = solve_forward(sc.m0, b.u, T, ep(nt)).m;
  return b;
}

// Tracking data chosen so that m - m_d = s and m(T) - m_omega = tau.
Trajectory data_for_source(const Trajectory& m, const Trajectory& s) {
  Trajectory d = m;
  d.axpy(-1.0, s);
  return d;
}

}  // namespace

TEST_CASE("adjoint right-hand side in trivial cases") {
  const Grid g(1.0, 2.0, 12, 8);
  const VectorField3 e3 = VectorField3::uniform(g, {0, 0, 1});
  const VectorField3 zero(g);
  CHECK(adjoint_rhs(zero, e3, zero, e3).max_abs() == 0.0);

  // Uniform base state, no control: Laplace phi + Laplace(phi x e3).
  const VectorField3 phi = band_limited_field(g, 4, 3);
  const VectorField3 expect = laplacian(phi) + laplacian(cross(phi, e3));
  CHECK((adjoint_rhs(phi, e3, zero, e3) - expect).max_abs() <= 1e-12 * expect.max_abs());

  // The tracking residual enters additively.
  const VectorField3 md = VectorField3::uniform(g, {0.5, 0, 0.5});
  CHECK((adjoint_rhs(zero, e3, zero, md) - (e3 - md)).max_abs() < 1e-14);
}

TEST_CASE("adjoint operator is the transpose of the tangent operator") {
  for (const Grid& g : {Grid(1.0, 1.0, 16, 16), Grid(2.0, 0.5, 20, 12)}) {
    const Scenario sc = perturbed_scenario(g, 1.0, 1.0, 0.5);
    const VectorField3& m = sc.m0;
    const VectorField3 u = sc.control(0.2);
    const Derivatives dm = derivatives(m);
    const VectorField3 z = band_limited_field(g, 31, 4);
    const VectorField3 phi = band_limited_field(g, 32, 4);
    const double lhs = l2_inner(adjoint_explicit(phi, m, dm, u), z);
    const double rhs = l2_inner(tangent_explicit(z, derivatives(z), m, dm, u), phi);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("terminal condition") {
  const Grid g(1.0, 1.0, 8, 8);
  const VectorField3 a = band_limited_field(g, 1, 2);
  const VectorField3 b = band_limited_field(g, 2, 2);
  CHECK(terminal_condition(a, b) == a - b);
  CHECK(terminal_condition(a, a).max_abs() == 0.0);
}

TEST_CASE("uniform adjoint matches the closed-form rotation") {
  // Base m = e3 with u = h e3 is stationary. With m_d = m the adjoint solves
  //   -phi' = h (e3 x phi - phi_perp),  phi(T) = c e1,
  // so phi(0) = c exp(-hT) (cos hT, sin hT, 0).
  const Grid g(1.0, 1.0, 8, 8);
  const double T = 1.0;
  const double h = 0.5;
  const double c = 0.8;
  std::vector<double> errs;
  for (std::size_t nt : {1024, 2048, 4096}) {
    const VectorField3 e3 = VectorField3::uniform(g, {0, 0, 1});
    const Trajectory m = Trajectory::constant(e3, T, nt);
    const Trajectory u = Trajectory::constant(VectorField3::uniform(g, {0, 0, h}), T, nt);
    const VectorField3 m_omega = e3 - VectorField3::uniform(g, {c, 0, 0});
    const Trajectory phi = solve_adjoint({m, u, m, m_omega}, ep(nt));
    const Vec3 got = phi[0].at(5);
    const double decay = c * std::exp(-h * T);
    const Vec3 ex{decay * std::cos(h * T), decay * std::sin(h * T), 0.0};
    const Vec3 d{got[0] - ex[0], got[1] - ex[1], got[2] - ex[2]};
    errs.push_back(std::sqrt(dot(d, d)) / std::sqrt(dot(ex, ex)));
    CHECK(phi[nt].at(0)[0] == doctest::Approx(c));
  }
  CHECK(errs.back() <= 1e-4);
  CHECK(observed_order(errs).value() >= 0.9);
}

TEST_CASE("attainable data give an identically zero adjoint") {
  const Grid g(1.0, 1.0, 12, 12);
  const Base b = perturbed_base(g, 0.5, 32);
  const Trajectory phi = solve_adjoint({b.m, b.u, b.m, b.m.back()}, ep(32));
  for (const VectorField3& f : phi.frames()) CHECK(f.max_abs() == 0.0);
}

TEST_CASE("adjoint is linear in the tracking and terminal data") {
  const Grid g(1.5, 1.0, 12, 12);
  const double T = 0.5;
  const std::size_t nt = 32;
  const Base b = perturbed_base(g, T, nt);
  std::mt19937_64 rng(12);
  const Trajectory s1 = random_smooth_trajectory(g, T, nt, rng);
  const Trajectory s2 = random_smooth_trajectory(g, T, nt, rng);
  const VectorField3 t1 = band_limited_field(g, 5, 2);
  const VectorField3 t2 = band_limited_field(g, 6, 2);

  auto solve = [&](const Trajectory& s, const VectorField3& tau) {
    const Trajectory md = data_for_source(b.m, s);
    const VectorField3 mo = b.m.back() - tau;
    return solve_adjoint({b.m, b.u, md, mo}, ep(nt));
  };
  const Trajectory p1 = solve(s1, t1);
  const Trajectory p2 = solve(s2, t2);
  Trajectory s = s1;
  s *= -3.0;
  s += s2;
  const Trajectory p = solve(s, -3.0 * t1 + t2);
  double err = 0.0;
  double size = 0.0;
  for (std::size_t k = 0; k <= nt; ++k) {
    VectorField3 e = p[k];
    e.axpy(3.0, p1[k]);
    e -= p2[k];
    err = std::max(err, e.max_abs());
    size = std::max(size, p[k].max_abs());
  }
  CHECK(err <= 1e-10 * size);
}

TEST_CASE("adjoint representation of the state derivative converges at first order") {
  // sum_k w_k (s_k, z_k) + (tau, z_T) against sum_k w_k (phi_k, m_k x h_k - m_k x (m_k x h_k)),
  // with z the exact discrete tangent. The continuous adjoint carries an O(dt) mismatch.
  const Grid g(1.0, 1.0, 12, 12);
  const double T = 0.5;
  std::vector<double> mismatch;
  for (std::size_t nt : {32, 64, 128}) {
    const Base b = perturbed_base(g, T, nt);
    std::mt19937_64 rng(21);
    const Trajectory s = random_smooth_trajectory(g, T, nt, rng);
    const Trajectory h = random_smooth_trajectory(g, T, nt, rng);
    const VectorField3 tau = band_limited_field(g, 7, 2);
    const Trajectory phi = solve_adjoint({b.m, b.u, data_for_source(b.m, s), b.m.back() - tau}, ep(nt));
    const Trajectory z = solve_tangent(TangentInput::control(b.m, b.u, h), ep(nt));
    const double dt = T / static_cast<double>(nt);
    double lhs = l2_inner(tau, z.back());
    double rhs = 0.0;
    for (std::size_t k = 0; k <= nt; ++k) {
      const double w = trapezoid_weight(k, nt, dt);
      lhs += w * l2_inner(s[k], z[k]);
      rhs += w * l2_inner(phi[k], control_derivative_source(b.m[k], h[k]));
    }
    mismatch.push_back(std::abs(lhs - rhs) / std::abs(lhs));
  }
  CHECK(mismatch.front() <= 5e-2);
  CHECK(observed_order(mismatch).value() >= 0.8);
}

TEST_CASE("adjoint solve rejects the NLP form and mismatched data") {
  const Grid g(1.0, 1.0, 8, 8);
  const VectorField3 e3 = VectorField3::uniform(g, {0, 0, 1});
  const Trajectory m = Trajectory::constant(e3, 1.0, 4);
  const Trajectory u = Trajectory::zeros(g, 1.0, 4);
  SolverConfig nlp = ep(4);
  nlp.formulation = Formulation::NLP;
  CHECK_THROWS_AS(solve_adjoint({m, u, m, e3}, nlp), ConfigError);
  const Trajectory md = Trajectory::constant(e3, 1.0, 5);
  CHECK_THROWS_AS(solve_adjoint({m, u, md, e3}, ep(4)), ShapeError);
}
