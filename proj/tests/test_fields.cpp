#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "llg/errors.hpp"
#include "llg/fields.hpp"
#include "llg/spectral.hpp"

using namespace llg;

namespace {

VectorField3 random_vector(const Grid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  VectorField3 f(g);
  for (double& v : f.data()) v = n(rng);
  return f;
}

const Grid kGrid(2.0, 1.0, 8, 6);

}  // namespace

TEST_CASE("cross product of basis vectors") {
  const VectorField3 e1 = VectorField3::uniform(kGrid, {1, 0, 0});
  const VectorField3 e2 = VectorField3::uniform(kGrid, {0, 1, 0});
  const VectorField3 e3 = VectorField3::uniform(kGrid, {0, 0, 1});
  CHECK(cross(e1, e2) == e3);
  CHECK(cross(e2, e3) == e1);
  CHECK(cross(e3, e1) == e2);
  CHECK(cross(e1, e1).max_abs() == 0.0);
}

TEST_CASE("pointwise identities on random fields") {
  const VectorField3 a = random_vector(kGrid, 1);
  const VectorField3 b = random_vector(kGrid, 2);
  const VectorField3 c = random_vector(kGrid, 3);
  const VectorField3 axb = cross(a, b);
  const ScalarField orth = dot(a, axb);
  for (double v : orth.values()) CHECK(std::abs(v) < 1e-13);
  CHECK((axb + cross(b, a)).max_abs() < 1e-15);

  // a x (b x c) = b (a.c) - c (a.b)
  const VectorField3 lhs = cross(a, cross(b, c));
  const VectorField3 rhs = scale(dot(a, c), b) - scale(dot(a, b), c);
  CHECK((lhs - rhs).max_abs() < 1e-13);

  // Bilinearity.
  const VectorField3 lin = cross(2.5 * a + b, c) - (2.5 * cross(a, c) + cross(b, c));
  CHECK(lin.max_abs() < 1e-13);
}

TEST_CASE("effective field is Laplacian plus control") {
  const VectorField3 m = VectorField3::uniform(kGrid, {0, 0, 1});
  const VectorField3 u = random_vector(kGrid, 4);
  CHECK((effective_field(m, u) - u).max_abs() < 1e-13);
}

TEST_CASE("sphere defect and renormalization") {
  CHECK(sphere_defect(VectorField3::uniform(kGrid, {0, 0, 1})) == 0.0);
  CHECK(sphere_defect(VectorField3::uniform(kGrid, {0, 0, 2})) == doctest::Approx(3.0));
  const VectorField3 r = renormalize(random_vector(kGrid, 5));
  CHECK(sphere_defect(r) < 1e-14);
  const VectorField3 two = renormalize(VectorField3::uniform(kGrid, {0, 2, 0}));
  CHECK(two == VectorField3::uniform(kGrid, {0, 1, 0}));

  VectorField3 hole = VectorField3::uniform(kGrid, {1, 0, 0});
  hole.set(7, {0, 0, 0});
  CHECK_THROWS_AS(renormalize(hole), DegenerateFieldError);
}

TEST_CASE("field algebra and shape checks") {
  const VectorField3 a = random_vector(kGrid, 6);
  VectorField3 b = a;
  b.axpy(-1.0, a);
  CHECK(b.max_abs() == 0.0);
  VectorField3 c = a;
  c *= 0.0;
  CHECK(c.max_abs() == 0.0);
  CHECK(a.all_finite());
  VectorField3 bad = a;
  bad.data()[3] = std::nan("");
  CHECK_FALSE(bad.all_finite());

  const VectorField3 other(Grid(2.0, 1.0, 8, 8));
  CHECK_THROWS_AS(cross(a, other), ShapeError);
  CHECK_THROWS_AS(VectorField3(kGrid, std::vector<double>(5)), ShapeError);
}

TEST_CASE("trajectory construction") {
  const Trajectory z = Trajectory::zeros(kGrid, 2.0, 10);
  CHECK(z.steps() == 10);
  CHECK(z.size() == 11);
  CHECK(z.dt() == doctest::Approx(0.2));
  CHECK(z.time(10) == doctest::Approx(2.0));
  CHECK(z.grid() == kGrid);

  std::vector<VectorField3> frames{VectorField3(kGrid), VectorField3(Grid(1.0, 1.0, 8, 6))};
  CHECK_THROWS_AS(Trajectory(1.0, frames), ShapeError);
  CHECK_THROWS_AS(Trajectory(1.0, std::vector<VectorField3>{VectorField3(kGrid)}), ShapeError);
  CHECK_THROWS_AS(Trajectory(0.0, std::vector<VectorField3>(2, VectorField3(kGrid))), ShapeError);

  const Trajectory a = Trajectory::constant(VectorField3::uniform(kGrid, {1, 0, 0}), 1.0, 4);
  const Trajectory b = Trajectory::zeros(kGrid, 1.0, 5);
  Trajectory s = a;
  CHECK_THROWS_AS(s += b, ShapeError);
  s.axpy(2.0, a);
  CHECK(s[3] == VectorField3::uniform(kGrid, {3, 0, 0}));
}

TEST_CASE("trapezoid weights integrate constants and linears exactly") {
  for (std::size_t n : {1, 2, 7, 64}) {
    const double dt = 3.0 / static_cast<double>(n);
    double total = 0.0;
    double lin = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      total += trapezoid_weight(k, n, dt);
      lin += trapezoid_weight(k, n, dt) * (k * dt);
    }
    CHECK(total == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(lin == doctest::Approx(4.5).epsilon(1e-14));
  }
  CHECK(trapezoid_weight(0, 4, 0.5) == 0.25);
  CHECK(trapezoid_weight(2, 4, 0.5) == 0.5);
}
