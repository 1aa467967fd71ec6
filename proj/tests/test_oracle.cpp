#include <random>
#include <vector>

#include "cvxnav/checks.hpp"
#include "cvxnav/kernels.hpp"
#include "cvxnav/oracle.hpp"
#include "cvxnav/shapiro.hpp"
#include "support.hpp"

using namespace cvxnav;
using namespace cvxnav::test;

namespace {

const Surface3D& ellipsoid() {
  static const Surface3D s = builtin_surface("ellipsoid_of_revolution", {{"kappa", 1.0 / 9.0}});
  return s;
}

template <int Dim>
VecN<Dim> random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VecN<Dim> v;
  for (int i = 0; i < Dim; ++i) v(i) = nd(rng);
  return v.normalized();
}

}  // namespace

TEST_CASE("reference projections") {
  SUBCASE("sphere, radial point above the pole") {
    const Projection3D p = project_parametric(builtin_surface("sphere", {{"kappa", 1.0}}), Vec3(0, 0, 3));
    CHECK(p.distance == doctest::Approx(2.0).epsilon(1e-12));
    CHECK((p.nearest - Vec3(0, 0, 1)).norm() <= 1e-6);
  }
  SUBCASE("cylinder") {
    const Projection3D p = project_parametric(builtin_surface("cylinder", {{"kappa", 1.0}}), Vec3(0, 2, 5));
    CHECK(std::abs(p.distance - 1) <= 1e-12);
    CHECK((p.nearest - Vec3(0, 1, 5)).norm() <= 1e-10);
  }
  SUBCASE("ellipsoid") {
    const Projection3D p = project_parametric(ellipsoid(), Vec3(2, 0, 0));
    CHECK(std::abs(p.distance - 1) <= 1e-12);
    CHECK(p.newton_iterations < 100);
    CHECK_FALSE(p.used_fallback);
  }
  SUBCASE("disk") {
    const Projection2D p = project_parametric(unit_circle(), Vec2(-3, 4));
    CHECK(std::abs(p.distance - 4) <= 1e-12);
    CHECK((p.nearest - Vec2(-0.6, 0.8)).norm() <= 1e-10);
  }
}

TEST_CASE("projection result invariants") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ud(-6, 6);
  for (int k = 0; k < 30; ++k) {
    Vec3 x(ud(rng), ud(rng), ud(rng));
    if (x.head<2>().norm() < 1.2) x.x() += 3;
    const Projection3D p = project_parametric(ellipsoid(), x);
    CHECK(std::abs(p.theta.norm() - 1) <= 1e-12);
    CHECK((p.nearest + p.distance * p.theta - x).norm() <= 1e-8);
    CHECK((ellipsoid().eval(p.params[0], p.params[1]) - p.nearest).norm() <= 1e-15);
  }
}

TEST_CASE("oracle beats dense random boundary samples") {
  const auto samples3 = random_boundary_samples(ellipsoid(), 100000, kDefaultSeed);
  const Curve2D ellipse = builtin_curve("ellipse", {{"a", 3.0}, {"b", 0.5}});
  const auto samples2 = random_boundary_samples(ellipse, 100000, kDefaultSeed);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ud(-5, 5);
  for (int k = 0; k < 10; ++k) {
    const Vec3 x(3 + std::abs(ud(rng)), ud(rng), ud(rng));
    const double best = std::sqrt(parallel::nearest_sample<3>(samples3, x).value);
    CHECK(project_parametric(ellipsoid(), x).distance <= best);
    const Vec2 y(ud(rng), 1 + std::abs(ud(rng)));
    CHECK(project_parametric(ellipse, y).distance <= std::sqrt(parallel::nearest_sample<2>(samples2, y).value));
  }
}

TEST_CASE("serial and parallel grid give identical projections") {
  OracleOptions serial_opt;
  serial_opt.parallel = false;
  for (const Vec3& x : {Vec3(2, 0.5, 1), Vec3(-1, -2, 4), Vec3(0.3, 0.1, -5)}) {
    const Projection3D a = project_parametric(ellipsoid(), x, serial_opt);
    const Projection3D b = project_parametric(ellipsoid(), x);
    CHECK(a.nearest == b.nearest);
    CHECK(a.distance == b.distance);
  }
}

TEST_CASE("elongated ellipsoid: grid search avoids the wrong basin") {
  // Near the long axis of a cigar the equator is a local but not global
  // minimizer for points well off-centre.
  const Surface3D cigar = builtin_surface("ellipsoid_of_revolution", {{"kappa", 1.0 / 100.0}});
  const Vec3 x(1.5, 0, 9.0);
  const Projection3D p = project_parametric(cigar, x);
  const auto samples = random_boundary_samples(cigar, 200000, 1);
  CHECK(p.distance <= std::sqrt(serial::nearest_sample<3>(samples, x).value));
  CHECK(p.nearest.z() > 5.0);
}

TEST_CASE("distance gradient on the unit disk") {
  auto project = [](const Vec2& x) { return project_parametric(unit_circle(), x); };
  SUBCASE("radial direction: quotient is exactly affine") {
    const GradientReport g = distance_gradient_check<2>(project, Vec2(2, 0), Vec2(1, 0));
    CHECK(g.theta_dot_dir == doctest::Approx(1.0).epsilon(1e-15));
    for (double q : g.quotients) CHECK(std::abs(q - 1) <= 1e-9);
  }
  SUBCASE("tangential direction") {
    const GradientReport g = distance_gradient_check<2>(project, Vec2(2, 0), Vec2(0, 1));
    CHECK(std::abs(g.theta_dot_dir) <= 1e-15);
    CHECK(g.discrepancy[2] <= 1e-4);
    // Closed form: [sqrt(4 + t^2) - 2] / t.
    for (std::size_t k = 0; k < 3; ++k) {
      const double t = g.steps[k];
      CHECK(std::abs(g.quotients[k] - (std::sqrt(4 + t * t) - 2) / t) <= 1e-10);
    }
    CHECK(g.decreasing);
  }
}

TEST_CASE("distance gradient on the Shapiro set at x = 2") {
  const PiecewiseBoundary b = build_shapiro(0.5, kPi / 2, 30);
  auto project = [&](const Vec2& x) { return project_piecewise(b, x); };
  std::mt19937_64 rng(kDefaultSeed);
  for (int k = 0; k < 10; ++k) {
    const GradientReport g = distance_gradient_check<2>(project, Vec2(2, 0), random_unit<2>(rng));
    CHECK(g.discrepancy[2] <= 1e-3);
    CHECK(g.decreasing);
  }
}

TEST_CASE("gradient law holds with order one on built-ins") {
  std::mt19937_64 rng(kDefaultSeed);
  std::uniform_real_distribution<double> ut(0.0, 6.0);
  const Surface3D bodies[] = {builtin_surface("cylinder", {{"kappa", 1.0}}), ellipsoid(),
                              builtin_surface("sphere", {{"kappa", 2.0}})};
  int cases = 0;
  for (int k = 0; k < 20; ++k) {
    const Surface3D& s = bodies[k % 3];
    const double t = ut(rng);
    const Vec3 x(2 + 0.2 * t, t - 3, 0.5 * t);
    const Vec3 dir = random_unit<3>(rng);
    auto project = [&](const Vec3& p) { return project_parametric(s, p); };
    const GradientReport g = distance_gradient_check<3>(project, x, dir);
    CHECK(g.decreasing);
    CHECK(g.discrepancy[2] <= 1e-3);
    // Observed order from the two largest steps, where rounding is irrelevant.
    if (g.discrepancy[1] > 1e-9) {
      CHECK(std::log10(g.discrepancy[0] / g.discrepancy[1]) >= 0.9);
    }
    ++cases;
  }
  CHECK(cases == 20);
}

TEST_CASE("projection continuity") {
  auto disk = [](const Vec2& x) { return project_parametric(unit_circle(), x); };
  SUBCASE("disk: modulus is about h/2") {
    const ContinuityReport c = projection_continuity_check<2>(disk, Vec2(2, 0), Vec2(0, 1));
    CHECK(c.bounded);
    for (std::size_t k = 1; k < c.steps.size(); ++k) {
      CHECK(std::abs(c.moduli[k] / c.steps[k] - 0.5) <= 0.01);
    }
  }
  SUBCASE("zero step") { CHECK(projection_modulus<2>(disk, Vec2(2, 0), Vec2(0, 1), 0.0) == 0.0); }
  SUBCASE("square: projection pinned at a vertex") {
    const Vec2 corners[] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    const PiecewiseBoundary sq = polygon_boundary(corners);
    auto project = [&](const Vec2& x) { return project_piecewise(sq, x); };
    const ContinuityReport c = projection_continuity_check<2>(project, Vec2(3, 3), Vec2(0.6, 0.8));
    for (double m : c.moduli) CHECK(m == 0.0);
    CHECK((project(Vec2(3, 3)).nearest - Vec2(1, 1)).norm() == 0.0);
  }
  SUBCASE("nonexpansive on random built-in cases") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 10; ++k) {
      auto project = [](const Vec3& x) { return project_parametric(ellipsoid(), x); };
      const Vec3 x = Vec3(2.5, 0, 0) + 0.5 * random_unit<3>(rng);
      CHECK(projection_continuity_check<3>(project, x, random_unit<3>(rng)).bounded);
    }
  }
}

TEST_CASE("projection speed on the unit circle") {
  // A unit-speed straight flyby: |dPi/dt| = |tangential velocity| / (1 + r).
  const Vec2 c0(-3, 1.5), cd(1, 0);
  for (double t : {0.5, 2.0, 3.0, 4.5}) {
    const double h = 1e-5;
    const Vec2 a = project_parametric(unit_circle(), c0 + (t - h) * cd).nearest;
    const Vec2 b = project_parametric(unit_circle(), c0 + (t + h) * cd).nearest;
    const Projection2D p = project_parametric(unit_circle(), c0 + t * cd);
    const Vec2 tangent = perp(p.theta);
    const double expected = std::abs(tangent.dot(cd)) / (1 + p.distance);
    CHECK(std::abs((b - a).norm() / (2 * h) - expected) <= 1e-4);
  }
}

TEST_CASE("random boundary samples are reproducible") {
  const auto a = random_boundary_samples(ellipsoid(), 100, 42);
  const auto b = random_boundary_samples(ellipsoid(), 100, 42);
  const auto c = random_boundary_samples(ellipsoid(), 100, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
}
