#include <vector>

#include "cvxnav/integrator.hpp"
#include "support.hpp"

using namespace cvxnav;
using namespace cvxnav::test;

TEST_CASE("exponential growth and decay in both directions") {
  auto rhs = [](double, const VecN<1>& y) { return VecN<1>(y); };
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-10;
  const std::vector<double> fwd{0.5, 1.0, 2.0, 3.0};
  const std::vector<double> bwd{-0.5, -2.0, -3.0};
  for (const auto* times : {&fwd, &bwd}) {
    std::vector<double> got;
    dopri5<1>(rhs, 0.0, VecN<1>(1.0), *times, opt, [&](double, const VecN<1>& y) { got.push_back(y(0)); });
    REQUIRE(got.size() == times->size());
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(std::abs(got[k] - std::exp((*times)[k])) <= 1e-8 * std::exp((*times)[k]));
    }
  }
}

TEST_CASE("harmonic oscillator through dense output") {
  auto rhs = [](double, const Vec2& y) { return Vec2(y(1), -y(0)); };
  OdeOptions opt;
  opt.abs_tol = opt.rel_tol = 1e-11;
  std::vector<double> times;
  for (int k = 1; k <= 200; ++k) times.push_back(0.05 * k);
  double worst = 0.0;
  const OdeStats st = dopri5<2>(rhs, 0.0, Vec2(1, 0), times, opt, [&](double t, const Vec2& y) {
    worst = std::max(worst, (y - Vec2(std::cos(t), -std::sin(t))).norm());
  });
  CHECK(worst <= 1e-8);
  // Output points do not force steps: one final output takes the same steps.
  const std::vector<double> last{times.back()};
  const OdeStats single = dopri5<2>(rhs, 0.0, Vec2(1, 0), last, opt, [](double, const Vec2&) {});
  CHECK(st.accepted == single.accepted);
  CHECK(st.rhs_evals > 0);
}

TEST_CASE("output at the initial time returns the initial state") {
  auto rhs = [](double, const Vec2& y) { return Vec2(y(1), -y(0)); };
  const std::vector<double> times{0.0};
  Vec2 seen(0, 0);
  dopri5<2>(rhs, 0.0, Vec2(0.3, -0.7), times, OdeOptions{}, [&](double, const Vec2& y) { seen = y; });
  CHECK(seen == Vec2(0.3, -0.7));
}

TEST_CASE("finite-time blow-up aborts with step underflow") {
  auto rhs = [](double, const VecN<1>& y) { return VecN<1>(y(0) * y(0)); };
  const std::vector<double> times{2.0};
  CHECK(throws_kind(
      [&] { dopri5<1>(rhs, 0.0, VecN<1>(1.0), times, OdeOptions{}, [](double, const VecN<1>&) {}); },
      ErrorKind::StepUnderflow));
}

TEST_CASE("normalize hook wraps every accepted state") {
  auto rhs = [](double, const VecN<1>&) { return VecN<1>(1.0); };
  const std::vector<double> times{0.9, 2.5, 7.25};
  std::vector<double> got;
  dopri5<1>(
      rhs, 0.0, VecN<1>(0.0), times, OdeOptions{}, [](VecN<1>& y) { y(0) = std::fmod(y(0), 1.0); },
      [](double, VecN<1>&) { return StepAction::Continue; }, [&](double, const VecN<1>& y) { got.push_back(y(0)); });
  REQUIRE(got.size() == 3);
  CHECK(got[0] == doctest::Approx(0.9));
  CHECK(got[1] == doctest::Approx(0.5));
  CHECK(got[2] == doctest::Approx(0.25));
}

TEST_CASE("post-step restart replaces the state") {
  auto rhs = [](double, const VecN<1>&) { return VecN<1>(1.0); };
  const std::vector<double> times{4.0};
  bool fired = false;
  double final_value = 0.0;
  const OdeStats st = dopri5<1>(
      rhs, 0.0, VecN<1>(0.0), times, OdeOptions{}, [](VecN<1>&) {},
      [&](double t, VecN<1>& y) {
        if (!fired && t > 1.0) {
          fired = true;
          y(0) = 100.0 + t;
          return StepAction::Restart;
        }
        return StepAction::Continue;
      },
      [&](double, const VecN<1>& y) { final_value = y(0); });
  CHECK(st.restarts == 1);
  CHECK(final_value == doctest::Approx(104.0).epsilon(1e-12));
}

TEST_CASE("max_step bounds every step") {
  auto rhs = [](double, const VecN<1>&) { return VecN<1>(0.0); };
  OdeOptions opt;
  opt.max_step = 0.1;
  const std::vector<double> times{5.0};
  const OdeStats st = dopri5<1>(rhs, 0.0, VecN<1>(1.0), times, opt, [](double, const VecN<1>&) {});
  CHECK(st.max_step <= 0.1 + 1e-15);
  CHECK(st.accepted >= 50);
}

TEST_CASE("tighter tolerances do not increase the error") {
  auto rhs = [](double t, const VecN<1>& y) { return VecN<1>(-2.0 * t * y(0)); };
  const std::vector<double> times{3.0};
  double prev = 1.0;
  for (double tol : {1e-4, 1e-6, 1e-8, 1e-10}) {
    OdeOptions opt;
    opt.abs_tol = opt.rel_tol = tol;
    double err = 0.0;
    dopri5<1>(rhs, 0.0, VecN<1>(1.0), times, opt,
              [&](double t, const VecN<1>& y) { err = std::abs(y(0) - std::exp(-t * t)); });
    CHECK(err <= prev);
    prev = err;
  }
}
