#pragma once

// Embedded Runge-Kutta 5(4) (Dormand-Prince) with PI step-size control and
// the usual 4th-order continuous extension for output at arbitrary times.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

#include "cvxnav/errors.hpp"
#include "cvxnav/geometry.hpp"

namespace cvxnav {

struct OdeOptions {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects automatically
  long max_steps = 10'000'000;
};

struct OdeStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
  long restarts = 0;
  double min_step = std::numeric_limits<double>::infinity();
  double max_step = 0.0;
};

enum class StepAction { Continue, Restart };

namespace detail {

struct DopriTableau {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                          a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

}  // namespace detail

// Integrates y' = rhs(t, y) from (t0, y0) and reports the solution at each of
// t_out, which must be monotone in the direction of integration and start at
// or after t0. Hooks:
//   normalize(y)          applied to every accepted state (parameter wrap)
//   post_step(t, y)       after every accepted step; may replace y and return
//                         StepAction::Restart, or throw to abort
//   observe(t, y)         at each requested output time
template <int N, class Rhs, class Normalize, class PostStep, class Observe>
OdeStats dopri5(Rhs&& rhs, double t0, VecN<N> y0, std::span<const double> t_out, const OdeOptions& opt,
                Normalize&& normalize, PostStep&& post_step, Observe&& observe) {
  using State = VecN<N>;
  using T = detail::DopriTableau;
  OdeStats stats;
  if (t_out.empty()) return stats;

  const double t_final = t_out.back();
  const double dir = t_final >= t0 ? 1.0 : -1.0;
  const double span = std::abs(t_final - t0);
  std::size_t next = 0;
  while (next < t_out.size() && t_out[next] == t0) observe(t0, y0), ++next;
  if (next == t_out.size()) return stats;

  auto scale = [&](const State& a, const State& b) {
    return (opt.abs_tol + opt.rel_tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix().eval();
  };
  auto rms = [](const State& v) { return std::sqrt(v.squaredNorm() / N); };

  double t = t0;
  State y = y0;
  State k1 = rhs(t, y);
  ++stats.rhs_evals;

  auto initial_step = [&]() {
    if (opt.initial_step > 0) return std::min(opt.initial_step, opt.max_step);
    const State sk = scale(y, y);
    const double d0 = rms(y.cwiseQuotient(sk));
    const double d1 = rms(k1.cwiseQuotient(sk));
    double h0 = (d0 < 1e-10 || d1 < 1e-10) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, opt.max_step);
    const State y1 = y + dir * h0 * k1;
    const State f1 = rhs(t + dir * h0, y1);
    ++stats.rhs_evals;
    const double d2 = rms((f1 - k1).cwiseQuotient(sk)) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100 * h0, h1, opt.max_step});
  };

  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double safe = 0.9;
  constexpr double facc1 = 1.0 / 0.2;
  constexpr double facc2 = 1.0 / 10.0;
  double facold = 1e-4;
  bool last_rejected = false;

  double h = std::min(initial_step(), span);
  const double h_floor = 1e-14 * std::max(span, 1.0);

  while (next < t_out.size()) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw NumericalError(ErrorKind::StepUnderflow, "step budget exhausted at t=" + std::to_string(t));
    }
    if (h < h_floor) {
      throw NumericalError(ErrorKind::StepUnderflow, "step size " + std::to_string(h) + " at t=" + std::to_string(t));
    }
    const double remaining = std::abs(t_final - t);
    bool hits_end = false;
    if (h >= remaining) {
      h = remaining;
      hits_end = true;
    }
    const double hs = dir * h;

    const State k2 = rhs(t + T::c2 * hs, y + hs * (T::a21 * k1));
    const State k3 = rhs(t + T::c3 * hs, y + hs * (T::a31 * k1 + T::a32 * k2));
    const State k4 = rhs(t + T::c4 * hs, y + hs * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3));
    const State k5 = rhs(t + T::c5 * hs, y + hs * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4));
    const State k6 =
        rhs(t + hs, y + hs * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5));
    const State y1 = y + hs * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
    const double t1 = hits_end ? t_final : t + hs;
    const State k7 = rhs(t1, y1);
    stats.rhs_evals += 6;

    const State err = hs * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
    const double err_norm = rms(err.cwiseQuotient(scale(y, y1)));
    if (!std::isfinite(err_norm)) {
      h *= 0.1;
      last_rejected = true;
      ++stats.rejected;
      continue;
    }

    const double fac11 = std::pow(err_norm, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;

    if (err_norm > 1.0) {
      h = h / std::min(facc1, fac11 / safe);
      last_rejected = true;
      ++stats.rejected;
      continue;
    }

    facold = std::max(err_norm, 1e-4);
    ++stats.accepted;
    stats.min_step = std::min(stats.min_step, h);
    stats.max_step = std::max(stats.max_step, h);

    // Continuous extension on [t, t1].
    const State ydiff = y1 - y;
    const State bspl = hs * k1 - ydiff;
    const State r4 = ydiff - hs * k7 - bspl;
    const State r5 = hs * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 + T::d5 * k5 + T::d6 * k6 + T::d7 * k7);
    const State y_start = y;
    auto dense = [&](double tq) {
      const double theta = (tq - t) / hs;
      const double theta1 = 1.0 - theta;
      return State(y_start + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5))));
    };

    State y_next = y1;
    normalize(y_next);
    const StepAction action = post_step(t1, y_next);

    while (next < t_out.size() && dir * (t_out[next] - t1) <= 0.0) {
      State yo = t_out[next] == t1 ? y1 : dense(t_out[next]);
      normalize(yo);
      observe(t_out[next], yo);
      ++next;
    }

    t = t1;
    y = y_next;
    if (action == StepAction::Restart) {
      k1 = rhs(t, y);
      ++stats.rhs_evals;
      ++stats.restarts;
      facold = 1e-4;
      last_rejected = false;
      h = std::min(initial_step(), std::abs(t_final - t));
      continue;
    }
    k1 = k7;
    if (last_rejected) hnew = std::min(hnew, h);
    last_rejected = false;
    h = std::min(hnew, opt.max_step);
  }
  return stats;
}

// Convenience overload without hooks.
template <int N, class Rhs, class Observe>
OdeStats dopri5(Rhs&& rhs, double t0, VecN<N> y0, std::span<const double> t_out, const OdeOptions& opt,
                Observe&& observe) {
  return dopri5<N>(
      std::forward<Rhs>(rhs), t0, std::move(y0), t_out, opt, [](VecN<N>&) {},
      [](double, VecN<N>&) { return StepAction::Continue; }, std::forward<Observe>(observe));
}

}  // namespace cvxnav
