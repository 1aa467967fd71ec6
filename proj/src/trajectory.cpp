#include "cvxnav/trajectory.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include <array>
#include <memory>

#include "cvxnav/errors.hpp"

namespace cvxnav {

namespace {

struct SplineDeleter {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};

// Evaluation without an accelerator is read-only, so one spline can be shared
// between threads.
using SharedSpline = std::shared_ptr<gsl_spline>;

SharedSpline make_spline(std::span<const double> x, const std::vector<double>& y) {
  SharedSpline s(gsl_spline_alloc(gsl_interp_cspline, x.size()), SplineDeleter{});
  if (!s) throw NumericalError(ErrorKind::InvalidArgument, "spline allocation failed");
  if (gsl_spline_init(s.get(), x.data(), y.data(), x.size()) != GSL_SUCCESS) {
    throw NumericalError(ErrorKind::InvalidArgument, "spline initialization failed");
  }
  return s;
}

}  // namespace

Trajectory<3> helix_trajectory(const Vec3& center, double radius, double omega, double phase, double axial_speed,
                               double t_start, double t_end) {
  Trajectory<3> tr = circle_trajectory<3>(center, radius, omega, phase, t_start, t_end);
  auto c = tr.c;
  auto cdot = tr.cdot;
  tr.c = [c, axial_speed](double t) {
    Vec3 p = c(t);
    p.z() += axial_speed * t;
    return p;
  };
  tr.cdot = [cdot, axial_speed](double t) {
    Vec3 p = cdot(t);
    p.z() += axial_speed;
    return p;
  };
  return tr;
}

template <int Dim>
Trajectory<Dim> spline_trajectory(std::span<const double> times, std::span<const VecN<Dim>> points) {
  if (times.size() != points.size()) {
    throw NumericalError(ErrorKind::InvalidArgument, "spline: times and points differ in length");
  }
  if (times.size() < 3) throw NumericalError(ErrorKind::InvalidArgument, "spline: need at least 3 samples");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw NumericalError(ErrorKind::InvalidArgument, "spline: sample times must be strictly increasing");
    }
  }
  gsl_set_error_handler_off();
  std::array<SharedSpline, Dim> splines;
  for (int d = 0; d < Dim; ++d) {
    std::vector<double> y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) y[i] = points[i](d);
    splines[d] = make_spline(times, y);
  }
  const double t0 = times.front();
  const double t1 = times.back();
  Trajectory<Dim> tr;
  tr.c = [splines, t0, t1](double t) {
    VecN<Dim> p;
    const double tc = std::min(std::max(t, t0), t1);
    for (int d = 0; d < Dim; ++d) p(d) = gsl_spline_eval(splines[d].get(), tc, nullptr);
    return p;
  };
  tr.cdot = [splines, t0, t1](double t) {
    VecN<Dim> p;
    const double tc = std::min(std::max(t, t0), t1);
    for (int d = 0; d < Dim; ++d) p(d) = gsl_spline_eval_deriv(splines[d].get(), tc, nullptr);
    return p;
  };
  tr.t_start = t0;
  tr.t_end = t1;
  tr.source = TrajectorySource::Spline;
  return tr;
}

template Trajectory<2> spline_trajectory<2>(std::span<const double>, std::span<const Vec2>);
template Trajectory<3> spline_trajectory<3>(std::span<const double>, std::span<const Vec3>);

}  // namespace cvxnav
