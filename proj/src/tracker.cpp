#include "cvxnav/tracker.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "cvxnav/errors.hpp"

namespace cvxnav {

namespace {

std::string at_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "t=%.17g", t);
  return buf;
}

void require_outside(double r) {
  if (!(r > 0.0)) throw NumericalError(ErrorKind::InsideBody, "r=" + std::to_string(r));
}

void check_chart(const Surface3D& s, double u, double v) {
  if (s.near_singularity && s.near_singularity(u, v)) {
    throw NumericalError(ErrorKind::ChartSingularity,
                         "approaching chart singularity at (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  }
}

// Shared driver. `Traits` provides rhs, residual, wrap and reinit for one
// body type.
template <int N, class Traits>
TrackResult run(const Traits& tr, const TrackerState& init, const IntegratorConfig& cfg,
                std::span<const double> times, const StateSink& sink) {
  cfg.validate();
  TrackResult out;
  if (times.empty()) return out;

  const double dir = times.back() >= init.t ? 1.0 : -1.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!tr.traj.contains(times[i])) {
      throw NumericalError(ErrorKind::InvalidArgument, "output time outside trajectory domain: " + at_time(times[i]));
    }
    const double prev = i == 0 ? init.t : times[i - 1];
    if (dir * (times[i] - prev) < 0) {
      throw NumericalError(ErrorKind::InvalidArgument, "output times must be monotone from the initial time");
    }
  }

  VecN<N> y0 = tr.pack(init);
  const double res0 = tr.residual(init.t, y0);
  if (res0 > cfg.residual_tolerance) {
    throw NumericalError(ErrorKind::TrackingDiverged, "initial residual " + std::to_string(res0) + " at " +
                                                          at_time(init.t));
  }

  bool reinit_used = false;
  auto rhs = [&](double t, const VecN<N>& y) { return tr.rhs(t, y); };
  auto normalize = [&](VecN<N>& y) { tr.wrap(y); };
  auto post_step = [&](double t, VecN<N>& y) {
    const double res = tr.residual(t, y);
    if (res <= cfg.residual_tolerance) return StepAction::Continue;
    if (cfg.reinit_on_breach && !reinit_used) {
      reinit_used = true;
      out.reinit_events.push_back({t, res});
      y = tr.pack(tr.reinit(t));
      return StepAction::Restart;
    }
    throw NumericalError(ErrorKind::TrackingDiverged, "residual " + std::to_string(res) + " at " + at_time(t));
  };
  auto observe = [&](double t, const VecN<N>& y) {
    TrackerState s = tr.unpack(t, y);
    s.residual = tr.residual(t, y);
    if (s.residual > cfg.residual_tolerance) {
      throw NumericalError(ErrorKind::TrackingDiverged,
                           "residual " + std::to_string(s.residual) + " at output " + at_time(t));
    }
    out.max_residual = std::max(out.max_residual, s.residual);
    out.states.push_back(s);
    if (sink) sink(s);
  };

  OdeOptions opt;
  opt.abs_tol = cfg.abs_tol;
  opt.rel_tol = cfg.rel_tol;
  opt.max_step = cfg.max_step;
  out.stats = dopri5<N>(rhs, init.t, y0, times, opt, normalize, post_step, observe);
  return out;
}

struct CurveTraits {
  const Curve2D& curve;
  const Trajectory<2>& traj;
  const OracleOptions& oracle;

  VecN<2> pack(const TrackerState& s) const { return {s.u, s.r}; }
  TrackerState unpack(double t, const VecN<2>& y) const { return {t, y(0), 0.0, y(1), 0.0}; }
  VecN<2> rhs(double t, const VecN<2>& y) const { return rhs2d(curve, y(0), y(1), traj.cdot(t)); }
  double residual(double t, const VecN<2>& y) const {
    return reconstruction_residual(curve, y(0), y(1), traj.c(t));
  }
  void wrap(VecN<2>& y) const { y(0) = curve.axis.wrap(y(0)); }
  TrackerState reinit(double t) const { return initialize(curve, traj.c(t), t, oracle); }
};

struct SurfaceTraits {
  const Surface3D& surface;
  const Trajectory<3>& traj;
  const OracleOptions& oracle;

  VecN<3> pack(const TrackerState& s) const { return {s.u, s.v, s.r}; }
  TrackerState unpack(double t, const VecN<3>& y) const { return {t, y(0), y(1), y(2), 0.0}; }
  VecN<3> rhs(double t, const VecN<3>& y) const { return rhs3d(surface, y(0), y(1), y(2), traj.cdot(t)); }
  double residual(double t, const VecN<3>& y) const {
    check_chart(surface, y(0), y(1));
    return reconstruction_residual(surface, y(0), y(1), y(2), traj.c(t));
  }
  void wrap(VecN<3>& y) const {
    y(0) = surface.u_axis.wrap(y(0));
    y(1) = surface.v_axis.wrap(y(1));
  }
  TrackerState reinit(double t) const { return initialize(surface, traj.c(t), t, oracle); }
};

}  // namespace

void IntegratorConfig::validate() const {
  if (!(abs_tol > 0) || !(rel_tol > 0) || !(max_step > 0) || !(residual_tolerance > 0)) {
    throw NumericalError(ErrorKind::InvalidArgument, "integrator tolerances and max_step must be positive");
  }
}

Vec2 rhs2d(const Curve2D& curve, double u, double r, const Vec2& cdot) {
  require_outside(r);
  const FrameData2D f = frame2d(curve, u);
  // Columns: d(sigma - r n)/du = (1 + r kappa) sigma', and d/dr = -n.
  Mat2 M;
  M.col(0) = (1.0 + r * f.kappa) * f.tangent;
  M.col(1) = -f.n;
  const double det = M.determinant();
  if (!(std::abs(det) >= 1e-12)) {
    throw NumericalError(ErrorKind::FrameDegenerate, "|det| = " + std::to_string(std::abs(det)));
  }
  Mat2 inv;
  inv << M(1, 1), -M(0, 1), -M(1, 0), M(0, 0);
  return inv * cdot / det;
}

Vec2 rhs2d_unit_speed(const Curve2D& curve, double u, double r, const Vec2& cdot) {
  require_outside(r);
  const FrameData2D f = frame2d(curve, u);
  return {f.tangent.dot(cdot) / (1.0 + r * f.kappa), -f.n.dot(cdot)};
}

Vec3 rhs3d(const Surface3D& surface, double u, double v, double r, const Vec3& cdot) {
  require_outside(r);
  check_chart(surface, u, v);
  const FrameData3D f = frame3d(surface, u, v);
  if (!(std::abs(f.detSigma) >= 1e-10)) {
    throw NumericalError(ErrorKind::FrameDegenerate, "|det Sigma| = " + std::to_string(std::abs(f.detSigma)));
  }
  const Mat2 A = Mat2::Identity() - r * f.W;
  const double detA = A.determinant();
  if (detA < 1.0 - 1e-8) {
    throw NumericalError(ErrorKind::ConvexityViolation, "det(I - rW) = " + std::to_string(detA));
  }
  Mat2 Ainv;
  Ainv << A(1, 1), -A(0, 1), -A(1, 0), A(0, 0);
  Ainv /= detA;
  const Vec3 w = f.Sigma.inverse() * cdot;
  const Vec2 uv = Ainv * w.head<2>();
  return {uv(0), uv(1), -w(2)};
}

Vec3 projection_velocity(const Surface3D& surface, double u, double v, double r, const Vec3& cdot) {
  const Vec3 d = rhs3d(surface, u, v, r, cdot);
  return surface.d1u(u, v) * d(0) + surface.d1v(u, v) * d(1);
}

double reconstruction_residual(const Curve2D& curve, double u, double r, const Vec2& c) {
  const Vec2 n = perp(curve.d1(u)).normalized();
  return (curve.eval(u) - r * n - c).norm();
}

double reconstruction_residual(const Surface3D& surface, double u, double v, double r, const Vec3& c) {
  const FrameData3D f = frame3d(surface, u, v);
  return (surface.eval(u, v) - r * f.n - c).norm();
}

TrackerState initialize(const Curve2D& curve, const Vec2& point, double t, const OracleOptions& opt) {
  const Projection2D p = project_parametric(curve, point, opt);
  const double u = p.params[0];
  const FrameData2D f = frame2d(curve, u);
  // point = sigma - r n with r > 0 means point lies on the outward side.
  const double r = -(point - p.nearest).dot(f.n);
  if (!(r > 0.0)) throw NumericalError(ErrorKind::NotInOmega, "point is inside or on the body");
  TrackerState s{t, u, 0.0, r, reconstruction_residual(curve, u, r, point)};
  if (s.residual > 1e-8) {
    throw NumericalError(ErrorKind::NotInOmega, "reconstruction residual " + std::to_string(s.residual));
  }
  return s;
}

TrackerState initialize(const Surface3D& surface, const Vec3& point, double t, const OracleOptions& opt) {
  const Projection3D p = project_parametric(surface, point, opt);
  const double u = p.params[0];
  const double v = p.params[1];
  const bool singular = (surface.near_singularity && surface.near_singularity(u, v)) ||
                        surface.d1u(u, v).cross(surface.d1v(u, v)).norm() < 1e-10;
  if (singular) {
    // The chart has no frame here (a pole). The inward normal of a convex
    // body at the nearest point is -theta, which still fixes r; integrating
    // from this state is refused by the chart guard.
    const double r = p.distance;
    if (!(r > 0.0)) throw NumericalError(ErrorKind::NotInOmega, "point is inside or on the body");
    return TrackerState{t, u, v, r, (p.nearest + r * p.theta - point).norm()};
  }
  const FrameData3D f = frame3d(surface, u, v);
  const double r = -(point - p.nearest).dot(f.n);
  if (!(r > 0.0)) throw NumericalError(ErrorKind::NotInOmega, "point is inside or on the body");
  TrackerState s{t, u, v, r, reconstruction_residual(surface, u, v, r, point)};
  if (s.residual > 1e-8) {
    throw NumericalError(ErrorKind::NotInOmega, "reconstruction residual " + std::to_string(s.residual));
  }
  return s;
}

TrackResult integrate(const Curve2D& curve, const TrackerState& init, const Trajectory<2>& traj,
                      const IntegratorConfig& cfg, std::span<const double> times, const StateSink& sink) {
  return run<2>(CurveTraits{curve, traj, cfg.oracle}, init, cfg, times, sink);
}

TrackResult integrate(const Surface3D& surface, const TrackerState& init, const Trajectory<3>& traj,
                      const IntegratorConfig& cfg, std::span<const double> times, const StateSink& sink) {
  return run<3>(SurfaceTraits{surface, traj, cfg.oracle}, init, cfg, times, sink);
}

}  // namespace cvxnav
