#pragma once

#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "cvxnav/integrator.hpp"
#include "cvxnav/oracle.hpp"
#include "cvxnav/surfaces.hpp"
#include "cvxnav/trajectory.hpp"

namespace cvxnav {

// ODE unknowns plus bookkeeping. In 2D, v is unused and stays 0.
struct TrackerState {
  double t = 0.0;
  double u = 0.0;
  double v = 0.0;
  double r = 0.0;
  double residual = 0.0;  // |sigma - r n - c(t)|
};

struct IntegratorConfig {
  double abs_tol = 1e-9;
  double rel_tol = 1e-9;
  double max_step = std::numeric_limits<double>::infinity();
  double residual_tolerance = 1e-5;
  // On a residual breach, re-project once with the oracle before aborting.
  bool reinit_on_breach = true;
  OracleOptions oracle{};

  void validate() const;
};

struct ReinitEvent {
  double t = 0.0;
  double residual_before = 0.0;
};

struct TrackResult {
  std::vector<TrackerState> states;
  OdeStats stats;
  std::vector<ReinitEvent> reinit_events;
  double max_residual = 0.0;
};

using StateSink = std::function<void(const TrackerState&)>;

// Right-hand sides. rhs2d solves the general 2x2 system
//   [(1 + r kappa) sigma', -n] (du, dr)^T = cdot,
// which for unit-speed curves is du = sigma'.cdot / (1 + r kappa), dr = -n.cdot.
Vec2 rhs2d(const Curve2D& curve, double u, double r, const Vec2& cdot);
// Closed form for unit-speed parametrizations only.
Vec2 rhs2d_unit_speed(const Curve2D& curve, double u, double r, const Vec2& cdot);
// (du, dv, dr) = blockdiag((I - rW)^{-1}, -1) Sigma^{-1} cdot.
Vec3 rhs3d(const Surface3D& surface, double u, double v, double r, const Vec3& cdot);
// Velocity of the projection, sigma_u du + sigma_v dv.
Vec3 projection_velocity(const Surface3D& surface, double u, double v, double r, const Vec3& cdot);

double reconstruction_residual(const Curve2D& curve, double u, double r, const Vec2& c);
double reconstruction_residual(const Surface3D& surface, double u, double v, double r, const Vec3& c);

// Oracle-based initial state. Throws NotInOmega when the point is not
// strictly outside the body.
TrackerState initialize(const Curve2D& curve, const Vec2& point, double t = 0.0, const OracleOptions& opt = {});
TrackerState initialize(const Surface3D& surface, const Vec3& point, double t = 0.0, const OracleOptions& opt = {});

// Integrates from init.t and reports the state at every entry of `times`
// (monotone, in either direction from init.t). States are also streamed to
// `sink` as they are produced, so partial output survives an abort.
TrackResult integrate(const Curve2D& curve, const TrackerState& init, const Trajectory<2>& traj,
                      const IntegratorConfig& cfg, std::span<const double> times, const StateSink& sink = {});
TrackResult integrate(const Surface3D& surface, const TrackerState& init, const Trajectory<3>& traj,
                      const IntegratorConfig& cfg, std::span<const double> times, const StateSink& sink = {});

}  // namespace cvxnav
