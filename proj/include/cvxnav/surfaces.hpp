#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "cvxnav/geometry.hpp"

namespace cvxnav {

// One parameter axis of a chart. Periodic axes wrap into [min, max).
struct ParamAxis {
  double min = 0.0;
  double max = 1.0;
  bool periodic = false;

  double span() const { return max - min; }
  double wrap(double x) const;
  // Closest admissible parameter; identity on periodic axes.
  double clamp(double x) const;
  // Grid sample i of n. Periodic axes use n equally spaced points from min,
  // bounded axes use cell midpoints so open endpoints (poles) are never hit.
  double grid_point(int i, int n) const;
};

// Boundary curve of a convex body in the plane, traversed anti-clockwise.
struct Curve2D {
  std::function<Vec2(double)> eval;
  std::function<Vec2(double)> d1;
  std::function<Vec2(double)> d2;
  ParamAxis axis;
  bool unit_speed = false;
};

// Chart of the boundary surface of a convex body in 3-space.
struct Surface3D {
  std::function<Vec3(double, double)> eval;
  std::function<Vec3(double, double)> d1u;
  std::function<Vec3(double, double)> d1v;
  std::function<Vec3(double, double)> d2uu;
  std::function<Vec3(double, double)> d2uv;
  std::function<Vec3(double, double)> d2vv;
  ParamAxis u_axis;
  ParamAxis v_axis;
  // Any point strictly inside the body. Used to orient the normal inward.
  std::optional<Vec3> interior_witness;
  // Flags parameter values too close to a chart singularity (e.g. a pole).
  std::function<bool(double, double)> near_singularity;
};

struct FrameData2D {
  Mat2 Sigma;        // columns (sigma', n)
  Vec2 tangent;      // sigma'(u), not normalized
  Vec2 n;            // inward unit normal
  double kappa = 0;  // curvature, >= 0 for convex bodies
  double speed = 0;  // |sigma'(u)|
  double detSigma = 0;
};

struct FrameData3D {
  Mat3 Sigma;  // columns (sigma_u, sigma_v, n)
  Vec3 n;      // inward unit normal
  // Weingarten matrix: (n_u, n_v) = (sigma_u, sigma_v) * W.
  Mat2 W;
  Mat2 first_form;   // [[E, F], [F, G]]
  Mat2 second_form;  // [[e, f], [f, g]] measured against the inward normal
  double detSigma = 0;
};

FrameData2D frame2d(const Curve2D& curve, double u);
FrameData3D frame3d(const Surface3D& surface, double u, double v);

// Principal curvatures (eigenvalues of -W), ascending.
std::pair<double, double> principal_curvatures(const Mat2& W);

using ParamMap = std::map<std::string, double>;

// name in {cylinder, sphere, ellipsoid_of_revolution}; params must supply
// "kappa" > 0. The cylinder also accepts "half_length" (axial extent of the
// chart, default 50).
Surface3D builtin_surface(const std::string& name, const ParamMap& params);

// name in {circle, ellipse}. circle: "radius" (default 1). ellipse: "a", "b"
// semi-axes along x and y.
Curve2D builtin_curve(const std::string& name, const ParamMap& params);

Curve2D unit_circle();

}  // namespace cvxnav
