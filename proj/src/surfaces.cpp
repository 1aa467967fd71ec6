#include "cvxnav/surfaces.hpp"

#include <cmath>
#include <numbers>

#include "cvxnav/errors.hpp"

namespace cvxnav {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNonConvexTol = 1e-8;

double require_positive(const ParamMap& params, const std::string& key, std::optional<double> fallback = {}) {
  auto it = params.find(key);
  double value = 0.0;
  if (it != params.end()) {
    value = it->second;
  } else if (fallback) {
    value = *fallback;
  } else {
    throw ConfigError("missing parameter '" + key + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError("parameter '" + key + "' must be positive, got " + std::to_string(value));
  }
  return value;
}

}  // namespace

double ParamAxis::wrap(double x) const {
  if (!periodic) return x;
  double y = std::fmod(x - min, span());
  if (y < 0) y += span();
  // fmod can round up to span for tiny negative inputs.
  if (y >= span()) y = 0.0;
  return min + y;
}

double ParamAxis::clamp(double x) const {
  if (periodic) return x;
  return std::min(std::max(x, min), max);
}

double ParamAxis::grid_point(int i, int n) const {
  if (periodic) return min + span() * static_cast<double>(i) / n;
  return min + span() * (static_cast<double>(i) + 0.5) / n;
}

FrameData2D frame2d(const Curve2D& curve, double u) {
  const Vec2 d1 = curve.d1(u);
  const double speed = d1.norm();
  if (!(speed >= 1e-12)) {
    throw NumericalError(ErrorKind::SingularParametrization, "|sigma'(" + std::to_string(u) + ")| < 1e-12");
  }
  FrameData2D f;
  f.tangent = d1;
  f.speed = speed;
  f.n = perp(d1) / speed;
  f.kappa = curve.d2(u).dot(f.n) / (speed * speed);
  if (f.kappa < -kNonConvexTol) {
    throw NumericalError(ErrorKind::NonConvex, "curvature " + std::to_string(f.kappa) + " at u=" + std::to_string(u));
  }
  f.Sigma.col(0) = d1;
  f.Sigma.col(1) = f.n;
  f.detSigma = f.Sigma.determinant();
  return f;
}

std::pair<double, double> principal_curvatures(const Mat2& W) {
  // -W is self-adjoint with respect to the first fundamental form, so its
  // eigenvalues are real; clamp the discriminant against rounding.
  const double tr = -W.trace();
  const double det = W.determinant();
  const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  return {0.5 * tr - disc, 0.5 * tr + disc};
}

FrameData3D frame3d(const Surface3D& s, double u, double v) {
  const Vec3 su = s.d1u(u, v);
  const Vec3 sv = s.d1v(u, v);
  const Vec3 cr = su.cross(sv);
  const double crn = cr.norm();
  if (!(crn >= 1e-10)) {
    throw NumericalError(ErrorKind::DegenerateChart,
                         "|sigma_u x sigma_v| < 1e-10 at (" + std::to_string(u) + ", " + std::to_string(v) + ")");
  }
  FrameData3D f;
  f.n = cr / crn;
  if (s.interior_witness) {
    const Vec3 p = s.eval(u, v);
    const double scale = (p - *s.interior_witness).norm();
    const double eps = 1e-4 * scale;
    if ((p + eps * f.n - *s.interior_witness).norm() > scale) f.n = -f.n;
  }

  f.first_form << su.dot(su), su.dot(sv), su.dot(sv), sv.dot(sv);
  const double e = s.d2uu(u, v).dot(f.n);
  const double ff = s.d2uv(u, v).dot(f.n);
  const double g = s.d2vv(u, v).dot(f.n);
  f.second_form << e, ff, ff, g;

  // n_u . sigma_u = -e etc., so I * W = -II.
  const Mat2& I = f.first_form;
  const double detI = I.determinant();
  Mat2 Iinv;
  Iinv << I(1, 1), -I(0, 1), -I(1, 0), I(0, 0);
  Iinv /= detI;
  f.W = -Iinv * f.second_form;

  const auto [kmin, kmax] = principal_curvatures(f.W);
  if (kmin < -kNonConvexTol) {
    throw NumericalError(ErrorKind::NonConvex, "principal curvature " + std::to_string(kmin) + " at (" +
                                                   std::to_string(u) + ", " + std::to_string(v) + ")");
  }

  f.Sigma.col(0) = su;
  f.Sigma.col(1) = sv;
  f.Sigma.col(2) = f.n;
  f.detSigma = f.Sigma.determinant();
  return f;
}

Surface3D builtin_surface(const std::string& name, const ParamMap& params) {
  Surface3D s;
  s.interior_witness = Vec3::Zero();
  if (name == "cylinder") {
    const double k = require_positive(params, "kappa");
    const double half = require_positive(params, "half_length", 50.0);
    const double R = 1.0 / k;
    s.eval = [R](double u, double v) { return Vec3(R * std::cos(v), R * std::sin(v), u); };
    s.d1u = [](double, double) { return Vec3(0, 0, 1); };
    s.d1v = [R](double, double v) { return Vec3(-R * std::sin(v), R * std::cos(v), 0); };
    s.d2uu = [](double, double) { return Vec3::Zero().eval(); };
    s.d2uv = [](double, double) { return Vec3::Zero().eval(); };
    s.d2vv = [R](double, double v) { return Vec3(-R * std::cos(v), -R * std::sin(v), 0); };
    s.u_axis = {-half, half, false};
    s.v_axis = {-kPi, kPi, true};
    return s;
  }
  if (name == "sphere" || name == "ellipsoid_of_revolution") {
    const double k = require_positive(params, "kappa");
    // sphere: radius 1/kappa. ellipsoid: unit equator, polar semi-axis kappa^{-1/2}.
    const double R = name == "sphere" ? 1.0 / k : 1.0;
    const double h = name == "sphere" ? 1.0 / k : 1.0 / std::sqrt(k);
    s.eval = [R, h](double u, double v) {
      return Vec3(R * std::cos(u) * std::sin(v), R * std::sin(u) * std::sin(v), h * std::cos(v));
    };
    s.d1u = [R](double u, double v) {
      return Vec3(-R * std::sin(u) * std::sin(v), R * std::cos(u) * std::sin(v), 0);
    };
    s.d1v = [R, h](double u, double v) {
      return Vec3(R * std::cos(u) * std::cos(v), R * std::sin(u) * std::cos(v), -h * std::sin(v));
    };
    s.d2uu = [R](double u, double v) {
      return Vec3(-R * std::cos(u) * std::sin(v), -R * std::sin(u) * std::sin(v), 0);
    };
    s.d2uv = [R](double u, double v) {
      return Vec3(-R * std::sin(u) * std::cos(v), R * std::cos(u) * std::cos(v), 0);
    };
    s.d2vv = [R, h](double u, double v) {
      return Vec3(-R * std::cos(u) * std::sin(v), -R * std::sin(u) * std::sin(v), -h * std::cos(v));
    };
    s.u_axis = {-kPi, kPi, true};
    s.v_axis = {0.0, kPi, false};
    s.near_singularity = [](double, double v) { return std::abs(std::sin(v)) < 1e-6; };
    return s;
  }
  throw ConfigError("unknown builtin surface '" + name + "'");
}

Curve2D builtin_curve(const std::string& name, const ParamMap& params) {
  double a = 1.0;
  double b = 1.0;
  if (name == "circle") {
    a = b = require_positive(params, "radius", 1.0);
  } else if (name == "ellipse") {
    a = require_positive(params, "a");
    b = require_positive(params, "b");
  } else {
    throw ConfigError("unknown builtin curve '" + name + "'");
  }
  Curve2D c;
  c.eval = [a, b](double u) { return Vec2(a * std::cos(u), b * std::sin(u)); };
  c.d1 = [a, b](double u) { return Vec2(-a * std::sin(u), b * std::cos(u)); };
  c.d2 = [a, b](double u) { return Vec2(-a * std::cos(u), -b * std::sin(u)); };
  c.axis = {-kPi, kPi, true};
  c.unit_speed = (a == 1.0 && b == 1.0);
  return c;
}

Curve2D unit_circle() { return builtin_curve("circle", {{"radius", 1.0}}); }

}  // namespace cvxnav
