#include "cvxnav/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cvxnav/errors.hpp"
#include "cvxnav/kernels.hpp"

namespace cvxnav {

namespace {

constexpr double kInvPhi = 0.6180339887498949;

template <class F>
GridMin grid_search(int nu, int nv, bool use_parallel, F&& f) {
  return use_parallel ? parallel::argmin_grid(nu, nv, f) : serial::argmin_grid(nu, nv, f);
}

// Golden-section minimization of g on [a, b].
template <class G>
double golden_section(G&& g, double a, double b, int iters = 200) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double gc = g(c);
  double gd = g(d);
  for (int k = 0; k < iters && std::abs(b - a) > 1e-15 * (1.0 + std::abs(a)); ++k) {
    if (gc < gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - kInvPhi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + kInvPhi * (b - a);
      gd = g(d);
    }
  }
  return gc < gd ? c : d;
}

std::string describe(std::span<const double> p, double dist) {
  std::ostringstream os;
  os.precision(17);
  os << "best candidate params (";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ") distance " << dist;
  return os.str();
}

template <int Dim>
void finish(ProjectionResult<Dim>& res, const VecN<Dim>& x) {
  const VecN<Dim> diff = x - res.nearest;
  res.distance = diff.norm();
  if (res.distance > 0) res.theta = diff / res.distance;
}

}  // namespace

Projection2D project_parametric(const Curve2D& curve, const Vec2& x, const OracleOptions& opt) {
  const ParamAxis& ax = curve.axis;
  const int n = opt.grid_density;
  auto sqdist = [&](double u) { return (curve.eval(u) - x).squaredNorm(); };

  const GridMin g = grid_search(n, 1, opt.parallel, [&](int i, int) { return sqdist(ax.grid_point(i, n)); });
  if (g.index < 0) throw NumericalError(ErrorKind::OracleFailure, "grid search found no finite sample");
  double u = ax.grid_point(static_cast<int>(g.index), n);
  const double spacing = ax.span() / n;

  Projection2D res;
  bool converged = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    const Vec2 diff = curve.eval(u) - x;
    const Vec2 d1 = curve.d1(u);
    const double grad = diff.dot(d1);
    const double dist = diff.norm();
    res.newton_iterations = it;
    if (std::abs(grad) <= opt.grad_tol * (1.0 + dist)) {
      converged = true;
      break;
    }
    const double hess = d1.squaredNorm() + diff.dot(curve.d2(u));
    double step = hess > 0 ? -grad / hess : -grad / std::max(d1.squaredNorm(), 1e-300);
    step = std::clamp(step, -spacing, spacing);
    const double f0 = diff.squaredNorm();
    double unew = ax.clamp(u + step);
    int halvings = 0;
    // Near the minimum the decrease in f drops below rounding; a smaller
    // gradient is then the better acceptance test.
    auto accept1 = [&](double uc) {
      return sqdist(uc) <= f0 || std::abs((curve.eval(uc) - x).dot(curve.d1(uc))) < std::abs(grad);
    };
    while (!accept1(unew) && halvings < 60) {
      step *= 0.5;
      unew = ax.clamp(u + step);
      ++halvings;
    }
    if (unew == u || std::abs(unew - u) <= 1e-16 * (1.0 + std::abs(u))) {
      // Stagnation at rounding level counts as convergence when the gradient
      // is already tiny relative to the problem scale.
      converged = std::abs(grad) <= 1e-9 * (1.0 + dist) * (1.0 + d1.norm());
      break;
    }
    u = ax.wrap(unew);
  }
  if (!converged) {
    res.used_fallback = true;
    u = golden_section(sqdist, u - spacing, u + spacing);
    const Vec2 diff = curve.eval(u) - x;
    if (std::abs(diff.dot(curve.d1(u))) > 1e-8 * (1.0 + diff.norm())) {
      const double p[1] = {u};
      throw NumericalError(ErrorKind::OracleFailure, describe(p, diff.norm()));
    }
  }
  u = ax.wrap(u);
  res.params = {u};
  res.nearest = curve.eval(u);
  finish(res, x);
  return res;
}

Projection3D project_parametric(const Surface3D& s, const Vec3& x, const OracleOptions& opt) {
  const int n = opt.grid_density;
  auto sqdist = [&](double u, double v) { return (s.eval(u, v) - x).squaredNorm(); };
  const GridMin g = grid_search(n, n, opt.parallel, [&](int i, int j) {
    return sqdist(s.u_axis.grid_point(i, n), s.v_axis.grid_point(j, n));
  });
  if (g.index < 0) throw NumericalError(ErrorKind::OracleFailure, "grid search found no finite sample");
  double u = s.u_axis.grid_point(static_cast<int>(g.index / n), n);
  double v = s.v_axis.grid_point(static_cast<int>(g.index % n), n);
  const double hu = s.u_axis.span() / n;
  const double hv = s.v_axis.span() / n;

  Projection3D res;
  bool converged = false;
  for (int it = 0; it < opt.max_newton; ++it) {
    const Vec3 diff = s.eval(u, v) - x;
    const Vec3 su = s.d1u(u, v);
    const Vec3 sv = s.d1v(u, v);
    const Vec2 grad(diff.dot(su), diff.dot(sv));
    const double dist = diff.norm();
    res.newton_iterations = it;
    if (grad.norm() <= opt.grad_tol * (1.0 + dist)) {
      converged = true;
      break;
    }
    Mat2 H;
    H(0, 0) = su.dot(su) + diff.dot(s.d2uu(u, v));
    H(0, 1) = H(1, 0) = su.dot(sv) + diff.dot(s.d2uv(u, v));
    H(1, 1) = sv.dot(sv) + diff.dot(s.d2vv(u, v));
    Vec2 step;
    if (H(0, 0) > 0 && H.determinant() > 0) {
      step = -H.inverse() * grad;
    } else {
      const double scale = std::max(su.squaredNorm() + sv.squaredNorm(), 1e-300);
      step = -grad / scale;
    }
    // Keep steps within one grid cell so Newton cannot leave the basin found
    // by the grid search.
    const double shrink = std::min({1.0, hu / std::max(std::abs(step(0)), 1e-300),
                                    hv / std::max(std::abs(step(1)), 1e-300)});
    step *= shrink;
    const double f0 = diff.squaredNorm();
    double unew = s.u_axis.clamp(u + step(0));
    double vnew = s.v_axis.clamp(v + step(1));
    int halvings = 0;
    auto accept2 = [&](double uc, double vc) {
      if (sqdist(uc, vc) <= f0) return true;
      const Vec3 dc = s.eval(uc, vc) - x;
      return Vec2(dc.dot(s.d1u(uc, vc)), dc.dot(s.d1v(uc, vc))).norm() < grad.norm();
    };
    while (!accept2(unew, vnew) && halvings < 60) {
      step *= 0.5;
      unew = s.u_axis.clamp(u + step(0));
      vnew = s.v_axis.clamp(v + step(1));
      ++halvings;
    }
    const bool stalled = std::abs(unew - u) <= 1e-16 * (1.0 + std::abs(u)) &&
                         std::abs(vnew - v) <= 1e-16 * (1.0 + std::abs(v));
    if (stalled) {
      converged = grad.norm() <= 1e-9 * (1.0 + dist) * (1.0 + su.norm() + sv.norm());
      break;
    }
    u = s.u_axis.wrap(unew);
    v = s.v_axis.wrap(vnew);
  }
  if (!converged) {
    // Coordinate descent with golden-section line searches.
    res.used_fallback = true;
    double wu = hu;
    double wv = hv;
    for (int sweep = 0; sweep < 100; ++sweep) {
      const double f0 = sqdist(u, v);
      u = golden_section([&](double uu) { return sqdist(s.u_axis.clamp(uu), v); }, u - wu, u + wu);
      u = s.u_axis.wrap(s.u_axis.clamp(u));
      v = golden_section([&](double vv) { return sqdist(u, s.v_axis.clamp(vv)); }, v - wv, v + wv);
      v = s.v_axis.wrap(s.v_axis.clamp(v));
      wu *= 0.7;
      wv *= 0.7;
      if (f0 - sqdist(u, v) <= 1e-30) break;
    }
    const Vec3 diff = s.eval(u, v) - x;
    const Vec2 grad(diff.dot(s.d1u(u, v)), diff.dot(s.d1v(u, v)));
    if (grad.norm() > 1e-8 * (1.0 + diff.norm())) {
      const double p[2] = {u, v};
      throw NumericalError(ErrorKind::OracleFailure, describe(p, diff.norm()));
    }
  }
  res.params = {u, v};
  res.nearest = s.eval(u, v);
  finish(res, x);
  return res;
}

std::vector<Vec2> random_boundary_samples(const Curve2D& curve, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(curve.axis.min, curve.axis.max);
  std::vector<Vec2> out(count);
  for (auto& p : out) p = curve.eval(du(rng));
  return out;
}

std::vector<Vec3> random_boundary_samples(const Surface3D& s, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> du(s.u_axis.min, s.u_axis.max);
  std::uniform_real_distribution<double> dv(s.v_axis.min, s.v_axis.max);
  std::vector<Vec3> out(count);
  for (auto& p : out) {
    const double u = du(rng);
    const double v = dv(rng);
    p = s.eval(u, v);
  }
  return out;
}

}  // namespace cvxnav
