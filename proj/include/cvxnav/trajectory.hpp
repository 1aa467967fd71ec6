#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "cvxnav/geometry.hpp"

namespace cvxnav {

enum class TrajectorySource { Analytic, Spline };

// Observer path c(t) with its exact velocity.
template <int Dim>
struct Trajectory {
  std::function<VecN<Dim>(double)> c;
  std::function<VecN<Dim>(double)> cdot;
  double t_start = 0.0;
  double t_end = 0.0;
  TrajectorySource source = TrajectorySource::Analytic;

  bool contains(double t) const { return t >= t_start && t <= t_end; }
};

template <int Dim>
Trajectory<Dim> line_trajectory(const VecN<Dim>& origin, const VecN<Dim>& velocity, double t_start, double t_end) {
  Trajectory<Dim> tr;
  tr.c = [origin, velocity](double t) { return VecN<Dim>(origin + t * velocity); };
  tr.cdot = [velocity](double) { return velocity; };
  tr.t_start = t_start;
  tr.t_end = t_end;
  return tr;
}

// center + radius * (cos(omega t + phase), sin(omega t + phase)) in the xy plane.
template <int Dim>
Trajectory<Dim> circle_trajectory(const VecN<Dim>& center, double radius, double omega, double phase, double t_start,
                                  double t_end) {
  Trajectory<Dim> tr;
  tr.c = [=](double t) {
    VecN<Dim> p = center;
    p(0) += radius * std::cos(omega * t + phase);
    p(1) += radius * std::sin(omega * t + phase);
    return p;
  };
  tr.cdot = [=](double t) {
    VecN<Dim> p = VecN<Dim>::Zero();
    p(0) = -radius * omega * std::sin(omega * t + phase);
    p(1) = radius * omega * std::cos(omega * t + phase);
    return p;
  };
  tr.t_start = t_start;
  tr.t_end = t_end;
  return tr;
}

// Circle in the xy plane combined with constant axial speed along z.
Trajectory<3> helix_trajectory(const Vec3& center, double radius, double omega, double phase, double axial_speed,
                               double t_start, double t_end);

// Natural C^2 cubic spline through (times[i], points[i]). Requires at least
// three strictly increasing sample times.
template <int Dim>
Trajectory<Dim> spline_trajectory(std::span<const double> times, std::span<const VecN<Dim>> points);

extern template Trajectory<2> spline_trajectory<2>(std::span<const double>, std::span<const Vec2>);
extern template Trajectory<3> spline_trajectory<3>(std::span<const double>, std::span<const Vec3>);

}  // namespace cvxnav
