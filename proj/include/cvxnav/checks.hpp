#pragma once

// Numerical probes of the regularity of the distance function and of the
// metric projection. Both take any callable `project(x) -> ProjectionResult`.

#include <algorithm>
#include <array>

#include "cvxnav/oracle.hpp"

namespace cvxnav {

struct GradientReport {
  std::array<double, 3> steps{1e-2, 1e-3, 1e-4};
  std::array<double, 3> quotients{};    // [d(x + t dir) - d(x)] / t
  std::array<double, 3> discrepancy{};  // |quotient - theta . dir|
  double theta_dot_dir = 0.0;
  // Discrepancies shrink with t, up to an absolute noise floor.
  bool decreasing = false;
};

template <int Dim, class Project>
GradientReport distance_gradient_check(Project&& project, const VecN<Dim>& x, const VecN<Dim>& dir,
                                       double noise_floor = 1e-9) {
  GradientReport rep;
  const ProjectionResult<Dim> base = project(x);
  rep.theta_dot_dir = base.theta.dot(dir);
  for (std::size_t k = 0; k < rep.steps.size(); ++k) {
    const double t = rep.steps[k];
    const ProjectionResult<Dim> moved = project(VecN<Dim>(x + t * dir));
    rep.quotients[k] = (moved.distance - base.distance) / t;
    rep.discrepancy[k] = std::abs(rep.quotients[k] - rep.theta_dot_dir);
  }
  rep.decreasing = true;
  for (std::size_t k = 1; k < rep.steps.size(); ++k) {
    if (rep.discrepancy[k] > rep.discrepancy[k - 1] && rep.discrepancy[k] > noise_floor) rep.decreasing = false;
  }
  return rep;
}

struct ContinuityReport {
  std::array<double, 4> steps{1e-1, 1e-2, 1e-3, 1e-4};
  std::array<double, 4> moduli{};  // |Pi(x + h dir) - Pi(x)|
  // max_k moduli[k] / steps[k]; the projection onto a convex set is
  // nonexpansive, so this never exceeds 1.
  double fitted_constant = 0.0;
  bool bounded = false;
};

template <int Dim, class Project>
double projection_modulus(Project&& project, const VecN<Dim>& x, const VecN<Dim>& dir, double h) {
  if (h == 0.0) return 0.0;
  return (project(VecN<Dim>(x + h * dir)).nearest - project(x).nearest).norm();
}

template <int Dim, class Project>
ContinuityReport projection_continuity_check(Project&& project, const VecN<Dim>& x, const VecN<Dim>& dir,
                                             double slack = 1e-6) {
  ContinuityReport rep;
  const VecN<Dim> base = project(x).nearest;
  for (std::size_t k = 0; k < rep.steps.size(); ++k) {
    rep.moduli[k] = (project(VecN<Dim>(x + rep.steps[k] * dir)).nearest - base).norm();
    rep.fitted_constant = std::max(rep.fitted_constant, rep.moduli[k] / rep.steps[k]);
  }
  rep.bounded = rep.fitted_constant <= 1.0 + slack;
  return rep;
}

}  // namespace cvxnav
