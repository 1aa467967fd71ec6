#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "cvxnav/geometry.hpp"
#include "cvxnav/surfaces.hpp"

namespace cvxnav {

template <int Dim>
struct ProjectionResult {
  VecN<Dim> nearest = VecN<Dim>::Zero();
  double distance = 0.0;
  VecN<Dim> theta = VecN<Dim>::Zero();  // unit vector from nearest toward x
  std::array<double, Dim - 1> params{};  // chart parameters of nearest, when parametric
  int piece = -1;                        // piece index for piecewise boundaries
  int newton_iterations = 0;
  bool used_fallback = false;
};

using Projection2D = ProjectionResult<2>;
using Projection3D = ProjectionResult<3>;

struct OracleOptions {
  int grid_density = 720;  // samples per parameter axis
  int max_newton = 100;
  double grad_tol = 1e-12;
  bool parallel = true;  // use the OpenMP grid kernel
};

// Global nearest boundary point by coarse grid search followed by damped
// Newton on the squared distance. x is expected outside the body.
Projection2D project_parametric(const Curve2D& curve, const Vec2& x, const OracleOptions& opt = {});
Projection3D project_parametric(const Surface3D& surface, const Vec3& x, const OracleOptions& opt = {});

// Uniformly random parameter samples of the boundary (fixed seed).
std::vector<Vec2> random_boundary_samples(const Curve2D& curve, std::size_t count, std::uint64_t seed);
std::vector<Vec3> random_boundary_samples(const Surface3D& surface, std::size_t count, std::uint64_t seed);

inline constexpr std::uint64_t kDefaultSeed = 20240607;

}  // namespace cvxnav
