#pragma once

#include <Eigen/Dense>

namespace cvxnav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;

template <int Dim>
using VecN = Eigen::Matrix<double, Dim, 1>;

// Rotation by +90 degrees.
inline Vec2 perp(const Vec2& v) { return {-v.y(), v.x()}; }

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace cvxnav
