#pragma once

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvxnav/errors.hpp"
#include "cvxnav/geometry.hpp"

namespace cvxnav::test {

inline constexpr double kPi = std::numbers::pi;

template <class M1, class M2>
double max_abs_diff(const M1& a, const M2& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Runs f and reports the ErrorKind of the NumericalError it throws.
template <class F>
bool throws_kind(F&& f, ErrorKind kind) {
  try {
    f();
  } catch (const NumericalError& e) {
    return e.kind() == kind;
  }
  return false;
}

}  // namespace cvxnav::test
