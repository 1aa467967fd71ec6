#pragma once

// Data-parallel search kernels used by the projection oracle. Every kernel
// has a serial reference in `serial::` and an OpenMP version in `parallel::`
// that returns bit-identical results: ties are broken by the lowest linear
// index, independent of the thread count.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "cvxnav/geometry.hpp"

namespace cvxnav {

struct GridMin {
  std::int64_t index = -1;  // linear index i * nv + j, or i for 1D searches
  double value = std::numeric_limits<double>::infinity();

  bool better_than(const GridMin& o) const {
    return value < o.value || (value == o.value && index < o.index);
  }
};

namespace serial {

// argmin of f(i, j) over [0, nu) x [0, nv). NaN values are ignored.
template <class F>
GridMin argmin_grid(int nu, int nv, F&& f) {
  GridMin best;
  for (int i = 0; i < nu; ++i) {
    for (int j = 0; j < nv; ++j) {
      const double val = f(i, j);
      const GridMin cand{static_cast<std::int64_t>(i) * nv + j, val};
      if (!std::isnan(val) && cand.better_than(best)) best = cand;
    }
  }
  return best;
}

template <int Dim>
GridMin nearest_sample(std::span<const VecN<Dim>> samples, const VecN<Dim>& x) {
  GridMin best;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const GridMin cand{static_cast<std::int64_t>(k), (samples[k] - x).squaredNorm()};
    if (cand.better_than(best)) best = cand;
  }
  return best;
}

// Squared distance from each query to its nearest sample.
template <int Dim>
std::vector<double> nearest_sample_distances(std::span<const VecN<Dim>> samples, std::span<const VecN<Dim>> queries) {
  std::vector<double> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) out[q] = nearest_sample<Dim>(samples, queries[q]).value;
  return out;
}

}  // namespace serial

namespace parallel {

template <class F>
GridMin argmin_grid(int nu, int nv, F&& f) {
  GridMin best;
  const std::int64_t total = static_cast<std::int64_t>(nu) * nv;
#pragma omp parallel
  {
    GridMin local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < total; ++k) {
      const double val = f(static_cast<int>(k / nv), static_cast<int>(k % nv));
      const GridMin cand{k, val};
      if (!std::isnan(val) && cand.better_than(local)) local = cand;
    }
#pragma omp critical(cvxnav_argmin_grid)
    if (local.better_than(best)) best = local;
  }
  return best;
}

template <int Dim>
GridMin nearest_sample(std::span<const VecN<Dim>> samples, const VecN<Dim>& x) {
  GridMin best;
  const auto n = static_cast<std::int64_t>(samples.size());
#pragma omp parallel
  {
    GridMin local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < n; ++k) {
      const GridMin cand{k, (samples[k] - x).squaredNorm()};
      if (cand.better_than(local)) local = cand;
    }
#pragma omp critical(cvxnav_nearest_sample)
    if (local.better_than(best)) best = local;
  }
  return best;
}

template <int Dim>
std::vector<double> nearest_sample_distances(std::span<const VecN<Dim>> samples, std::span<const VecN<Dim>> queries) {
  std::vector<double> out(queries.size());
  const auto nq = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t q = 0; q < nq; ++q) out[q] = serial::nearest_sample<Dim>(samples, queries[q]).value;
  return out;
}

}  // namespace parallel

}  // namespace cvxnav
