#pragma once

// Convex bodies bounded by line segments and circular arcs, in particular the
// C^{1,1} set obtained from Shapiro's polygon by rounding every corner A_n =
// exp(i C lambda^n) with a tangent arc. On this set the one-sided derivative
// of the metric projection fails to exist at the point 1.

#include <span>
#include <variant>
#include <vector>

#include "cvxnav/geometry.hpp"
#include "cvxnav/oracle.hpp"

namespace cvxnav {

struct SegmentPiece {
  Vec2 start;  // in traversal order
  Vec2 end;
};

// Circular arc swept counter-clockwise from start_angle by sweep. Traversal
// runs the other way: from the counter-clockwise end to the start.
struct ArcPiece {
  Vec2 center;
  double radius = 0.0;
  double start_angle = 0.0;
  double sweep = 0.0;
  Vec2 ccw_start;
  Vec2 ccw_end;
};

using Piece = std::variant<SegmentPiece, ArcPiece>;

double piece_length(const Piece& p);

struct PiecewiseBoundary {
  // Piece coordinates are stored relative to `origin`. For the Shapiro set the
  // origin is the accumulation point 1, which keeps tiny features near it at
  // full relative precision.
  Vec2 origin = Vec2::Zero();
  std::vector<Piece> pieces;
  std::vector<double> cumulative_length;  // pieces.size() + 1 entries

  // Construction data (Shapiro sets only). Indexed by n; T, S and arc_radius
  // are meaningful for n = 1..N, A and alpha for n = 0..N+1.
  double lambda = 0.0;
  double C = 0.0;
  int N = 0;
  std::vector<double> alpha;
  std::vector<Vec2> A;
  std::vector<Vec2> T;
  std::vector<Vec2> S;
  std::vector<double> arc_radius;

  double perimeter() const { return cumulative_length.back(); }
  // Relative coordinates of the boundary point at arclength s.
  Vec2 point_at(double s) const;
  // Unit tangent in traversal direction at arclength s.
  Vec2 tangent_at(double s) const;
  std::size_t piece_at(double s) const;

  // Piece numbering of the Shapiro set (traversal from A_0 toward 1):
  // 0: segment A_0 S_1, 2n-1: arc C_n, 2n: segment T_n S_{n+1} (T_N A_{N+1}
  // for n = N), 2N+1: segment A_{N+1} 1, 2N+2: unit-circle arc 1 -> A_0.
  static int arc_index(int n) { return 2 * n - 1; }
};

// lambda in (0,1), C > 0 with C lambda <= pi and C < 2 pi, N >= 3. Arcs C_1..C_N.
// With replace_corners = false the corners are kept (Shapiro's C^0 polygon,
// diagnostic only).
PiecewiseBoundary build_shapiro(double lambda, double C, int N, bool replace_corners = true);
PiecewiseBoundary polygon_boundary(std::span<const Vec2> vertices_ccw);
PiecewiseBoundary circle_boundary(const Vec2& center, double radius);

struct LocalProjection {
  Vec2 nearest;  // relative to origin
  double distance = 0.0;
  int piece = -1;
  double arclength = 0.0;
};

// Exact projection of x (relative coordinates). Ties go to the lower piece.
LocalProjection project_local(const PiecewiseBoundary& b, const Vec2& x_rel);
// Same, in absolute coordinates.
Projection2D project_piecewise(const PiecewiseBoundary& b, const Vec2& x);

// `count` points equally spaced in arclength, absolute coordinates.
std::vector<Vec2> dense_samples(const PiecewiseBoundary& b, std::size_t count);

struct FlybyRecord {
  double t = 0.0;
  Vec2 projection;      // absolute
  Vec2 projection_rel;  // relative to origin
  int piece = -1;
  double arclength = 0.0;
  double speed = 0.0;     // central finite difference of |Pi'|
  bool clean = false;     // stencil stays on one piece
  double quotient = 0.0;  // |Pi(t) - Pi(0)| / t
};

struct FlybyEvent {
  int n = 0;
  double t_n = 0.0;  // Pi(t_n) = T_n
  double s_n = 0.0;  // Pi(s_n) = S_n
  double p_n = 0.0;  // (t_{n-1} - s_n) / t_{n-1}, NaN for n = 1
  double q_n = 0.0;  // (s_n - t_n) / s_n
  double r_n = 0.0;  // arc radius
  double arc_speed = 0.0;      // mean |Pi'| on (t_n, s_n), NaN without clean samples
  double segment_speed = 0.0;  // mean |Pi'| on (s_n, t_{n-1}), NaN without clean samples
};

struct FlybyOptions {
  double t_min = 0.0;      // 0: just below the deepest event
  double t_max = 0.0;      // 0: 2 alpha_0
  double dt = 0.01;        // relative step, t_{k+1} = t_k (1 + dt)
  double fd_relative = 1e-4;
};

struct FlybyResult {
  std::vector<FlybyRecord> samples;
  std::vector<FlybyEvent> events;  // n = 1..N, entries with missing times are NaN
  int unresolved = 0;              // transitions that skipped a piece
};

// Observer c(t) = 2 exp(i t / 2), unit speed on the radius-2 circle.
Vec2 flyby_position(double t);

FlybyResult flyby_experiment(const PiecewiseBoundary& b, const FlybyOptions& opt = {});

struct QuotientSweep {
  std::vector<int> n;
  std::vector<double> q_at_t;  // Q(t_n)
  std::vector<double> q_at_s;  // Q(s_n)
  double tail_t = 0.0;
  double tail_s = 0.0;
  double spread_t = 0.0;
  double spread_s = 0.0;
  double gap = 0.0;
  // Tails differ by more than 3x their internal spread.
  bool certified = false;
  // max_n |Q(t_{n-1}) - [v_seg p_n + Q(s_n)(1 - p_n)]| over the tail, with
  // v_seg the measured segment plateau speed.
  double consistency_error = 0.0;
};

QuotientSweep difference_quotient_sweep(const PiecewiseBoundary& b, const FlybyResult& flyby, int tail_count = 10);

// Q(t) = |Pi(t) - Pi(0)| / t along the flyby for arbitrary times.
std::vector<double> difference_quotients(const PiecewiseBoundary& b, std::span<const double> times);

}  // namespace cvxnav
