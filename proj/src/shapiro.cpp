#include "cvxnav/shapiro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "cvxnav/errors.hpp"

namespace cvxnav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double angle_offset(double angle, double start) {
  double d = std::fmod(angle - start, kTwoPi);
  if (d < 0) d += kTwoPi;
  return d;
}

// e^{i a} - 1 without cancellation.
Vec2 unit_point_minus_one(double a) {
  const double s = std::sin(0.5 * a);
  return {-2.0 * s * s, std::sin(a)};
}

ArcPiece make_arc(const Vec2& center, double radius, const Vec2& from, const Vec2& to, double sweep) {
  ArcPiece arc;
  arc.center = center;
  arc.radius = radius;
  arc.start_angle = std::atan2(from.y() - center.y(), from.x() - center.x());
  arc.sweep = sweep;
  arc.ccw_start = from;
  arc.ccw_end = to;
  return arc;
}

struct PieceHit {
  Vec2 nearest;
  double offset;  // arclength from the traversal start of the piece
  // Where the unclamped foot point falls: -1 before the traversal start, 0 in
  // the piece, +1 past the end. Decided from foot parameters and cross
  // products, never from distances, so it stays sharp at tangent junctions.
  int side;
};

PieceHit closest_on(const Piece& piece, const Vec2& x) {
  return std::visit(
      Overloaded{
          [&](const SegmentPiece& s) {
            const Vec2 d = s.end - s.start;
            const double len2 = d.squaredNorm();
            const double raw = len2 > 0 ? (x - s.start).dot(d) / len2 : 0.0;
            const double lam = std::clamp(raw, 0.0, 1.0);
            const int side = raw < 0.0 ? -1 : (raw > 1.0 ? 1 : 0);
            return PieceHit{s.start + lam * d, lam * std::sqrt(len2), side};
          },
          [&](const ArcPiece& a) {
            const Vec2 v = x - a.center;
            const double vn = v.norm();
            // Traversal starts at ccw_end and ends at ccw_start.
            const PieceHit at_start{a.ccw_end, 0.0, -1};
            const PieceHit at_end{a.ccw_start, a.radius * a.sweep, 1};
            if (a.sweep < std::numbers::pi) {
              const double c_end = cross2(a.ccw_start - a.center, v);  // < 0: past the traversal end
              const double c_start = cross2(v, a.ccw_end - a.center);  // < 0: before the traversal start
              if (c_end >= 0 && c_start >= 0 && vn > 0) {
                const double rel = std::clamp(angle_offset(std::atan2(v.y(), v.x()), a.start_angle), 0.0, a.sweep);
                return PieceHit{a.center + a.radius * v / vn, a.radius * (a.sweep - rel), 0};
              }
              if (c_end < 0 && c_start >= 0) return at_end;
              if (c_start < 0 && c_end >= 0) return at_start;
            } else if (vn > 0) {
              const double rel = angle_offset(std::atan2(v.y(), v.x()), a.start_angle);
              if (rel <= a.sweep) return PieceHit{a.center + a.radius * v / vn, a.radius * (a.sweep - rel), 0};
            }
            return (x - a.ccw_end).squaredNorm() <= (x - a.ccw_start).squaredNorm() ? at_start : at_end;
          },
      },
      piece);
}

void finalize(PiecewiseBoundary& b) {
  b.cumulative_length.assign(b.pieces.size() + 1, 0.0);
  for (std::size_t i = 0; i < b.pieces.size(); ++i) {
    b.cumulative_length[i + 1] = b.cumulative_length[i] + piece_length(b.pieces[i]);
  }
}

}  // namespace

double piece_length(const Piece& p) {
  return std::visit(Overloaded{[](const SegmentPiece& s) { return (s.end - s.start).norm(); },
                               [](const ArcPiece& a) { return a.radius * a.sweep; }},
                    p);
}

std::size_t PiecewiseBoundary::piece_at(double s) const {
  auto it = std::upper_bound(cumulative_length.begin(), cumulative_length.end(), s);
  const auto idx = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_length.begin() - 1, 0));
  return std::min(idx, pieces.size() - 1);
}

Vec2 PiecewiseBoundary::point_at(double s) const {
  const std::size_t i = piece_at(s);
  const double off = s - cumulative_length[i];
  return std::visit(Overloaded{[&](const SegmentPiece& seg) {
                                 const double len = (seg.end - seg.start).norm();
                                 return Vec2(len > 0 ? seg.start + (seg.end - seg.start) * (off / len) : seg.start);
                               },
                               [&](const ArcPiece& a) {
                                 const double ang = a.start_angle + a.sweep - off / a.radius;
                                 return Vec2(a.center + a.radius * Vec2(std::cos(ang), std::sin(ang)));
                               }},
                    pieces[i]);
}

Vec2 PiecewiseBoundary::tangent_at(double s) const {
  const std::size_t i = piece_at(s);
  const double off = s - cumulative_length[i];
  return std::visit(Overloaded{[&](const SegmentPiece& seg) { return Vec2((seg.end - seg.start).normalized()); },
                               [&](const ArcPiece& a) {
                                 const double ang = a.start_angle + a.sweep - off / a.radius;
                                 return Vec2(std::sin(ang), -std::cos(ang));
                               }},
                    pieces[i]);
}

PiecewiseBoundary build_shapiro(double lambda, double C, int N, bool replace_corners) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw NumericalError(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
  }
  if (!(C > 0.0) || !(C * lambda <= std::numbers::pi) || !(C < kTwoPi)) {
    throw NumericalError(ErrorKind::InvalidArgument, "need C > 0, C lambda <= pi and C < 2 pi");
  }
  if (N < 3) throw NumericalError(ErrorKind::InvalidArgument, "N must be at least 3");

  PiecewiseBoundary b;
  b.origin = Vec2(1.0, 0.0);
  b.lambda = lambda;
  b.C = C;
  b.N = N;
  b.alpha.resize(N + 2);
  b.A.resize(N + 2);
  for (int n = 0; n <= N + 1; ++n) {
    b.alpha[n] = C * std::pow(lambda, n);
    b.A[n] = unit_point_minus_one(b.alpha[n]);
  }
  b.T.assign(N + 1, Vec2::Zero());
  b.S.assign(N + 1, Vec2::Zero());
  b.arc_radius.assign(N + 1, kNaN);

  std::vector<ArcPiece> arcs(N + 1);
  for (int n = 1; n <= N; ++n) {
    const Vec2& An = b.A[n];
    // Half the chord A_n A_{n+1}, and the exterior turning angle at A_n.
    const double d = std::sin(0.5 * (b.alpha[n] - b.alpha[n + 1]));
    const double turn = 0.5 * (b.alpha[n - 1] - b.alpha[n + 1]);
    const Vec2 to_next = (b.A[n + 1] - An).normalized();
    const Vec2 to_prev = (b.A[n - 1] - An).normalized();
    b.T[n] = An + d * to_next;
    b.S[n] = An + d * to_prev;
    const double radius = d / std::tan(0.5 * turn);
    b.arc_radius[n] = radius;
    // Inward normal at T_n of the counter-clockwise edge A_{n+1} -> A_n.
    const Vec2 center = b.T[n] + radius * perp(-to_next);
    const double miss = std::abs((center - b.S[n]).norm() - radius) + std::abs((center - b.S[n]).dot(to_prev));
    if (!(miss <= 1e-10 * std::max(radius, 1e-300) + 1e-15)) {
      throw NumericalError(ErrorKind::Construction, "tangent arc does not close at n=" + std::to_string(n));
    }
    arcs[n] = make_arc(center, radius, b.T[n], b.S[n], turn);
  }

  const Vec2 one = Vec2::Zero();
  if (replace_corners) {
    b.pieces.emplace_back(SegmentPiece{b.A[0], b.S[1]});
    for (int n = 1; n <= N; ++n) {
      b.pieces.emplace_back(arcs[n]);
      const Vec2 next = n < N ? b.S[n + 1] : b.A[N + 1];
      b.pieces.emplace_back(SegmentPiece{b.T[n], next});
    }
  } else {
    for (int n = 0; n <= N; ++n) b.pieces.emplace_back(SegmentPiece{b.A[n], b.A[n + 1]});
  }
  b.pieces.emplace_back(SegmentPiece{b.A[N + 1], one});
  // Unit circle (center -1 in relative coordinates), counter-clockwise from A_0
  // through -1 to the point 1.
  b.pieces.emplace_back(make_arc(Vec2(-1.0, 0.0), 1.0, b.A[0], one, kTwoPi - C));
  finalize(b);
  return b;
}

PiecewiseBoundary polygon_boundary(std::span<const Vec2> v) {
  if (v.size() < 3) throw NumericalError(ErrorKind::InvalidArgument, "polygon needs at least 3 vertices");
  PiecewiseBoundary b;
  for (std::size_t i = 0; i < v.size(); ++i) b.pieces.emplace_back(SegmentPiece{v[i], v[(i + 1) % v.size()]});
  finalize(b);
  return b;
}

PiecewiseBoundary circle_boundary(const Vec2& center, double radius) {
  PiecewiseBoundary b;
  const Vec2 p = center + Vec2(radius, 0.0);
  b.pieces.emplace_back(make_arc(center, radius, p, p, kTwoPi));
  finalize(b);
  return b;
}

LocalProjection project_local(const PiecewiseBoundary& b, const Vec2& x_rel) {
  // Candidates, in order of trust: pieces whose normal region holds x, then
  // junctions where x lies past the end of one piece and before the start of
  // the next (corners), then plain distance. A far-side piece can hold x in
  // its strip but is never nearest, hence the distance tie-break within each
  // class.
  const std::size_t m = b.pieces.size();
  std::vector<PieceHit> hits(m);
  std::vector<double> dist(m);
  for (std::size_t i = 0; i < m; ++i) {
    hits[i] = closest_on(b.pieces[i], x_rel);
    dist[i] = (x_rel - hits[i].nearest).norm();
  }
  auto make = [&](std::size_t i) {
    return LocalProjection{hits[i].nearest, dist[i], static_cast<int>(i), b.cumulative_length[i] + hits[i].offset};
  };
  std::ptrdiff_t interior = -1;
  std::ptrdiff_t corner = -1;
  std::size_t nearest = 0;
  for (std::size_t i = 0; i < m; ++i) {
    if (hits[i].side == 0 && (interior < 0 || dist[i] < dist[interior])) interior = static_cast<std::ptrdiff_t>(i);
    if (hits[i].side == 1 && hits[(i + 1) % m].side == -1 && (corner < 0 || dist[i] < dist[corner])) {
      corner = static_cast<std::ptrdiff_t>(i);
    }
    if (dist[i] < dist[nearest]) nearest = i;
  }
  if (interior >= 0) return make(static_cast<std::size_t>(interior));
  if (corner >= 0) return make(static_cast<std::size_t>(corner));
  return make(nearest);
}

Projection2D project_piecewise(const PiecewiseBoundary& b, const Vec2& x) {
  const Vec2 x_rel = x - b.origin;
  const LocalProjection lp = project_local(b, x_rel);
  Projection2D res;
  res.nearest = b.origin + lp.nearest;
  res.distance = lp.distance;
  if (lp.distance > 0) res.theta = (x_rel - lp.nearest) / lp.distance;
  res.params = {lp.arclength};
  res.piece = lp.piece;
  return res;
}

std::vector<Vec2> dense_samples(const PiecewiseBoundary& b, std::size_t count) {
  std::vector<Vec2> out(count);
  const double L = b.perimeter();
  for (std::size_t k = 0; k < count; ++k) out[k] = b.origin + b.point_at(L * static_cast<double>(k) / count);
  return out;
}

Vec2 flyby_position(double t) { return {2.0 * std::cos(0.5 * t), 2.0 * std::sin(0.5 * t)}; }

namespace {

Vec2 flyby_rel(const PiecewiseBoundary& b, double t) {
  return {2.0 * std::cos(0.5 * t) - b.origin.x(), 2.0 * std::sin(0.5 * t) - b.origin.y()};
}

Vec2 projection_at_zero(const PiecewiseBoundary& b) {
  // For the Shapiro set Pi(0) is the accumulation point itself.
  if (b.N > 0) return Vec2::Zero();
  return project_local(b, flyby_rel(b, 0.0)).nearest;
}

struct Transition {
  double t;
  int from;
  int to;
};

void bisect_transitions(const PiecewiseBoundary& b, double ta, int ida, double tb, int idb,
                        std::vector<Transition>& out, int depth = 0) {
  if (ida == idb) return;
  if (tb - ta <= 4e-16 * tb || depth > 200) {
    out.push_back({0.5 * (ta + tb), ida, idb});
    return;
  }
  const double tm = 0.5 * (ta + tb);
  const int idm = project_local(b, flyby_rel(b, tm)).piece;
  bisect_transitions(b, ta, ida, tm, idm, out, depth + 1);
  bisect_transitions(b, tm, idm, tb, idb, out, depth + 1);
}

double mean_or_nan(double sum, int count) { return count > 0 ? sum / count : kNaN; }

}  // namespace

FlybyResult flyby_experiment(const PiecewiseBoundary& b, const FlybyOptions& opt) {
  if (b.N <= 0) throw NumericalError(ErrorKind::InvalidArgument, "flyby needs a Shapiro boundary");
  if (!(opt.dt > 0.0)) throw NumericalError(ErrorKind::InvalidArgument, "dt must be positive");
  const int N = b.N;
  const double t_min = opt.t_min > 0 ? opt.t_min : b.alpha[N + 1];
  const double t_max = opt.t_max > 0 ? opt.t_max : 2.0 * b.alpha[0];
  if (!(t_max > t_min)) throw NumericalError(ErrorKind::InvalidArgument, "empty flyby time range");

  FlybyResult res;
  const Vec2 pi0 = projection_at_zero(b);
  for (double t = t_min; t <= t_max; t *= (1.0 + opt.dt)) {
    FlybyRecord rec;
    rec.t = t;
    const LocalProjection lp = project_local(b, flyby_rel(b, t));
    rec.projection_rel = lp.nearest;
    rec.projection = b.origin + lp.nearest;
    rec.piece = lp.piece;
    rec.arclength = lp.arclength;
    const double h = opt.fd_relative * t;
    const LocalProjection lo = project_local(b, flyby_rel(b, t - h));
    const LocalProjection hi = project_local(b, flyby_rel(b, t + h));
    rec.speed = (hi.nearest - lo.nearest).norm() / (2.0 * h);
    rec.clean = lo.piece == lp.piece && hi.piece == lp.piece;
    rec.quotient = (lp.nearest - pi0).norm() / t;
    res.samples.push_back(rec);
  }

  std::vector<Transition> transitions;
  for (std::size_t k = 1; k < res.samples.size(); ++k) {
    const auto& a = res.samples[k - 1];
    const auto& c = res.samples[k];
    bisect_transitions(b, a.t, a.piece, c.t, c.piece, transitions);
  }

  res.events.resize(N + 1);
  for (int n = 0; n <= N; ++n) {
    res.events[n] = {n, kNaN, kNaN, kNaN, kNaN, n >= 1 ? b.arc_radius[n] : kNaN, kNaN, kNaN};
  }
  for (const Transition& tr : transitions) {
    if (tr.from == 0 && tr.to == 2 * N + 2) continue;  // past A_0 onto the unit circle
    if (tr.from - tr.to != 1) {
      ++res.unresolved;
      continue;
    }
    // Entering arc 2n-1 from segment 2n happens at T_n; leaving it into
    // segment 2n-2 happens at S_n.
    if (tr.to % 2 == 1) {
      const int n = (tr.to + 1) / 2;
      if (n >= 1 && n <= N) res.events[n].t_n = tr.t;
    } else {
      const int n = (tr.from + 1) / 2;
      if (n >= 1 && n <= N) res.events[n].s_n = tr.t;
    }
  }

  std::vector<double> arc_sum(N + 1, 0.0), seg_sum(N + 1, 0.0);
  std::vector<int> arc_cnt(N + 1, 0), seg_cnt(N + 1, 0);
  for (const FlybyRecord& rec : res.samples) {
    if (!rec.clean || rec.piece > 2 * N) continue;
    if (rec.piece % 2 == 1) {
      const int n = (rec.piece + 1) / 2;
      arc_sum[n] += rec.speed;
      ++arc_cnt[n];
    } else if (rec.piece >= 2 && rec.piece < 2 * N) {
      // Segment 2n-2 lies between S_n and T_{n-1}.
      const int n = (rec.piece + 2) / 2;
      seg_sum[n] += rec.speed;
      ++seg_cnt[n];
    }
  }
  for (int n = 1; n <= N; ++n) {
    FlybyEvent& e = res.events[n];
    e.q_n = (e.s_n - e.t_n) / e.s_n;
    if (n >= 2) e.p_n = (res.events[n - 1].t_n - e.s_n) / res.events[n - 1].t_n;
    e.arc_speed = mean_or_nan(arc_sum[n], arc_cnt[n]);
    e.segment_speed = mean_or_nan(seg_sum[n], seg_cnt[n]);
  }
  res.events.erase(res.events.begin());
  return res;
}

std::vector<double> difference_quotients(const PiecewiseBoundary& b, std::span<const double> times) {
  const Vec2 pi0 = projection_at_zero(b);
  std::vector<double> q(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    q[k] = (project_local(b, flyby_rel(b, times[k])).nearest - pi0).norm() / times[k];
  }
  return q;
}

QuotientSweep difference_quotient_sweep(const PiecewiseBoundary& b, const FlybyResult& flyby, int tail_count) {
  QuotientSweep out;
  std::vector<const FlybyEvent*> usable;
  for (const FlybyEvent& e : flyby.events) {
    if (std::isfinite(e.t_n) && std::isfinite(e.s_n)) usable.push_back(&e);
  }
  if (static_cast<int>(usable.size()) < std::max(tail_count, 2)) {
    throw NumericalError(ErrorKind::InvalidArgument, "insufficient event resolution for the quotient sweep");
  }
  for (const FlybyEvent* e : usable) {
    const double ts[2] = {e->t_n, e->s_n};
    const auto q = difference_quotients(b, ts);
    out.n.push_back(e->n);
    out.q_at_t.push_back(q[0]);
    out.q_at_s.push_back(q[1]);
  }

  const std::size_t first = out.n.size() - tail_count;
  auto tail = [&](const std::vector<double>& v, double& mean, double& spread) {
    const auto begin = v.begin() + static_cast<std::ptrdiff_t>(first);
    mean = std::accumulate(begin, v.end(), 0.0) / tail_count;
    const auto [mn, mx] = std::minmax_element(begin, v.end());
    spread = *mx - *mn;
  };
  tail(out.q_at_t, out.tail_t, out.spread_t);
  tail(out.q_at_s, out.tail_s, out.spread_s);
  out.gap = std::abs(out.tail_t - out.tail_s);
  out.certified = out.gap > 3.0 * std::max(out.spread_t, out.spread_s);

  // Q(t_{n-1}) = v_seg p_n + Q(s_n) (1 - p_n) for n in the tail.
  for (std::size_t k = std::max<std::size_t>(first, 1); k < out.n.size(); ++k) {
    const FlybyEvent& e = *usable[k];
    if (usable[k - 1]->n != e.n - 1 || !std::isfinite(e.p_n)) continue;
    double v_seg = e.segment_speed;
    if (!std::isfinite(v_seg)) {
      const double ts[2] = {usable[k - 1]->t_n, e.s_n};
      const Vec2 a = project_local(b, flyby_rel(b, ts[0])).nearest;
      const Vec2 c = project_local(b, flyby_rel(b, ts[1])).nearest;
      v_seg = (a - c).norm() / (ts[0] - ts[1]);
    }
    const double rebuilt = v_seg * e.p_n + out.q_at_s[k] * (1.0 - e.p_n);
    out.consistency_error = std::max(out.consistency_error, std::abs(rebuilt - out.q_at_t[k - 1]));
  }
  return out;
}

}  // namespace cvxnav
