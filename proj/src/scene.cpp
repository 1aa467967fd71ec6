#include "cvxnav/scene.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>

#include "cvxnav/checks.hpp"
#include "cvxnav/errors.hpp"

namespace cvxnav {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

ParamMap parse_params(const json& j) {
  ParamMap out;
  if (!j.is_object()) throw ConfigError("'params' must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw ConfigError("parameter '" + k + "' must be a number");
    out[k] = v.get<double>();
  }
  return out;
}

BodySpec parse_body(const json& j) {
  if (!j.is_object()) throw ConfigError("'body' must be an object");
  const int kinds = static_cast<int>(j.contains("surface")) + static_cast<int>(j.contains("curve")) +
                    static_cast<int>(j.contains("shapiro"));
  if (kinds != 1) throw ConfigError("'body' needs exactly one of 'surface', 'curve', 'shapiro'");
  const ParamMap params = j.contains("params") ? parse_params(j.at("params")) : ParamMap{};
  if (j.contains("surface")) return SurfaceBodySpec{get_or<std::string>(j, "surface", ""), params};
  if (j.contains("curve")) return CurveBodySpec{get_or<std::string>(j, "curve", ""), params};
  const json& s = j.at("shapiro");
  ShapiroBodySpec spec;
  spec.lambda = get_or(s, "lambda", spec.lambda);
  spec.C = get_or(s, "C", spec.C);
  spec.N = get_or(s, "N", spec.N);
  return spec;
}

std::vector<double> read_vector(const json& j, const char* key) {
  if (!j.contains(key)) return {};
  return get_or<std::vector<double>>(j, key, {});
}

void require_size(const std::vector<double>& v, std::size_t n, const std::string& what) {
  if (v.size() != n) throw ConfigError(what + " must have " + std::to_string(n) + " components");
}

template <int Dim>
VecN<Dim> to_vec(const std::vector<double>& v, const std::string& what) {
  require_size(v, Dim, what);
  VecN<Dim> out;
  for (int i = 0; i < Dim; ++i) out(i) = v[i];
  return out;
}

template <int Dim>
Trajectory<Dim> load_samples(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory samples '" + path.string() + "'");
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> times;
  std::vector<VecN<Dim>> points;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double t = 0;
    VecN<Dim> p;
    ls >> t;
    for (int i = 0; i < Dim; ++i) ls >> p(i);
    if (!ls) throw ConfigError("malformed sample row in '" + path.string() + "': " + line);
    times.push_back(t);
    points.push_back(p);
  }
  try {
    return spline_trajectory<Dim>(times, points);
  } catch (const NumericalError& e) {
    throw ConfigError(std::string("trajectory samples: ") + e.what());
  }
}

template <int Dim>
Trajectory<Dim> make_trajectory(const SceneConfig& cfg) {
  const TrajectorySpec& ts = cfg.trajectory;
  double lo = std::min(cfg.time.start, cfg.time.end);
  double hi = std::max(cfg.time.start, cfg.time.end);
  lo = std::min(lo, cfg.initial_time());
  hi = std::max(hi, cfg.initial_time());
  for (double t : cfg.time.grid) lo = std::min(lo, t), hi = std::max(hi, t);
  if (ts.type == "line") {
    return line_trajectory<Dim>(to_vec<Dim>(ts.origin, "trajectory.origin"),
                                to_vec<Dim>(ts.velocity, "trajectory.velocity"), lo, hi);
  }
  if (ts.type == "circle") {
    return circle_trajectory<Dim>(to_vec<Dim>(ts.center, "trajectory.center"), ts.radius, ts.omega, ts.phase, lo, hi);
  }
  if (ts.type == "helix") {
    if constexpr (Dim == 3) {
      return helix_trajectory(to_vec<3>(ts.center, "trajectory.center"), ts.radius, ts.omega, ts.phase,
                              ts.axial_speed, lo, hi);
    } else {
      throw ConfigError("helix trajectories are 3D only");
    }
  }
  if (ts.type == "samples") {
    const fs::path p = ts.path.is_absolute() ? ts.path : cfg.base_dir / ts.path;
    return load_samples<Dim>(p);
  }
  throw ConfigError("unknown trajectory type '" + ts.type + "'");
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
}

std::string track_csv_text(int dim, const std::vector<TrackerState>& states) {
  std::string out = dim == 3 ? "t,u,v,r,residual\n" : "t,u,r,residual\n";
  for (const TrackerState& s : states) {
    if (dim == 3) {
      out += fmt::format("{},{},{},{},{}\n", format_number(s.t), format_number(s.u), format_number(s.v),
                         format_number(s.r), format_number(s.residual));
    } else {
      out += fmt::format("{},{},{},{}\n", format_number(s.t), format_number(s.u), format_number(s.r),
                         format_number(s.residual));
    }
  }
  return out;
}

std::vector<TrackerState> read_track_csv(const fs::path& path, int dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("missing track CSV '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<TrackerState> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    TrackerState s;
    if (dim == 3) {
      ls >> s.t >> s.u >> s.v >> s.r >> s.residual;
    } else {
      ls >> s.t >> s.u >> s.r >> s.residual;
    }
    if (!ls) throw ConfigError("malformed track CSV row: " + line);
    out.push_back(s);
  }
  return out;
}

json stats_json(const OdeStats& st) {
  return {{"accepted_steps", st.accepted},
          {"rejected_steps", st.rejected},
          {"rhs_evaluations", st.rhs_evals},
          {"restarts", st.restarts},
          {"min_step", std::isfinite(st.min_step) ? st.min_step : 0.0},
          {"max_step", st.max_step}};
}

}  // namespace

std::string format_number(double x) { return fmt::format("{:.17g}", x); }

int SceneConfig::dimension() const {
  return std::holds_alternative<SurfaceBodySpec>(body) ? 3 : 2;
}

std::vector<double> SceneConfig::output_times() const {
  if (!time.grid.empty()) return time.grid;
  if (time.start == time.end || time.samples <= 0) return {};
  if (time.samples == 1) return {time.start};
  std::vector<double> out(time.samples);
  for (int k = 0; k < time.samples; ++k) {
    out[k] = time.start + (time.end - time.start) * static_cast<double>(k) / (time.samples - 1);
  }
  out.back() = time.end;
  return out;
}

SceneConfig parse_scene(const std::string& text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("scene must be a JSON object");
  if (!j.contains("body")) throw ConfigError("scene needs a 'body'");
  if (!j.contains("trajectory")) throw ConfigError("scene needs a 'trajectory'");

  SceneConfig cfg;
  cfg.base_dir = base_dir;
  cfg.body = parse_body(j.at("body"));

  const json& tj = j.at("trajectory");
  cfg.trajectory.type = get_or<std::string>(tj, "type", "line");
  cfg.trajectory.origin = read_vector(tj, "origin");
  cfg.trajectory.velocity = read_vector(tj, "velocity");
  cfg.trajectory.center = read_vector(tj, "center");
  cfg.trajectory.radius = get_or(tj, "radius", cfg.trajectory.radius);
  cfg.trajectory.omega = get_or(tj, "omega", cfg.trajectory.omega);
  cfg.trajectory.phase = get_or(tj, "phase", cfg.trajectory.phase);
  cfg.trajectory.axial_speed = get_or(tj, "axial_speed", cfg.trajectory.axial_speed);
  cfg.trajectory.path = get_or<std::string>(tj, "path", "");

  if (j.contains("integrator")) {
    const json& ij = j.at("integrator");
    IntegratorConfig& ic = cfg.integrator;
    ic.abs_tol = get_or(ij, "abs_tol", ic.abs_tol);
    ic.rel_tol = get_or(ij, "rel_tol", ic.rel_tol);
    ic.max_step = get_or(ij, "max_step", ic.max_step);
    ic.residual_tolerance = get_or(ij, "residual_tolerance", ic.residual_tolerance);
    ic.reinit_on_breach = get_or(ij, "reinit_on_breach", ic.reinit_on_breach);
    ic.oracle.grid_density = get_or(ij, "oracle_grid_density", ic.oracle.grid_density);
    try {
      ic.validate();
    } catch (const NumericalError& e) {
      throw ConfigError(e.what());
    }
  }

  if (j.contains("initial")) {
    const json& init = j.at("initial");
    if (init.is_string()) {
      if (init.get<std::string>() != "auto") throw ConfigError("'initial' must be \"auto\" or an array");
    } else {
      cfg.initial = get_or<std::vector<double>>(j, "initial", {});
      require_size(*cfg.initial, static_cast<std::size_t>(cfg.dimension()), "'initial'");
    }
  }

  if (!j.contains("time")) throw ConfigError("scene needs a 'time' block");
  const json& tm = j.at("time");
  cfg.time.start = get_or(tm, "start", 0.0);
  cfg.time.end = get_or(tm, "end", 0.0);
  cfg.time.samples = get_or(tm, "samples", cfg.time.samples);
  cfg.time.grid = read_vector(tm, "grid");
  if (tm.contains("initial_time")) cfg.time.initial_time = get_or(tm, "initial_time", 0.0);

  if (j.contains("output")) {
    const json& o = j.at("output");
    cfg.track_csv = get_or(o, "track_csv", cfg.track_csv);
    cfg.metadata = get_or(o, "metadata", cfg.metadata);
    cfg.validate_csv = get_or(o, "validate_csv", cfg.validate_csv);
    cfg.oracle_csv = get_or(o, "oracle_csv", cfg.oracle_csv);
    cfg.checks_json = get_or(o, "checks_json", cfg.checks_json);
  }
  cfg.distance_tolerance = get_or(j, "distance_tolerance", cfg.distance_tolerance);
  cfg.seed = get_or(j, "seed", cfg.seed);

  if (cfg.trajectory.type == "samples") {
    const fs::path p = cfg.trajectory.path.is_absolute() ? cfg.trajectory.path : base_dir / cfg.trajectory.path;
    if (!fs::exists(p)) throw ConfigError("trajectory samples file '" + p.string() + "' does not exist");
  }
  return cfg;
}

SceneConfig load_scene(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scene(ss.str(), path.parent_path());
}

Body make_body(const BodySpec& spec) {
  return std::visit(
      [](const auto& s) -> Body {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, SurfaceBodySpec>) {
          return builtin_surface(s.name, s.params);
        } else if constexpr (std::is_same_v<S, CurveBodySpec>) {
          return builtin_curve(s.name, s.params);
        } else {
          try {
            return build_shapiro(s.lambda, s.C, s.N);
          } catch (const NumericalError& e) {
            throw ConfigError(e.what());
          }
        }
      },
      spec);
}

Trajectory<2> make_trajectory2(const SceneConfig& cfg) { return make_trajectory<2>(cfg); }
Trajectory<3> make_trajectory3(const SceneConfig& cfg) { return make_trajectory<3>(cfg); }

namespace {

template <class Surf, int Dim>
TrackResult track_impl(const Surf& body, const Trajectory<Dim>& traj, const SceneConfig& cfg, TrackResult* partial) {
  const std::vector<double> times = cfg.output_times();
  const double t0 = cfg.initial_time();
  TrackResult total;
  if (times.empty()) return total;

  TrackerState init;
  if (cfg.initial) {
    const auto& iv = *cfg.initial;
    init.t = t0;
    init.u = iv[0];
    if constexpr (Dim == 3) {
      init.v = iv[1];
      init.r = iv[2];
      init.residual = reconstruction_residual(body, init.u, init.v, init.r, traj.c(t0));
    } else {
      init.r = iv[1];
      init.residual = reconstruction_residual(body, init.u, init.r, traj.c(t0));
    }
  } else {
    init = initialize(body, traj.c(t0), t0, cfg.integrator.oracle);
  }

  std::vector<double> backward;
  std::vector<double> forward;
  for (double t : times) (t < t0 ? backward : forward).push_back(t);
  std::sort(backward.begin(), backward.end(), std::greater<>());
  std::sort(forward.begin(), forward.end());

  std::vector<TrackerState> collected;
  auto sink = [&](const TrackerState& s) { collected.push_back(s); };
  auto merge = [&](const TrackResult& part) {
    total.stats.accepted += part.stats.accepted;
    total.stats.rejected += part.stats.rejected;
    total.stats.rhs_evals += part.stats.rhs_evals;
    total.stats.restarts += part.stats.restarts;
    total.stats.min_step = std::min(total.stats.min_step, part.stats.min_step);
    total.stats.max_step = std::max(total.stats.max_step, part.stats.max_step);
    total.reinit_events.insert(total.reinit_events.end(), part.reinit_events.begin(), part.reinit_events.end());
    total.max_residual = std::max(total.max_residual, part.max_residual);
  };
  auto finish = [&]() {
    std::sort(collected.begin(), collected.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
    total.states = collected;
  };
  try {
    if (!backward.empty()) merge(integrate(body, init, traj, cfg.integrator, backward, sink));
    if (!forward.empty()) merge(integrate(body, init, traj, cfg.integrator, forward, sink));
  } catch (const NumericalError&) {
    finish();
    if (partial) *partial = total;
    throw;
  }
  finish();
  return total;
}

}  // namespace

TrackResult track_scene(const SceneConfig& cfg, TrackResult* partial) {
  const Body body = make_body(cfg.body);
  if (const auto* s = std::get_if<Surface3D>(&body)) return track_impl(*s, make_trajectory3(cfg), cfg, partial);
  if (const auto* c = std::get_if<Curve2D>(&body)) return track_impl(*c, make_trajectory2(cfg), cfg, partial);
  throw ConfigError("tracking requires a twice-differentiable body; the Shapiro set is only C^{1,1}");
}

std::optional<double> exact_distance(const BodySpec& spec, std::span<const double> p) {
  if (const auto* s = std::get_if<SurfaceBodySpec>(&spec)) {
    const auto it = s->params.find("kappa");
    if (it == s->params.end() || p.size() != 3) return std::nullopt;
    const double R = 1.0 / it->second;
    if (s->name == "sphere") return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - R;
    if (s->name == "cylinder") return std::hypot(p[0], p[1]) - R;
    if (s->name == "ellipsoid_of_revolution" && it->second == 1.0) {
      return std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]) - 1.0;
    }
    return std::nullopt;
  }
  if (const auto* c = std::get_if<CurveBodySpec>(&spec)) {
    if (c->name != "circle" || p.size() != 2) return std::nullopt;
    const auto it = c->params.find("radius");
    const double R = it == c->params.end() ? 1.0 : it->second;
    return std::hypot(p[0], p[1]) - R;
  }
  return std::nullopt;
}

void apply_overrides(SceneConfig& cfg, const RunOptions& opt) {
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.tol) {
    if (!(*opt.tol > 0)) throw ConfigError("--tol must be positive");
    cfg.integrator.abs_tol = *opt.tol;
    cfg.integrator.rel_tol = *opt.tol;
  }
}

fs::path output_path(const SceneConfig& cfg, const RunOptions& opt, const std::string& name) {
  const fs::path p(name);
  if (p.is_absolute()) return p;
  return (opt.out_dir.empty() ? cfg.base_dir : opt.out_dir) / p;
}

int run_track(SceneConfig cfg, const RunOptions& opt) {
  apply_overrides(cfg, opt);
  const int dim = cfg.dimension();
  if (std::holds_alternative<ShapiroBodySpec>(cfg.body)) {
    throw ConfigError("tracking requires a twice-differentiable body; use the shapiro subcommand");
  }
  json meta;
  meta["seed"] = cfg.seed;
  meta["abs_tol"] = cfg.integrator.abs_tol;
  meta["rel_tol"] = cfg.integrator.rel_tol;
  meta["residual_tolerance"] = cfg.integrator.residual_tolerance;
  int code = 0;
  TrackResult result;
  try {
    result = track_scene(cfg, &result);
    meta["status"] = "ok";
  } catch (const NumericalError& e) {
    meta["status"] = "aborted";
    meta["error"] = e.what();
    code = 3;
  }
  meta["rows"] = result.states.size();
  meta["max_residual"] = result.max_residual;
  meta["solver"] = stats_json(result.stats);
  json events = json::array();
  for (const ReinitEvent& ev : result.reinit_events) events.push_back({{"t", ev.t}, {"residual", ev.residual_before}});
  meta["reinit_events"] = events;

  write_text(output_path(cfg, opt, cfg.track_csv), track_csv_text(dim, result.states));
  write_text(output_path(cfg, opt, cfg.metadata), meta.dump(2) + "\n");
  std::cout << fmt::format("track: {} rows, max residual {:.3e}, status {}\n", result.states.size(),
                           result.max_residual, meta["status"].get<std::string>());
  if (code != 0) std::cerr << meta["error"].get<std::string>() << "\n";
  return code;
}

int run_validate(SceneConfig cfg, const RunOptions& opt) {
  apply_overrides(cfg, opt);
  const int dim = cfg.dimension();
  if (std::holds_alternative<ShapiroBodySpec>(cfg.body)) {
    throw ConfigError("validate requires a tracked body; use the shapiro subcommand");
  }
  const Body body = make_body(cfg.body);
  const std::vector<TrackerState> states = read_track_csv(output_path(cfg, opt, cfg.track_csv), dim);

  std::string csv = "t,r_ode,r_oracle,abs_err_oracle,r_exact,abs_err_exact,residual\n";
  double worst_oracle = 0.0;
  double worst_exact = 0.0;
  double worst_residual = 0.0;
  bool have_exact = false;
  for (const TrackerState& s : states) {
    double r_oracle = 0.0;
    double residual = 0.0;
    std::optional<double> r_exact;
    if (dim == 3) {
      const auto& surf = std::get<Surface3D>(body);
      const Vec3 c = make_trajectory3(cfg).c(s.t);
      r_oracle = project_parametric(surf, c, cfg.integrator.oracle).distance;
      residual = reconstruction_residual(surf, s.u, s.v, s.r, c);
      const double p[3] = {c.x(), c.y(), c.z()};
      r_exact = exact_distance(cfg.body, p);
    } else {
      const auto& curve = std::get<Curve2D>(body);
      const Vec2 c = make_trajectory2(cfg).c(s.t);
      r_oracle = project_parametric(curve, c, cfg.integrator.oracle).distance;
      residual = reconstruction_residual(curve, s.u, s.r, c);
      const double p[2] = {c.x(), c.y()};
      r_exact = exact_distance(cfg.body, p);
    }
    const double err = std::abs(s.r - r_oracle);
    worst_oracle = std::max(worst_oracle, err);
    worst_residual = std::max(worst_residual, residual);
    std::string exact_cols = ",";
    if (r_exact) {
      have_exact = true;
      const double e = std::abs(s.r - *r_exact);
      worst_exact = std::max(worst_exact, e);
      exact_cols = format_number(*r_exact) + "," + format_number(e);
    }
    csv += fmt::format("{},{},{},{},{},{}\n", format_number(s.t), format_number(s.r), format_number(r_oracle),
                       format_number(err), exact_cols, format_number(residual));
  }
  write_text(output_path(cfg, opt, cfg.validate_csv), csv);

  const bool ok = worst_oracle <= cfg.distance_tolerance && worst_exact <= cfg.distance_tolerance &&
                  worst_residual <= cfg.integrator.residual_tolerance;
  json summary = {{"rows", states.size()},
                  {"max_abs_err_oracle", worst_oracle},
                  {"max_residual", worst_residual},
                  {"distance_tolerance", cfg.distance_tolerance},
                  {"residual_tolerance", cfg.integrator.residual_tolerance},
                  {"pass", ok}};
  if (have_exact) summary["max_abs_err_exact"] = worst_exact;
  std::cout << summary.dump(2) << "\n";
  return ok ? 0 : 1;
}

namespace {

template <int Dim>
VecN<Dim> random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  VecN<Dim> v;
  do {
    for (int i = 0; i < Dim; ++i) v(i) = nd(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

template <int Dim, class Project>
json check_entry(Project&& project, const VecN<Dim>& x, const VecN<Dim>& dir) {
  const GradientReport g = distance_gradient_check<Dim>(project, x, dir);
  const ContinuityReport c = projection_continuity_check<Dim>(project, x, dir);
  return {{"x", std::vector<double>(x.data(), x.data() + Dim)},
          {"dir", std::vector<double>(dir.data(), dir.data() + Dim)},
          {"theta_dot_dir", g.theta_dot_dir},
          {"gradient_discrepancy", g.discrepancy},
          {"gradient_decreasing", g.decreasing},
          {"continuity_moduli", c.moduli},
          {"lipschitz_estimate", c.fitted_constant},
          {"continuity_bounded", c.bounded}};
}

}  // namespace

int run_oracle(SceneConfig cfg, const RunOptions& opt) {
  apply_overrides(cfg, opt);
  const Body body = make_body(cfg.body);
  const std::vector<double> times = cfg.output_times();
  std::mt19937_64 rng(cfg.seed);
  json checks = json::array();
  std::string csv;
  constexpr int kChecks = 20;

  if (const auto* surf = std::get_if<Surface3D>(&body)) {
    const auto traj = make_trajectory3(cfg);
    auto project = [&](const Vec3& x) { return project_parametric(*surf, x, cfg.integrator.oracle); };
    csv = "t,x,y,z,nearest_x,nearest_y,nearest_z,distance,u,v\n";
    for (double t : times) {
      const Vec3 c = traj.c(t);
      const Projection3D p = project(c);
      csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", format_number(t), format_number(c.x()),
                         format_number(c.y()), format_number(c.z()), format_number(p.nearest.x()),
                         format_number(p.nearest.y()), format_number(p.nearest.z()), format_number(p.distance),
                         format_number(p.params[0]), format_number(p.params[1]));
    }
    std::uniform_real_distribution<double> ut(traj.t_start, traj.t_end);
    for (int k = 0; k < kChecks; ++k) checks.push_back(check_entry<3>(project, traj.c(ut(rng)), random_unit<3>(rng)));
  } else {
    const auto traj = make_trajectory2(cfg);
    std::function<Projection2D(const Vec2&)> project;
    if (const auto* curve = std::get_if<Curve2D>(&body)) {
      project = [&cfg, curve](const Vec2& x) { return project_parametric(*curve, x, cfg.integrator.oracle); };
    } else {
      const auto& pb = std::get<PiecewiseBoundary>(body);
      project = [&pb](const Vec2& x) { return project_piecewise(pb, x); };
    }
    csv = "t,x,y,nearest_x,nearest_y,distance,param\n";
    for (double t : times) {
      const Vec2 c = traj.c(t);
      const Projection2D p = project(c);
      csv += fmt::format("{},{},{},{},{},{},{}\n", format_number(t), format_number(c.x()), format_number(c.y()),
                         format_number(p.nearest.x()), format_number(p.nearest.y()), format_number(p.distance),
                         format_number(p.params[0]));
    }
    std::uniform_real_distribution<double> ut(traj.t_start, traj.t_end);
    for (int k = 0; k < kChecks; ++k) checks.push_back(check_entry<2>(project, traj.c(ut(rng)), random_unit<2>(rng)));
  }

  bool all_ok = true;
  for (const json& c : checks) {
    all_ok = all_ok && c["gradient_decreasing"].get<bool>() && c["continuity_bounded"].get<bool>();
  }
  const json report = {{"seed", cfg.seed}, {"all_pass", all_ok}, {"checks", checks}};
  write_text(output_path(cfg, opt, cfg.oracle_csv), csv);
  write_text(output_path(cfg, opt, cfg.checks_json), report.dump(2) + "\n");
  std::cout << fmt::format("oracle: {} projections, {} regularity checks, all pass: {}\n", times.size(),
                           checks.size(), all_ok);
  return all_ok ? 0 : 1;
}

int run_shapiro(const ShapiroRunOptions& opt) {
  PiecewiseBoundary b;
  try {
    b = build_shapiro(opt.lambda, opt.C, opt.N);
  } catch (const NumericalError& e) {
    if (e.kind() == ErrorKind::InvalidArgument) throw ConfigError(e.what());
    throw;
  }
  FlybyOptions fo;
  fo.t_max = opt.t_max;
  fo.dt = opt.dt;
  const FlybyResult fly = flyby_experiment(b, fo);

  std::string events = "n,t_n,s_n,p_n,q_n,r_n\n";
  for (const FlybyEvent& e : fly.events) {
    events += fmt::format("{},{},{},{},{},{}\n", e.n, format_number(e.t_n), format_number(e.s_n),
                          format_number(e.p_n), format_number(e.q_n), format_number(e.r_n));
  }
  std::string samples = "t,pi_x,pi_y,speed,Q\n";
  for (const FlybyRecord& r : fly.samples) {
    samples += fmt::format("{},{},{},{},{}\n", format_number(r.t), format_number(r.projection.x()),
                           format_number(r.projection.y()), format_number(r.speed), format_number(r.quotient));
  }
  write_text(opt.out_dir / "shapiro_events.csv", events);
  write_text(opt.out_dir / "shapiro_samples.csv", samples);

  const double r_inf = 2 * opt.lambda / (1 + opt.lambda);
  json summary = {{"lambda", opt.lambda},
                  {"C", opt.C},
                  {"N", opt.N},
                  {"dt", opt.dt},
                  {"samples", fly.samples.size()},
                  {"unresolved_transitions", fly.unresolved},
                  {"radius_limit", r_inf},
                  {"arc_speed_limit", r_inf / (1 + r_inf)}};
  try {
    const QuotientSweep q = difference_quotient_sweep(b, fly, std::min(10, opt.N - 2));
    summary["quotient_tail_t"] = q.tail_t;
    summary["quotient_tail_s"] = q.tail_s;
    summary["quotient_spread_t"] = q.spread_t;
    summary["quotient_spread_s"] = q.spread_s;
    summary["quotient_gap"] = q.gap;
    summary["nonexistence_certified"] = q.certified;
    summary["consistency_error"] = q.consistency_error;
  } catch (const NumericalError& e) {
    summary["quotient_error"] = e.what();
  }
  write_text(opt.out_dir / "shapiro_summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace cvxnav
