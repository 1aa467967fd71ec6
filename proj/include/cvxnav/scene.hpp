#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "cvxnav/shapiro.hpp"
#include "cvxnav/surfaces.hpp"
#include "cvxnav/tracker.hpp"
#include "cvxnav/trajectory.hpp"

namespace cvxnav {

struct SurfaceBodySpec {
  std::string name;
  ParamMap params;
};

struct CurveBodySpec {
  std::string name;
  ParamMap params;
};

struct ShapiroBodySpec {
  double lambda = 0.5;
  double C = 1.5707963267948966;
  int N = 30;
};

using BodySpec = std::variant<SurfaceBodySpec, CurveBodySpec, ShapiroBodySpec>;

struct TrajectorySpec {
  std::string type = "line";  // line | circle | helix | samples
  std::vector<double> origin;
  std::vector<double> velocity;
  std::vector<double> center;
  double radius = 1.0;
  double omega = 1.0;
  double phase = 0.0;
  double axial_speed = 0.0;
  std::filesystem::path path;  // samples: CSV with header t,x,y[,z]
};

struct TimeSpec {
  double start = 0.0;
  double end = 0.0;
  int samples = 101;           // equally spaced including both ends
  std::vector<double> grid;    // explicit output times; overrides samples
  std::optional<double> initial_time;  // time of the initial state, default start
};

struct SceneConfig {
  BodySpec body;
  TrajectorySpec trajectory;
  IntegratorConfig integrator;
  std::optional<std::vector<double>> initial;  // (u, v, r) or (u, r); empty = oracle
  TimeSpec time;
  std::string track_csv = "track.csv";
  std::string metadata = "track.json";
  std::string validate_csv = "validate.csv";
  std::string oracle_csv = "oracle.csv";
  std::string checks_json = "checks.json";
  double distance_tolerance = 1e-6;
  std::uint64_t seed = kDefaultSeed;
  std::filesystem::path base_dir;  // relative paths resolve against this

  int dimension() const;
  double initial_time() const { return time.initial_time.value_or(time.start); }
  std::vector<double> output_times() const;
};

SceneConfig parse_scene(const std::string& json_text, const std::filesystem::path& base_dir = {});
SceneConfig load_scene(const std::filesystem::path& path);

using Body = std::variant<Surface3D, Curve2D, PiecewiseBoundary>;
Body make_body(const BodySpec& spec);

Trajectory<2> make_trajectory2(const SceneConfig& cfg);
Trajectory<3> make_trajectory3(const SceneConfig& cfg);

// Integrates the scene over its output grid, both directions from the
// initial time. States arrive sorted by t. On a numerical abort the states
// produced so far are kept in `partial` and the error is rethrown.
TrackResult track_scene(const SceneConfig& cfg, TrackResult* partial = nullptr);

// Closed-form distance when the body admits one (sphere, cylinder, circle).
std::optional<double> exact_distance(const BodySpec& spec, std::span<const double> point);

struct RunOptions {
  std::filesystem::path out_dir;  // empty: outputs go next to the config
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;  // overrides abs_tol and rel_tol
};

void apply_overrides(SceneConfig& cfg, const RunOptions& opt);
std::filesystem::path output_path(const SceneConfig& cfg, const RunOptions& opt, const std::string& name);

// Each returns the process exit code: 0 ok, 1 validation threshold exceeded,
// 3 numerical abort. ConfigError propagates (exit code 2).
int run_track(SceneConfig cfg, const RunOptions& opt);
int run_validate(SceneConfig cfg, const RunOptions& opt);
int run_oracle(SceneConfig cfg, const RunOptions& opt);

struct ShapiroRunOptions {
  double lambda = 0.5;
  double C = 1.5707963267948966;
  int N = 30;
  double t_max = 0.0;  // 0 selects 2 alpha_0
  double dt = 0.01;    // relative sampling step
  std::filesystem::path out_dir = ".";
};

int run_shapiro(const ShapiroRunOptions& opt);

// CSV number formatting: 17 significant digits.
std::string format_number(double x);

}  // namespace cvxnav
