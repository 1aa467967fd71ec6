// Command-line front end: track, validate, oracle, shapiro.

#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "cvxnav/errors.hpp"
#include "cvxnav/scene.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct SceneArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
};

void add_scene_flags(CLI::App* sub, SceneArgs& args) {
  sub->add_option("--config", args.config, "Scene JSON file")->required();
  sub->add_option("--out", args.out, "Output directory (default: next to the config)");
  sub->add_option("--seed", args.seed, "Random seed override");
  sub->add_option("--tol", args.tol, "Override abs_tol and rel_tol");
}

cvxnav::RunOptions run_options(const SceneArgs& a) {
  cvxnav::RunOptions o;
  o.out_dir = a.out;
  o.seed = a.seed;
  o.tol = a.tol;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distance and metric projection tracking outside convex bodies"};
  app.require_subcommand(1);

  SceneArgs track_args;
  SceneArgs validate_args;
  SceneArgs oracle_args;
  auto* track = app.add_subcommand("track", "Integrate the tracking ODE over the scene's time grid");
  auto* validate = app.add_subcommand("validate", "Compare a track CSV against the oracle and closed forms");
  auto* oracle = app.add_subcommand("oracle", "Project the trajectory with the oracle and run regularity checks");
  add_scene_flags(track, track_args);
  add_scene_flags(validate, validate_args);
  add_scene_flags(oracle, oracle_args);

  cvxnav::ShapiroRunOptions sh;
  std::string sh_out = ".";
  auto* shapiro = app.add_subcommand("shapiro", "Build the Shapiro set and run the flyby experiment");
  shapiro->add_option("--lambda", sh.lambda, "Shrink ratio in (0, 1)")->capture_default_str();
  shapiro->add_option("--C", sh.C, "Total angle of the construction")->capture_default_str();
  shapiro->add_option("--N", sh.N, "Number of arcs")->capture_default_str();
  shapiro->add_option("--t-max", sh.t_max, "Largest flyby time (0: automatic)")->capture_default_str();
  shapiro->add_option("--dt", sh.dt, "Relative sampling step")->capture_default_str();
  shapiro->add_option("--out", sh_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*track) return cvxnav::run_track(cvxnav::load_scene(track_args.config), run_options(track_args));
    if (*validate) return cvxnav::run_validate(cvxnav::load_scene(validate_args.config), run_options(validate_args));
    if (*oracle) return cvxnav::run_oracle(cvxnav::load_scene(oracle_args.config), run_options(oracle_args));
    if (*shapiro) {
      sh.out_dir = sh_out;
      return cvxnav::run_shapiro(sh);
    }
  } catch (const cvxnav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const cvxnav::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return 0;
}
