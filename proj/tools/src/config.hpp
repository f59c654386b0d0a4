#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lighttrap/eikonal.hpp"
#include "lighttrap/perturbation.hpp"
#include "lighttrap/serialize.hpp"

namespace lighttrap::cli {

/// Exit code contract: 0 success, 2 configuration error, 3 infeasible design,
/// 4 numerical failure.
enum ExitStatus : int {
  kOk = 0,
  kConfigError = 2,
  kInfeasible = 3,
  kNumericalFailure = 4,
};

/// I/O problem treated as a configuration error (unwritable path etc.).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LaunchSpec {
  std::optional<double> r0;       // tangential launch
  int sense = +1;
  std::optional<RayState> state;  // explicit state launch
};

struct OutputSpec {
  std::optional<std::string> trajectory_csv;
  std::optional<std::string> summary_json;
  std::optional<std::string> plot_svg;
};

struct SceneConfig {
  FieldPtr field;
  LaunchSpec launch;
  IntegrateOptions integrator;
  bool escape_r_given = false;
  OutputSpec outputs;
  std::uint64_t seed = 0;
};

struct SweepConfig {
  double n_a, n_c, sigma;
  std::string parameter;        // "n_c" | "sigma" | "b"
  std::vector<double> values;
  IntegrateOptions integrator;  // tolerances; horizons derived per point
  bool integrator_given = false;
  std::optional<std::string> csv_path;
  std::optional<std::string> svg_path;
  std::uint64_t seed = 0;
};

struct PerturbConfig {
  FieldPtr field;
  std::optional<double> launch_r0;  // absent: mid-band tangential launch
  int sense = +1;
  std::vector<double> amplitudes;
  ScanShape shape;
  double periods = 20.0;
  std::optional<std::string> csv_path;
  std::optional<std::string> json_path;
  std::optional<std::string> svg_path;
  std::uint64_t seed = 0;
};

struct DesignConfig {
  DesignProblem problem;
  std::optional<std::string> outcome_path;
  std::optional<std::string> verification_path;
};

json load_json_file(const std::filesystem::path& path);

SceneConfig parse_scene_config(const json& j);
SweepConfig parse_sweep_config(const json& j);
PerturbConfig parse_perturb_config(const json& j);
DesignConfig parse_design_config(const json& j);

/// Writes content to out_dir / path (path may be absolute), creating parent
/// directories. Throws IoError when the file cannot be written.
void write_file(const std::filesystem::path& out_dir, const std::string& path,
                const std::string& content);

}  // namespace lighttrap::cli
