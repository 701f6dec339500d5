#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vwl/error.hpp"
#include "vwl/vorticity.hpp"

namespace vwl {

struct LaminarParams {
  std::optional<double> Q;
  double F = 0.0;
  bool shallow = false;
  int samples = 129;
};

struct FieldParams {
  /// Field CSV; the trivial extreme wave of the configured vorticity when empty.
  std::string input;
  double shift = 0.0;
  double stagnation_tol = 1e-8;
  int order = 2;
  double bump_cx = 0.5, bump_cy = -0.5, bump_radius = 0.25, bump_amplitude = 1.0;
  int bump_degree = 4;
};

struct PressureParams {
  std::string input;
  std::string kind = "R";
  /// Multiplier for S heads and the elliptic identity; zero when absent.
  std::optional<nlohmann::json> multiplier;
  int sperb_margin = 4;
  double relative_cutoff = 1e-4;
  double sperb_tol = 1e-6;
  double nqt_tol = 1e-6;
};

struct WavegenParams {
  std::vector<double> targets;
  std::optional<double> seed_Q;
  int max_iter = 30;
  double refine_fraction = 0.8;
  double refine_ratio = 4.0;
  double head_tol = 1e-6;
  /// Manifest written by `wavegen continue`, read by `wavegen diagnose`.
  std::string input;
};

struct BlowupParams {
  /// "stokes", "corner", "trivial_extreme" or "field".
  std::string source = "stokes";
  std::string input;
  double alpha_plus = 0.5235987755982988;
  double alpha_minus = 0.5235987755982988;
  std::optional<double> beta;
  int n = 50;
  double spacing = 0.0;
  std::vector<double> scales{1e-1, 1e-2, 1e-3};
  double x_min = -1.0, x_max = 1.0, y_bottom = -1.0;
  double delta = 1.0;
  double axis = -1.5707963267948966;
  double half_aperture = 1.0471975511965976;
  double r0 = 1.0;
  int cone_scales = 12;
  int angles = 33;
  int boundary_samples = 200;
  int window_points = 128;
};

struct ThetaParams {
  int n = 2048;
  double x_min = 1e-6;
  double x_max = 1e6;
  /// "constant", "ramp" ((π/2) x/(1+x)), "random" or "file".
  std::string init = "constant";
  double init_value = 0.7853981633974483;
  std::string input;
  int max_iter = 200;
  double omega = 0.5;
  int samples = 1;
  std::vector<double> x_eval{0.1, 1.0, 10.0};
};

/// Validated run configuration: vorticity, constants, grid, tolerance and
/// per-command sections.
struct RunConfig {
  VorticityFn gamma = VorticityFn::constant(-1.0);
  double g = 1.0;
  double B = 1.0;
  double L = 1.0;
  int nx = 128;
  int ny = 128;
  double tol = 1e-8;
  std::uint64_t seed = 0;
  std::string out = ".";

  LaminarParams laminar;
  FieldParams field;
  PressureParams pressure;
  WavegenParams wavegen;
  BlowupParams blowup;
  ThetaParams theta;

  /// Normalized document (defaults filled).
  nlohmann::json to_json() const;
};

/// Parses a JSON document. Unknown keys and type mismatches raise
/// SchemaError naming the key path; violated invariants raise
/// ValidationError. Relative input paths resolve against `base_dir`.
RunConfig parse_config(const std::string& text, const std::string& base_dir = "");

/// Process exit status per failure category.
enum class ExitCode : int {
  Ok = 0,
  Usage = 1,
  Config = 2,
  Io = 3,
  Domain = 4,
  Numerical = 5,
  CheckFailed = 6,
};

ExitCode exit_code_for(ErrorCode code);

/// JSON text with every floating value printed to 17 significant digits
/// (non-finite values become null).
std::string dump_json(const nlohmann::json& j, int indent = 2);

}  // namespace vwl
