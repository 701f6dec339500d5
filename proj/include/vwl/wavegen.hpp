#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vwl/field.hpp"
#include "vwl/laminar.hpp"
#include "vwl/vorticity.hpp"

namespace vwl {

struct WavegenOptions {
  double g = 1.0;
  /// Half wavelength: columns run from the crest (X = 0) to the trough (X = L).
  double L = std::numbers::pi;
  int nx = 128;
  int ny = 128;
  double tol = 1e-8;
  int max_iter = 30;
  int max_halvings = 30;
  /// Bernoulli constant of the laminar seed; the linear bifurcation point
  /// when absent.
  std::optional<double> seed_Q;
  /// Crest clustering for targets at or beyond this fraction of the largest
  /// target (0 disables it); spacing at the crest shrinks by refine_ratio.
  double refine_fraction = 0.8;
  double refine_ratio = 4.0;
};

/// Laminar stream at which the first lateral mode cos(πX/L) becomes
/// neutral: λ φ'(h) = (g + γ(0)√λ) φ(h) with φ'' = (k² - γ'(ψ₀))φ, φ(0) = 0.
struct BifurcationPoint {
  double lambda = 0.0;
  double Q = 0.0;
  double depth = 0.0;
  double wavenumber = 0.0;
};

BifurcationPoint linear_bifurcation(const VorticityFn& v, double g, double L);

/// Neutral-mode seed: laminar stream at surface speed² `lambda` plus the
/// linear mode scaled to crest-to-trough amplitude `amplitude`.
WaveField mode_seed(const VorticityFn& v, double g, double lambda, double amplitude,
                    const std::vector<double>& x, int ny);

/// Discrete laminar stream (columns identical) with the given Q, solved on
/// the grid's own vertical stencil.
WaveField discrete_laminar(const VorticityFn& v, double g, double Q, const std::vector<double>& x,
                           int ny, double tol);

struct NewtonReport {
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton on interior ψ, surface heights and Q, with the constraint
/// η(0) - η(L) = amplitude. Throws NewtonDivergence with the last residual.
WaveField solve_wave(const WaveField& guess, double amplitude, const WavegenOptions& opts,
                     NewtonReport* report = nullptr);

/// Crest-clustered abscissae on [0, L]: X = L(ξ - c sin(πξ)/π), c = 1 - 1/ratio.
std::vector<double> crest_grid(double L, int nx, double ratio);

/// Columns re-interpolated (4-point Lagrange per σ level, even reflection)
/// onto new abscissae over the same [0, L].
WaveField remap_columns(const WaveField& w, const std::vector<double>& x);

struct MemberDiagnostics {
  double amplitude = 0.0;
  double Q = 0.0;
  double crest_speed = 0.0;
  double trough_depth = 0.0;
  double max_psi_y = 0.0;
  double max_gradient = 0.0;
  double residual = 0.0;
  bool psi_y_negative = false;
  bool monotone = false;
  int iterations = 0;
  /// f(crest speed²) - Q when crest speed² exceeds 2Γ̂_max (the bound
  /// Q < f(ψ_Y²) at the crest).
  std::optional<double> beq_margin;

  nlohmann::json to_json() const;
};

/// Diagnostics of one converged member (amplitude η(0) - η(L)).
MemberDiagnostics diagnose_member(const WaveField& w, double amplitude, int iterations = 0);

struct ContinuationFamily {
  std::vector<WaveField> members;
  std::vector<MemberDiagnostics> diagnostics;
  double seed_lambda = 0.0;
  double seed_Q = 0.0;
  bool truncated = false;
  std::string failure;

  /// {seed, truncated, failure, members: [{path, diagnostics}]}.
  nlohmann::json manifest(const std::vector<std::string>& paths) const;
};

/// Members at increasing amplitude targets, each warm-started from the
/// previous ones. A target that fails to converge ends the family.
/// Throws SeedFailure (no seed) or NewtonDivergence (no member at all).
ContinuationFamily continue_family(const VorticityFn& v, const std::vector<double>& targets,
                                   const WavegenOptions& opts = {});

struct ExiReport {
  double sup_Q = 0.0;
  std::vector<double> crest_speeds;
  /// Slope of log(crest speed) against amplitude (least squares), when at
  /// least two members have positive speed.
  std::optional<double> crest_decay_rate;
  double lipschitz = 0.0;
  double min_trough_depth = 0.0;
  /// Surface length from crest to trough of each member.
  std::vector<double> arclengths;
  std::optional<double> lambda0;
  std::optional<double> f_lambda0;
  /// sup Q <= f(λ₀) + 1e-6.
  std::optional<bool> q_bound_holds;
  /// Every member has crest speed² < λ₀.
  std::optional<bool> crest_below_lambda0;
  /// Every defined beq_margin is >= -1e-6.
  bool beq_holds = true;

  nlohmann::json to_json() const;
};

ExiReport exi_diagnostics(const ContinuationFamily& fam);

}  // namespace vwl
