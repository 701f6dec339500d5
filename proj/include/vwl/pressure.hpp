#pragma once

#include <cstddef>
#include <limits>
#include <optional>

#include <Eigen/Dense>
#include <json.hpp>

#include "vwl/field.hpp"
#include "vwl/vorticity.hpp"

namespace vwl {

/// Multiplier λ on [0, B] with antiderivative Λ, plus the three sign
/// conditions (λ <= 0, 2λ + γ <= 0, λ' >= 0) checked on a 1000-point grid.
class MultiplierFn {
 public:
  MultiplierFn(VorticityFn lambda, const VorticityFn& gamma);

  double operator()(double r) const { return lam_(r); }
  double derivative(double r) const { return lam_.derivative(r); }
  double Lambda(double r) const { return lam_.hat(r); }
  const VorticityFn& function() const { return lam_; }

  bool nonpositive() const { return nonpositive_; }
  bool combined_nonpositive() const { return combined_; }
  bool nondecreasing() const { return nondecreasing_; }
  bool admissible() const { return nonpositive_ && combined_ && nondecreasing_; }

 private:
  VorticityFn lam_;
  bool nonpositive_ = false, combined_ = false, nondecreasing_ = false;
};

enum class HeadKind { R, T, S };

struct PressureHeadField {
  HeadKind kind = HeadKind::R;
  Eigen::MatrixXd values;
  double min = 0.0, max = 0.0;
  int argmin_i = 0, argmin_j = 0, argmax_i = 0, argmax_j = 0;
  /// ½ max{0, max γ}.
  double varpi = 0.0;

  nlohmann::json to_json(const WaveField& w) const;
};

/// ½|∇ψ|² + gY - Q/2 + Γ̂(ψ) plus 0 (R), -ϖψ (T) or Λ(ψ) (S).
PressureHeadField pressure_head(const WaveField& w, HeadKind kind,
                                const MultiplierFn* lambda = nullptr);

struct SperbResult {
  ResidualEntry residual;
  std::size_t excluded = 0;
  double cutoff = 0.0;
};

struct SperbOptions {
  /// Nodes closer than this many cells to any edge are not evaluated.
  int margin = 4;
  /// |∇ψ| cutoff relative to max |∇ψ|.
  double relative_cutoff = 1e-4;
  /// Evaluate only columns with x_min <= X <= x_max.
  double x_min = -std::numeric_limits<double>::infinity();
  double x_max = std::numeric_limits<double>::infinity();
};

/// Residual of the elliptic identity satisfied by W = ½|∇ψ|² + Γ̂ + Λ,
/// using fourth-order differences. Throws AllNodesExcluded.
SperbResult sperb_residual(const WaveField& w, const MultiplierFn& lambda,
                           const SperbOptions& opts = {});

struct NqtResult {
  bool holds = false;
  double lower_margin = 0.0;
  double upper_margin = 0.0;
  double surface_min = 0.0;
  double surface_max = 0.0;
};

/// min over the surface of |∇ψ|² <= |∇ψ|² + 2Γ̂(ψ) <= max over the surface,
/// checked at interior and bed nodes with tolerance `tol`. Throws
/// StagnationInterior if ∇ψ vanishes off the surface.
NqtResult nqt_check(const WaveField& w, double tol = 1e-6, int order = 4);

/// Smallest K with |∇ψ|² <= K|Y| over nodes with |Y| at least one grid
/// spacing; the field must be normalized to Q = 0. Throws Unbounded when
/// K exceeds 1e6.
double sqrt_bound_fit(const WaveField& w);

struct BxvResult {
  /// ψ_Y <= -delta at every interior node.
  bool applicable = false;
  double max_psi_y = 0.0;
  double max_T = 0.0;
};

BxvResult bxv_check(const WaveField& w, double delta = 0.0);

}  // namespace vwl
