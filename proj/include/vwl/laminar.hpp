#pragma once

#include <vector>

#include "vwl/field.hpp"
#include "vwl/vorticity.hpp"

namespace vwl {

/// Which solution of the depth equation laminar_regular returns when two
/// exist: the deeper (slower surface) stream or the shallower one.
enum class DepthRoot { Deep, Shallow };

/// X-independent flow with ψ(F) = B, ψ(F + h) = 0 and surface speed
/// squared `lambda`; every level satisfies ψ_Y² = λ - 2Γ̂(ψ).
class LaminarWave {
 public:
  LaminarWave(VorticityFn v, double g, double F, double lambda, double Q, bool extreme,
              int samples);

  const VorticityFn& vorticity() const { return vfn_; }
  double g() const { return g_; }
  double B() const { return vfn_.B(); }
  double F() const { return F_; }
  double depth() const { return h_; }
  double surface() const { return F_ + h_; }
  double Q() const { return Q_; }
  double lambda() const { return lambda_; }
  bool is_extreme() const { return extreme_; }

  /// Distance from the surface down to the streamline ψ = r.
  double layer_depth(double r) const;
  double psi_at(double Y) const;
  double psi_y_at(double Y) const;

  /// Samples from bed to surface.
  const std::vector<double>& Y_samples() const { return Ys_; }
  const std::vector<double>& psi_samples() const { return psis_; }

 private:
  VorticityFn vfn_;
  double g_, F_, lambda_, Q_, h_ = 0.0;
  bool extreme_;
  std::vector<double> Ys_, psis_;
};

/// The laminar flow with stagnation along the whole flat surface.
/// Requires γ(0) < 0 and γ <= 0 (InvalidVorticity otherwise).
LaminarWave trivial_extreme(const VorticityFn& v, double g, double F = 0.0, int samples = 129);

/// Laminar flow with Bernoulli constant Q: solves f(λ) = Q - 2gF.
/// Throws NoRoot when Q is below the minimum laminar value.
LaminarWave laminar_regular(const VorticityFn& v, double g, double Q, double F = 0.0,
                            DepthRoot root = DepthRoot::Deep, int samples = 129);

/// Same flow sampled on uniform columns over [0, L].
WaveField to_field(const LaminarWave& lw, double L, int nx, int ny);

}  // namespace vwl
