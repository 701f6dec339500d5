#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vwl/field.hpp"
#include "vwl/vorticity.hpp"

namespace vwl {

/// A flow near a stagnation point at the origin with the fluid below the
/// surface graph.
class FlowSource {
 public:
  virtual ~FlowSource() = default;
  virtual double psi(double X, double Y) const = 0;
  virtual double surface(double X) const = 0;
  /// Lowest height at which psi may be sampled (-inf when unbounded).
  virtual double bottom() const = 0;
  /// Largest |X| at which psi may be sampled (inf when unbounded).
  virtual double x_extent() const = 0;
  virtual double gravity() const = 0;
  virtual VorticityFn vorticity() const = 0;
};

/// ψ = β Im[i (c Z)^p] in the wedge between the rays Y = -tan(α₊) X
/// (X >= 0) and Y = tan(α₋) X (X <= 0), with c = i e^{i(α₊-α₋)/2},
/// p = π / (π - α₊ - α₋), principal branch.
class CornerFlow : public FlowSource {
 public:
  CornerFlow(double alpha_plus, double alpha_minus, double beta, double g);

  double alpha_plus() const { return ap_; }
  double alpha_minus() const { return am_; }
  double beta() const { return beta_; }
  double exponent() const { return p_; }
  /// Opening angle of the fluid wedge.
  double aperture() const;

  std::complex<double> derivative(std::complex<double> z) const;
  Eigen::Vector2d gradient(double X, double Y) const;
  bool in_fluid(double X, double Y, double tol = 0.0) const;

  double psi(double X, double Y) const override;
  double surface(double X) const override;
  double bottom() const override;
  double x_extent() const override;
  double gravity() const override { return g_; }
  VorticityFn vorticity() const override;

 private:
  double ap_, am_, beta_, g_, p_;
  std::complex<double> c_;
};

/// The 120° corner: α± = π/6, β = (2/3) g^{1/2}.
CornerFlow stokes_corner(double g);
CornerFlow corner_family(double alpha_plus, double alpha_minus, double beta, double g);

/// Samples a WaveField (already shifted so the stagnation point is the
/// origin) by four-point Lagrange interpolation across columns and
/// sigma levels. EvenPeriodic fields are mirrored to negative X.
class FieldSampler : public FlowSource {
 public:
  explicit FieldSampler(WaveField w);

  double psi(double X, double Y) const override;
  double surface(double X) const override;
  double bottom() const override { return w_.F; }
  double x_extent() const override;
  double gravity() const override { return w_.g; }
  VorticityFn vorticity() const override { return w_.vorticity; }
  const WaveField& field() const { return w_; }

 private:
  // Column stencil around X: indices and weights (mirrored as needed).
  void columns(double X, int idx[4], double wts[4]) const;
  double column_value(int i, double Y) const;
  WaveField w_;
};

/// A rectangular sampling window; the frame's surface replaces its top.
struct Window {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_bottom = -1.0;
  int nx = 129;
  int ny = 129;
};

/// The source sampled on a boundary-fitted grid under its surface: an Open
/// WaveField without bed, Q = 0.
WaveField sample_window(const FlowSource& src, const Window& win);

/// Frame of ψ_s(X, Y) = s^{-3/2} ψ(sX, sY) on the window, with the
/// correspondingly rescaled vorticity. Throws WindowOutsideDomain naming
/// the largest admissible scale.
WaveField rescale(const FlowSource& src, double s, const Window& win);

struct BlowCheckOptions {
  int boundary_samples = 200;
  int window_points = 128;
  double r_min = 0.05;
  double r_max = 1.0;
  double tol = 1e-6;
  /// For sampled frames: columns with |X| below this are skipped.
  double crest_exclusion = 0.1;
};

struct BlowCheck {
  /// interior_pde: harmonicity (Δψ + γ); kinematic_surface: ψ = 0 on the
  /// boundary; bernoulli: |∇ψ|² + 2gY; range: violations of ψ >= 0 and
  /// ψ_Y <= 0.
  ResidualReport report;
  bool pass = false;
};

BlowCheck verify_blow(const CornerFlow& flow, const BlowCheckOptions& opts = {});
/// Frame fields: throws NonMonotoneSurface unless the surface rises to the
/// crest and falls after it.
BlowCheck verify_blow(const WaveField& frame, const BlowCheckOptions& opts = {});

/// β minimizing the Bernoulli misfit on the rays (β² clipped at 0).
double fit_corner_strength(double alpha_plus, double alpha_minus, double g,
                           const BlowCheckOptions& opts = {});

struct FamilyScanHit {
  int i_plus, i_minus;
  double alpha_plus, alpha_minus, beta;
  bool trivial;
};

struct FamilyScan {
  int n = 0;
  double spacing = 0.0;
  std::vector<FamilyScanHit> passes;
  std::size_t trivial_passes = 0;
  std::size_t nontrivial_passes = 0;
};

/// verify_blow over α± = k·spacing, k = 0..n-1, with β fitted per pair.
/// The default spacing π/102 puts π/6 on the grid (k = 17).
FamilyScan scan_corner_family(double g, int n = 50, double spacing = 0.0,
                              const BlowCheckOptions& opts = {});

enum class CornerClass { Corner, Flat, Inconclusive };
std::string to_string(CornerClass c);

struct SideEstimate {
  double q = 0.0;
  double drift = 0.0;
  double range_lo = 0.0;
  double range_hi = 0.0;
  std::size_t samples = 0;
  CornerClass kind = CornerClass::Inconclusive;
};

struct CornerAngle {
  SideEstimate plus, minus;
};

/// Descent slope -v/|u| on each side of a crest at the origin, fitted
/// through the origin over dyadic ranges [2^{-k-3}, 2^{-k}]·s_max.
CornerAngle corner_angle(const std::vector<double>& u, const std::vector<double>& v);

struct Cone {
  /// Direction of the axis from the vertex (radians; -π/2 points down).
  double axis = -1.5707963267948966;
  double half_aperture = 1.0471975511965976;
  double r0 = 1.0;
};

struct ConeCheck {
  double mu = 0.0;
  double kappa = 0.0;
  bool violation = false;
  /// Minimum ratio per dyadic radius r0 2^{-k}.
  std::vector<double> radii, minima;
};

/// κ = min ψ / (r^μ cos μt) over the cone, μ = π / (2·half_aperture).
/// Throws ConeNotContained if the cone leaves the fluid or meets ψ >= δ.
ConeCheck oddson_cone_check(const FlowSource& src, const Cone& cone, double delta,
                            int scales = 12, int angles = 33);

}  // namespace vwl
