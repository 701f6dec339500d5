#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "vwl/vorticity.hpp"

namespace vwl {

/// EvenPeriodic: columns cover [x0, x0 + L] and the field extends evenly
/// across both end columns (crest and trough lines of a symmetric wave).
/// Open: a window; lateral derivatives use one-sided stencils at the edges.
enum class Lateral { EvenPeriodic, Open };

/// Discrete flow on a boundary-fitted grid. Column i sits at X = x[i] and
/// runs from the bottom line Y = F (sigma = 0) to the surface Y = eta[i]
/// (sigma = 1); psi(i, j) is the stream function at sigma_j = j/(ny-1).
struct WaveField {
  explicit WaveField(VorticityFn v) : vorticity(std::move(v)) {}

  double g = 1.0;
  double B = 1.0;
  double L = 1.0;
  double F = 0.0;
  double Q = 0.0;
  VorticityFn vorticity;
  std::vector<double> x;
  std::vector<double> eta;
  Eigen::MatrixXd psi;
  Lateral lateral = Lateral::EvenPeriodic;
  /// False for windows whose bottom row is an artificial cut rather than
  /// the bed streamline psi = B.
  bool has_bed = true;

  int nx() const { return static_cast<int>(x.size()); }
  int ny() const { return static_cast<int>(psi.cols()); }
  double sigma(int j) const { return static_cast<double>(j) / (ny() - 1); }
  double height(int i) const { return eta[i] - F; }
  double Y(int i, int j) const { return F + sigma(j) * height(i); }
};

/// Throws DegenerateGrid for inconsistent sizes, fewer than 8 nodes per
/// direction, non-increasing abscissae or a non-positive column height.
void validate(const WaveField& w);

/// Uniform columns on [0, L], surface at F + depth, psi filled with zero.
WaveField make_flat_field(const VorticityFn& v, double g, double L, double F, double depth,
                          double Q, int nx, int ny);

/// Physical derivatives of nodal values on the grid of a field.
struct Derivatives {
  Eigen::MatrixXd ax, ay, axx, ayy;
};

/// Finite differences of order 2 or 4 in the mapped coordinates, chained
/// to physical X, Y. Boundary rows use one-sided stencils in sigma; lateral
/// edges reflect evenly (EvenPeriodic) or go one-sided (Open).
Derivatives physical_derivatives(const WaveField& w, const Eigen::MatrixXd& a, int order = 2);

struct ResidualEntry {
  double sup = 0.0;
  double rms = 0.0;
  int i = -1;
  int j = -1;
  double X = 0.0;
  double Y = 0.0;
  std::size_t count = 0;

  void add(double value, int i, int j, double X, double Y);
  void finish();
  nlohmann::json to_json() const;
};

struct ResidualReport {
  ResidualEntry interior_pde;
  ResidualEntry kinematic_surface;
  ResidualEntry kinematic_bed;
  ResidualEntry bernoulli;
  std::optional<ResidualEntry> weak_form;
  ResidualEntry range;

  /// Largest sup-norm over all entries.
  double worst() const;
  nlohmann::json to_json() const;
};

struct ResidualOptions {
  int order = 2;
  /// Columns with |X - exclude_center| < exclude_halfwidth are skipped in
  /// the PDE and Bernoulli entries (e.g. a kinked crest).
  double exclude_center = 0.0;
  double exclude_halfwidth = -1.0;
};

/// Residuals of the interior equation, boundary values, Bernoulli condition
/// and the admissible range 0 <= psi <= B.
ResidualReport strong_residuals(const WaveField& w, const ResidualOptions& opts = {});

/// Interior residual Δψ + γ(ψ) at every node (zero on boundary rows and on
/// Open edge columns); vorticity evaluated at psi clamped to [0, B].
Eigen::MatrixXd pde_residual(const WaveField& w, int order = 2);

/// |∇ψ|² + 2gY - Q on each surface node.
Eigen::VectorXd bernoulli_residual(const WaveField& w, int order = 2);

/// Polynomial bump A (1 - |p - c|²/radius²)^degree, zero outside the disk.
struct BumpTestFn {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.1;
  double amplitude = 1.0;
  int degree = 4;

  double value(double X, double Y) const;
  Eigen::Vector2d gradient(double X, double Y) const;
};

/// ∫∇ψ·∇ζ - ∫γ(ψ)ζ + ∫_surface (Q - 2gY)^{1/2} ζ. Throws UnsupportedTestFn
/// when the support reaches the bottom line or leaves an Open window.
double weak_residual(const WaveField& w, const BumpTestFn& zeta);

/// Vertical translation of the datum by G: every height drops by G and
/// Q by 2gG.
WaveField shift_datum(const WaveField& w, double G);

struct SurfacePoint {
  int i;
  double X;
  double Y;
};

/// Surface nodes with |Q - 2gY| <= tol.
std::vector<SurfacePoint> stagnation_points(const WaveField& w, double tol);

/// Grid dump: "# g,B,L,F,Q,Nx,Ny", a comment line with the values, then
/// rows "X,Y,psi" column by column. An absent bed is written as F = -inf.
void write_csv(std::ostream& os, const WaveField& w, const std::string& value_name = "psi",
               const Eigen::MatrixXd* values = nullptr);
WaveField read_csv(std::istream& is, const VorticityFn& v);
/// Surface rows "X,eta".
void write_surface_csv(std::ostream& os, const WaveField& w);

}  // namespace vwl
