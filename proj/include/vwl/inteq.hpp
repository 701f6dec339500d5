#pragma once

#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace vwl {

/// k(τ) = log|(1 + e^τ)/(1 - e^τ)| = log coth(|τ|/2): the kernel
/// log|(x+y)/(x-y)| written in τ = log(y/x).
double log_coth_kernel(double tau);

/// Legendre chi function χ₂(z) = Σ z^{2k+1}/(2k+1)² for 0 <= z <= 1.
double legendre_chi2(double z);

/// ∫₀^∞ log|(x+y)/(x-y)| f(y) dy by tanh-sinh on y = xu (u < 1) and
/// y = x/u (u < 1). `breaks` lists abscissae where f is discontinuous.
/// Throws NonPositiveAbscissa for x <= 0.
double log_kernel_integral(double x, const std::function<double(double)>& f,
                           std::span<const double> breaks = {});

struct ThetaGrid {
  double x_min = 1e-6;
  double x_max = 1e6;
  int n = 2048;

  /// Geometric nodes x_min = x₁ < … < x_n = x_max.
  std::vector<double> nodes() const;
};

/// Turning angle on a geometric grid; beyond the grid θ is held at its end
/// values.
struct ThetaSolution {
  std::vector<double> x;
  std::vector<double> theta;
};

/// Precomputed product quadrature for the integral operator on one
/// geometric grid. Densities are interpolated by piecewise cubics in log y;
/// kernel moments against them are computed to near machine precision, and
/// the region outside the grid is integrated analytically under the
/// constant-θ tail model.
class ThetaOperator {
 public:
  explicit ThetaOperator(const ThetaGrid& grid);
  /// Throws DegenerateGrid unless x is positive and geometric.
  explicit ThetaOperator(std::vector<double> x);

  const std::vector<double>& x() const { return x_; }
  std::size_t size() const { return x_.size(); }

  /// ∫₀^{x_i} sin θ, with sin θ ≡ sin θ₁ below the grid.
  std::vector<double> cumulative_sin(std::span<const double> theta) const;

  /// ∫_{x₁}^{x_n} log|(x_i+y)/(x_i-y)| f(y) dy for node values of f.
  std::vector<double> kernel_apply(std::span<const double> f) const;

  /// (1/3π) ∫₀^∞ log|(x+y)/(x-y)| sin θ(y) / ∫₀^y sin θ dy at every node.
  /// Throws QuaViolated when a cumulative integral is not positive.
  std::vector<double> rhs(std::span<const double> theta) const;

  /// -∫₀^{x_i} cos θ / (3g ∫₀^t sin θ)^{1/3} dt.
  std::vector<double> horizontal_trace(std::span<const double> theta, double g) const;

 private:
  void build();
  std::vector<double> element_integrals(std::span<const double> values, double alpha) const;

  std::vector<double> x_;
  double step_ = 0.0;
  /// Elements: first node and the covered node range [lo, hi].
  struct Element {
    int first, lo, hi;
  };
  std::vector<Element> elements_;
  /// Dense moment matrix, row-major.
  std::vector<double> moments_;
  /// Kernel mass below the grid for each node.
  std::vector<double> left_mass_;
  /// Kernel mass above the grid for each node.
  std::vector<double> right_mass_;
};

/// Random admissible start: values drawn uniformly in [0, π/2] at one knot
/// per decade, linear in log x between knots; the first knot is at least
/// 0.05 so the running sine integral stays positive.
std::vector<double> random_admissible_theta(const std::vector<double>& x, std::mt19937_64& rng);

/// Right side of the integral equation. Throws QuaViolated.
std::vector<double> theta_rhs(const ThetaOperator& op, std::span<const double> theta);

struct ThetaIteration {
  int iteration = 0;
  double sup_update = 0.0;
  double min_theta = 0.0;
};

struct ThetaLog {
  std::vector<ThetaIteration> iterations;
  bool converged = false;

  nlohmann::json to_json() const;
};

struct ThetaSolveOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double omega = 0.5;
};

/// Lower bound 2/(9π) satisfied by every admissible solution.
double vsq_constant();

/// Fixed-point iteration. The first step applies the right side in full,
/// later steps are damped: θ ← (1-ω)θ + ω·rhs(θ). Every iterate after the
/// first is checked against the lower bound (ValidationError otherwise).
/// Throws InvalidArgument for θ outside [0, π/2], QuaViolated, and
/// MaxIterExceeded; `log` is filled in every case.
ThetaSolution solve_theta(const ThetaOperator& op, std::span<const double> init,
                          const ThetaSolveOptions& opts = {}, ThetaLog* log = nullptr);

struct VsqCheck {
  bool holds = false;
  double inf_theta = 0.0;
  /// One application of the right side stays above the bound.
  bool rhs_holds = false;
  double inf_rhs = 0.0;
};

VsqCheck vsq_bound_check(const ThetaOperator& op, std::span<const double> theta);

struct ReconstructedBoundary {
  std::vector<double> t;
  std::vector<double> U;
  std::vector<double> V;
  double g = 1.0;
};

/// Free-boundary trace from θ: V = -(3g ∫₀^t sin θ)^{2/3}/(2g) and
/// U = -∫₀^t cos θ (−2gV)^{-1/2}. Throws QuaViolated.
ReconstructedBoundary reconstruct_surface(const ThetaOperator& op, std::span<const double> theta,
                                          double g);

void write_theta_csv(const std::string& path, const ThetaSolution& sol);
/// Reads rows "x,theta" after a header line. Throws IoError.
ThetaSolution read_theta_csv(const std::string& path);
void write_boundary_csv(const std::string& path, const ReconstructedBoundary& b);

}  // namespace vwl
