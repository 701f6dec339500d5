#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace vwl {

enum class Smoothness { Polynomial, C1 };

/// Scalar function on [0, B] stored as piecewise polynomials in a local
/// offset variable. Used for the vorticity and for pressure multipliers.
class VorticityFn {
 public:
  static VorticityFn polynomial(std::vector<double> coeffs, double B);
  static VorticityFn constant(double c, double B = 1.0);
  /// Monotone cubic (Fritsch-Carlson) interpolant through the nodes, which
  /// must span [0, B] exactly.
  static VorticityFn table(std::vector<double> r, std::vector<double> gamma, double B);

  /// Accepts {"kind":"poly",...} or {"kind":"table",...}; `path` prefixes
  /// key names in SchemaError messages.
  static VorticityFn from_json(const nlohmann::json& j, const std::string& path = "gamma");
  nlohmann::json to_json() const;

  double B() const { return B_; }
  Smoothness smoothness() const { return smooth_; }
  bool is_polynomial() const { return smooth_ == Smoothness::Polynomial; }
  /// True when the function is one constant piece.
  bool is_constant() const;

  double operator()(double r) const;
  double derivative(double r) const;
  /// Antiderivative from 0, exact for the stored pieces.
  double hat(double r) const;
  /// Integral over [a, b].
  double integral(double a, double b) const { return hat(b) - hat(a); }

  double hat_max() const { return hat_max_; }
  double hat_argmax() const { return hat_argmax_; }
  /// max of the function on [0, B].
  double max_value() const { return max_value_; }
  double min_value() const { return min_value_; }

  /// r -> s^{1/2} f(s^{3/2} r) on [0, B s^{-3/2}]: the vorticity seen by
  /// the stream function rescaled by s^{-3/2} around a stagnation point.
  VorticityFn rescaled(double s) const;

  /// Breakpoints of the pieces (including 0 and B).
  const std::vector<double>& breakpoints() const { return x_; }

 private:
  VorticityFn() = default;
  void finalize();
  std::size_t piece(double r) const;

  double B_ = 1.0;
  Smoothness smooth_ = Smoothness::Polynomial;
  std::vector<double> x_;                      // breakpoints, size n+1
  std::vector<std::vector<double>> c_;         // coefficients in (r - x_k)
  std::vector<double> cum_;                    // hat(x_k)
  std::vector<double> table_r_, table_g_;      // kept for serialization
  std::vector<double> poly_;
  double hat_max_ = 0.0, hat_argmax_ = 0.0;
  double max_value_ = 0.0, min_value_ = 0.0;
};

struct JhbResult {
  bool holds = false;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// Size condition on the vorticity relative to gravity and half-period L.
JhbResult check_jhb(const VorticityFn& vfn, double g, double L);

/// f(λ) = λ + 2g ∫(λ - 2Γ̂)^{-1/2}: the Bernoulli constant of the laminar
/// stream whose surface speed squared is λ.
class BernoulliCurve {
 public:
  BernoulliCurve(VorticityFn vfn, double g);

  const VorticityFn& vorticity() const { return vfn_; }
  double g() const { return g_; }
  /// 2 Γ̂_max: f is defined for λ strictly above (and at it when the
  /// integral converges).
  double lambda_min() const { return 2.0 * vfn_.hat_max(); }

  double f(double lambda) const;
  /// f at lambda_min(); +inf unless the maximum of Γ̂ sits at an end of
  /// [0, B] where γ does not vanish.
  double f_at_min() const { return f(lambda_min()); }
  double fprime(double lambda) const;
  /// ∫(λ - 2Γ̂)^{-1/2}: the depth of the stream.
  double depth(double lambda) const;
  /// Unique critical point of f; throws NoCriticalPoint naming the bracket.
  double lambda0() const;

 private:
  double moment(double lambda, double power) const;
  bool endpoint_integrable() const;
  VorticityFn vfn_;
  double g_;
};

struct CsQBound {
  double lambda0;
  double f_lambda0;
  std::function<double(double)> f_of;
};

CsQBound cs_q_bound(const VorticityFn& vfn, double g);

/// γ(0) < 0, γ <= 0 and γ' >= -1e-12 on a grid of `samples` points.
bool check_zxc_hypotheses(const VorticityFn& vfn, int samples = 1001);

}  // namespace vwl
