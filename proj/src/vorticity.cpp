#include "vwl/vorticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <memory>
#include <set>

#include <boost/math/tools/minima.hpp>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

namespace {

double horner(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

double horner_derivative(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) v = v * t + static_cast<double>(k) * c[k];
  return v;
}

double horner_integral(const std::vector<double>& c, double t) {
  double v = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) v = v * t + c[k] / static_cast<double>(k + 1);
  return v * t;
}

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

// Fritsch-Carlson slopes with the three-point one-sided end formula.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> h(n - 1), d(n - 1), m(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    d[k] = (y[k + 1] - y[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (sgn(d[k - 1]) * sgn(d[k]) <= 0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    m[k] = (w1 + w2) / (w1 / d[k - 1] + w2 / d[k]);
  }
  auto edge = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (sgn(s) != sgn(d0)) return 0.0;
    if (sgn(d0) != sgn(d1) && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return s;
  };
  m[0] = edge(h[0], h[1], d[0], d[1]);
  m[n - 1] = edge(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
  return m;
}

}  // namespace

VorticityFn VorticityFn::polynomial(std::vector<double> coeffs, double B) {
  require(std::isfinite(B) && B > 0.0, ErrorCode::InvalidArgument, "B must be positive");
  require(!coeffs.empty(), ErrorCode::InvalidArgument, "polynomial needs at least one coefficient");
  for (double c : coeffs)
    require(std::isfinite(c), ErrorCode::InvalidArgument, "non-finite polynomial coefficient");
  VorticityFn v;
  v.B_ = B;
  v.smooth_ = Smoothness::Polynomial;
  v.poly_ = coeffs;
  v.x_ = {0.0, B};
  v.c_ = {std::move(coeffs)};
  v.finalize();
  return v;
}

VorticityFn VorticityFn::constant(double c, double B) { return polynomial({c}, B); }

VorticityFn VorticityFn::table(std::vector<double> r, std::vector<double> gamma, double B) {
  require(std::isfinite(B) && B > 0.0, ErrorCode::InvalidArgument, "B must be positive");
  require(r.size() == gamma.size(), ErrorCode::InvalidArgument,
          "table abscissae and values differ in length");
  require(r.size() >= 4, ErrorCode::InvalidArgument, "table needs at least 4 nodes");
  for (std::size_t k = 0; k < r.size(); ++k) {
    require(std::isfinite(r[k]) && std::isfinite(gamma[k]), ErrorCode::InvalidArgument,
            "non-finite table entry");
    if (k > 0)
      require(r[k] > r[k - 1], ErrorCode::InvalidArgument,
              "table abscissae must be strictly increasing");
  }
  require(r.front() == 0.0 && std::abs(r.back() - B) <= 1e-12 * B, ErrorCode::InvalidArgument,
          "table abscissae must span [0, B]");
  r.back() = B;
  VorticityFn v;
  v.B_ = B;
  v.smooth_ = Smoothness::C1;
  v.table_r_ = r;
  v.table_g_ = gamma;
  const auto m = pchip_slopes(r, gamma);
  v.x_ = r;
  for (std::size_t k = 0; k + 1 < r.size(); ++k) {
    const double h = r[k + 1] - r[k];
    const double d = (gamma[k + 1] - gamma[k]) / h;
    const double c2 = (3.0 * d - 2.0 * m[k] - m[k + 1]) / h;
    const double c3 = (m[k] + m[k + 1] - 2.0 * d) / (h * h);
    v.c_.push_back({gamma[k], m[k], c2, c3});
  }
  v.finalize();
  return v;
}

void VorticityFn::finalize() {
  cum_.assign(x_.size(), 0.0);
  for (std::size_t k = 0; k + 1 < x_.size(); ++k)
    cum_[k + 1] = cum_[k] + horner_integral(c_[k], x_[k + 1] - x_[k]);

  // Candidate samples: a uniform grid plus all breakpoints.
  constexpr int kSamples = 4096;
  std::set<double> pts(x_.begin(), x_.end());
  for (int i = 0; i <= kSamples; ++i) pts.insert(B_ * i / kSamples);
  std::vector<double> s(pts.begin(), pts.end());
  std::vector<double> gs(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) gs[i] = (*this)(s[i]);

  // Γ̂ maxima sit at 0, B, or where γ crosses from + to -.
  hat_max_ = 0.0;
  hat_argmax_ = 0.0;
  auto consider = [&](double r) {
    const double h = hat(r);
    if (h > hat_max_) {
      hat_max_ = h;
      hat_argmax_ = r;
    }
  };
  consider(B_);
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (gs[i] > 0.0 && gs[i + 1] <= 0.0) {
      const double r = gs[i + 1] == 0.0
                           ? s[i + 1]
                           : num::bisect([this](double t) { return (*this)(t); }, s[i], s[i + 1]);
      consider(r);
    }
  }

  // Extremes of γ, refined by Brent near the best samples.
  auto refine = [&](double sign) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
      if (sign * gs[i] > sign * gs[best]) best = i;
    double val = gs[best];
    const double lo = s[best > 0 ? best - 1 : 0];
    const double hi = s[std::min(best + 1, s.size() - 1)];
    if (hi > lo) {
      auto neg = [&](double t) { return -sign * (*this)(t); };
      const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 52);
      val = sign > 0 ? std::max(val, -r.second) : std::min(val, r.second);
    }
    return val;
  };
  max_value_ = refine(1.0);
  min_value_ = refine(-1.0);
}

bool VorticityFn::is_constant() const {
  if (c_.size() != 1) return false;
  for (std::size_t k = 1; k < c_[0].size(); ++k)
    if (c_[0][k] != 0.0) return false;
  return true;
}

std::size_t VorticityFn::piece(double r) const {
  if (!(r >= 0.0 && r <= B_))
    fail(ErrorCode::OutOfDomain,
         "r = " + std::to_string(r) + " outside [0, " + std::to_string(B_) + "]");
  auto it = std::upper_bound(x_.begin(), x_.end(), r);
  std::size_t k = static_cast<std::size_t>(it - x_.begin());
  k = k == 0 ? 0 : k - 1;
  return std::min(k, c_.size() - 1);
}

double VorticityFn::operator()(double r) const {
  const auto k = piece(r);
  if (r == B_ && !table_g_.empty()) return table_g_.back();
  return horner(c_[k], r - x_[k]);
}

double VorticityFn::derivative(double r) const {
  const auto k = piece(r);
  return horner_derivative(c_[k], r - x_[k]);
}

double VorticityFn::hat(double r) const {
  const auto k = piece(r);
  return cum_[k] + horner_integral(c_[k], r - x_[k]);
}

VorticityFn VorticityFn::rescaled(double s) const {
  require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidArgument, "scale must be positive");
  const double a = std::sqrt(s);
  const double b = s * std::sqrt(s);
  VorticityFn v;
  v.B_ = B_ / b;
  v.smooth_ = smooth_;
  for (double xk : x_) v.x_.push_back(xk / b);
  v.x_.front() = 0.0;
  v.x_.back() = v.B_;
  for (const auto& c : c_) {
    std::vector<double> cs(c.size());
    double p = a;
    for (std::size_t j = 0; j < c.size(); ++j, p *= b) cs[j] = c[j] * p;
    v.c_.push_back(std::move(cs));
  }
  if (!poly_.empty()) v.poly_ = v.c_.front();
  if (!table_r_.empty()) {
    v.table_r_ = v.x_;
    for (double t : v.x_) v.table_g_.push_back(v(t));
  }
  v.finalize();
  return v;
}

VorticityFn VorticityFn::from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) fail(ErrorCode::SchemaError, path + ": expected an object");
  if (!j.contains("kind")) fail(ErrorCode::SchemaError, path + ".kind: missing");
  if (!j["kind"].is_string()) fail(ErrorCode::SchemaError, path + ".kind: expected a string");
  const std::string kind = j["kind"];
  auto number = [&](const std::string& key) {
    if (!j[key].is_number()) fail(ErrorCode::SchemaError, path + "." + key + ": expected a number");
    return j[key].get<double>();
  };
  auto numbers = [&](const std::string& key) {
    if (!j.contains(key)) fail(ErrorCode::SchemaError, path + "." + key + ": missing");
    if (!j[key].is_array()) fail(ErrorCode::SchemaError, path + "." + key + ": expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j[key].size(); ++i) {
      if (!j[key][i].is_number())
        fail(ErrorCode::SchemaError,
             path + "." + key + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(j[key][i].get<double>());
    }
    return out;
  };
  std::set<std::string> allowed;
  if (kind == "poly")
    allowed = {"kind", "coeffs", "B"};
  else if (kind == "table")
    allowed = {"kind", "r", "gamma", "B"};
  else
    fail(ErrorCode::SchemaError, path + ".kind: unknown kind '" + kind + "'");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail(ErrorCode::SchemaError, path + "." + key + ": unknown key");
  const double B = j.contains("B") ? number("B") : 1.0;
  if (!(B > 0.0)) fail(ErrorCode::ValidationError, path + ".B: must be positive");
  try {
    if (kind == "poly") return polynomial(numbers("coeffs"), B);
    return table(numbers("r"), numbers("gamma"), B);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) fail(ErrorCode::ValidationError, path + ": " + e.what());
    throw;
  }
}

nlohmann::json VorticityFn::to_json() const {
  if (smooth_ == Smoothness::Polynomial) return {{"kind", "poly"}, {"coeffs", poly_}, {"B", B_}};
  return {{"kind", "table"}, {"r", table_r_}, {"gamma", table_g_}, {"B", B_}};
}

JhbResult check_jhb(const VorticityFn& vfn, double g, double L) {
  require(g > 0.0 && L > 0.0, ErrorCode::InvalidArgument, "g and L must be positive");
  const double B = vfn.B();
  const double hmax = vfn.hat_max();
  const double k2 = std::numbers::pi * std::numbers::pi / (L * L);
  auto integrand = [&](double r) {
    const double e = std::max(0.0, 2.0 * hmax - 2.0 * vfn.hat(r));
    return k2 * (B - r) * (B - r) * std::sqrt(e) + e * std::sqrt(e);
  };
  const double rs = vfn.hat_argmax();
  JhbResult out;
  out.lhs = num::integrate_endpoint_singular(integrand, 0.0, rs) +
            num::integrate_endpoint_singular(integrand, rs, B);
  out.rhs = g * B * B;
  out.holds = out.lhs < out.rhs;
  return out;
}

BernoulliCurve::BernoulliCurve(VorticityFn vfn, double g) : vfn_(std::move(vfn)), g_(g) {
  require(g > 0.0 && std::isfinite(g), ErrorCode::InvalidArgument, "g must be positive");
}

double BernoulliCurve::moment(double lambda, double power) const {
  const double hmax = vfn_.hat_max();
  const double lmin = 2.0 * hmax;
  require(lambda >= lmin, ErrorCode::OutOfDomain, "lambda below 2 max Γ̂");
  if (lambda == lmin && (power >= 1.0 || !endpoint_integrable()))
    return std::numeric_limits<double>::infinity();
  auto integrand = [&](double r) {
    // Differences from the maximum keep the base accurate near the peak.
    const double base = (lambda - lmin) + 2.0 * (hmax - vfn_.hat(r));
    return base > 0.0 ? std::pow(base, -power) : 0.0;
  };
  const double rs = vfn_.hat_argmax();
  return num::integrate_endpoint_singular(integrand, 0.0, rs, 1e-13) +
         num::integrate_endpoint_singular(integrand, rs, vfn_.B(), 1e-13);
}

bool BernoulliCurve::endpoint_integrable() const {
  const double rs = vfn_.hat_argmax();
  const double B = vfn_.B();
  if (rs == 0.0) return vfn_(0.0) < 0.0 && vfn_.hat(B) < vfn_.hat_max();
  if (rs == B) return vfn_(B) > 0.0;
  return false;
}

double BernoulliCurve::depth(double lambda) const { return moment(lambda, 0.5); }

double BernoulliCurve::f(double lambda) const { return lambda + 2.0 * g_ * depth(lambda); }

double BernoulliCurve::fprime(double lambda) const {
  require(lambda > lambda_min(), ErrorCode::OutOfDomain, "f' needs lambda > 2 max Γ̂");
  return 1.0 - g_ * moment(lambda, 1.5);
}

double BernoulliCurve::lambda0() const {
  const double gB = g_ * vfn_.B();
  const double lmin = lambda_min();
  double lo_off = 1e-8 * gB;
  double hi_off = 1e3 * gB;
  double flo = fprime(lmin + lo_off);
  double fhi = fprime(lmin + hi_off);
  for (int k = 0; k < 12 && !(flo < 0.0 && fhi > 0.0); ++k) {
    if (flo >= 0.0) {
      lo_off *= 1e-2;
      flo = fprime(lmin + lo_off);
    }
    if (fhi <= 0.0) {
      hi_off *= 1e2;
      fhi = fprime(lmin + hi_off);
    }
  }
  if (!(flo < 0.0 && fhi > 0.0))
    fail(ErrorCode::NoCriticalPoint, "f' has no sign change on [" + std::to_string(lmin + lo_off) +
                                         ", " + std::to_string(lmin + hi_off) + "]");
  return num::bisect([this](double l) { return fprime(l); }, lmin + lo_off, lmin + hi_off, 1e-15);
}

CsQBound cs_q_bound(const VorticityFn& vfn, double g) {
  auto curve = std::make_shared<BernoulliCurve>(vfn, g);
  const double l0 = curve->lambda0();
  return {l0, curve->f(l0), [curve](double l) { return curve->f(l); }};
}

bool check_zxc_hypotheses(const VorticityFn& vfn, int samples) {
  samples = std::max(samples, 1000);
  if (!(vfn(0.0) < 0.0)) return false;
  const double B = vfn.B();
  for (int i = 0; i < samples; ++i) {
    const double r = B * i / (samples - 1);
    if (vfn(r) > 0.0) return false;
    if (vfn.derivative(r) < -1e-12) return false;
  }
  return true;
}

}  // namespace vwl
