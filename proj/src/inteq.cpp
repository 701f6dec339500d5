#include "vwl/inteq.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <tuple>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

namespace {

constexpr double kPi = std::numbers::pi;

// log((1+u)/(1-u)) given u and 1-u separately.
double kernel_u(double u, double one_minus_u) { return std::log1p(u) - std::log(one_minus_u); }

// Tanh-sinh on [p, q] ⊂ [0, 1] of h(u, 1-u), keeping 1-u accurate near 1.
double integrate_unit(const std::function<double(double, double)>& h, double p, double q) {
  if (q <= p) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  auto g = [&](double u, double uc) {
    if (uc > 0.0) {
      const double v = q - uc;
      return h(v, (1.0 - q) + uc);
    }
    if (uc < 0.0) {
      const double v = p - uc;
      return h(v, 1.0 - v);
    }
    return h(u, 1.0 - u);
  };
  double err = 0.0;
  double l1 = 0.0;
  return rule.integrate(g, p, q, 1e-14, &err, &l1);
}

double integrate_pieces(const std::function<double(double, double)>& h,
                        std::vector<double> cuts) {
  cuts.push_back(0.0);
  cuts.push_back(1.0);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) sum += integrate_unit(h, cuts[k], cuts[k + 1]);
  return sum;
}

double lagrange_basis(int l, double u) {
  double v = 1.0;
  for (int m = 0; m < 4; ++m)
    if (m != l) v *= (u - m) / (l - m);
  return v;
}

}  // namespace

double log_coth_kernel(double tau) {
  const double a = std::abs(tau);
  if (a == 0.0) return std::numeric_limits<double>::infinity();
  if (a > 0.5) return 2.0 * std::atanh(std::exp(-a));
  return std::log1p(std::exp(-a)) - std::log(-std::expm1(-a));
}

double legendre_chi2(double z) {
  require(z >= 0.0 && z <= 1.0, ErrorCode::InvalidArgument, "chi2 argument outside [0, 1]");
  auto series = [](double w) {
    const double w2 = w * w;
    double term = w;
    double sum = 0.0;
    for (int k = 0; k < 400; ++k) {
      const double d = 2.0 * k + 1.0;
      const double add = term / (d * d);
      sum += add;
      if (add < 1e-18 * sum) break;
      term *= w2;
    }
    return sum;
  };
  if (z <= 0.5) return series(z);
  // Landen: χ₂(z) + χ₂((1-z)/(1+z)) = π²/8 - ½ log z · log((1-z)/(1+z)).
  const double w = (1.0 - z) / (1.0 + z);
  const double cross = w > 0.0 ? 0.5 * std::log(z) * std::log(w) : 0.0;
  return kPi * kPi / 8.0 - cross - series(w);
}

double log_kernel_integral(double x, const std::function<double(double)>& f,
                           std::span<const double> breaks) {
  require(x > 0.0, ErrorCode::NonPositiveAbscissa, "abscissa must be positive");
  std::vector<double> inner;
  std::vector<double> outer;
  for (double b : breaks) {
    if (b <= 0.0 || b == x) continue;
    if (b < x) inner.push_back(b / x);
    else outer.push_back(x / b);
  }
  // y = x u
  const double below = integrate_pieces(
      [&](double u, double uc) { return kernel_u(u, uc) * f(x * u); }, inner);
  // y = x / u; the kernel vanishes like 2u at u = 0.
  const double above = integrate_pieces(
      [&](double u, double uc) {
        if (u <= 0.0) return 0.0;
        return (kernel_u(u, uc) / u) * (f(x / u) / u);
      },
      outer);
  return x * (below + above);
}

std::vector<double> ThetaGrid::nodes() const {
  require(n >= 4, ErrorCode::DegenerateGrid, "theta grid needs at least 4 nodes");
  require(x_min > 0.0 && x_max > x_min, ErrorCode::DegenerateGrid,
          "theta grid needs 0 < x_min < x_max");
  std::vector<double> x(n);
  const double s0 = std::log(x_min);
  const double step = (std::log(x_max) - s0) / (n - 1);
  for (int k = 0; k < n; ++k) x[k] = std::exp(s0 + step * k);
  x.front() = x_min;
  x.back() = x_max;
  return x;
}

ThetaOperator::ThetaOperator(const ThetaGrid& grid) : x_(grid.nodes()) { build(); }

ThetaOperator::ThetaOperator(std::vector<double> x) : x_(std::move(x)) { build(); }

void ThetaOperator::build() {
  const int n = static_cast<int>(x_.size());
  require(n >= 4, ErrorCode::DegenerateGrid, "theta grid needs at least 4 nodes");
  for (double v : x_)
    require(std::isfinite(v) && v > 0.0, ErrorCode::DegenerateGrid, "theta grid must be positive");
  step_ = (std::log(x_.back()) - std::log(x_.front())) / (n - 1);
  require(step_ > 0.0, ErrorCode::DegenerateGrid, "theta grid must increase");
  for (int k = 0; k + 1 < n; ++k) {
    const double d = std::log(x_[k + 1] / x_[k]);
    require(std::abs(d - step_) <= 1e-9 * step_, ErrorCode::DegenerateGrid,
            "theta grid must be geometric");
  }

  const int full = (n - 1) / 3;
  for (int m = 0; m < full; ++m) elements_.push_back({3 * m, 3 * m, 3 * m + 3});
  if ((n - 1) % 3 != 0) elements_.push_back({n - 4, 3 * full, n - 1});

  // Moments depend on (first - i, lo - first, hi - first) only.
  using Key = std::tuple<int, int, int>;
  std::map<Key, std::array<double, 4>> cache;
  for (const Element& e : elements_)
    for (int i = 0; i < n; ++i) cache[{e.first - i, e.lo - e.first, e.hi - e.first}];
  std::vector<std::pair<const Key, std::array<double, 4>>*> jobs;
  for (auto& kv : cache) jobs.push_back(&kv);
  const double h = step_;
  num::parallel_for(0, jobs.size(), [&](std::size_t k) {
    const auto [d, a, b] = jobs[k]->first;
    const double sing = -static_cast<double>(d);  // kernel singularity in element units
    std::array<double, 4>& out = jobs[k]->second;
    for (int l = 0; l < 4; ++l) {
      auto fn = [&, l](double u) {
        const double tau = h * (d + u);
        return tau == 0.0 ? 0.0 : log_coth_kernel(tau) * lagrange_basis(l, u);
      };
      double v = 0.0;
      if (sing >= a - 1.0 && sing <= b + 1.0) {
        if (sing > a && sing < b) {
          v = num::integrate_endpoint_singular(fn, a, sing) +
              num::integrate_endpoint_singular(fn, sing, b);
        } else {
          v = num::integrate_endpoint_singular(fn, a, b);
        }
      } else {
        v = num::integrate(fn, a, b);
      }
      out[l] = h * v;
    }
  });

  moments_.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    double* row = &moments_[static_cast<std::size_t>(i) * n];
    for (const Element& e : elements_) {
      const auto& w = cache.at({e.first - i, e.lo - e.first, e.hi - e.first});
      for (int l = 0; l < 4; ++l) row[e.first + l] += w[l];
    }
  }

  left_mass_.resize(n);
  right_mass_.resize(n);
  for (int i = 0; i < n; ++i) {
    left_mass_[i] = 2.0 * legendre_chi2(std::exp(-step_ * i));
    right_mass_[i] = 2.0 * legendre_chi2(std::exp(-step_ * (n - 1 - i)));
  }
}

std::vector<double> ThetaOperator::element_integrals(std::span<const double> values,
                                                     double alpha) const {
  // ∫ over interval m of element of e^{α s} L_l(s), in units of the first node.
  std::array<std::array<double, 4>, 3> table{};
  for (int m = 0; m < 3; ++m)
    for (int l = 0; l < 4; ++l)
      table[m][l] = step_ * boost::math::quadrature::gauss<double, 20>::integrate(
                                [&](double u) {
                                  return std::exp(alpha * step_ * u) * lagrange_basis(l, u);
                                },
                                static_cast<double>(m), m + 1.0);
  const std::size_t n = x_.size();
  std::vector<double> out(n - 1);
  for (const Element& e : elements_) {
    const double scale = std::pow(x_[e.first], alpha);
    for (int k = e.lo; k < e.hi; ++k) {
      const int m = k - e.first;
      double v = 0.0;
      for (int l = 0; l < 4; ++l) v += table[m][l] * values[e.first + l];
      out[k] = scale * v;
    }
  }
  return out;
}

std::vector<double> ThetaOperator::cumulative_sin(std::span<const double> theta) const {
  const std::size_t n = x_.size();
  require(theta.size() == n, ErrorCode::InvalidArgument, "theta size does not match the grid");
  std::vector<double> s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = std::sin(theta[k]);
  const auto pieces = element_integrals(s, 1.0);
  std::vector<double> c(n);
  c[0] = x_[0] * s[0];
  for (std::size_t k = 1; k < n; ++k) c[k] = c[k - 1] + pieces[k - 1];
  return c;
}

std::vector<double> ThetaOperator::kernel_apply(std::span<const double> f) const {
  const std::size_t n = x_.size();
  require(f.size() == n, ErrorCode::InvalidArgument, "density size does not match the grid");
  std::vector<double> g(n);
  for (std::size_t j = 0; j < n; ++j) g[j] = x_[j] * f[j];
  std::vector<double> out(n);
  num::parallel_for(0, n, [&](std::size_t i) {
    const double* row = &moments_[i * n];
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * g[j];
    out[i] = acc;
  });
  return out;
}

std::vector<double> ThetaOperator::rhs(std::span<const double> theta) const {
  const std::size_t n = x_.size();
  const auto c = cumulative_sin(theta);
  for (std::size_t k = 0; k < n; ++k)
    require(std::isfinite(c[k]) && c[k] > 0.0, ErrorCode::QuaViolated,
            "cumulative integral of sin(theta) is not positive at x = " + std::to_string(x_[k]));
  std::vector<double> dens(n);
  for (std::size_t k = 0; k < n; ++k) dens[k] = std::sin(theta[k]) / c[k];
  auto out = kernel_apply(dens);

  // Above the grid: y sinθ_n / C(y) = 1 + D/(A e^v - D), v = log(y/x_n).
  const double A = x_.back() * std::sin(theta.back());
  const double D = A - c.back();
  const bool corrected = std::abs(D) > 1e-15 * c.back();
  const double s_end = std::log(x_.back());
  num::parallel_for(0, n, [&](std::size_t i) {
    double tail = left_mass_[i] + right_mass_[i];
    const double a = s_end - std::log(x_[i]);
    if (corrected && a < 40.0) {
      auto fn = [&](double v) { return log_coth_kernel(v + a) * D / (A * std::exp(v) - D); };
      tail += a < 1.0 ? num::integrate_endpoint_singular(fn, 0.0, 1.0) + num::integrate(fn, 1.0, 45.0)
                      : num::integrate(fn, 0.0, 45.0, 1e-12);
    }
    out[i] = (out[i] + tail) / (3.0 * kPi);
  });
  return out;
}

std::vector<double> ThetaOperator::horizontal_trace(std::span<const double> theta,
                                                    double g) const {
  require(g > 0.0, ErrorCode::InvalidArgument, "gravity must be positive");
  const std::size_t n = x_.size();
  const auto c = cumulative_sin(theta);
  for (std::size_t k = 0; k < n; ++k)
    require(std::isfinite(c[k]) && c[k] > 0.0, ErrorCode::QuaViolated,
            "cumulative integral of sin(theta) is not positive at x = " + std::to_string(x_[k]));
  // cos θ/(3gC)^{1/3} dt = e^{2s/3} · cos θ (t/(3gC))^{1/3} ds
  std::vector<double> b(n);
  for (std::size_t k = 0; k < n; ++k) b[k] = std::cos(theta[k]) * std::cbrt(x_[k] / (3.0 * g * c[k]));
  const auto pieces = element_integrals(b, 2.0 / 3.0);
  std::vector<double> u(n);
  u[0] = -std::cos(theta[0]) * std::cbrt(1.0 / (3.0 * g * std::sin(theta[0]))) * 1.5 *
         std::pow(x_[0], 2.0 / 3.0);
  for (std::size_t k = 1; k < n; ++k) u[k] = u[k - 1] - pieces[k - 1];
  return u;
}

std::vector<double> random_admissible_theta(const std::vector<double>& x, std::mt19937_64& rng) {
  require(!x.empty() && x.front() > 0.0, ErrorCode::InvalidArgument, "empty theta grid");
  const double d0 = std::floor(std::log10(x.front()));
  const int knots = static_cast<int>(std::ceil(std::log10(x.back()) - d0)) + 1;
  std::uniform_real_distribution<double> u(0.0, kPi / 2.0);
  std::vector<double> val(knots);
  for (auto& v : val) v = u(rng);
  val[0] = std::max(val[0], 0.05);
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double p = std::log10(x[k]) - d0;
    const int j = std::clamp(static_cast<int>(p), 0, knots - 2);
    const double w = std::clamp(p - j, 0.0, 1.0);
    out[k] = (1.0 - w) * val[j] + w * val[j + 1];
  }
  return out;
}

std::vector<double> theta_rhs(const ThetaOperator& op, std::span<const double> theta) {
  return op.rhs(theta);
}

nlohmann::json ThetaLog::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& it : iterations)
    rows.push_back({{"iteration", it.iteration},
                    {"sup_update", it.sup_update},
                    {"min_theta", it.min_theta}});
  return {{"converged", converged}, {"iterations", rows}};
}

double vsq_constant() { return 2.0 / (9.0 * kPi); }

ThetaSolution solve_theta(const ThetaOperator& op, std::span<const double> init,
                          const ThetaSolveOptions& opts, ThetaLog* log) {
  require(init.size() == op.size(), ErrorCode::InvalidArgument,
          "initial theta size does not match the grid");
  require(opts.tol > 0.0 && opts.max_iter >= 1 && opts.omega > 0.0 && opts.omega <= 1.0,
          ErrorCode::InvalidArgument, "solver options out of range");
  for (double v : init)
    require(std::isfinite(v) && v >= 0.0 && v <= kPi / 2.0, ErrorCode::InvalidArgument,
            "initial theta must lie in [0, pi/2]");
  ThetaLog local;
  ThetaLog& rec = log ? *log : local;
  rec = {};
  std::vector<double> theta(init.begin(), init.end());
  const double bound = vsq_constant() - 1e-9;
  for (int k = 1; k <= opts.max_iter; ++k) {
    const auto r = op.rhs(theta);
    const double w = k == 1 ? 1.0 : opts.omega;
    double update = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double next = (1.0 - w) * theta[j] + w * r[j];
      update = std::max(update, std::abs(next - theta[j]));
      theta[j] = next;
      lo = std::min(lo, next);
    }
    rec.iterations.push_back({k, update, lo});
    require(lo >= bound, ErrorCode::ValidationError,
            "iterate " + std::to_string(k) + " falls below the lower bound 2/(9 pi)");
    if (update <= opts.tol) {
      rec.converged = true;
      return {op.x(), theta};
    }
  }
  fail(ErrorCode::MaxIterExceeded, "no convergence in " + std::to_string(opts.max_iter) +
                                       " iterations; last update " +
                                       std::to_string(rec.iterations.back().sup_update));
}

VsqCheck vsq_bound_check(const ThetaOperator& op, std::span<const double> theta) {
  VsqCheck out;
  const double bound = vsq_constant() - 1e-9;
  out.inf_theta = *std::min_element(theta.begin(), theta.end());
  out.holds = out.inf_theta >= bound;
  const auto r = op.rhs(theta);
  out.inf_rhs = *std::min_element(r.begin(), r.end());
  out.rhs_holds = out.inf_rhs >= bound;
  return out;
}

ReconstructedBoundary reconstruct_surface(const ThetaOperator& op, std::span<const double> theta,
                                          double g) {
  ReconstructedBoundary out;
  out.g = g;
  out.t = op.x();
  out.U = op.horizontal_trace(theta, g);
  const auto c = op.cumulative_sin(theta);
  out.V.resize(c.size());
  for (std::size_t k = 0; k < c.size(); ++k)
    out.V[k] = -std::pow(3.0 * g * c[k], 2.0 / 3.0) / (2.0 * g);
  return out;
}

void write_theta_csv(const std::string& path, const ThetaSolution& sol) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot open " + path);
  os << std::setprecision(17) << "x,theta\n";
  for (std::size_t k = 0; k < sol.x.size(); ++k) os << sol.x[k] << ',' << sol.theta[k] << '\n';
  require(static_cast<bool>(os), ErrorCode::IoError, "write failed for " + path);
}

ThetaSolution read_theta_csv(const std::string& path) {
  std::ifstream is(path);
  require(static_cast<bool>(is), ErrorCode::IoError, "cannot open " + path);
  std::string line;
  require(static_cast<bool>(std::getline(is, line)) && line == "x,theta", ErrorCode::IoError,
          path + ": expected header 'x,theta'");
  ThetaSolution sol;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorCode::IoError, path + ": malformed row '" + line + "'");
    try {
      sol.x.push_back(std::stod(line.substr(0, comma)));
      sol.theta.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      fail(ErrorCode::IoError, path + ": malformed row '" + line + "'");
    }
  }
  require(!sol.x.empty(), ErrorCode::IoError, path + ": no rows");
  return sol;
}

void write_boundary_csv(const std::string& path, const ReconstructedBoundary& b) {
  std::ofstream os(path);
  require(static_cast<bool>(os), ErrorCode::IoError, "cannot open " + path);
  os << std::setprecision(17) << "t,U,V\n";
  for (std::size_t k = 0; k < b.t.size(); ++k)
    os << b.t[k] << ',' << b.U[k] << ',' << b.V[k] << '\n';
  require(static_cast<bool>(os), ErrorCode::IoError, "write failed for " + path);
}

}  // namespace vwl
