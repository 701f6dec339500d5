#include "vwl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "vwl/error.hpp"

namespace vwl::num {

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol, &err);
}

double integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                   double tol) {
  if (a == b) return 0.0;
  thread_local boost::math::quadrature::tanh_sinh<double> rule(12);
  // boost hands the distance to the nearer endpoint as a second argument;
  // re-evaluate near the endpoints from it to avoid cancellation in a + t.
  auto g = [&](double x, double xc) {
    if (xc < 0.0) return f(a - xc);
    if (xc > 0.0) return f(b - xc);
    return f(x);
  };
  double err = 0.0;
  double l1 = 0.0;
  return rule.integrate(g, a, b, tol, &err, &l1);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double rel_tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  require(std::signbit(flo) != std::signbit(fhi), ErrorCode::NoRoot,
          "bisection bracket [" + std::to_string(lo) + ", " + std::to_string(hi) +
              "] has no sign change");
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi))) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void lagrange4_weights(std::span<const double, 4> xs, double x, std::span<double, 4> w) {
  for (int i = 0; i < 4; ++i) {
    double num = 1.0;
    double den = 1.0;
    for (int j = 0; j < 4; ++j) {
      if (j == i) continue;
      num *= x - xs[j];
      den *= xs[i] - xs[j];
    }
    w[i] = num / den;
  }
}

std::vector<std::vector<double>> fd_weights(double z, std::span<const double> x, int max_deriv) {
  const int n = static_cast<int>(x.size()) - 1;
  const int m = max_deriv;
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

std::vector<double> gregory_weights(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n == 1) return {0.0};
  if (n < 8) {
    w.front() = w.back() = 0.5;
    return w;
  }
  constexpr double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int k = 0; k < 3; ++k) {
    w[k] = ends[k];
    w[n - 1 - k] = ends[k];
  }
  return w;
}

unsigned thread_count() {
  if (const char* env = std::getenv("VWL_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n > 0) return static_cast<unsigned>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body) {
  if (end <= begin) return;
  const std::size_t n = end - begin;
  const std::size_t workers = std::min<std::size_t>(thread_count(), n);
  if (workers <= 1 || n < 64) {
    for (std::size_t i = begin; i < end; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = begin + w * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, w, &body, &errors] {
      try {
        for (std::size_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace vwl::num
