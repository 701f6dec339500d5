#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "vwl/error.hpp"
#include "vwl/vorticity.hpp"

using vwl::VorticityFn;

namespace {

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 6, 1e-14);
}

// Independent root finder for the oracle side.
double oracle_bisect(const std::function<double(double)>& f, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((f(mid) < 0) == (f(lo) < 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

bool throws_code(const std::function<void()>& fn, vwl::ErrorCode code) {
  try {
    fn();
  } catch (const vwl::Error& e) {
    return e.code() == code;
  }
  return false;
}

}  // namespace

TEST_CASE("gamma_hat examples") {
  CHECK(VorticityFn::constant(0.0).hat(0.7) == 0.0);
  CHECK(VorticityFn::constant(-1.0).hat(0.5) == doctest::Approx(-0.5).epsilon(1e-15));
  const auto lin = VorticityFn::polynomial({-1.0, -1.0}, 1.0);
  const double quad = gk([&](double t) { return lin(t); }, 0.0, 1.0);
  CHECK(std::abs(lin.hat(1.0) - (-1.5)) <= 1e-12 * 2.5);
  CHECK(std::abs(quad - (-1.5)) <= 1e-12);
}

TEST_CASE("gamma_hat outside [0,B] is an error") {
  const auto v = VorticityFn::constant(-1.0, 1.0);
  CHECK(throws_code([&] { (void)v.hat(-1e-9); }, vwl::ErrorCode::OutOfDomain));
  CHECK(throws_code([&] { (void)v(1.0 + 1e-12); }, vwl::ErrorCode::OutOfDomain));
  CHECK(throws_code([&] { (void)v.derivative(2.0); }, vwl::ErrorCode::OutOfDomain));
}

TEST_CASE("gamma_hat agrees with quadrature for table form") {
  const auto v = VorticityFn::table({0.0, 0.2, 0.45, 0.7, 1.0}, {-1.0, -0.3, 0.4, 0.1, -2.0}, 1.0);
  CHECK(v.hat(0.0) == 0.0);
  for (double r : {0.1, 0.33, 0.45, 0.81, 1.0}) {
    const double ref = gk([&](double t) { return v(t); }, 0.0, r);
    CHECK(std::abs(v.hat(r) - ref) <= 1e-12 * (1.0 + std::abs(ref)));
  }
}

TEST_CASE("property: gamma_hat additivity on random triples") {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double B = 0.5 + std::abs(coef(rng));
    const auto v = VorticityFn::polynomial({coef(rng), coef(rng), coef(rng), coef(rng)}, B);
    std::uniform_real_distribution<double> rr(0.0, B);
    double r1 = rr(rng), r2 = rr(rng);
    const double ref = gk([&](double t) { return v(t); }, r1, r2);
    CHECK(std::abs((v.hat(r2) - v.hat(r1)) - ref) <= 1e-10);
  }
}

TEST_CASE("property: derivative of gamma_hat matches gamma") {
  const auto v = VorticityFn::table({0.0, 0.25, 0.5, 0.75, 1.0}, {-1.0, -0.8, -0.5, -0.45, -0.1}, 1.0);
  const double h = 1e-5;
  for (int i = 1; i < 100; ++i) {
    const double r = i / 100.0;
    CHECK(std::abs((v.hat(r + h) - v.hat(r - h)) / (2 * h) - v(r)) <= 1e-8);
  }
}

TEST_CASE("table interpolation") {
  const auto v = VorticityFn::table({0, 0.5, 0.75, 1}, {-1, -1.5, -1.75, -2}, 1.0);
  CHECK(v(0.5) == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(v(0.6) == doctest::Approx(-1.6).epsilon(1e-14));  // linear data is reproduced
  CHECK(v.smoothness() == vwl::Smoothness::C1);

  // Monotone data gives a monotone interpolant (no overshoot).
  const auto m = VorticityFn::table({0, 0.1, 0.2, 0.9, 1.0}, {-1, -1, -0.2, -0.1, 0}, 1.0);
  double prev = m(0.0);
  for (int i = 1; i <= 1000; ++i) {
    const double cur = m(i / 1000.0);
    CHECK(cur >= prev - 1e-15);
    CHECK(cur <= 0.0);
    prev = cur;
  }

  CHECK(throws_code([] { (void)VorticityFn::table({0, 0.5, 1}, {1, 2, 3}, 1.0); },
                    vwl::ErrorCode::InvalidArgument));
  CHECK(throws_code([] { (void)VorticityFn::table({0, 0.5, 0.5, 1}, {1, 2, 3, 4}, 1.0); },
                    vwl::ErrorCode::InvalidArgument));
  CHECK(throws_code([] { (void)VorticityFn::table({0, 0.2, 0.5, 0.9}, {1, 2, 3, 4}, 1.0); },
                    vwl::ErrorCode::InvalidArgument));
}

TEST_CASE("json round trip") {
  const auto j = nlohmann::json::parse(R"({"kind":"table","r":[0,0.5,0.75,1],"gamma":[-1,-1.5,-1.75,-2],"B":1})");
  const auto v = VorticityFn::from_json(j);
  CHECK(v(0.5) == -1.5);
  const auto w = VorticityFn::from_json(v.to_json());
  CHECK(w(0.3) == v(0.3));
  CHECK(throws_code([] { (void)VorticityFn::from_json(nlohmann::json::parse(R"({"kind":"poly","coeffs":[1],"bogus":2})")); },
                    vwl::ErrorCode::SchemaError));
}

TEST_CASE("hat_max") {
  CHECK(VorticityFn::constant(-1.0).hat_max() == 0.0);
  CHECK(VorticityFn::polynomial({-1.0, 1.0}, 1.0).hat_max() == 0.0);
  // γ = 1 - 2r: Γ̂ = r - r², maximum 1/4 at r = 1/2.
  const auto v = VorticityFn::polynomial({1.0, -2.0}, 1.0);
  CHECK(v.hat_max() == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(v.hat_argmax() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(v.max_value() == doctest::Approx(1.0));
  CHECK(v.min_value() == doctest::Approx(-1.0));
}

TEST_CASE("property: gamma <= 0 gives hat_max exactly 0") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> r{0.0}, g;
    for (int k = 1; k < 6; ++k) r.push_back(r.back() + 0.1 + u(rng));
    for (std::size_t k = 0; k < r.size(); ++k) g.push_back(-u(rng));
    const auto v = VorticityFn::table(r, g, r.back());
    CHECK(v.hat_max() == 0.0);
  }
}

TEST_CASE("check_jhb") {
  auto r0 = vwl::check_jhb(VorticityFn::constant(0.0), 1.0, 1.0);
  CHECK(r0.holds);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.rhs == 1.0);

  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double analytic = pi2 * std::sqrt(2.0) * 16.0 / 105.0 + 4.0 * std::sqrt(2.0) / 5.0;
  // r = u² removes the square-root endpoint singularity.
  const double quad = gk([&](double u) {
    const double r = u * u;
    return 2.0 * u * (pi2 * (1 - r) * (1 - r) * std::sqrt(2 * r) + std::pow(2 * r, 1.5));
  }, 0.0, 1.0);
  CHECK(std::abs(quad - analytic) <= 1e-12);
  auto r1 = vwl::check_jhb(VorticityFn::constant(-1.0), 1.0, 1.0);
  CHECK_FALSE(r1.holds);
  CHECK(std::abs(r1.lhs - analytic) <= 1e-10);
  CHECK(r1.lhs == doctest::Approx(3.258).epsilon(1e-3));
  auto r4 = vwl::check_jhb(VorticityFn::constant(-1.0), 4.0, 1.0);
  CHECK(r4.holds);
  CHECK(r4.rhs == 4.0);
}

TEST_CASE("property: check_jhb monotone in g") {
  const auto v = VorticityFn::polynomial({0.5, -3.0, 1.0}, 1.0);
  bool held = false;
  for (double g = 0.05; g < 20.0; g *= 1.3) {
    const bool h = vwl::check_jhb(v, g, 0.7).holds;
    if (held) CHECK(h);
    held = held || h;
  }
  CHECK(held);
}

TEST_CASE("cs_q_bound examples") {
  const auto zero = vwl::cs_q_bound(VorticityFn::constant(0.0), 1.0);
  CHECK(zero.f_of(1.0) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(zero.lambda0 == doctest::Approx(1.0).epsilon(1e-10));  // λ^{3/2} = gB

  const auto neg = vwl::cs_q_bound(VorticityFn::constant(-1.0), 1.0);
  CHECK(neg.f_of(0.25) == doctest::Approx(2.25).epsilon(1e-12));
  const double l0 = oracle_bisect(
      [](double l) { return 1.0 + 1.0 / std::sqrt(l + 2.0) - 1.0 / std::sqrt(l); }, 1e-6, 10.0);
  const double f0 = l0 + 2.0 * (std::sqrt(l0 + 2.0) - std::sqrt(l0));
  CHECK(std::abs(neg.lambda0 - l0) <= 1e-10 * l0);
  CHECK(std::abs(neg.f_lambda0 - f0) <= 1e-10);
  CHECK(l0 == doctest::Approx(0.3674).epsilon(1e-3));
  CHECK(f0 == doctest::Approx(2.2325).epsilon(1e-4));
}

TEST_CASE("property: f' changes sign exactly once around lambda0") {
  for (const auto& v : {VorticityFn::constant(-1.0), VorticityFn::polynomial({1.0, -2.0}, 1.0),
                        VorticityFn::polynomial({-0.5, 0.3}, 2.0)}) {
    const vwl::BernoulliCurve c(v, 1.5);
    const double l0 = c.lambda0();
    const double lo = c.lambda_min() + 1e-6;
    const double hi = c.lambda_min() + 10.0 * (l0 - c.lambda_min()) + 1.0;
    int changes = 0;
    double prev = c.fprime(lo);
    for (int i = 1; i < 100; ++i) {
      const double cur = c.fprime(lo + (hi - lo) * i / 99.0);
      if ((cur < 0) != (prev < 0)) ++changes;
      prev = cur;
    }
    CHECK(changes == 1);
    CHECK(std::abs(c.fprime(l0)) < 1e-8);
  }
}

TEST_CASE("check_zxc_hypotheses") {
  CHECK(vwl::check_zxc_hypotheses(VorticityFn::constant(-1.0)));
  CHECK_FALSE(vwl::check_zxc_hypotheses(VorticityFn::constant(0.0)));
  CHECK(vwl::check_zxc_hypotheses(VorticityFn::polynomial({-1.0, 1.0}, 1.0)));
  CHECK_FALSE(vwl::check_zxc_hypotheses(VorticityFn::polynomial({-1.0, -1.0}, 1.0)));
  CHECK_FALSE(vwl::check_zxc_hypotheses(VorticityFn::polynomial({-0.2, 1.0}, 1.0)));
}

TEST_CASE("rescaled vorticity") {
  const auto v = VorticityFn::polynomial({-1.0, 0.5}, 1.0);
  const double s = 1e-2;
  const auto w = v.rescaled(s);
  CHECK(w.B() == doctest::Approx(1e3));
  for (double r : {0.0, 3.0, 500.0, 1000.0})
    CHECK(w(r) == doctest::Approx(std::sqrt(s) * v(std::pow(s, 1.5) * r)).epsilon(1e-14));
  const auto t = VorticityFn::table({0, 0.3, 0.6, 1.0}, {-1, -0.9, -0.2, 0}, 1.0).rescaled(4.0);
  CHECK(t(0.3 / 8.0) == doctest::Approx(2.0 * -0.9));
}
