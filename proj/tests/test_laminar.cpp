#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "test_util.hpp"
#include "vwl/laminar.hpp"

using namespace vwl;
using testutil::throws_code;

TEST_CASE("trivial extreme wave, constant vorticity") {
  const auto lw = trivial_extreme(VorticityFn::constant(-1.0), 1.0, 0.0);
  const double s2 = std::sqrt(2.0);
  CHECK(std::abs(lw.depth() - s2) <= 1e-12);
  CHECK(std::abs(lw.Q() - 2.0 * s2) <= 1e-12);
  CHECK(lw.is_extreme());
  CHECK(lw.Q() - 2.0 * lw.g() * lw.surface() == 0.0);
  for (double Y = 0.0; Y <= s2; Y += 0.01) {
    const double exact = (s2 - Y) * (s2 - Y) / 2.0;
    CHECK(std::abs(lw.psi_at(Y) - exact) <= 1e-13);
    CHECK(std::abs(lw.psi_y_at(Y) + (s2 - Y)) <= 1e-12);
  }
  CHECK(lw.psi_y_at(lw.surface()) == 0.0);

  const auto w = to_field(lw, 1.0, 64, 64);
  const auto rep = strong_residuals(w);
  CHECK(rep.worst() <= 1e-10);
}

TEST_CASE("trivial extreme wave, affine vorticity") {
  const auto v = VorticityFn::polynomial({-1.0, -1.0}, 1.0);
  // Oracle: ∫0^1 dt/√(t²+2t) = ln(2+√3).
  const double depth = std::log(2.0 + std::sqrt(3.0));
  boost::math::quadrature::tanh_sinh<double> ts;
  const double quad = ts.integrate([](double t) { return 1.0 / std::sqrt(t * t + 2.0 * t); }, 0.0, 1.0);
  CHECK(std::abs(quad - depth) <= 1e-12);
  const auto lw = trivial_extreme(v, 1.0);
  CHECK(std::abs(lw.depth() - depth) <= 1e-11);
  CHECK(lw.depth() == doctest::Approx(1.3169579).epsilon(1e-7));
  CHECK(lw.Q() == doctest::Approx(2.6339157).epsilon(1e-7));
  // Inverse of the analytic layer depth: D(r) = ln(r+1+√(r²+2r)).
  for (double r : {0.01, 0.2, 0.5, 0.9}) {
    const double Dr = std::log(r + 1.0 + std::sqrt(r * r + 2.0 * r));
    CHECK(std::abs(lw.layer_depth(r) - Dr) <= 1e-12);
    CHECK(std::abs(lw.psi_at(lw.surface() - Dr) - r) <= 1e-11);
  }
}

TEST_CASE("trivial extreme wave needs negative vorticity at the surface") {
  CHECK(throws_code([] { (void)trivial_extreme(VorticityFn::constant(0.0), 1.0); },
                    ErrorCode::InvalidVorticity));
  CHECK(throws_code([] { (void)trivial_extreme(VorticityFn::polynomial({-1.0, 3.0}, 1.0), 1.0); },
                    ErrorCode::InvalidVorticity));
}

TEST_CASE("laminar_regular, irrotational") {
  const auto v = VorticityFn::constant(0.0);
  const auto lw = laminar_regular(v, 1.0, 3.0);
  CHECK(std::abs(lw.depth() - 1.0) <= 1e-9);
  CHECK(std::abs(lw.psi_y_at(lw.surface()) + 1.0) <= 1e-9);
  for (double Y = 0.0; Y < lw.depth(); Y += 0.05) CHECK(std::abs(lw.psi_at(Y) - (lw.depth() - Y) / lw.depth()) <= 1e-12);
  const auto w = to_field(lw, 1.0, 32, 32);
  const auto rep = strong_residuals(w);
  CHECK(rep.interior_pde.sup <= 1e-12);
  CHECK(rep.bernoulli.sup <= 1e-12);

  // Depth cubic 2h³ - 2h² + 1 has no root in (0, 1]: sign scan oracle.
  bool sign_change = false;
  for (int k = 1; k <= 1000; ++k) {
    const double h = k / 1000.0;
    if (2 * h * h * h - 2 * h * h + 1 <= 0) sign_change = true;
  }
  CHECK_FALSE(sign_change);
  CHECK(throws_code([&] { (void)laminar_regular(v, 1.0, 2.0); }, ErrorCode::NoRoot));
}

TEST_CASE("laminar_regular roots") {
  const auto v = VorticityFn::constant(0.0);
  // Q = 4: f(λ) = λ + 2λ^{-1/2}; the deep root has λ < 1 < shallow root.
  const auto deep = laminar_regular(v, 1.0, 4.0);
  const auto shallow = laminar_regular(v, 1.0, 4.0, 0.0, DepthRoot::Shallow);
  CHECK(deep.lambda() < 1.0);
  CHECK(shallow.lambda() > 1.0);
  CHECK(deep.depth() > shallow.depth());
  for (const auto* lw : {&deep, &shallow}) {
    const double h = lw->depth();
    CHECK(std::abs(2 * h * h * h - 4 * h * h + 1) <= 1e-10);  // 1/h² + 2h = Q
  }
  // Bed height enters through Q - 2gF.
  const auto raised = laminar_regular(v, 1.0, 5.0, 0.5);
  CHECK(std::abs(raised.depth() - deep.depth()) <= 1e-10);
}

TEST_CASE("laminar_regular reproduces the trivial extreme wave") {
  const auto v = VorticityFn::constant(-1.0);
  const auto ext = trivial_extreme(v, 1.0);
  const auto lw = laminar_regular(v, 1.0, 2.0 * std::sqrt(2.0));
  CHECK(lw.lambda() == 0.0);
  CHECK(std::abs(lw.depth() - ext.depth()) <= 1e-8);
  for (double Y = 0.0; Y < ext.depth(); Y += 0.1) CHECK(std::abs(lw.psi_at(Y) - ext.psi_at(Y)) <= 1e-8);
}

TEST_CASE("property: first integral is constant in Y for laminar flows") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 10; ++t) {
    const auto v = VorticityFn::polynomial({-0.5 - u(rng), u(rng), -u(rng) * 0.3}, 0.5 + u(rng));
    const double Q = vwl::cs_q_bound(v, 1.0).f_lambda0 + 0.1 + u(rng);
    const auto lw = laminar_regular(v, 1.0, Q);
    for (int k = 0; k < 20; ++k) {
      const double Y = lw.depth() * k / 19.0;
      const double p = lw.psi_at(Y);
      const double py = lw.psi_y_at(Y);
      CHECK(std::abs(py * py + 2.0 * v.hat(p) - lw.lambda()) <= 1e-10);
      if (k < 19) CHECK(py < 0.0);
    }
    CHECK(std::abs(lw.lambda() + 2.0 * lw.surface() - Q) <= 1e-10);
  }
}

TEST_CASE("property: second-order truncation for variable vorticity") {
  const auto v = VorticityFn::polynomial({-1.0, 0.5, 0.2}, 1.0);
  const auto lw = trivial_extreme(v, 1.0);
  const double e1 = strong_residuals(to_field(lw, 1.0, 16, 32)).interior_pde.sup;
  const double e2 = strong_residuals(to_field(lw, 1.0, 16, 64)).interior_pde.sup;
  CHECK(e1 / e2 > 3.5);
  CHECK(e2 < 1e-4);
}
