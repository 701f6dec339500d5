#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "vwl/blowup.hpp"
#include "vwl/laminar.hpp"
#include "vwl/pressure.hpp"

using namespace vwl;
using testutil::throws_code;

namespace {

const double kS2 = std::sqrt(2.0);

WaveField extreme_field(int n = 64) {
  return to_field(trivial_extreme(VorticityFn::constant(-1.0), 1.0), 1.0, n, n);
}

WaveField stokes_frame(double x_min, double x_max, double y_bottom, int n = 129) {
  Window win;
  win.x_min = x_min;
  win.x_max = x_max;
  win.y_bottom = y_bottom;
  win.nx = win.ny = n;
  return sample_window(stokes_corner(1.0), win);
}

}  // namespace

TEST_CASE("R on the trivial extreme wave") {
  const auto w = extreme_field();
  const auto R = pressure_head(w, HeadKind::R);
  // Oracle: R(Y) = g(Y - √2) from ψ = (√2 - Y)²/2.
  for (int i = 0; i < w.nx(); ++i)
    for (int j = 0; j < w.ny(); ++j) CHECK(std::abs(R.values(i, j) - (w.Y(i, j) - kS2)) <= 1e-10);
  CHECK(std::abs(R.values(0, 0) + kS2) <= 1e-10);
  CHECK(std::abs(R.max) <= 1e-10);
  CHECK(R.argmax_j == w.ny() - 1);
  CHECK(R.varpi == 0.0);
  const auto T = pressure_head(w, HeadKind::T);
  CHECK(T.values == R.values);
}

TEST_CASE("R on the Stokes corner window") {
  const auto w = stokes_frame(-1.0, 1.0, -1.0);
  const auto R = pressure_head(w, HeadKind::R);
  // Column 64 is X = 0, row 0 is Y = -1.
  CHECK(w.x[64] == 0.0);
  CHECK(R.values(64, 0) == doctest::Approx(-0.5).epsilon(1e-3));
}

TEST_CASE("T equals S with multiplier -varpi") {
  const auto v = VorticityFn::polynomial({1.0, -2.0}, 1.0);
  const auto lw = laminar_regular(v, 1.0, 4.0);
  const auto w = to_field(lw, 1.0, 32, 32);
  const auto T = pressure_head(w, HeadKind::T);
  CHECK(T.varpi == doctest::Approx(0.5));
  const MultiplierFn lam(VorticityFn::constant(-T.varpi, 1.0), v);
  const auto S = pressure_head(w, HeadKind::S, &lam);
  CHECK((S.values - T.values).cwiseAbs().maxCoeff() <= 1e-14);
  const auto R = pressure_head(w, HeadKind::R);
  CHECK((R.values - T.values).cwiseAbs().maxCoeff() > 1e-3);
  CHECK(throws_code([&] { (void)pressure_head(w, HeadKind::S); }, ErrorCode::InvalidArgument));
}

TEST_CASE("S vanishes on the surface of a laminar solution") {
  const auto v = VorticityFn::constant(-1.0);
  const auto w = to_field(laminar_regular(v, 1.0, 3.5), 1.0, 64, 64);
  const MultiplierFn lam(VorticityFn::constant(-0.25, 1.0), v);
  REQUIRE(lam.admissible());
  const auto S = pressure_head(w, HeadKind::S, &lam);
  for (int i = 0; i < w.nx(); ++i) CHECK(std::abs(S.values(i, w.ny() - 1)) <= 1e-10);
  CHECK(S.max <= 1e-10);
}

TEST_CASE("multiplier admissibility flags") {
  const auto gamma = VorticityFn::constant(-1.0);
  const MultiplierFn ok(VorticityFn::constant(-0.5), gamma);
  CHECK(ok.admissible());
  CHECK(ok.Lambda(0.5) == doctest::Approx(-0.25));
  const MultiplierFn positive(VorticityFn::constant(0.5), gamma);
  CHECK_FALSE(positive.nonpositive());
  CHECK(positive.nondecreasing());
  const MultiplierFn decreasing(VorticityFn::polynomial({0.0, -1.0}, 1.0), gamma);
  CHECK(decreasing.nonpositive());
  CHECK_FALSE(decreasing.nondecreasing());
  const MultiplierFn combined(VorticityFn::constant(-0.1), VorticityFn::constant(1.0));
  CHECK_FALSE(combined.combined_nonpositive());
}

TEST_CASE("elliptic identity on the trivial extreme wave") {
  const auto w = extreme_field();
  const MultiplierFn zero(VorticityFn::constant(0.0), w.vorticity);
  const auto r = sperb_residual(w, zero);
  CHECK(r.residual.sup <= 1e-8);
  CHECK(r.residual.count > 0);
}

TEST_CASE("elliptic identity on the Stokes corner away from the crest") {
  const auto w = stokes_frame(0.5, 1.5, -1.5);
  const MultiplierFn zero(VorticityFn::constant(0.0, w.vorticity.B()), w.vorticity);
  const auto r = sperb_residual(w, zero);
  CHECK(r.residual.sup <= 1e-6);
  CHECK(r.excluded == 0);
}

TEST_CASE("elliptic identity detects a non-solution") {
  auto w = make_flat_field(VorticityFn::constant(0.0, 10.0), 1.0, 2.0, 0.0, 1.0, 2.0, 64, 64);
  for (int i = 0; i < w.nx(); ++i)
    for (int j = 0; j < w.ny(); ++j) {
      const double X = w.x[i], Y = w.Y(i, j);
      w.psi(i, j) = 1.0 - Y + 0.3 * std::sin(2.0 * X) * std::cos(3.0 * Y) + 0.2 * X * X * Y;
    }
  const MultiplierFn zero(VorticityFn::constant(0.0, 10.0), w.vorticity);
  CHECK(sperb_residual(w, zero).residual.sup > 0.1);
}

TEST_CASE("elliptic identity with every node excluded") {
  auto w = make_flat_field(VorticityFn::constant(0.0), 1.0, 1.0, 0.0, 1.0, 2.0, 16, 16);
  w.psi.setZero();
  const MultiplierFn zero(VorticityFn::constant(0.0), w.vorticity);
  CHECK(throws_code([&] { (void)sperb_residual(w, zero); }, ErrorCode::AllNodesExcluded));
}

TEST_CASE("two-sided gradient bound on laminar flows") {
  SUBCASE("extreme wave: both sides collapse to zero") {
    const auto r = nqt_check(extreme_field());
    CHECK(r.holds);
    CHECK(std::abs(r.lower_margin) <= 1e-8);
    CHECK(std::abs(r.upper_margin) <= 1e-8);
    CHECK(std::abs(r.surface_max) <= 1e-12);
  }
  SUBCASE("regular laminar flows with exact differences are equality cases") {
    for (double c : {0.0, -1.0, 1.0}) {
      const auto v = VorticityFn::constant(c);
      const auto w = to_field(laminar_regular(v, 1.0, 5.0), 1.0, 64, 64);
      const auto r = nqt_check(w);
      CHECK(r.holds);
      CHECK(std::abs(r.lower_margin) <= 1e-8);
      CHECK(std::abs(r.upper_margin) <= 1e-8);
    }
  }
  SUBCASE("nonconstant vorticity: equality up to second-order truncation") {
    const auto v = VorticityFn::polynomial({-1.0, 0.0, 1.5}, 1.0);
    double prev = 0.0;
    for (int n : {64, 128}) {
      const auto w = to_field(laminar_regular(v, 1.0, 4.0), 1.0, n, n);
      const auto r = nqt_check(w);
      CHECK(r.holds);
      const double slack = std::max(std::abs(r.lower_margin), std::abs(r.upper_margin));
      if (prev > 0.0) CHECK(prev / std::max(slack, 1e-16) > 12.0);
      prev = slack;
      CHECK(slack <= 1e-6);
    }
  }
}

TEST_CASE("two-sided gradient bound rejects interior stagnation") {
  auto w = make_flat_field(VorticityFn::constant(0.0), 1.0, 1.0, 0.0, 1.0, 2.0, 16, 16);
  w.psi.setConstant(0.5);
  CHECK(throws_code([&] { (void)nqt_check(w); }, ErrorCode::StagnationInterior));
}

TEST_CASE("square-root gradient bound") {
  SUBCASE("Stokes corner: K between g and 2g") {
    // Nodes a fixed number of cells from the corner see the same relative
    // stencil error at every resolution (ψ is only C^{1,1/2} there), so the
    // fitted K exceeds 2g by a resolution-independent 0.15%.
    for (int n : {65, 129}) {
      const double K = sqrt_bound_fit(stokes_frame(-1.0, 1.0, -1.0, n));
      CHECK(K >= 1.0);
      CHECK(K <= 2.0 * (1.0 + 2e-3));
    }
  }
  SUBCASE("trivial extreme wave shifted to Q = 0") {
    const auto w0 = extreme_field(128);
    const auto w = shift_datum(w0, w0.Q / (2.0 * w0.g));
    CHECK(std::abs(w.Q) <= 1e-14);
    CHECK(sqrt_bound_fit(w) == doctest::Approx(kS2).epsilon(1e-10));
  }
  SUBCASE("uniform stream up to the crest is unbounded") {
    auto w = stokes_frame(-1.0, 1.0, -1.0, 33);
    for (int i = 0; i < w.nx(); ++i)
      for (int j = 0; j < w.ny(); ++j) w.psi(i, j) = -1e4 * w.Y(i, j);
    CHECK(throws_code([&] { (void)sqrt_bound_fit(w); }, ErrorCode::Unbounded));
  }
  SUBCASE("needs Q = 0") {
    CHECK(throws_code([] { (void)sqrt_bound_fit(extreme_field(16)); }, ErrorCode::InvalidArgument));
  }
}

TEST_CASE("pressure-head nonpositivity on the laminar stream") {
  const auto v = VorticityFn::constant(-1.0);
  const auto w = to_field(laminar_regular(v, 1.0, 3.5), 1.0, 64, 64);
  const auto r = bxv_check(w);
  CHECK(r.applicable);
  CHECK(r.max_psi_y < 0.0);
  CHECK(r.max_T <= 1e-6);
}
