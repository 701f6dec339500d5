#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_util.hpp"
#include "vwl/pressure.hpp"
#include "vwl/wavegen.hpp"

using namespace vwl;
using testutil::throws_code;

namespace {

constexpr double kPi = std::numbers::pi;

// Bisection oracle for a sign change on [lo, hi].
template <class F>
double root(F f, double lo, double hi) {
  double flo = f(lo);
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

WavegenOptions small_grid(int n) {
  WavegenOptions o;
  o.nx = o.ny = n;
  return o;
}

}  // namespace

TEST_CASE("linear bifurcation, irrotational") {
  // Oracle: λ = g tanh(kh)/k with depth h = B/√λ.
  const double k = 1.0;
  const double lam = root([&](double l) { return l - std::tanh(k / std::sqrt(l)) / k; }, 0.3, 1.0);
  const auto bp = linear_bifurcation(VorticityFn::constant(0.0), 1.0, kPi);
  CHECK(std::abs(bp.lambda - lam) <= 1e-9);
  CHECK(std::abs(bp.depth - 1.0 / std::sqrt(lam)) <= 1e-9);
  CHECK(std::abs(bp.Q - (lam + 2.0 / std::sqrt(lam))) <= 1e-9);
  CHECK(bp.wavenumber == doctest::Approx(1.0));
  CHECK(bp.lambda < 1.0);  // subcritical: below λ₀ = (gB)^{2/3}
}

TEST_CASE("linear bifurcation, constant vorticity") {
  // γ ≡ -1, B = 1: depth √(λ+2) - √λ, γ' = 0 so the mode is sinh(kY).
  for (double L : {kPi, 2.0}) {
    const double k = kPi / L;
    auto D = [&](double l) {
      const double h = std::sqrt(l + 2.0) - std::sqrt(l);
      return l * k * std::cosh(k * h) - (1.0 - std::sqrt(l)) * std::sinh(k * h);
    };
    const double lam = root(D, 1e-6, 0.3674);
    const auto bp = linear_bifurcation(VorticityFn::constant(-1.0), 1.0, L);
    CHECK(std::abs(bp.lambda - lam) <= 1e-9);
    CHECK(std::abs(bp.depth - (std::sqrt(lam + 2.0) - std::sqrt(lam))) <= 1e-9);
  }
}

TEST_CASE("discrete laminar streams") {
  const auto x = crest_grid(1.0, 16, 1.0);
  SUBCASE("irrotational: linear profile is exact") {
    // Deep root of 1/h² + 2h = 3.5 (B = g = 1).
    const double h = root([](double d) { return 1.0 / (d * d) + 2.0 * d - 3.5; }, 1.0, 2.0);
    const auto w = discrete_laminar(VorticityFn::constant(0.0), 1.0, 3.5, x, 33, 1e-10);
    CHECK(std::abs(w.eta[0] - h) <= 1e-12);
    for (int j = 0; j < w.ny(); ++j) CHECK(std::abs(w.psi(3, j) - (1.0 - w.Y(3, j) / h)) <= 1e-12);
    CHECK(strong_residuals(w).worst() <= 1e-11);
  }
  SUBCASE("constant vorticity: quadratic profile is exact") {
    const auto v = VorticityFn::constant(-1.0);
    const auto lw = laminar_regular(v, 1.0, 2.5);
    const auto w = discrete_laminar(v, 1.0, 2.5, x, 33, 1e-10);
    CHECK(std::abs(w.eta[0] - lw.depth()) <= 1e-11);
    for (int j = 0; j < w.ny(); ++j) CHECK(std::abs(w.psi(5, j) - lw.psi_at(w.Y(5, j))) <= 1e-11);
  }
  SUBCASE("variable vorticity: second-order agreement") {
    const auto v = VorticityFn::polynomial({-1.0, 0.5, 0.5}, 1.0);
    const auto lw = laminar_regular(v, 1.0, 2.5);
    double prev = 0.0;
    for (int n : {33, 65}) {
      const auto w = discrete_laminar(v, 1.0, 2.5, x, n, 1e-10);
      CHECK(strong_residuals(w).worst() <= 1e-9);
      const double err = std::abs(w.eta[0] - lw.depth());
      if (prev > 0.0) CHECK(prev / err > 3.0);
      prev = err;
    }
  }
}

TEST_CASE("zero-amplitude target returns the laminar seed") {
  const auto v = VorticityFn::constant(0.0);
  const auto fam = continue_family(v, {0.0}, small_grid(24));
  REQUIRE(fam.members.size() == 1);
  const auto bp = linear_bifurcation(v, 1.0, kPi);
  const auto& w = fam.members[0];
  CHECK(std::abs(w.Q - bp.Q) <= 1e-12);
  CHECK(std::abs(w.eta.front() - bp.depth) <= 1e-10);
  CHECK(std::abs(w.eta.back() - bp.depth) <= 1e-10);
  const auto rep = exi_diagnostics(fam);
  CHECK(rep.sup_Q == w.Q);
  CHECK(rep.crest_speeds.size() == 1);
  CHECK(std::abs(rep.crest_speeds[0] - std::sqrt(bp.lambda)) <= 1e-9);
  CHECK_FALSE(rep.crest_decay_rate.has_value());
}

TEST_CASE("small irrotational waves stay near the laminar stream") {
  const auto v = VorticityFn::constant(0.0);
  const auto o = small_grid(40);
  const auto fam = continue_family(v, {0.005, 0.01}, o);
  REQUIRE(fam.members.size() == 2);
  CHECK_FALSE(fam.truncated);
  const double speed = std::sqrt(fam.seed_lambda);
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& d = fam.diagnostics[k];
    CHECK(std::abs(d.amplitude - (k == 0 ? 0.005 : 0.01)) <= 1e-12);
    CHECK(std::abs(d.Q - fam.seed_Q) <= 0.02 * fam.seed_Q);
    CHECK(std::abs(d.crest_speed - speed) <= 0.05 * speed);
    CHECK(d.residual <= o.tol);
    CHECK(d.monotone);
    CHECK(d.psi_y_negative);
  }
  CHECK(fam.diagnostics[1].amplitude > fam.diagnostics[0].amplitude);
}

TEST_CASE("constant negative vorticity family") {
  const auto v = VorticityFn::constant(-1.0);
  const auto o = small_grid(40);
  std::vector<double> targets;
  for (int k = 1; k <= 10; ++k) targets.push_back(0.02 * k);
  const auto fam = continue_family(v, targets, o);
  REQUIRE(fam.members.size() == 10);
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    const auto& w = fam.members[k];
    const auto& d = fam.diagnostics[k];
    CHECK(d.residual <= o.tol);
    CHECK(strong_residuals(w).worst() <= o.tol);
    CHECK(d.psi_y_negative);
    CHECK(d.monotone);
    CHECK(bxv_check(w).max_T <= 1e-6);
    const auto nq = nqt_check(w);
    CHECK(nq.holds);
    CHECK(nq.lower_margin > 0.0);
    CHECK(nq.upper_margin > 0.0);
    REQUIRE(d.beq_margin.has_value());
    CHECK(*d.beq_margin > 0.0);
    if (k > 0) {
      CHECK(d.crest_speed < fam.diagnostics[k - 1].crest_speed);
      CHECK(d.amplitude > fam.diagnostics[k - 1].amplitude);
    }
    // Even symmetry is built into the grid; the trough is the lowest point.
    CHECK(w.eta.back() == *std::min_element(w.eta.begin(), w.eta.end()));
  }
  const auto rep = exi_diagnostics(fam);
  CHECK(rep.min_trough_depth > 0.0);
  CHECK(rep.beq_holds);
  REQUIRE(rep.crest_below_lambda0.has_value());
  CHECK(*rep.crest_below_lambda0);
  REQUIRE(rep.lambda0.has_value());
  CHECK(*rep.lambda0 == doctest::Approx(0.3674).epsilon(1e-3));
  CHECK(rep.crest_decay_rate.has_value());
  CHECK(*rep.crest_decay_rate < 0.0);
  for (std::size_t k = 1; k < rep.arclengths.size(); ++k)
    CHECK(rep.arclengths[k] > rep.arclengths[k - 1]);
  CHECK(rep.lipschitz > 0.0);
}

TEST_CASE("mesh refinement of the wave operator") {
  // Order-4 residuals of order-2 solutions measure the truncation error.
  const auto v = VorticityFn::constant(-1.0);
  double prev = 0.0;
  for (int n : {17, 33, 65}) {
    const auto fam = continue_family(v, {0.1}, small_grid(n));
    REQUIRE(fam.members.size() == 1);
    ResidualOptions ro;
    ro.order = 4;
    const double r = strong_residuals(fam.members[0], ro).worst();
    if (prev > 0.0) CHECK(prev / r >= 3.0);
    prev = r;
  }
}

TEST_CASE("wavegen errors and truncation") {
  CHECK(throws_code([] { (void)continue_family(VorticityFn::constant(1.0), {0.1}, small_grid(16)); },
                    ErrorCode::SeedFailure));
  CHECK(throws_code([] { (void)continue_family(VorticityFn::constant(0.0), {0.2, 0.1}); },
                    ErrorCode::InvalidArgument));
  auto o = small_grid(24);
  o.seed_Q = 1.0;  // below every laminar Q
  CHECK(throws_code([&] { (void)continue_family(VorticityFn::constant(0.0), {0.1}, o); },
                    ErrorCode::SeedFailure));
  auto one = small_grid(24);
  one.max_iter = 1;
  CHECK(throws_code([&] { (void)continue_family(VorticityFn::constant(-1.0), {0.2}, one); },
                    ErrorCode::NewtonDivergence));

  const auto fam = continue_family(VorticityFn::constant(-1.0), {0.05, 1.5}, small_grid(24));
  CHECK(fam.truncated);
  CHECK(fam.members.size() == 1);
  CHECK_FALSE(fam.failure.empty());
  const auto m = fam.manifest({"member_000.csv"});
  CHECK(m["truncated"] == true);
  CHECK(m["members"].size() == 1);
  CHECK(m["members"][0]["path"] == "member_000.csv");
  CHECK(m["seed"]["Q"].get<double>() == fam.seed_Q);
}

TEST_CASE("grid helpers") {
  const auto u = crest_grid(2.0, 33, 1.0);
  CHECK(u.front() == 0.0);
  CHECK(u.back() == 2.0);
  CHECK(std::abs(u[1] - 2.0 / 32) <= 1e-15);
  const auto r = crest_grid(2.0, 33, 4.0);
  CHECK((r[1] - r[0]) / (u[1] - u[0]) == doctest::Approx(0.25).epsilon(1e-2));
  CHECK(r.back() == 2.0);

  const auto w = continue_family(VorticityFn::constant(-1.0), {0.1}, small_grid(24)).members[0];
  const auto same = remap_columns(w, w.x);
  CHECK((same.psi - w.psi).cwiseAbs().maxCoeff() <= 1e-15);
  const auto fine = remap_columns(w, crest_grid(w.L, 24, 4.0));
  CHECK(fine.eta.front() == doctest::Approx(w.eta.front()).epsilon(1e-12));
  CHECK(fine.eta.back() == doctest::Approx(w.eta.back()).epsilon(1e-12));
}
