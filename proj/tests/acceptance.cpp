// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "vwl/blowup.hpp"
#include "vwl/error.hpp"
#include "vwl/field.hpp"
#include "vwl/inteq.hpp"
#include "vwl/laminar.hpp"
#include "vwl/pressure.hpp"
#include "vwl/vorticity.hpp"
#include "vwl/wavegen.hpp"

using namespace vwl;

namespace {

constexpr double kPi = std::numbers::pi;
const double kS3 = std::sqrt(3.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Bisection oracle for a sign change on [lo, hi].
double bisect(const std::function<double(double)>& f, double lo, double hi) {
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

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double sup_error(const std::vector<double>& v, double target) {
  double e = 0.0;
  for (double a : v) e = std::max(e, std::abs(a - target));
  return e;
}

const VorticityFn kMinusOne = VorticityFn::constant(-1.0);

// Trivial extreme wave with its flat stagnant surface moved to Y = 0.
WaveField shifted_extreme(int n) {
  const auto w = to_field(trivial_extreme(kMinusOne, 1.0), 1.0, n, n);
  return shift_datum(w, w.Q / (2.0 * w.g));
}

Outcome trivial_extreme_wave() {
  const auto lw = trivial_extreme(kMinusOne, 1.0);
  const auto w = to_field(lw, 1.0, 128, 128);
  const double res = strong_residuals(w).worst();
  const double s2 = std::sqrt(2.0);
  const double dd = std::abs(lw.depth() - s2);
  const double dq = std::abs(lw.Q() - 2.0 * s2);
  const auto stag = stagnation_points(w, 1e-8);
  const bool whole = static_cast<int>(stag.size()) == w.nx();
  return {res <= 1e-8 && dd <= 1e-10 && dq <= 1e-10 && whole,
          fmt("residual %.2e, |depth-sqrt2| %.1e, |Q-2sqrt2| %.1e", res, dd, dq) +
              (whole ? ", whole surface stagnant" : ", surface not stagnant")};
}

std::vector<double> family_targets() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(0.02 * k);
  return t;
}

// γ ≡ -1 branch, half wavelength π, 128 x 128.
const ContinuationFamily& family() {
  static const ContinuationFamily fam = continue_family(kMinusOne, family_targets(), {});
  return fam;
}

Outcome head_bound_family() {
  const auto& fam = family();
  double worst_T = -INFINITY;
  bool nqt = true;
  for (const auto& w : fam.members) {
    worst_T = std::max(worst_T, bxv_check(w).max_T);
    nqt = nqt && nqt_check(w).holds;
  }
  const bool enough = fam.members.size() >= 10;
  return {enough && worst_T <= 1e-6 && nqt,
          fmt("%.0f members, max T %.2e, ", static_cast<double>(fam.members.size()), worst_T) +
              (nqt ? "nqt holds" : "nqt fails")};
}

Outcome q_bound_family() {
  const auto& fam = family();
  // Oracle for γ ≡ -1, g = 1: f(λ) = λ + 2(√(λ+2) - √λ).
  const double l0 = bisect(
      [](double l) { return 1.0 + 1.0 / std::sqrt(l + 2.0) - 1.0 / std::sqrt(l); }, 1e-6, 10.0);
  const double f0 = l0 + 2.0 * (std::sqrt(l0 + 2.0) - std::sqrt(l0));
  const auto lib = cs_q_bound(kMinusOne, 1.0);
  const bool oracle_ok = std::abs(lib.lambda0 - l0) <= 1e-10 && std::abs(lib.f_lambda0 - f0) <= 1e-10 &&
                         std::abs(l0 - 0.3674) <= 1e-3 && std::abs(f0 - 2.2325) <= 1e-3;
  double sup_Q = -INFINITY;
  for (const auto& d : fam.diagnostics) sup_Q = std::max(sup_Q, d.Q);
  return {oracle_ok && !fam.members.empty() && sup_Q <= f0 + 1e-6,
          fmt("sup Q %.6f vs f(lambda0) %.6f (lambda0 %.6f)", sup_Q, f0, l0)};
}

Outcome stokes_corner_flow() {
  const auto s = stokes_corner(1.0);
  BlowCheckOptions o;
  o.boundary_samples = 200;
  o.window_points = 128;
  const auto chk = verify_blow(s, o);
  const auto& r = chk.report;
  const double worst =
      std::max({r.interior_pde.sup, r.kinematic_surface.sup, r.bernoulli.sup});
  // Complex-derivative oracle: w' = -(iZ)^{1/2}, |∇ψ|² = |w'|².
  const std::complex<double> z(1.0, -1.0 / kS3);
  const double oracle = std::norm(-std::sqrt(std::complex<double>(0.0, 1.0) * z));
  const double grad = s.gradient(1.0, -1.0 / kS3).squaredNorm();
  const double dg = std::abs(grad - 2.0 / kS3);
  return {chk.pass && worst <= 1e-6 && dg <= 1e-10 && std::abs(oracle - 2.0 / kS3) <= 1e-14,
          fmt("worst residual %.2e, |grad|^2 - 2/sqrt3 = %.1e", worst, dg)};
}

const ThetaOperator& default_operator() {
  static const ThetaOperator op(ThetaGrid{});
  return op;
}

Outcome theta_fixed_point() {
  const auto& op = default_operator();
  const double fixed = sup_error(theta_rhs(op, std::vector<double>(op.size(), kPi / 6.0)), kPi / 6.0);
  double kern = 0.0;
  for (double x : {0.1, 1.0, 10.0})
    kern = std::max(kern, std::abs(log_kernel_integral(x, [](double y) { return 1.0 / y; }) -
                                   kPi * kPi / 2.0));
  return {fixed <= 1e-8 && kern <= 1e-8,
          fmt("fixed point sup error %.2e, kernel identity error %.2e", fixed, kern)};
}

Outcome theta_uniqueness() {
  const auto& op = default_operator();
  std::mt19937_64 rng(20240601);
  double worst = 0.0;
  double lowest = INFINITY;
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const auto init = random_admissible_theta(op.x(), rng);
    ThetaLog log;
    try {
      const auto sol = solve_theta(op, init, {}, &log);
      worst = std::max(worst, sup_error(sol.theta, kPi / 6.0));
    } catch (const vwl::Error&) {
      ++failures;
    }
    for (const auto& it : log.iterations) lowest = std::min(lowest, it.min_theta);
  }
  const bool bound = lowest >= vsq_constant() - 1e-9;
  return {failures == 0 && worst <= 1e-5 && bound,
          fmt("100 starts, %.0f failed, worst sup error %.2e, min iterate %.4f", failures, worst,
              lowest) +
              fmt(" (bound %.4f)", vsq_constant())};
}

Outcome theta_reconstruction() {
  const auto& op = default_operator();
  const auto b = reconstruct_surface(op, std::vector<double>(op.size(), kPi / 6.0), 1.0);
  double dev = 0.0;
  for (std::size_t k = 0; k < b.t.size(); ++k)
    dev = std::max(dev, std::abs(b.V[k] + std::abs(b.U[k]) / kS3));
  return {dev <= 1e-6, fmt("max |V + |U|/sqrt3| = %.2e", dev)};
}

Outcome blowup_dichotomy() {
  Window win;
  const auto s = stokes_corner(1.0);
  const auto base = rescale(s, 1.0, win);
  double stokes_dev = 0.0;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    const auto f = rescale(s, eps, win);
    stokes_dev = std::max(stokes_dev, (f.psi - base.psi).cwiseAbs().maxCoeff());
    for (int i = 0; i < f.nx(); ++i)
      stokes_dev = std::max(stokes_dev, std::abs(f.eta[i] - base.eta[i]));
  }

  const FieldSampler flat_src(shifted_extreme(129));
  std::vector<double> le, ls;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto f = rescale(flat_src, eps, win);
    le.push_back(std::log(eps));
    ls.push_back(std::log(f.psi.cwiseAbs().maxCoeff()));
  }
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < le.size(); ++k) {
    mx += le[k] / le.size();
    my += ls[k] / le.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t k = 0; k < le.size(); ++k) {
    sxy += (le[k] - mx) * (ls[k] - my);
    sxx += (le[k] - mx) * (le[k] - mx);
  }
  const double exponent = sxy / sxx;

  std::vector<double> u, vs;
  for (int k = 0; k <= 2000; ++k) {
    u.push_back(-1.0 + k / 1000.0);
    vs.push_back(s.surface(u.back()));
  }
  const auto cs = corner_angle(u, vs);
  const auto ff = rescale(flat_src, 1e-3, Window{-1.0, 1.0, -1.0, 257, 129});
  const auto cf = corner_angle(std::vector<double>(ff.x.begin(), ff.x.end()),
                               std::vector<double>(ff.eta.begin(), ff.eta.end()));
  const bool corner_ok = std::abs(cs.plus.q - 1.0 / kS3) <= 1e-3 &&
                         std::abs(cs.minus.q - 1.0 / kS3) <= 1e-3 &&
                         cs.plus.kind == CornerClass::Corner && cs.minus.kind == CornerClass::Corner;
  const bool flat_ok = cf.plus.q == 0.0 && cf.minus.q == 0.0 && cf.plus.kind == CornerClass::Flat &&
                       cf.minus.kind == CornerClass::Flat;
  return {stokes_dev <= 1e-8 && std::abs(exponent - 0.5) <= 0.02 && corner_ok && flat_ok,
          fmt("Stokes frame deviation %.2e, flat exponent %.4f, corner slope %.6f", stokes_dev,
              exponent, cs.plus.q) +
              (flat_ok ? ", flat profile classified flat" : ", flat profile misclassified")};
}

Outcome corner_family_scan() {
  const auto scan = scan_corner_family(1.0, 50);
  const double beta_stokes = 2.0 / 3.0;
  bool stokes_hit = false;
  bool only_allowed = true;
  for (const auto& h : scan.passes) {
    const bool at_stokes = std::abs(h.alpha_plus - kPi / 6.0) <= 1e-12 &&
                           std::abs(h.alpha_minus - kPi / 6.0) <= 1e-12;
    if (h.beta == 0.0) continue;
    if (at_stokes && std::abs(h.beta - beta_stokes) <= 1e-6) stokes_hit = true;
    else only_allowed = false;
  }
  return {stokes_hit && only_allowed,
          fmt("%.0f passes: %.0f with beta = 0, %.0f nontrivial", static_cast<double>(scan.passes.size()),
              static_cast<double>(scan.trivial_passes), static_cast<double>(scan.nontrivial_passes)) +
              (stokes_hit ? ", Stokes pair found" : ", Stokes pair missing")};
}

Outcome cone_obstruction() {
  const auto c = oddson_cone_check(stokes_corner(1.0), Cone{}, 10.0);
  const bool kappa_ok = std::abs(c.kappa - 2.0 / 3.0) <= 0.05 * (2.0 / 3.0) && !c.violation;
  bool not_contained = false;
  Cone wide;
  wide.half_aperture = 65.0 * kPi / 180.0;
  try {
    (void)oddson_cone_check(stokes_corner(1.0), wide, 10.0);
  } catch (const vwl::Error& e) {
    not_contained = e.code() == ErrorCode::ConeNotContained;
  }
  const FieldSampler src(shifted_extreme(129));
  Cone flat;
  flat.half_aperture = 85.0 * kPi / 180.0;
  const bool violation = oddson_cone_check(src, flat, 1.0).violation;
  return {kappa_ok && not_contained && violation,
          fmt("kappa %.6f", c.kappa) +
              (not_contained ? ", 130 deg cone rejected" : ", 130 deg cone accepted") +
              (violation ? ", 170 deg violation certified" : ", no violation at 170 deg")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  Outcome (*fn)();
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "trivial extreme wave", 1.0, trivial_extreme_wave},
      {2, "head bound along the wave family", 300.0, head_bound_family},
      {3, "Bernoulli constant bound along the family", 300.0, q_bound_family},
      {4, "Stokes corner flow", 1.0, stokes_corner_flow},
      {5, "integral equation fixed point", 10.0, theta_fixed_point},
      {6, "integral equation uniqueness", 300.0, theta_uniqueness},
      {7, "reconstruction consistency", 1.0, theta_reconstruction},
      {8, "blow-up dichotomy", 30.0, blowup_dichotomy},
      {9, "corner family scan", 120.0, corner_family_scan},
      {10, "cone obstruction", 10.0, cone_obstruction},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt <= c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("criterion %2d %s: %s (%s; %.2f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), dt, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
