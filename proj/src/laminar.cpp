#include "vwl/laminar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

LaminarWave::LaminarWave(VorticityFn v, double g, double F, double lambda, double Q, bool extreme,
                         int samples)
    : vfn_(std::move(v)), g_(g), F_(F), lambda_(lambda), Q_(Q), extreme_(extreme) {
  require(samples >= 2, ErrorCode::InvalidArgument, "need at least two samples");
  h_ = layer_depth(vfn_.B());
  Ys_.resize(samples);
  psis_.resize(samples);
  for (int k = 0; k < samples; ++k) {
    Ys_[k] = F_ + h_ * k / (samples - 1);
    psis_[k] = psi_at(Ys_[k]);
  }
}

double LaminarWave::layer_depth(double r) const {
  require(r >= 0.0 && r <= vfn_.B(), ErrorCode::OutOfDomain, "stream value outside [0, B]");
  if (r == 0.0) return 0.0;
  // t = u² removes the t^{-1/2} behaviour at a stagnant surface.
  const double hmax = vfn_.hat_max();
  auto integrand = [&](double u) {
    const double base = (lambda_ - 2.0 * hmax) + 2.0 * (hmax - vfn_.hat(std::min(u * u, vfn_.B())));
    return base > 0.0 ? 2.0 * u / std::sqrt(base) : 0.0;
  };
  const double ur = std::sqrt(r);
  const double us = std::sqrt(vfn_.hat_argmax());
  if (us > 0.0 && us < ur)
    return num::integrate_endpoint_singular(integrand, 0.0, us) +
           num::integrate_endpoint_singular(integrand, us, ur);
  return num::integrate_endpoint_singular(integrand, 0.0, ur);
}

double LaminarWave::psi_at(double Y) const {
  const double depth_below = F_ + h_ - Y;  // distance below the surface
  require(depth_below >= -1e-12 * (1.0 + std::abs(h_)) && depth_below <= h_ * (1.0 + 1e-12),
          ErrorCode::OutOfDomain, "height outside the layer");
  if (depth_below <= 0.0) return 0.0;
  if (depth_below >= h_) return vfn_.B();
  const double B = vfn_.B();
  // Safeguarded Newton in u = √ψ on layer_depth(u²) = depth_below.
  double lo = 0.0, hi = std::sqrt(B);
  double u = hi * depth_below / h_;
  for (int it = 0; it < 100; ++it) {
    const double G = layer_depth(u * u) - depth_below;
    if (G > 0.0)
      hi = u;
    else
      lo = u;
    const double base = lambda_ - 2.0 * vfn_.hat(u * u);
    const double dG = base > 0.0 ? 2.0 * u / std::sqrt(base) : 0.0;
    double next = dG > 0.0 ? u - G / dG : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    const double step = std::abs(next - u);
    u = next;
    if (step <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(u, 1e-300) ||
        hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi)
      break;
  }
  double p = std::clamp(u * u, 0.0, B);
  // Polish in ψ itself; squaring u costs a few ulps.
  for (int it = 0; it < 2; ++it) {
    const double base = lambda_ - 2.0 * vfn_.hat(p);
    if (!(base > 0.0)) break;
    const double next = p - (layer_depth(p) - depth_below) * std::sqrt(base);
    if (!(next > 0.0 && next < B)) break;
    p = next;
  }
  return p;
}

double LaminarWave::psi_y_at(double Y) const {
  const double p = psi_at(Y);
  return -std::sqrt(std::max(0.0, lambda_ - 2.0 * vfn_.hat(p)));
}

LaminarWave trivial_extreme(const VorticityFn& v, double g, double F, int samples) {
  require(g > 0.0, ErrorCode::InvalidArgument, "g must be positive");
  require(v(0.0) < 0.0, ErrorCode::InvalidVorticity,
          "trivial extreme wave needs gamma(0) < 0 (depth integral diverges otherwise)");
  const int n = 2000;
  for (int k = 0; k <= n; ++k)
    require(v(v.B() * k / n) <= 0.0, ErrorCode::InvalidVorticity,
            "trivial extreme wave needs gamma <= 0 on [0, B]");
  LaminarWave probe(v, g, F, 0.0, 0.0, true, 2);
  return LaminarWave(v, g, F, 0.0, 2.0 * g * probe.surface(), true, samples);
}

LaminarWave laminar_regular(const VorticityFn& v, double g, double Q, double F, DepthRoot root,
                            int samples) {
  const BernoulliCurve curve(v, g);
  const double target = Q - 2.0 * g * F;
  const double scale = 1e-12 * std::max(1.0, std::abs(target));
  const double lmin = curve.lambda_min();
  const double l0 = curve.lambda0();
  const double f0 = curve.f(l0);
  auto G = [&](double l) { return curve.f(l) - target; };
  if (target < f0 - scale)
    fail(ErrorCode::NoRoot, "Q = " + std::to_string(Q) + " is below the laminar minimum " +
                                std::to_string(f0 + 2.0 * g * F) + "; scanned lambda in [" +
                                std::to_string(lmin) + ", inf)");
  auto make = [&](double l) {
    const bool extreme = l == 0.0;
    return LaminarWave(v, g, F, l, Q, extreme, samples);
  };
  if (std::abs(target - f0) <= scale) return make(l0);

  if (root == DepthRoot::Deep) {
    const double fend = curve.f_at_min();
    if (std::abs(fend - target) <= scale) return make(lmin);
    if (fend > target) return make(num::bisect(G, lmin, l0));
  }
  double hi = l0 + std::max(1.0, l0);
  for (int k = 0; k < 200 && G(hi) < 0.0; ++k) hi = l0 + 2.0 * (hi - l0);
  return make(num::bisect(G, l0, hi));
}

WaveField to_field(const LaminarWave& lw, double L, int nx, int ny) {
  WaveField w = make_flat_field(lw.vorticity(), lw.g(), L, lw.F(), lw.depth(), lw.Q(), nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double Y = w.Y(0, j);
    const double p = j == 0 ? lw.B() : (j == ny - 1 ? 0.0 : lw.psi_at(Y));
    for (int i = 0; i < nx; ++i) w.psi(i, j) = p;
  }
  return w;
}

}  // namespace vwl
