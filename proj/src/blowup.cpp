#include "vwl/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Stands in for an unbounded stream-value range of corner flows.
constexpr double kHugeB = 1e100;

class ScaledSource : public FlowSource {
 public:
  ScaledSource(const FlowSource& src, double s) : src_(src), s_(s), amp_(std::pow(s, -1.5)) {}
  double psi(double X, double Y) const override { return amp_ * src_.psi(s_ * X, s_ * Y); }
  double surface(double X) const override { return src_.surface(s_ * X) / s_; }
  double bottom() const override { return src_.bottom() / s_; }
  double x_extent() const override { return src_.x_extent() / s_; }
  double gravity() const override { return src_.gravity(); }
  VorticityFn vorticity() const override { return src_.vorticity().rescaled(s_); }

 private:
  const FlowSource& src_;
  double s_, amp_;
};

}  // namespace

CornerFlow::CornerFlow(double alpha_plus, double alpha_minus, double beta, double g)
    : ap_(alpha_plus), am_(alpha_minus), beta_(beta), g_(g) {
  require(ap_ >= 0.0 && ap_ <= kPi / 2 && am_ >= 0.0 && am_ <= kPi / 2,
          ErrorCode::InvalidArgument, "corner half-angles must lie in [0, pi/2]");
  require(ap_ + am_ < kPi, ErrorCode::InvalidArgument, "corner half-angles must sum below pi");
  require(beta_ >= 0.0 && g_ > 0.0, ErrorCode::InvalidArgument, "need beta >= 0 and g > 0");
  p_ = kPi / (kPi - ap_ - am_);
  c_ = std::complex<double>(0.0, 1.0) * std::polar(1.0, 0.5 * (ap_ - am_));
}

double CornerFlow::aperture() const { return kPi - ap_ - am_; }

double CornerFlow::psi(double X, double Y) const {
  if (beta_ == 0.0) return 0.0;
  const std::complex<double> z(X, Y);
  if (z == 0.0) return 0.0;
  return beta_ * std::imag(std::complex<double>(0.0, 1.0) * std::pow(c_ * z, p_));
}

std::complex<double> CornerFlow::derivative(std::complex<double> z) const {
  if (beta_ == 0.0 || (z == 0.0 && p_ > 1.0)) return 0.0;
  return std::complex<double>(0.0, beta_ * p_) * c_ * std::pow(c_ * z, p_ - 1.0);
}

Eigen::Vector2d CornerFlow::gradient(double X, double Y) const {
  // ψ = Im w, so ψ_X = Im w' and ψ_Y = Re w'.
  const auto d = derivative({X, Y});
  return {d.imag(), d.real()};
}

bool CornerFlow::in_fluid(double X, double Y, double tol) const {
  if (X == 0.0 && Y == 0.0) return true;
  const double t = std::atan2(Y, X);
  return t >= -kPi + am_ - tol && t <= -ap_ + tol;
}

double CornerFlow::surface(double X) const {
  return X >= 0.0 ? -std::tan(ap_) * X : std::tan(am_) * X;
}

double CornerFlow::bottom() const { return -kInf; }
double CornerFlow::x_extent() const { return kInf; }
VorticityFn CornerFlow::vorticity() const { return VorticityFn::constant(0.0, kHugeB); }

CornerFlow stokes_corner(double g) {
  return CornerFlow(kPi / 6.0, kPi / 6.0, (2.0 / 3.0) * std::sqrt(g), g);
}

CornerFlow corner_family(double alpha_plus, double alpha_minus, double beta, double g) {
  return CornerFlow(alpha_plus, alpha_minus, beta, g);
}

FieldSampler::FieldSampler(WaveField w) : w_(std::move(w)) {
  validate(w_);
  if (w_.lateral == Lateral::EvenPeriodic)
    require(w_.x.front() == 0.0, ErrorCode::InvalidArgument,
            "periodic source must have its crest column at X = 0");
}

double FieldSampler::x_extent() const {
  if (w_.lateral == Lateral::EvenPeriodic) return w_.x.back();
  return std::min(std::abs(w_.x.front()), std::abs(w_.x.back()));
}

void FieldSampler::columns(double X, int idx[4], double wts[4]) const {
  const int n = w_.nx();
  const bool periodic = w_.lateral == Lateral::EvenPeriodic;
  const double Lx = w_.x.back();
  double xq = X;
  if (periodic) {
    xq = std::abs(xq);
    if (xq > Lx) xq = 2.0 * Lx - xq;
  }
  int k = static_cast<int>(std::upper_bound(w_.x.begin(), w_.x.end(), xq) - w_.x.begin()) - 1;
  k = std::clamp(k, 0, n - 2);
  int start = k - 1;
  if (!periodic) start = std::clamp(start, 0, n - 4);
  double xs[4];
  for (int m = 0; m < 4; ++m) {
    int i = start + m;
    double xi;
    if (i < 0) {
      xi = -w_.x[-i];
      i = -i;
    } else if (i > n - 1) {
      xi = 2.0 * Lx - w_.x[2 * (n - 1) - i];
      i = 2 * (n - 1) - i;
    } else {
      xi = w_.x[i];
    }
    idx[m] = i;
    xs[m] = xi;
  }
  double wl[4];
  num::lagrange4_weights(std::span<const double, 4>(xs, 4), xq, std::span<double, 4>(wl, 4));
  for (int m = 0; m < 4; ++m) wts[m] = wl[m];
}

double FieldSampler::column_value(int i, double Y) const {
  const int ny = w_.ny();
  const double s = (Y - w_.F) / w_.height(i) * (ny - 1);
  int j = std::clamp(static_cast<int>(std::floor(s)) - 1, 0, ny - 4);
  double ss[4] = {double(j), double(j + 1), double(j + 2), double(j + 3)};
  double wl[4];
  num::lagrange4_weights(std::span<const double, 4>(ss, 4), s, std::span<double, 4>(wl, 4));
  double v = 0.0;
  for (int m = 0; m < 4; ++m) v += wl[m] * w_.psi(i, j + m);
  return v;
}

double FieldSampler::psi(double X, double Y) const {
  int idx[4];
  double wts[4];
  columns(X, idx, wts);
  double v = 0.0;
  for (int m = 0; m < 4; ++m) v += wts[m] * column_value(idx[m], Y);
  return v;
}

double FieldSampler::surface(double X) const {
  int idx[4];
  double wts[4];
  columns(X, idx, wts);
  double v = 0.0;
  for (int m = 0; m < 4; ++m) v += wts[m] * w_.eta[idx[m]];
  return v;
}

WaveField sample_window(const FlowSource& src, const Window& win) {
  require(win.x_max > win.x_min && win.nx >= 8 && win.ny >= 8, ErrorCode::InvalidArgument,
          "window needs x_max > x_min and at least 8x8 nodes");
  const double ext = std::max(std::abs(win.x_min), std::abs(win.x_max));
  require(ext <= src.x_extent() * (1.0 + 1e-12), ErrorCode::WindowOutsideDomain,
          "window reaches |X| = " + std::to_string(ext) + " beyond the source extent " +
              std::to_string(src.x_extent()));
  require(win.y_bottom >= src.bottom(), ErrorCode::WindowOutsideDomain,
          "window bottom " + std::to_string(win.y_bottom) + " below the source bottom " +
              std::to_string(src.bottom()));
  WaveField w(src.vorticity());
  w.g = src.gravity();
  w.B = w.vorticity.B();
  w.L = win.x_max - win.x_min;
  w.F = win.y_bottom;
  w.Q = 0.0;
  w.lateral = Lateral::Open;
  w.has_bed = false;
  w.x.resize(win.nx);
  w.eta.resize(win.nx);
  w.psi.resize(win.nx, win.ny);
  for (int i = 0; i < win.nx; ++i) {
    w.x[i] = win.x_min + (win.x_max - win.x_min) * i / (win.nx - 1);
    if (i == win.nx - 1) w.x[i] = win.x_max;
    w.eta[i] = src.surface(w.x[i]);
    require(w.eta[i] > win.y_bottom, ErrorCode::WindowOutsideDomain,
            "surface dips below the window bottom");
  }
  num::parallel_for(0, static_cast<std::size_t>(win.nx), [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < win.ny; ++j) w.psi(i, j) = src.psi(w.x[i], w.Y(i, j));
    w.psi(i, win.ny - 1) = src.psi(w.x[i], w.eta[i]);
  });
  return w;
}

WaveField rescale(const FlowSource& src, double s, const Window& win) {
  require(s > 0.0 && std::isfinite(s), ErrorCode::InvalidArgument, "scale must be positive");
  const double ext = std::max(std::abs(win.x_min), std::abs(win.x_max));
  if (s * ext > src.x_extent() * (1.0 + 1e-12))
    fail(ErrorCode::WindowOutsideDomain, "scale " + std::to_string(s) +
                                             " leaves the source; max admissible scale " +
                                             std::to_string(src.x_extent() / ext));
  if (s * win.y_bottom < src.bottom())
    fail(ErrorCode::WindowOutsideDomain, "scale " + std::to_string(s) +
                                             " reaches below the source; max admissible scale " +
                                             std::to_string(src.bottom() / win.y_bottom));
  if (s == 1.0) return sample_window(src, win);
  const ScaledSource scaled(src, s);
  return sample_window(scaled, win);
}

BlowCheck verify_blow(const CornerFlow& flow, const BlowCheckOptions& o) {
  BlowCheck out;
  auto& rep = out.report;
  const double g = flow.gravity();
  const int per_ray = std::max(1, o.boundary_samples / 2);
  for (int side = 0; side < 2; ++side)
    for (int k = 0; k < per_ray; ++k) {
      const double r = o.r_min + (o.r_max - o.r_min) * k / std::max(1, per_ray - 1);
      const double a = side == 0 ? flow.alpha_plus() : flow.alpha_minus();
      const double X = side == 0 ? r * std::cos(a) : -r * std::cos(a);
      const double Y = -r * std::sin(a);
      const auto gr = flow.gradient(X, Y);
      rep.kinematic_surface.add(flow.psi(X, Y), -1, k, X, Y);
      rep.bernoulli.add(gr.squaredNorm() + 2.0 * g * Y, -1, k, X, Y);
    }
  const int n = o.window_points;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double X = -o.r_max + 2.0 * o.r_max * i / (n - 1);
      const double Y = -o.r_max * j / (n - 1);
      const double r = std::hypot(X, Y);
      if (r < o.r_min || !flow.in_fluid(X, Y)) continue;
      const double h = 0.01 * r;
      auto f = [&](double x, double y) { return flow.psi(x, y); };
      const double c = f(X, Y);
      const double lx = -f(X + 2 * h, Y) + 16 * f(X + h, Y) - 30 * c + 16 * f(X - h, Y) - f(X - 2 * h, Y);
      const double ly = -f(X, Y + 2 * h) + 16 * f(X, Y + h) - 30 * c + 16 * f(X, Y - h) - f(X, Y - 2 * h);
      rep.interior_pde.add((lx + ly) / (12.0 * h * h), i, j, X, Y);
      rep.range.add(std::max({0.0, -c, flow.gradient(X, Y)[1]}), i, j, X, Y);
    }
  rep.interior_pde.finish();
  rep.kinematic_surface.finish();
  rep.bernoulli.finish();
  rep.range.finish();
  out.pass = rep.worst() <= o.tol;
  return out;
}

BlowCheck verify_blow(const WaveField& frame, const BlowCheckOptions& o) {
  validate(frame);
  const int nx = frame.nx();
  int crest = 0;
  for (int i = 1; i < nx; ++i)
    if (frame.eta[i] > frame.eta[crest]) crest = i;
  const double slack = 1e-12 * (1.0 + std::abs(frame.eta[crest]));
  for (int i = 1; i < nx; ++i) {
    const double d = frame.eta[i] - frame.eta[i - 1];
    if ((i <= crest && d < -slack) || (i > crest && d > slack))
      fail(ErrorCode::NonMonotoneSurface,
           "surface is not monotone on each side of the crest near X = " +
               std::to_string(frame.x[i]));
  }
  ResidualOptions ro;
  ro.exclude_center = 0.0;
  ro.exclude_halfwidth = o.crest_exclusion;
  BlowCheck out;
  out.report = strong_residuals(frame, ro);
  out.report.kinematic_bed = ResidualEntry{};
  // The sign conditions replace the [0, B] range entry.
  const auto d = physical_derivatives(frame, frame.psi, 2);
  ResidualEntry sign;
  for (int i = 0; i < nx; ++i) {
    if (std::abs(frame.x[i]) < o.crest_exclusion) continue;
    for (int j = 0; j < frame.ny(); ++j)
      sign.add(std::max({0.0, -frame.psi(i, j), d.ay(i, j)}), i, j, frame.x[i], frame.Y(i, j));
  }
  sign.finish();
  out.report.range = sign;
  out.pass = out.report.worst() <= o.tol;
  return out;
}

double fit_corner_strength(double alpha_plus, double alpha_minus, double g,
                           const BlowCheckOptions& o) {
  const CornerFlow unit(alpha_plus, alpha_minus, 1.0, g);
  double num = 0.0, den = 0.0;
  const int per_ray = std::max(1, o.boundary_samples / 2);
  for (int side = 0; side < 2; ++side)
    for (int k = 0; k < per_ray; ++k) {
      const double r = o.r_min + (o.r_max - o.r_min) * k / std::max(1, per_ray - 1);
      const double a = side == 0 ? alpha_plus : alpha_minus;
      const double X = side == 0 ? r * std::cos(a) : -r * std::cos(a);
      const double Y = -r * std::sin(a);
      const double ak = unit.gradient(X, Y).squaredNorm();
      const double bk = -2.0 * g * Y;
      num += ak * bk;
      den += ak * ak;
    }
  const double b2 = den > 0.0 ? std::max(0.0, num / den) : 0.0;
  return std::sqrt(b2);
}

FamilyScan scan_corner_family(double g, int n, double spacing, const BlowCheckOptions& o) {
  FamilyScan scan;
  scan.n = n;
  scan.spacing = spacing > 0.0 ? spacing : kPi / 102.0;
  // Boundary conditions are cheap and reject almost every member.
  BlowCheckOptions rays = o;
  rays.window_points = 0;
  std::vector<std::vector<FamilyScanHit>> rows(n);
  num::parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t ip) {
    for (int im = 0; im < n; ++im) {
      const double ap = scan.spacing * static_cast<double>(ip);
      const double am = scan.spacing * im;
      if (ap > kPi / 2 || am > kPi / 2 || ap + am >= kPi) continue;
      const double beta = fit_corner_strength(ap, am, g, o);
      const CornerFlow flow(ap, am, beta, g);
      if (verify_blow(flow, rays).pass && verify_blow(flow, o).pass)
        rows[ip].push_back({static_cast<int>(ip), im, ap, am, beta, beta == 0.0});
    }
  });
  for (auto& r : rows)
    for (auto& h : r) {
      (h.trivial ? scan.trivial_passes : scan.nontrivial_passes)++;
      scan.passes.push_back(h);
    }
  return scan;
}

std::string to_string(CornerClass c) {
  switch (c) {
    case CornerClass::Corner: return "corner";
    case CornerClass::Flat: return "flat";
    case CornerClass::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

SideEstimate side_estimate(const std::vector<double>& s, const std::vector<double>& w,
                           const char* side) {
  SideEstimate out;
  if (s.empty())
    fail(ErrorCode::InsufficientResolution, std::string("no samples on the ") + side + " side");
  const double smax = *std::max_element(s.begin(), s.end());
  std::vector<double> q;
  for (int k = 0; k < 60; ++k) {
    const double hi = smax * std::ldexp(1.0, -k);
    const double lo = hi / 8.0;
    double num = 0.0, den = 0.0;
    std::size_t cnt = 0;
    for (std::size_t m = 0; m < s.size(); ++m)
      if (s[m] >= lo && s[m] <= hi) {
        num += s[m] * w[m];
        den += s[m] * s[m];
        ++cnt;
      }
    if (cnt < 8) break;
    q.push_back(num / den);
    out.range_lo = lo;
    out.range_hi = hi;
    out.samples = cnt;
  }
  if (q.size() < 3)
    fail(ErrorCode::InsufficientResolution,
         std::string("fewer than 8 samples per range on the ") + side +
             " side before three dyadic ranges were fitted");
  const std::size_t K = q.size() - 1;
  out.q = q[K];
  out.drift = std::max(std::abs(q[K] - q[K - 1]), std::abs(q[K - 1] - q[K - 2]));
  if (out.drift < 0.01 && std::abs(out.q - 1.0 / std::sqrt(3.0)) <= 0.01)
    out.kind = CornerClass::Corner;
  else if (out.drift < 0.01 && std::abs(out.q) <= 0.01)
    out.kind = CornerClass::Flat;
  return out;
}

}  // namespace

CornerAngle corner_angle(const std::vector<double>& u, const std::vector<double>& v) {
  require(u.size() == v.size(), ErrorCode::InvalidArgument, "profile arrays differ in length");
  std::vector<double> sp, wp, sm, wm;
  for (std::size_t k = 0; k < u.size(); ++k) {
    if (u[k] > 0.0) {
      sp.push_back(u[k]);
      wp.push_back(-v[k]);
    } else if (u[k] < 0.0) {
      sm.push_back(-u[k]);
      wm.push_back(-v[k]);
    }
  }
  return {side_estimate(sp, wp, "right"), side_estimate(sm, wm, "left")};
}

ConeCheck oddson_cone_check(const FlowSource& src, const Cone& cone, double delta, int scales,
                            int angles) {
  require(cone.half_aperture > 0.0 && cone.half_aperture < kPi && cone.r0 > 0.0,
          ErrorCode::InvalidArgument, "cone needs half-aperture in (0, pi) and r0 > 0");
  require(scales >= 3 && angles >= 3, ErrorCode::InvalidArgument, "too few cone samples");
  ConeCheck out;
  const double a = cone.half_aperture;
  out.mu = kPi / (2.0 * a);
  auto point = [&](double r, double t) {
    return Eigen::Vector2d(r * std::cos(cone.axis + t), r * std::sin(cone.axis + t));
  };
  // Containment on a polar net that includes both edges.
  constexpr int radial = 64;
  for (int k = 1; k <= radial + scales; ++k) {
    const double r = k <= radial ? cone.r0 * k / radial : cone.r0 * std::ldexp(1.0, -(k - radial));
    for (int m = 0; m <= angles + 1; ++m) {
      const double t = -a + 2.0 * a * m / (angles + 1);
      const auto p = point(r, t);
      const double tol = 1e-12 * (1.0 + r);
      if (std::abs(p[0]) > src.x_extent() || p[1] < src.bottom() ||
          p[1] > src.surface(p[0]) + tol)
        fail(ErrorCode::ConeNotContained, "cone point (" + std::to_string(p[0]) + ", " +
                                              std::to_string(p[1]) + ") lies outside the fluid");
      if (src.psi(p[0], p[1]) >= delta)
        fail(ErrorCode::ConeNotContained, "psi reaches delta inside the cone at r = " +
                                              std::to_string(r));
    }
  }
  out.kappa = kInf;
  for (int k = 0; k < scales; ++k) {
    const double r = cone.r0 * std::ldexp(1.0, -k);
    double mn = kInf;
    for (int m = 0; m < angles; ++m) {
      const double t = -a + 2.0 * a * (m + 0.5) / angles;
      const auto p = point(r, t);
      mn = std::min(mn, src.psi(p[0], p[1]) / (std::pow(r, out.mu) * std::cos(out.mu * t)));
    }
    out.radii.push_back(r);
    out.minima.push_back(mn);
    out.kappa = std::min(out.kappa, mn);
  }
  const auto& m = out.minima;
  const std::size_t K = m.size() - 1;
  out.violation = m[K] < m[K - 1] * (1.0 - 1e-3) && m[K - 1] < m[K - 2] * (1.0 - 1e-3);
  return out;
}

}  // namespace vwl
