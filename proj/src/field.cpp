#include "vwl/field.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

namespace {

enum class Parity { Even, Odd };

// Derivative stencils along one grid direction with unit spacing.
class Axis {
 public:
  // brk > 0 splits a non-reflecting axis at a kink: stencils never cross it.
  Axis(int n, int order, bool reflect, int brk = -1) : n_(n), p_(order), reflect_(reflect) {
    require(order == 2 || order == 4, ErrorCode::InvalidArgument, "stencil order must be 2 or 4");
    require(n > p_ + 1, ErrorCode::DegenerateGrid, "too few nodes for the stencil order");
    const int half = p_ / 2;
    std::vector<double> nodes;
    if (reflect_) {
      for (int k = -half; k <= half; ++k) nodes.push_back(k);
      const auto w = num::fd_weights(0.0, nodes, 2);
      central1_ = w[1];
      central2_ = w[2];
      return;
    }
    start1_.resize(n);
    start2_.resize(n);
    w1_.resize(n);
    w2_.resize(n);
    for (int i = 0; i < n; ++i) {
      const int lo = brk > 0 && i > brk ? brk : 0;
      const int hi = brk > 0 && i <= brk ? brk : n - 1;
      auto plan = [&](int m, int& start, std::vector<double>& wts, int deriv) {
        start = std::clamp(i - m / 2, lo, hi - m + 1);
        std::vector<double> xs;
        for (int k = 0; k < m; ++k) xs.push_back(start + k);
        wts = num::fd_weights(i, xs, 2)[deriv];
      };
      const bool interior = i - half >= lo && i + half <= hi;
      plan(p_ + 1, start1_[i], w1_[i], 1);
      plan(interior ? p_ + 1 : p_ + 2, start2_[i], w2_[i], 2);
    }
  }

  // d1, d2 receive first and second derivatives of v (length n, stride).
  void apply(const double* v, std::ptrdiff_t stride, Parity parity, double* d1, double* d2,
             std::ptrdiff_t out_stride) const {
    if (reflect_) {
      const int half = p_ / 2;
      auto at = [&](int k) {
        if (k < 0) return parity == Parity::Even ? v[-k * stride] : 2.0 * v[0] - v[-k * stride];
        if (k > n_ - 1) {
          const int r = 2 * (n_ - 1) - k;
          return parity == Parity::Even ? v[r * stride] : 2.0 * v[(n_ - 1) * stride] - v[r * stride];
        }
        return v[k * stride];
      };
      for (int i = 0; i < n_; ++i) {
        double s1 = 0.0, s2 = 0.0;
        for (int k = -half; k <= half; ++k) {
          const double f = at(i + k);
          s1 += central1_[k + half] * f;
          s2 += central2_[k + half] * f;
        }
        if (d1) d1[i * out_stride] = s1;
        if (d2) d2[i * out_stride] = s2;
      }
      return;
    }
    for (int i = 0; i < n_; ++i) {
      if (d1) {
        double s = 0.0;
        for (std::size_t k = 0; k < w1_[i].size(); ++k) s += w1_[i][k] * v[(start1_[i] + k) * stride];
        d1[i * out_stride] = s;
      }
      if (d2) {
        double s = 0.0;
        for (std::size_t k = 0; k < w2_[i].size(); ++k) s += w2_[i][k] * v[(start2_[i] + k) * stride];
        d2[i * out_stride] = s;
      }
    }
  }

 private:
  int n_, p_;
  bool reflect_;
  std::vector<double> central1_, central2_;
  std::vector<int> start1_, start2_;
  std::vector<std::vector<double>> w1_, w2_;
};

// Interior crest of an Open field where the surface has a corner (both
// one-sided slopes locally constant), or -1. Mapped values are not smooth
// across such a column.
int surface_kink(const WaveField& w, int order) {
  if (w.lateral != Lateral::Open) return -1;
  const int n = w.nx();
  const int k = static_cast<int>(std::max_element(w.eta.begin(), w.eta.end()) - w.eta.begin());
  if (k < order + 2 || k > n - 1 - (order + 2)) return -1;
  auto slope = [&](int a) { return (w.eta[a + 1] - w.eta[a]) / (w.x[a + 1] - w.x[a]); };
  const double l1 = slope(k - 1), l2 = slope(k - 2), r1 = slope(k), r2 = slope(k + 1);
  if (!(l1 > 0.0 && r1 < 0.0)) return -1;
  const bool left = std::abs(l1 - l2) < 0.5 * l1;
  const bool right = std::abs(r1 - r2) < 0.5 * -r1;
  return left && right ? k : -1;
}

struct Metrics {
  std::vector<double> xs, xss;  // dx/dξ, d²x/dξ²
  std::vector<double> h, hp, hpp;  // column height and its X derivatives
};

Metrics metrics(const WaveField& w, const Axis& axis) {
  const int nx = w.nx();
  Metrics m;
  m.xs.resize(nx);
  m.xss.resize(nx);
  axis.apply(w.x.data(), 1, Parity::Odd, m.xs.data(), m.xss.data(), 1);
  m.h.resize(nx);
  for (int i = 0; i < nx; ++i) m.h[i] = w.height(i);
  std::vector<double> h1(nx), h2(nx);
  axis.apply(m.h.data(), 1, Parity::Even, h1.data(), h2.data(), 1);
  m.hp.resize(nx);
  m.hpp.resize(nx);
  for (int i = 0; i < nx; ++i) {
    m.hp[i] = h1[i] / m.xs[i];
    m.hpp[i] = (h2[i] - m.xss[i] / m.xs[i] * h1[i]) / (m.xs[i] * m.xs[i]);
  }
  return m;
}

double clamp_psi(const WaveField& w, double p) { return std::clamp(p, 0.0, w.vorticity.B()); }

bool excluded(const ResidualOptions& o, double X) {
  return o.exclude_halfwidth > 0.0 && std::abs(X - o.exclude_center) < o.exclude_halfwidth;
}

}  // namespace

void validate(const WaveField& w) {
  const int nx = w.nx();
  require(nx >= 8 && w.ny() >= 8, ErrorCode::DegenerateGrid, "grid must be at least 8x8");
  require(w.psi.rows() == nx && static_cast<int>(w.eta.size()) == nx, ErrorCode::DegenerateGrid,
          "psi, eta and x sizes disagree");
  for (int i = 1; i < nx; ++i)
    require(w.x[i] > w.x[i - 1], ErrorCode::DegenerateGrid, "abscissae must increase strictly");
  for (int i = 0; i < nx; ++i)
    require(w.height(i) > 0.0, ErrorCode::DegenerateGrid,
            "column " + std::to_string(i) + " has non-positive height");
}

WaveField make_flat_field(const VorticityFn& v, double g, double L, double F, double depth,
                          double Q, int nx, int ny) {
  WaveField w(v);
  w.g = g;
  w.B = v.B();
  w.L = L;
  w.F = F;
  w.Q = Q;
  w.x.resize(nx);
  for (int i = 0; i < nx; ++i) w.x[i] = L * i / (nx - 1);
  w.eta.assign(nx, F + depth);
  w.psi = Eigen::MatrixXd::Zero(nx, ny);
  return w;
}

Derivatives physical_derivatives(const WaveField& w, const Eigen::MatrixXd& a, int order) {
  validate(w);
  const int nx = w.nx();
  const int ny = w.ny();
  const Axis xi(nx, order, w.lateral == Lateral::EvenPeriodic, surface_kink(w, order));
  const Axis sg(ny, order, false);
  const Metrics m = metrics(w, xi);

  Eigen::MatrixXd a1(nx, ny), a2(nx, ny);
  for (int j = 0; j < ny; ++j)
    xi.apply(a.col(j).data(), 1, Parity::Even, a1.col(j).data(), a2.col(j).data(), 1);
  Eigen::MatrixXd AX(nx, ny), AXX(nx, ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      AX(i, j) = a1(i, j) / m.xs[i];
      AXX(i, j) = (a2(i, j) - m.xss[i] / m.xs[i] * a1(i, j)) / (m.xs[i] * m.xs[i]);
    }

  const double ds = 1.0 / (ny - 1);
  Eigen::MatrixXd as(nx, ny), ass(nx, ny), axs(nx, ny);
  for (int i = 0; i < nx; ++i) {
    sg.apply(a.data() + i, nx, Parity::Even, as.data() + i, ass.data() + i, nx);
    sg.apply(AX.data() + i, nx, Parity::Even, axs.data() + i, nullptr, nx);
  }

  Derivatives d;
  d.ax.resize(nx, ny);
  d.ay.resize(nx, ny);
  d.axx.resize(nx, ny);
  d.ayy.resize(nx, ny);
  for (int j = 0; j < ny; ++j) {
    const double s = w.sigma(j);
    for (int i = 0; i < nx; ++i) {
      const double H = m.h[i];
      const double a_s = as(i, j) / ds;
      const double a_ss = ass(i, j) / (ds * ds);
      const double ax_s = axs(i, j) / ds;
      const double sx = -s * m.hp[i] / H;
      const double sxx = s * (2.0 * m.hp[i] * m.hp[i] - H * m.hpp[i]) / (H * H);
      d.ax(i, j) = AX(i, j) + sx * a_s;
      d.ay(i, j) = a_s / H;
      d.axx(i, j) = AXX(i, j) + 2.0 * sx * ax_s + sx * sx * a_ss + sxx * a_s;
      d.ayy(i, j) = a_ss / (H * H);
    }
  }
  return d;
}

void ResidualEntry::add(double value, int ii, int jj, double XX, double YY) {
  value = std::abs(value);
  if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
  if (count == 0 || value > sup) {
    sup = value;
    i = ii;
    j = jj;
    X = XX;
    Y = YY;
  }
  rms += value * value;
  ++count;
}

void ResidualEntry::finish() {
  rms = count ? std::sqrt(rms / static_cast<double>(count)) : 0.0;
}

nlohmann::json ResidualEntry::to_json() const {
  return {{"sup", sup}, {"l2", rms}, {"argmax", {{"i", i}, {"j", j}, {"X", X}, {"Y", Y}}},
          {"count", count}};
}

double ResidualReport::worst() const {
  double m = std::max({interior_pde.sup, kinematic_surface.sup, kinematic_bed.sup, bernoulli.sup,
                       range.sup});
  if (weak_form) m = std::max(m, weak_form->sup);
  return m;
}

nlohmann::json ResidualReport::to_json() const {
  nlohmann::json j;
  j["interior_pde"] = interior_pde.to_json();
  j["kinematic_surface"] = kinematic_surface.to_json();
  j["kinematic_bed"] = kinematic_bed.to_json();
  j["bernoulli"] = bernoulli.to_json();
  j["weak_form"] = weak_form ? weak_form->to_json() : nlohmann::json(nullptr);
  j["range"] = range.to_json();
  return j;
}

Eigen::MatrixXd pde_residual(const WaveField& w, int order) {
  const auto d = physical_derivatives(w, w.psi, order);
  const int nx = w.nx();
  const int ny = w.ny();
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(nx, ny);
  const bool open = w.lateral == Lateral::Open;
  for (int j = 1; j < ny - 1; ++j)
    for (int i = open ? 1 : 0; i < (open ? nx - 1 : nx); ++i)
      r(i, j) = d.axx(i, j) + d.ayy(i, j) + w.vorticity(clamp_psi(w, w.psi(i, j)));
  return r;
}

Eigen::VectorXd bernoulli_residual(const WaveField& w, int order) {
  const auto d = physical_derivatives(w, w.psi, order);
  const int top = w.ny() - 1;
  Eigen::VectorXd r(w.nx());
  for (int i = 0; i < w.nx(); ++i)
    r[i] = d.ax(i, top) * d.ax(i, top) + d.ay(i, top) * d.ay(i, top) + 2.0 * w.g * w.eta[i] - w.Q;
  return r;
}

ResidualReport strong_residuals(const WaveField& w, const ResidualOptions& opts) {
  const auto d = physical_derivatives(w, w.psi, opts.order);
  const int nx = w.nx();
  const int ny = w.ny();
  const bool open = w.lateral == Lateral::Open;
  ResidualReport rep;
  const double B = w.vorticity.B();
  for (int i = 0; i < nx; ++i) {
    const double X = w.x[i];
    const bool skip = excluded(opts, X);
    const bool edge = open && (i == 0 || i == nx - 1);
    for (int j = 0; j < ny; ++j) {
      const double p = w.psi(i, j);
      const double Y = w.Y(i, j);
      rep.range.add(std::max({0.0, -p, p - B}), i, j, X, Y);
      if (j == 0 || j == ny - 1 || skip || edge) continue;
      rep.interior_pde.add(d.axx(i, j) + d.ayy(i, j) + w.vorticity(clamp_psi(w, p)), i, j, X, Y);
    }
    const int top = ny - 1;
    rep.kinematic_surface.add(w.psi(i, top), i, top, X, w.eta[i]);
    if (w.has_bed) rep.kinematic_bed.add(w.psi(i, 0) - w.B, i, 0, X, w.F);
    if (!skip) {
      const double v2 = d.ax(i, top) * d.ax(i, top) + d.ay(i, top) * d.ay(i, top);
      rep.bernoulli.add(v2 + 2.0 * w.g * w.eta[i] - w.Q, i, top, X, w.eta[i]);
    }
  }
  rep.interior_pde.finish();
  rep.kinematic_surface.finish();
  rep.kinematic_bed.finish();
  rep.bernoulli.finish();
  rep.range.finish();
  return rep;
}

double BumpTestFn::value(double X, double Y) const {
  const double r2 = ((X - cx) * (X - cx) + (Y - cy) * (Y - cy)) / (radius * radius);
  if (r2 >= 1.0) return 0.0;
  return amplitude * std::pow(1.0 - r2, degree);
}

Eigen::Vector2d BumpTestFn::gradient(double X, double Y) const {
  const double r2 = ((X - cx) * (X - cx) + (Y - cy) * (Y - cy)) / (radius * radius);
  if (r2 >= 1.0) return {0.0, 0.0};
  const double c = -2.0 * amplitude * degree * std::pow(1.0 - r2, degree - 1) / (radius * radius);
  return {c * (X - cx), c * (Y - cy)};
}

double weak_residual(const WaveField& w, const BumpTestFn& zeta) {
  validate(w);
  if (zeta.amplitude == 0.0) return 0.0;
  require(zeta.radius > 0.0 && zeta.degree >= 2, ErrorCode::UnsupportedTestFn,
          "bump needs positive radius and degree >= 2 (C1)");
  require(zeta.cy - zeta.radius > w.F, ErrorCode::UnsupportedTestFn,
          "test function support touches the bottom line");
  const int nx = w.nx();
  const int ny = w.ny();
  const double x0 = w.x.front();
  const double x1 = w.x.back();
  const bool periodic = w.lateral == Lateral::EvenPeriodic;
  const double period = 2.0 * (x1 - x0);
  if (periodic)
    require(2.0 * zeta.radius < period, ErrorCode::UnsupportedTestFn,
            "test function support exceeds one period");
  else
    require(zeta.cx - zeta.radius >= x0 && zeta.cx + zeta.radius <= x1,
            ErrorCode::UnsupportedTestFn, "test function support leaves the window");

  auto zeta_value = [&](double X, double Y) {
    if (!periodic) return zeta.value(X, Y);
    double s = 0.0;
    const int m0 = static_cast<int>(std::floor((zeta.cx - zeta.radius - X) / period));
    for (int m = m0; m <= m0 + 2; ++m) s += zeta.value(X + m * period, Y);
    return s;
  };
  auto zeta_grad = [&](double X, double Y) -> Eigen::Vector2d {
    if (!periodic) return zeta.gradient(X, Y);
    Eigen::Vector2d s(0.0, 0.0);
    const int m0 = static_cast<int>(std::floor((zeta.cx - zeta.radius - X) / period));
    for (int m = m0; m <= m0 + 2; ++m) s += zeta.gradient(X + m * period, Y);
    return s;
  };

  const auto d = physical_derivatives(w, w.psi, 2);
  const Axis xi(nx, 2, periodic);
  std::vector<double> xs(nx);
  xi.apply(w.x.data(), 1, Parity::Odd, xs.data(), nullptr, 1);
  const auto ws = num::gregory_weights(ny);
  const double ds = 1.0 / (ny - 1);

  // Unfolded columns: (source column, mirrored?, X, lateral weight).
  struct Col {
    int i;
    bool mirror;
    double X;
    double wx;
  };
  std::vector<Col> cols;
  if (periodic) {
    for (int i = nx - 2; i >= 1; --i) cols.push_back({i, true, 2.0 * x0 - w.x[i], xs[i]});
    for (int i = 0; i < nx; ++i) cols.push_back({i, false, w.x[i], xs[i]});
  } else {
    const auto wx = num::gregory_weights(nx);
    for (int i = 0; i < nx; ++i) cols.push_back({i, false, w.x[i], wx[i] * xs[i]});
  }

  double area = 0.0;
  for (const auto& c : cols) {
    const double H = w.height(c.i);
    double colsum = 0.0;
    for (int j = 0; j < ny; ++j) {
      const double Y = w.Y(c.i, j);
      const double z = zeta_value(c.X, Y);
      const Eigen::Vector2d gz = zeta_grad(c.X, Y);
      if (z == 0.0 && gz.squaredNorm() == 0.0) continue;
      const double px = c.mirror ? -d.ax(c.i, j) : d.ax(c.i, j);
      const double py = d.ay(c.i, j);
      const double f = px * gz[0] + py * gz[1] - w.vorticity(clamp_psi(w, w.psi(c.i, j))) * z;
      colsum += ws[j] * f;
    }
    area += c.wx * colsum * H * ds;
  }

  // Surface polyline; for periodic fields close the loop across one period.
  double surf = 0.0;
  auto sfun = [&](double X, double Y) {
    return std::sqrt(std::max(0.0, w.Q - 2.0 * w.g * Y)) * zeta_value(X, Y);
  };
  const std::size_t nc = cols.size();
  const std::size_t nseg = periodic ? nc : nc - 1;
  for (std::size_t k = 0; k < nseg; ++k) {
    const auto& a = cols[k];
    const auto& b = cols[(k + 1) % nc];
    const double Xb = (k + 1 == nc) ? b.X + period : b.X;
    const double Ya = w.eta[a.i];
    const double Yb = w.eta[b.i];
    const double len = std::hypot(Xb - a.X, Yb - Ya);
    surf += 0.5 * len * (sfun(a.X, Ya) + sfun(Xb, Yb));
  }
  return area + surf;
}

WaveField shift_datum(const WaveField& w, double G) {
  WaveField s = w;
  if (G == 0.0) return s;
  s.F = w.F - G;
  for (auto& e : s.eta) e -= G;
  s.Q = w.Q - 2.0 * w.g * G;
  return s;
}

std::vector<SurfacePoint> stagnation_points(const WaveField& w, double tol) {
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  std::vector<SurfacePoint> out;
  for (int i = 0; i < w.nx(); ++i)
    if (std::abs(w.Q - 2.0 * w.g * w.eta[i]) <= tol) out.push_back({i, w.x[i], w.eta[i]});
  return out;
}

void write_csv(std::ostream& os, const WaveField& w, const std::string& value_name,
               const Eigen::MatrixXd* values) {
  const Eigen::MatrixXd& v = values ? *values : w.psi;
  os << std::setprecision(17);
  os << "# g,B,L,F,Q,Nx,Ny\n";
  os << "# " << w.g << ',' << w.B << ',' << w.L << ','
     << (w.has_bed ? w.F : -std::numeric_limits<double>::infinity()) << ',' << w.Q << ','
     << w.nx() << ',' << w.ny() << '\n';
  os << "X,Y," << value_name << '\n';
  for (int i = 0; i < w.nx(); ++i)
    for (int j = 0; j < w.ny(); ++j) os << w.x[i] << ',' << w.Y(i, j) << ',' << v(i, j) << '\n';
}

void write_surface_csv(std::ostream& os, const WaveField& w) {
  os << std::setprecision(17) << "X,eta\n";
  for (int i = 0; i < w.nx(); ++i) os << w.x[i] << ',' << w.eta[i] << '\n';
}

WaveField read_csv(std::istream& is, const VorticityFn& v) {
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(is, line)) fail(ErrorCode::IoError, std::string("CSV truncated at ") + what);
  };
  next("header");
  next("constants");
  if (line.rfind("# ", 0) != 0) fail(ErrorCode::IoError, "CSV constants line missing");
  std::vector<double> c;
  {
    std::stringstream ss(line.substr(2));
    std::string tok;
    while (std::getline(ss, tok, ',')) c.push_back(std::stod(tok));
  }
  if (c.size() != 7) fail(ErrorCode::IoError, "CSV constants line needs 7 values");
  const int nx = static_cast<int>(c[5]);
  const int ny = static_cast<int>(c[6]);
  next("column names");
  WaveField w(v);
  w.g = c[0];
  w.B = c[1];
  w.L = c[2];
  w.Q = c[4];
  w.has_bed = std::isfinite(c[3]);
  w.x.resize(nx);
  w.eta.resize(nx);
  w.psi.resize(nx, ny);
  double bottom = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      next("data");
      double X = 0, Y = 0, p = 0;
      char c1 = 0, c2 = 0;
      std::stringstream ss(line);
      ss >> X >> c1 >> Y >> c2 >> p;
      if (!ss || c1 != ',' || c2 != ',') fail(ErrorCode::IoError, "bad CSV row: " + line);
      w.x[i] = X;
      w.psi(i, j) = p;
      if (j == 0) bottom = Y;
      if (j == ny - 1) w.eta[i] = Y;
    }
  w.F = w.has_bed ? c[3] : bottom;
  const bool periodic = w.x.front() == 0.0 &&
                        std::abs(w.x.back() - w.L) <= 1e-12 * std::max(1.0, w.L);
  w.lateral = periodic ? Lateral::EvenPeriodic : Lateral::Open;
  validate(w);
  return w;
}

}  // namespace vwl
