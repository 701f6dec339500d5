#include "vwl/wavegen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "vwl/error.hpp"
#include "vwl/numerics.hpp"

namespace vwl {

namespace {

constexpr double kPi = std::numbers::pi;
using State = std::array<double, 4>;  // ψ₀, ψ₀', φ, φ'

double clamp_psi(const VorticityFn& v, double p) { return std::clamp(p, 0.0, v.B()); }

// Laminar profile and neutral mode integrated upward from the bed; values
// at each requested height.
std::vector<State> shoot(const VorticityFn& v, double lambda, double k,
                         const std::vector<double>& heights) {
  const double bed_speed2 = std::max(0.0, lambda - 2.0 * v.hat(v.B()));
  State s{v.B(), -std::sqrt(bed_speed2), 0.0, 1.0};
  auto rhs = [&](const State& y, State& dy, double) {
    const double p = clamp_psi(v, y[0]);
    dy[0] = y[1];
    dy[1] = -v(p);
    dy[2] = y[3];
    dy[3] = (k * k - v.derivative(p)) * y[2];
  };
  namespace ode = boost::numeric::odeint;
  std::vector<State> out;
  out.reserve(heights.size());
  std::vector<double> times;
  times.push_back(0.0);
  for (double h : heights)
    if (h > 0.0) times.push_back(h);
  auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
  std::vector<State> at;
  ode::integrate_times(stepper, rhs, s, times.begin(), times.end(), 1e-3 * times.back(),
                       [&](const State& y, double) { at.push_back(y); });
  std::size_t m = 1;
  for (double h : heights) out.push_back(h > 0.0 ? at[m++] : at[0]);
  return out;
}

double dispersion(const VorticityFn& v, double g, double lambda, double depth, double k) {
  const auto s = shoot(v, lambda, k, {depth}).back();
  return lambda * s[3] - (g + v(0.0) * std::sqrt(lambda)) * s[2];
}

WaveField blank_field(const VorticityFn& v, double g, const std::vector<double>& x, int ny) {
  WaveField w(v);
  w.g = g;
  w.B = v.B();
  w.L = x.back();
  w.F = 0.0;
  w.lateral = Lateral::EvenPeriodic;
  w.has_bed = true;
  w.x = x;
  w.eta.assign(x.size(), 0.0);
  w.psi.resize(static_cast<Eigen::Index>(x.size()), ny);
  return w;
}

// Unknowns: interior ψ (column-major by column i), surface heights, Q.
class WaveSystem {
 public:
  WaveSystem(int nx, int ny) : nx_(nx), ny_(ny), npsi_(nx * (ny - 2)), n_(npsi_ + nx + 1) {}

  int size() const { return n_; }
  int psi_index(int i, int j) const { return i * (ny_ - 2) + (j - 1); }
  int eta_index(int i) const { return npsi_ + i; }
  int q_index() const { return n_ - 1; }

  Eigen::VectorXd pack(const WaveField& w) const {
    Eigen::VectorXd u(n_);
    for (int i = 0; i < nx_; ++i)
      for (int j = 1; j < ny_ - 1; ++j) u[psi_index(i, j)] = w.psi(i, j);
    for (int i = 0; i < nx_; ++i) u[eta_index(i)] = w.eta[i];
    u[q_index()] = w.Q;
    return u;
  }

  void unpack(const Eigen::VectorXd& u, WaveField& w) const {
    for (int i = 0; i < nx_; ++i) {
      w.psi(i, 0) = w.B;
      w.psi(i, ny_ - 1) = 0.0;
      for (int j = 1; j < ny_ - 1; ++j) w.psi(i, j) = u[psi_index(i, j)];
      w.eta[i] = u[eta_index(i)];
    }
    w.Q = u[q_index()];
  }

  // Same discrete operator as the field residual checkers (order 2).
  Eigen::VectorXd residual(const WaveField& w, double amplitude) const {
    Eigen::VectorXd r(n_);
    const auto d = physical_derivatives(w, w.psi, 2);
    const int top = ny_ - 1;
    for (int i = 0; i < nx_; ++i) {
      for (int j = 1; j < top; ++j)
        r[psi_index(i, j)] =
            d.axx(i, j) + d.ayy(i, j) + w.vorticity(clamp_psi(w.vorticity, w.psi(i, j)));
      r[eta_index(i)] = d.ax(i, top) * d.ax(i, top) + d.ay(i, top) * d.ay(i, top) +
                        2.0 * w.g * w.eta[i] - w.Q;
    }
    r[q_index()] = w.eta.front() - w.eta.back() - amplitude;
    return r;
  }

  // Colored finite-difference Jacobian: unknowns three columns and three
  // rows apart never share a residual row.
  Eigen::SparseMatrix<double> jacobian(const WaveField& w, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& r0, double amplitude) const {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n_) * 14);
    WaveField wp = w;
    auto delta = [&](int k) { return 1e-7 * (1.0 + std::abs(u[k])); };
    auto add_col = [&](int k, const Eigen::VectorXd& rp, int row) {
      const double v = (rp[row] - r0[row]) / delta(k);
      if (v != 0.0) trip.emplace_back(row, k, v);
    };
    for (int ci = 0; ci < 3; ++ci)
      for (int cj = 0; cj < 3; ++cj) {
        Eigen::VectorXd up = u;
        for (int i = ci; i < nx_; i += 3)
          for (int j = 1; j < ny_ - 1; ++j)
            if (j % 3 == cj) up[psi_index(i, j)] += delta(psi_index(i, j));
        unpack(up, wp);
        const auto rp = residual(wp, amplitude);
        for (int i = ci; i < nx_; i += 3)
          for (int j = 1; j < ny_ - 1; ++j) {
            if (j % 3 != cj) continue;
            const int k = psi_index(i, j);
            for (int ii = std::max(0, i - 1); ii <= std::min(nx_ - 1, i + 1); ++ii) {
              for (int jj = std::max(1, j - 1); jj <= std::min(ny_ - 2, j + 1); ++jj)
                add_col(k, rp, psi_index(ii, jj));
              if (j >= ny_ - 3) add_col(k, rp, eta_index(ii));
            }
          }
      }
    for (int ci = 0; ci < 3; ++ci) {
      Eigen::VectorXd up = u;
      for (int i = ci; i < nx_; i += 3) up[eta_index(i)] += delta(eta_index(i));
      unpack(up, wp);
      bool ok = true;
      Eigen::VectorXd rp;
      try {
        rp = residual(wp, amplitude);
      } catch (const Error&) {
        ok = false;
      }
      require(ok, ErrorCode::NewtonDivergence, "surface touches the bed while differentiating");
      for (int i = ci; i < nx_; i += 3) {
        const int k = eta_index(i);
        for (int ii = std::max(0, i - 1); ii <= std::min(nx_ - 1, i + 1); ++ii) {
          for (int jj = 1; jj < ny_ - 1; ++jj) add_col(k, rp, psi_index(ii, jj));
          add_col(k, rp, eta_index(ii));
        }
      }
    }
    for (int i = 0; i < nx_; ++i) trip.emplace_back(eta_index(i), q_index(), -1.0);
    trip.emplace_back(q_index(), eta_index(0), 1.0);
    trip.emplace_back(q_index(), eta_index(nx_ - 1), -1.0);
    Eigen::SparseMatrix<double> J(n_, n_);
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
  }

 private:
  int nx_, ny_, npsi_, n_;
};

double max_abs(const Eigen::VectorXd& r) { return r.cwiseAbs().maxCoeff(); }

}  // namespace

MemberDiagnostics diagnose_member(const WaveField& w, double amplitude, int iterations) {
  MemberDiagnostics m;
  m.amplitude = amplitude;
  m.Q = w.Q;
  const auto d = physical_derivatives(w, w.psi, 2);
  const int top = w.ny() - 1;
  m.crest_speed = std::hypot(d.ax(0, top), d.ay(0, top));
  m.trough_depth = w.eta.back() - w.F;
  m.max_psi_y = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < w.nx(); ++i)
    for (int j = 0; j < w.ny(); ++j) {
      m.max_gradient = std::max(m.max_gradient, std::hypot(d.ax(i, j), d.ay(i, j)));
      if (j > 0 && j < top) m.max_psi_y = std::max(m.max_psi_y, d.ay(i, j));
    }
  m.psi_y_negative = m.max_psi_y < 0.0;
  m.monotone = true;
  for (int i = 1; i < w.nx(); ++i)
    if (w.eta[i] > w.eta[i - 1] + 1e-14) m.monotone = false;
  m.residual = strong_residuals(w).worst();
  m.iterations = iterations;
  const BernoulliCurve curve(w.vorticity, w.g);
  const double c2 = m.crest_speed * m.crest_speed;
  if (c2 > curve.lambda_min()) m.beq_margin = curve.f(c2) - 2.0 * w.g * w.F - w.Q;
  return m;
}

BifurcationPoint linear_bifurcation(const VorticityFn& v, double g, double L) {
  require(g > 0.0 && L > 0.0, ErrorCode::InvalidArgument, "need g > 0 and L > 0");
  const BernoulliCurve curve(v, g);
  double l0 = 0.0;
  try {
    l0 = curve.lambda0();
  } catch (const Error& e) {
    fail(ErrorCode::SeedFailure, std::string("no critical laminar stream: ") + e.what());
  }
  const double lmin = curve.lambda_min();
  const double k = kPi / L;
  auto D = [&](double lam) { return dispersion(v, g, lam, curve.depth(lam), k); };
  constexpr int n = 200;
  double hi = l0, dhi = D(l0);
  double lo = 0.0, dlo = 0.0;
  bool found = false;
  // Root nearest the critical stream.
  for (int m = n - 1; m >= 1 && !found; --m) {
    const double lam = lmin + (l0 - lmin) * m / n;
    const double dl = D(lam);
    if ((dl < 0.0) != (dhi < 0.0)) {
      lo = lam;
      dlo = dl;
      found = true;
    } else {
      hi = lam;
      dhi = dl;
    }
  }
  if (!found)
    fail(ErrorCode::SeedFailure, "no neutral laminar stream for wavenumber " + std::to_string(k) +
                                     " on (" + std::to_string(lmin) + ", " + std::to_string(l0) +
                                     ")");
  (void)dlo;
  BifurcationPoint bp;
  bp.lambda = num::bisect(D, lo, hi, 1e-13);
  bp.depth = curve.depth(bp.lambda);
  bp.Q = bp.lambda + 2.0 * g * bp.depth;
  bp.wavenumber = k;
  return bp;
}

WaveField mode_seed(const VorticityFn& v, double g, double lambda, double amplitude,
                    const std::vector<double>& x, int ny) {
  const BernoulliCurve curve(v, g);
  const double h = curve.depth(lambda);
  const double k = kPi / x.back();
  std::vector<double> heights(ny);
  for (int j = 0; j < ny; ++j) heights[j] = h * j / (ny - 1);
  const auto s = shoot(v, lambda, k, heights);
  const double speed = std::sqrt(lambda);
  const double zeta = s.back()[2] / speed;
  const double eps = amplitude == 0.0 ? 0.0 : amplitude / (2.0 * zeta);
  WaveField w = blank_field(v, g, x, ny);
  w.Q = lambda + 2.0 * g * h;
  for (int i = 0; i < w.nx(); ++i) {
    const double c = eps * std::cos(k * x[i]);
    w.eta[i] = h + c * zeta;
    for (int j = 0; j < ny; ++j) {
      const double sg = static_cast<double>(j) / (ny - 1);
      w.psi(i, j) = s[j][0] + c * (s[j][2] + sg * zeta * s[j][1]);
    }
    w.psi(i, 0) = v.B();
    w.psi(i, ny - 1) = 0.0;
  }
  return w;
}

WaveField discrete_laminar(const VorticityFn& v, double g, double Q, const std::vector<double>& x,
                           int ny, double tol) {
  const auto lw = laminar_regular(v, g, Q);
  const int m = ny - 2;  // interior levels
  Eigen::VectorXd u(m + 1);
  for (int j = 1; j < ny - 1; ++j) u[j - 1] = lw.psi_at(lw.depth() * j / (ny - 1));
  u[m] = lw.depth();
  const double ds = 1.0 / (ny - 1);
  auto A = [&](const Eigen::VectorXd& y, int j) {
    return j == 0 ? v.B() : (j == ny - 1 ? 0.0 : y[j - 1]);
  };
  auto residual = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd r(m + 1);
    const double H = y[m];
    for (int j = 1; j < ny - 1; ++j)
      r[j - 1] = (A(y, j + 1) - 2.0 * A(y, j) + A(y, j - 1)) / (ds * ds * H * H) +
                 v(clamp_psi(v, A(y, j)));
    const double s = (3.0 * A(y, ny - 1) - 4.0 * A(y, ny - 2) + A(y, ny - 3)) / (2.0 * ds * H);
    r[m] = s * s + 2.0 * g * H - Q;
    return r;
  };
  for (int it = 0; it < 50; ++it) {
    const auto r = residual(u);
    if (max_abs(r) <= 1e-3 * tol) break;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m + 1, m + 1);
    const double H = u[m];
    const double c = 1.0 / (ds * ds * H * H);
    for (int j = 1; j < ny - 1; ++j) {
      const int row = j - 1;
      const double p = A(u, j);
      const double gp = (p >= 0.0 && p <= v.B()) ? v.derivative(p) : 0.0;
      J(row, row) = -2.0 * c + gp;
      if (j > 1) J(row, row - 1) = c;
      if (j < ny - 2) J(row, row + 1) = c;
      J(row, m) = -2.0 * (A(u, j + 1) - 2.0 * A(u, j) + A(u, j - 1)) * c / H;
    }
    const double s = (-4.0 * A(u, ny - 2) + A(u, ny - 3)) / (2.0 * ds * H);
    J(m, m - 1) = 2.0 * s * (-4.0) / (2.0 * ds * H);
    if (m >= 2) J(m, m - 2) = 2.0 * s / (2.0 * ds * H);
    J(m, m) = -2.0 * s * s / H + 2.0 * g;
    u -= J.partialPivLu().solve(r);
  }
  const double res = max_abs(residual(u));
  if (!(res <= tol))
    fail(ErrorCode::NewtonDivergence,
         "discrete laminar stream did not converge; residual " + std::to_string(res));
  WaveField w = blank_field(v, g, x, ny);
  w.Q = Q;
  for (int i = 0; i < w.nx(); ++i) {
    w.eta[i] = u[m];
    for (int j = 0; j < ny; ++j) w.psi(i, j) = A(u, j);
  }
  return w;
}

WaveField solve_wave(const WaveField& guess, double amplitude, const WavegenOptions& o,
                     NewtonReport* report) {
  require(guess.lateral == Lateral::EvenPeriodic && guess.has_bed, ErrorCode::InvalidArgument,
          "wave solver needs a periodic field with a bed");
  validate(guess);
  const WaveSystem sys(guess.nx(), guess.ny());
  WaveField w = guess;
  Eigen::VectorXd u = sys.pack(w);
  sys.unpack(u, w);
  Eigen::VectorXd r = sys.residual(w, amplitude);
  int it = 0;
  for (; it < o.max_iter; ++it) {
    if (max_abs(r) <= 0.5 * o.tol) break;
    const auto J = sys.jacobian(w, u, r, amplitude);
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(J);
    lu.factorize(J);
    if (lu.info() != Eigen::Success)
      fail(ErrorCode::NewtonDivergence,
           "singular Jacobian; last residual " + std::to_string(max_abs(r)));
    const Eigen::VectorXd du = lu.solve(-r);
    const double norm = r.norm();
    double t = 1.0;
    bool accepted = false;
    WaveField wt = w;
    for (int h = 0; h <= o.max_halvings; ++h, t *= 0.5) {
      const Eigen::VectorXd ut = u + t * du;
      sys.unpack(ut, wt);
      Eigen::VectorXd rt;
      try {
        rt = sys.residual(wt, amplitude);
      } catch (const Error&) {
        continue;
      }
      if (rt.allFinite() && rt.norm() < norm) {
        u = ut;
        r = rt;
        std::swap(w, wt);
        accepted = true;
        break;
      }
    }
    if (!accepted)
      fail(ErrorCode::NewtonDivergence,
           "no damped step reduces the residual; last residual " + std::to_string(max_abs(r)));
  }
  if (max_abs(r) > 0.5 * o.tol)
    fail(ErrorCode::NewtonDivergence, "no convergence in " + std::to_string(o.max_iter) +
                                          " iterations; last residual " +
                                          std::to_string(max_abs(r)));
  if (report) {
    report->iterations = it;
    report->residual = max_abs(r);
  }
  return w;
}

std::vector<double> crest_grid(double L, int nx, double ratio) {
  require(ratio >= 1.0, ErrorCode::InvalidArgument, "refinement ratio must be at least 1");
  const double c = 1.0 - 1.0 / ratio;
  std::vector<double> x(nx);
  for (int i = 0; i < nx; ++i) {
    const double xi = static_cast<double>(i) / (nx - 1);
    x[i] = L * (xi - c * std::sin(kPi * xi) / kPi);
  }
  x.front() = 0.0;
  x.back() = L;
  return x;
}

WaveField remap_columns(const WaveField& w, const std::vector<double>& x) {
  require(w.lateral == Lateral::EvenPeriodic, ErrorCode::InvalidArgument,
          "column remapping needs a periodic field");
  const int n = w.nx();
  const double L = w.x.back();
  WaveField out = w;
  out.x = x;
  out.eta.assign(x.size(), 0.0);
  out.psi.resize(static_cast<Eigen::Index>(x.size()), w.ny());
  for (std::size_t q = 0; q < x.size(); ++q) {
    const double xq = x[q];
    int k = static_cast<int>(std::upper_bound(w.x.begin(), w.x.end(), xq) - w.x.begin()) - 1;
    k = std::clamp(k, 0, n - 2);
    int idx[4];
    double xs[4];
    for (int m = 0; m < 4; ++m) {
      int i = k - 1 + m;
      double xi;
      if (i < 0) {
        xi = -w.x[-i];
        i = -i;
      } else if (i > n - 1) {
        xi = 2.0 * L - w.x[2 * (n - 1) - i];
        i = 2 * (n - 1) - i;
      } else {
        xi = w.x[i];
      }
      idx[m] = i;
      xs[m] = xi;
    }
    double wt[4];
    num::lagrange4_weights(std::span<const double, 4>(xs, 4), xq, std::span<double, 4>(wt, 4));
    double e = 0.0;
    for (int m = 0; m < 4; ++m) e += wt[m] * w.eta[idx[m]];
    out.eta[q] = e;
    for (int j = 0; j < w.ny(); ++j) {
      double s = 0.0;
      for (int m = 0; m < 4; ++m) s += wt[m] * w.psi(idx[m], j);
      out.psi(static_cast<Eigen::Index>(q), j) = s;
    }
  }
  return out;
}

nlohmann::json MemberDiagnostics::to_json() const {
  return {{"amplitude", amplitude},
          {"Q", Q},
          {"crest_speed", crest_speed},
          {"trough_depth", trough_depth},
          {"max_psi_y", max_psi_y},
          {"max_gradient", max_gradient},
          {"residual", residual},
          {"psi_y_negative", psi_y_negative},
          {"monotone", monotone},
          {"iterations", iterations},
          {"beq_margin", beq_margin ? nlohmann::json(*beq_margin) : nlohmann::json(nullptr)}};
}

nlohmann::json ContinuationFamily::manifest(const std::vector<std::string>& paths) const {
  nlohmann::json j;
  j["seed"] = {{"lambda", seed_lambda}, {"Q", seed_Q}};
  j["truncated"] = truncated;
  j["failure"] = failure.empty() ? nlohmann::json(nullptr) : nlohmann::json(failure);
  j["members"] = nlohmann::json::array();
  for (std::size_t k = 0; k < diagnostics.size(); ++k) {
    nlohmann::json m = diagnostics[k].to_json();
    m["path"] = k < paths.size() ? nlohmann::json(paths[k]) : nlohmann::json(nullptr);
    j["members"].push_back(m);
  }
  return j;
}

ContinuationFamily continue_family(const VorticityFn& v, const std::vector<double>& targets,
                                   const WavegenOptions& o) {
  require(!targets.empty(), ErrorCode::InvalidArgument, "no amplitude targets");
  for (std::size_t k = 0; k < targets.size(); ++k)
    require(targets[k] >= 0.0 && (k == 0 || targets[k] > targets[k - 1]),
            ErrorCode::InvalidArgument, "amplitude targets must be nonnegative and increasing");
  require(o.nx >= 8 && o.ny >= 8, ErrorCode::DegenerateGrid, "grid needs at least 8x8 nodes");
  const bool irrotational = v.is_constant() && v(0.0) == 0.0;
  if (!irrotational && !check_zxc_hypotheses(v))
    fail(ErrorCode::SeedFailure,
         "vorticity must be zero or satisfy gamma(0) < 0, gamma <= 0, gamma' >= 0");

  ContinuationFamily fam;
  if (o.seed_Q) {
    try {
      const auto lw = laminar_regular(v, o.g, *o.seed_Q);
      fam.seed_lambda = lw.lambda();
      fam.seed_Q = lw.Q();
    } catch (const Error& e) {
      fail(ErrorCode::SeedFailure, std::string("laminar seed: ") + e.what());
    }
  } else {
    const auto bp = linear_bifurcation(v, o.g, o.L);
    fam.seed_lambda = bp.lambda;
    fam.seed_Q = bp.Q;
  }

  const auto uniform = crest_grid(o.L, o.nx, 1.0);
  const auto refined = crest_grid(o.L, o.nx, o.refine_ratio);
  const double amax = targets.back();
  std::vector<std::pair<double, WaveField>> history;  // converged waves, a > 0

  for (double a : targets) {
    const bool refine = o.refine_fraction > 0.0 && a > 0.0 && a >= o.refine_fraction * amax;
    const auto& x = refine ? refined : uniform;
    try {
      WaveField w(v);
      NewtonReport rep;
      if (a == 0.0) {
        w = discrete_laminar(v, o.g, fam.seed_Q, x, o.ny, o.tol);
      } else {
        WaveField guess = mode_seed(v, o.g, fam.seed_lambda, a, x, o.ny);
        if (history.size() == 1) {
          // Previous wave plus the linear-mode increment.
          const auto prev = remap_columns(history[0].second, x);
          const auto base = mode_seed(v, o.g, fam.seed_lambda, history[0].first, x, o.ny);
          guess.psi = prev.psi + (guess.psi - base.psi);
          for (int i = 0; i < guess.nx(); ++i) guess.eta[i] = prev.eta[i] + (guess.eta[i] - base.eta[i]);
          guess.Q = prev.Q;
        } else if (history.size() >= 2) {
          const auto& [a1, f1] = history[history.size() - 2];
          const auto& [a2, f2] = history.back();
          const auto w1 = remap_columns(f1, x);
          const auto w2 = remap_columns(f2, x);
          const double t = (a - a2) / (a2 - a1);
          guess.psi = w2.psi + t * (w2.psi - w1.psi);
          for (int i = 0; i < guess.nx(); ++i) guess.eta[i] = w2.eta[i] + t * (w2.eta[i] - w1.eta[i]);
          guess.Q = w2.Q + t * (w2.Q - w1.Q);
        }
        w = solve_wave(guess, a, o, &rep);
        history.emplace_back(a, w);
      }
      fam.diagnostics.push_back(diagnose_member(w, w.eta.front() - w.eta.back(), rep.iterations));
      fam.members.push_back(std::move(w));
    } catch (const Error& e) {
      if (fam.members.empty()) {
        if (e.code() == ErrorCode::NewtonDivergence) throw;
        fail(ErrorCode::NewtonDivergence, std::string("first member failed: ") + e.what());
      }
      fam.truncated = true;
      fam.failure = "amplitude " + std::to_string(a) + ": " + e.what();
      break;
    }
  }
  return fam;
}

nlohmann::json ExiReport::to_json() const {
  auto opt = [](const auto& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  return {{"sup_Q", sup_Q},
          {"crest_speeds", crest_speeds},
          {"crest_decay_rate", opt(crest_decay_rate)},
          {"lipschitz", lipschitz},
          {"min_trough_depth", min_trough_depth},
          {"arclengths", arclengths},
          {"lambda0", opt(lambda0)},
          {"f_lambda0", opt(f_lambda0)},
          {"q_bound_holds", opt(q_bound_holds)},
          {"crest_below_lambda0", opt(crest_below_lambda0)},
          {"beq_holds", beq_holds}};
}

ExiReport exi_diagnostics(const ContinuationFamily& fam) {
  require(!fam.members.empty(), ErrorCode::InvalidArgument, "empty family");
  ExiReport r;
  r.sup_Q = -std::numeric_limits<double>::infinity();
  r.min_trough_depth = std::numeric_limits<double>::infinity();
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    const auto& w = fam.members[k];
    const auto& d = fam.diagnostics[k];
    r.sup_Q = std::max(r.sup_Q, w.Q);
    r.crest_speeds.push_back(d.crest_speed);
    r.lipschitz = std::max(r.lipschitz, d.max_gradient);
    r.min_trough_depth = std::min(r.min_trough_depth, w.eta.back() - w.F);
    double len = 0.0;
    for (int i = 1; i < w.nx(); ++i) len += std::hypot(w.x[i] - w.x[i - 1], w.eta[i] - w.eta[i - 1]);
    r.arclengths.push_back(len);
    if (d.beq_margin && *d.beq_margin < -1e-6) r.beq_holds = false;
    if (d.crest_speed > 0.0) {
      xs.push_back(d.amplitude);
      ys.push_back(std::log(d.crest_speed));
    }
  }
  if (xs.size() >= 2) {
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
      sx += xs[k];
      sy += ys[k];
      sxx += xs[k] * xs[k];
      sxy += xs[k] * ys[k];
    }
    const double den = n * sxx - sx * sx;
    if (den > 0.0) r.crest_decay_rate = (n * sxy - sx * sy) / den;
  }
  try {
    const auto qb = cs_q_bound(fam.members.front().vorticity, fam.members.front().g);
    r.lambda0 = qb.lambda0;
    r.f_lambda0 = qb.f_lambda0;
    r.q_bound_holds = r.sup_Q <= qb.f_lambda0 + 1e-6;
    bool below = true;
    for (double c : r.crest_speeds) below = below && c * c < qb.lambda0;
    r.crest_below_lambda0 = below;
  } catch (const Error&) {
  }
  return r;
}

}  // namespace vwl
