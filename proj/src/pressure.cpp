#include "vwl/pressure.hpp"

#include <algorithm>
#include <cmath>

#include "vwl/error.hpp"

namespace vwl {

namespace {

double clamp_psi(const WaveField& w, double p) { return std::clamp(p, 0.0, w.vorticity.B()); }

bool interior_node(const WaveField& w, int i, int j) {
  if (j == w.ny() - 1) return false;
  if (w.lateral == Lateral::Open && (i == 0 || i == w.nx() - 1)) return false;
  return true;
}

}  // namespace

MultiplierFn::MultiplierFn(VorticityFn lambda, const VorticityFn& gamma) : lam_(std::move(lambda)) {
  require(std::abs(lam_.B() - gamma.B()) <= 1e-12 * gamma.B(), ErrorCode::InvalidArgument,
          "multiplier and vorticity must share [0, B]");
  nonpositive_ = combined_ = nondecreasing_ = true;
  constexpr int n = 1000;
  for (int k = 0; k < n; ++k) {
    const double r = lam_.B() * k / (n - 1);
    const double l = lam_(r);
    nonpositive_ = nonpositive_ && l <= 0.0;
    combined_ = combined_ && 2.0 * l + gamma(std::min(r, gamma.B())) <= 0.0;
    nondecreasing_ = nondecreasing_ && lam_.derivative(r) >= 0.0;
  }
}

nlohmann::json PressureHeadField::to_json(const WaveField& w) const {
  const char* name = kind == HeadKind::R ? "R" : (kind == HeadKind::T ? "T" : "S");
  auto loc = [&](int i, int j) {
    return nlohmann::json{{"i", i}, {"j", j}, {"X", w.x[i]}, {"Y", w.Y(i, j)}};
  };
  return {{"kind", name},        {"min", min},
          {"max", max},          {"argmin", loc(argmin_i, argmin_j)},
          {"argmax", loc(argmax_i, argmax_j)}, {"varpi", varpi}};
}

PressureHeadField pressure_head(const WaveField& w, HeadKind kind, const MultiplierFn* lambda) {
  require(kind != HeadKind::S || lambda != nullptr, ErrorCode::InvalidArgument,
          "pressure head S needs a multiplier");
  const auto d = physical_derivatives(w, w.psi, 2);
  PressureHeadField out;
  out.kind = kind;
  out.varpi = 0.5 * std::max(0.0, w.vorticity.max_value());
  const int nx = w.nx(), ny = w.ny();
  out.values.resize(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double p = clamp_psi(w, w.psi(i, j));
      double v = 0.5 * (d.ax(i, j) * d.ax(i, j) + d.ay(i, j) * d.ay(i, j)) + w.g * w.Y(i, j) -
                 0.5 * w.Q + w.vorticity.hat(p);
      if (kind == HeadKind::T && out.varpi != 0.0) v -= out.varpi * p;
      if (kind == HeadKind::S) v += lambda->Lambda(p);
      out.values(i, j) = v;
    }
  Eigen::Index ri, rj;
  out.min = out.values.minCoeff(&ri, &rj);
  out.argmin_i = static_cast<int>(ri);
  out.argmin_j = static_cast<int>(rj);
  out.max = out.values.maxCoeff(&ri, &rj);
  out.argmax_i = static_cast<int>(ri);
  out.argmax_j = static_cast<int>(rj);
  return out;
}

SperbResult sperb_residual(const WaveField& w, const MultiplierFn& lambda, const SperbOptions& o) {
  const int nx = w.nx(), ny = w.ny();
  const auto d = physical_derivatives(w, w.psi, 4);
  Eigen::MatrixXd W(nx, ny), g2(nx, ny);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double p = clamp_psi(w, w.psi(i, j));
      g2(i, j) = d.ax(i, j) * d.ax(i, j) + d.ay(i, j) * d.ay(i, j);
      W(i, j) = 0.5 * g2(i, j) + w.vorticity.hat(p) + lambda.Lambda(p);
    }
  const auto dw = physical_derivatives(w, W, 4);
  SperbResult out;
  out.cutoff = o.relative_cutoff * std::sqrt(g2.maxCoeff());
  const bool open = w.lateral == Lateral::Open;
  for (int i = 0; i < nx; ++i) {
    if (open && (i < o.margin || i > nx - 1 - o.margin)) continue;
    if (w.x[i] < o.x_min || w.x[i] > o.x_max) continue;
    for (int j = o.margin; j <= ny - 1 - o.margin; ++j) {
      if (std::sqrt(g2(i, j)) <= out.cutoff) {
        ++out.excluded;
        continue;
      }
      const double p = clamp_psi(w, w.psi(i, j));
      const double lam = lambda(p);
      const double c = 2.0 * lam + w.vorticity(p);
      const double L1 = -2.0 * (dw.ax(i, j) - c * d.ax(i, j));
      const double L2 = -2.0 * (dw.ay(i, j) - c * d.ay(i, j));
      const double lhs = dw.axx(i, j) + dw.ayy(i, j) + (L1 * dw.ax(i, j) + L2 * dw.ay(i, j)) / g2(i, j);
      const double rhs = lambda.derivative(p) * g2(i, j) + c * lam;
      out.residual.add(lhs - rhs, i, j, w.x[i], w.Y(i, j));
    }
  }
  out.residual.finish();
  if (out.residual.count == 0)
    fail(ErrorCode::AllNodesExcluded,
         std::to_string(out.excluded) + " nodes below the gradient cutoff and none evaluated");
  return out;
}

NqtResult nqt_check(const WaveField& w, double tol, int order) {
  const auto d = physical_derivatives(w, w.psi, order);
  const int nx = w.nx(), ny = w.ny();
  NqtResult out;
  out.surface_min = std::numeric_limits<double>::infinity();
  out.surface_max = -std::numeric_limits<double>::infinity();
  double gmax = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double s = d.ax(i, ny - 1) * d.ax(i, ny - 1) + d.ay(i, ny - 1) * d.ay(i, ny - 1);
    out.surface_min = std::min(out.surface_min, s);
    out.surface_max = std::max(out.surface_max, s);
    for (int j = 0; j < ny; ++j)
      gmax = std::max(gmax, d.ax(i, j) * d.ax(i, j) + d.ay(i, j) * d.ay(i, j));
  }
  out.lower_margin = std::numeric_limits<double>::infinity();
  out.upper_margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      if (!interior_node(w, i, j)) continue;
      const double g2 = d.ax(i, j) * d.ax(i, j) + d.ay(i, j) * d.ay(i, j);
      if (g2 <= 1e-24 * std::max(1.0, gmax))
        fail(ErrorCode::StagnationInterior, "grad psi vanishes at node (" + std::to_string(i) +
                                                 ", " + std::to_string(j) + ")");
      const double q = g2 + 2.0 * w.vorticity.hat(clamp_psi(w, w.psi(i, j)));
      out.lower_margin = std::min(out.lower_margin, q - out.surface_min);
      out.upper_margin = std::min(out.upper_margin, out.surface_max - q);
    }
  out.holds = out.lower_margin >= -tol && out.upper_margin >= -tol;
  return out;
}

double sqrt_bound_fit(const WaveField& w) {
  require(std::abs(w.Q) <= 1e-12 * std::max(1.0, std::abs(w.g)), ErrorCode::InvalidArgument,
          "sqrt_bound_fit needs the datum shifted so that Q = 0");
  const auto d = physical_derivatives(w, w.psi, 2);
  const int nx = w.nx(), ny = w.ny();
  double h = 0.0;
  for (int i = 0; i < nx; ++i) {
    h = std::max(h, w.height(i) / (ny - 1));
    if (i > 0) h = std::max(h, w.x[i] - w.x[i - 1]);
  }
  double K = 0.0;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      const double Y = w.Y(i, j);
      if (std::abs(Y) < h) continue;
      const double g2 = d.ax(i, j) * d.ax(i, j) + d.ay(i, j) * d.ay(i, j);
      K = std::max(K, g2 / std::abs(Y));
    }
  if (K > 1e6) fail(ErrorCode::Unbounded, "|grad psi|^2/|Y| reaches " + std::to_string(K));
  return K;
}

BxvResult bxv_check(const WaveField& w, double delta) {
  const auto d = physical_derivatives(w, w.psi, 2);
  BxvResult out;
  out.max_psi_y = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < w.nx(); ++i)
    for (int j = 1; j < w.ny() - 1; ++j) out.max_psi_y = std::max(out.max_psi_y, d.ay(i, j));
  out.applicable = delta > 0.0 ? out.max_psi_y <= -delta : out.max_psi_y < 0.0;
  out.max_T = pressure_head(w, HeadKind::T).max;
  return out;
}

}  // namespace vwl
