#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vwl/blowup.hpp"
#include "vwl/config.hpp"
#include "vwl/field.hpp"
#include "vwl/inteq.hpp"
#include "vwl/laminar.hpp"
#include "vwl/pressure.hpp"
#include "vwl/vorticity.hpp"
#include "vwl/wavegen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vwl;

namespace {

constexpr double kPi = std::numbers::pi;

// Default document when --config is absent.
constexpr const char* kDefaultConfig = R"({"gamma":{"kind":"poly","coeffs":[-1.0],"B":1.0}})";

struct Run {
  RunConfig cfg;
  fs::path out;
  json report;
  json checks = json::object();

  void check(const std::string& name, bool ok) { checks[name] = ok; }

  fs::path file(const std::string& name) const { return out / name; }

  std::ofstream open(const std::string& name) const {
    std::ofstream os(file(name));
    if (!os) fail(ErrorCode::IoError, "cannot open " + file(name).string());
    os << std::setprecision(17);
    return os;
  }

  void write_json(const std::string& name, const json& j) const {
    auto os = open(name);
    os << dump_json(j) << '\n';
  }

  void write_field(const std::string& name, const WaveField& w, const std::string& label = "psi",
                   const Eigen::MatrixXd* values = nullptr) const {
    auto os = open(name);
    write_csv(os, w, label, values);
  }
};

WaveField read_field(const std::string& path, const VorticityFn& v) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::IoError, "cannot open " + path);
  return read_csv(is, v);
}

// Input field, or the trivial extreme wave of the configured vorticity.
WaveField load_field(const Run& r, const std::string& input) {
  const auto& c = r.cfg;
  if (!input.empty()) return read_field(input, c.gamma);
  return to_field(trivial_extreme(c.gamma, c.g), c.L, c.nx, c.ny);
}

WaveField crest_at_origin(WaveField w) {
  if (w.Q != 0.0) w = shift_datum(w, w.Q / (2.0 * w.g));
  return w;
}

// ---------------------------------------------------------------- vort

void vort_hat(Run& r) {
  const auto& v = r.cfg.gamma;
  auto os = r.open("vort_hat.csv");
  os << "r,gamma,hat\n";
  for (int k = 0; k < r.cfg.nx; ++k) {
    const double x = v.B() * k / (r.cfg.nx - 1);
    os << x << ',' << v(x) << ',' << v.hat(x) << '\n';
  }
  r.report = {{"hat_max", v.hat_max()},
              {"hat_argmax", v.hat_argmax()},
              {"gamma_max", v.max_value()},
              {"gamma_min", v.min_value()},
              {"csv", "vort_hat.csv"}};
}

void vort_jhb(Run& r) {
  const auto res = check_jhb(r.cfg.gamma, r.cfg.g, r.cfg.L);
  r.report = {{"holds", res.holds}, {"lhs", res.lhs}, {"rhs", res.rhs}};
  r.check("jhb", res.holds);
}

void vort_qbound(Run& r) {
  const auto b = cs_q_bound(r.cfg.gamma, r.cfg.g);
  const BernoulliCurve curve(r.cfg.gamma, r.cfg.g);
  const double lo = curve.lambda_min();
  const double hi = std::max(3.0 * b.lambda0, lo + 1.0);
  auto os = r.open("vort_qbound.csv");
  os << "lambda,f\n";
  for (int k = 1; k <= 200; ++k) {
    const double lam = lo + (hi - lo) * k / 200.0;
    os << lam << ',' << b.f_of(lam) << '\n';
  }
  r.report = {{"lambda0", b.lambda0},
              {"f_lambda0", b.f_lambda0},
              {"lambda_min", lo},
              {"csv", "vort_qbound.csv"}};
}

void vort_zxc(Run& r) {
  const bool ok = check_zxc_hypotheses(r.cfg.gamma);
  r.report = {{"holds", ok}};
  r.check("zxc", ok);
}

// ------------------------------------------------------------- laminar

json laminar_json(const LaminarWave& lw) {
  return {{"depth", lw.depth()},  {"Q", lw.Q()},        {"lambda", lw.lambda()},
          {"F", lw.F()},          {"surface", lw.surface()}, {"extreme", lw.is_extreme()}};
}

void laminar_extreme(Run& r) {
  const auto& c = r.cfg;
  const auto lw = trivial_extreme(c.gamma, c.g, c.laminar.F, c.laminar.samples);
  const auto w = to_field(lw, c.L, c.nx, c.ny);
  const auto res = strong_residuals(w);
  const auto stag = stagnation_points(w, c.field.stagnation_tol);
  r.write_field("laminar_extreme.csv", w);
  r.report = laminar_json(lw);
  r.report["residuals"] = res.to_json();
  r.report["stagnation_points"] = stag.size();
  r.report["surface_nodes"] = w.nx();
  r.report["csv"] = "laminar_extreme.csv";
  r.check("residuals", res.worst() <= c.tol);
  r.check("stagnation_surface", static_cast<int>(stag.size()) == w.nx());
}

void laminar_regular_cmd(Run& r) {
  const auto& c = r.cfg;
  if (!c.laminar.Q) fail(ErrorCode::ValidationError, "laminar.Q: required for 'laminar regular'");
  const auto lw = laminar_regular(c.gamma, c.g, *c.laminar.Q, c.laminar.F,
                                  c.laminar.shallow ? DepthRoot::Shallow : DepthRoot::Deep,
                                  c.laminar.samples);
  const auto w = to_field(lw, c.L, c.nx, c.ny);
  r.write_field("laminar_regular.csv", w);
  r.report = laminar_json(lw);
  r.report["residuals"] = strong_residuals(w).to_json();
  r.report["csv"] = "laminar_regular.csv";
}

// --------------------------------------------------------------- field

void field_residuals(Run& r) {
  const auto w = load_field(r, r.cfg.field.input);
  ResidualOptions o;
  o.order = r.cfg.field.order;
  const auto res = strong_residuals(w, o);
  r.report = res.to_json();
  r.report["worst"] = res.worst();
  r.check("residuals", res.worst() <= r.cfg.tol);
}

void field_weak(Run& r) {
  const auto w = load_field(r, r.cfg.field.input);
  const auto& f = r.cfg.field;
  const BumpTestFn z{f.bump_cx, f.bump_cy, f.bump_radius, f.bump_amplitude, f.bump_degree};
  r.report = {{"weak_residual", weak_residual(w, z)},
              {"bump",
               {{"cx", z.cx}, {"cy", z.cy}, {"radius", z.radius}, {"amplitude", z.amplitude},
                {"degree", z.degree}}}};
}

void field_shift(Run& r) {
  const auto w = shift_datum(load_field(r, r.cfg.field.input), r.cfg.field.shift);
  r.write_field("field_shift.csv", w);
  r.report = {{"shift", r.cfg.field.shift}, {"F", w.F}, {"Q", w.Q}, {"csv", "field_shift.csv"}};
}

void field_stagnation(Run& r) {
  const auto w = load_field(r, r.cfg.field.input);
  const auto pts = stagnation_points(w, r.cfg.field.stagnation_tol);
  json list = json::array();
  for (const auto& p : pts) list.push_back({{"i", p.i}, {"X", p.X}, {"Y", p.Y}});
  r.report = {{"count", pts.size()}, {"surface_nodes", w.nx()}, {"points", list}};
}

// ------------------------------------------------------------ pressure

MultiplierFn multiplier(const Run& r) {
  const auto& c = r.cfg;
  if (c.pressure.multiplier)
    return MultiplierFn(VorticityFn::from_json(*c.pressure.multiplier, "pressure.multiplier"),
                        c.gamma);
  return MultiplierFn(VorticityFn::constant(0.0, c.B), c.gamma);
}

void pressure_head_cmd(Run& r) {
  const auto w = load_field(r, r.cfg.pressure.input);
  const auto& k = r.cfg.pressure.kind;
  const HeadKind kind = k == "R" ? HeadKind::R : k == "T" ? HeadKind::T : HeadKind::S;
  const auto m = multiplier(r);
  const auto head = pressure_head(w, kind, kind == HeadKind::S ? &m : nullptr);
  r.write_field("pressure_head.csv", w, "head", &head.values);
  r.report = head.to_json(w);
  r.report["csv"] = "pressure_head.csv";
  r.check("nonpositive", head.max <= r.cfg.tol);
}

void pressure_sperb(Run& r) {
  const auto w = load_field(r, r.cfg.pressure.input);
  SperbOptions o;
  o.margin = r.cfg.pressure.sperb_margin;
  o.relative_cutoff = r.cfg.pressure.relative_cutoff;
  const auto res = sperb_residual(w, multiplier(r), o);
  r.report = {{"residual", res.residual.to_json()},
              {"excluded", res.excluded},
              {"cutoff", res.cutoff}};
  r.check("sperb", res.residual.sup <= r.cfg.pressure.sperb_tol);
}

void pressure_nqt(Run& r) {
  const auto w = load_field(r, r.cfg.pressure.input);
  const auto res = nqt_check(w, r.cfg.pressure.nqt_tol);
  r.report = {{"holds", res.holds},
              {"lower_margin", res.lower_margin},
              {"upper_margin", res.upper_margin},
              {"surface_min", res.surface_min},
              {"surface_max", res.surface_max}};
  r.check("nqt", res.holds);
}

void pressure_sqrtfit(Run& r) {
  const auto w = crest_at_origin(load_field(r, r.cfg.pressure.input));
  r.report = {{"K", sqrt_bound_fit(w)}};
}

// ------------------------------------------------------------- wavegen

WavegenOptions wavegen_options(const RunConfig& c) {
  WavegenOptions o;
  o.g = c.g;
  o.L = c.L;
  o.nx = c.nx;
  o.ny = c.ny;
  o.tol = c.tol;
  o.max_iter = c.wavegen.max_iter;
  o.seed_Q = c.wavegen.seed_Q;
  o.refine_fraction = c.wavegen.refine_fraction;
  o.refine_ratio = c.wavegen.refine_ratio;
  return o;
}

void family_checks(Run& r, const ContinuationFamily& fam) {
  bool head_ok = true;
  bool nqt_ok = true;
  json members = json::array();
  for (const auto& w : fam.members) {
    const auto bxv = bxv_check(w);
    const auto nqt = nqt_check(w, r.cfg.pressure.nqt_tol);
    head_ok = head_ok && bxv.max_T <= r.cfg.wavegen.head_tol;
    nqt_ok = nqt_ok && nqt.holds;
    members.push_back({{"max_T", bxv.max_T},
                       {"applicable", bxv.applicable},
                       {"nqt_holds", nqt.holds},
                       {"nqt_lower_margin", nqt.lower_margin},
                       {"nqt_upper_margin", nqt.upper_margin}});
  }
  const auto exi = exi_diagnostics(fam);
  r.report["exi"] = exi.to_json();
  r.report["member_checks"] = members;
  r.check("head", head_ok);
  r.check("nqt", nqt_ok);
  if (exi.q_bound_holds) r.check("q_bound", *exi.q_bound_holds);
  r.check("beq", exi.beq_holds);
}

void wavegen_continue(Run& r) {
  const auto& c = r.cfg;
  if (c.wavegen.targets.empty())
    fail(ErrorCode::ValidationError, "wavegen.targets: required for 'wavegen continue'");
  const auto fam = continue_family(c.gamma, c.wavegen.targets, wavegen_options(c));
  std::vector<std::string> paths;
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    std::ostringstream name;
    name << "wavegen_member_" << std::setw(3) << std::setfill('0') << k << ".csv";
    paths.push_back(name.str());
    r.write_field(paths.back(), fam.members[k]);
  }
  const auto manifest = fam.manifest(paths);
  r.write_json("wavegen_manifest.json", manifest);
  r.report["manifest"] = "wavegen_manifest.json";
  r.report["members"] = fam.members.size();
  r.report["truncated"] = fam.truncated;
  if (!fam.failure.empty()) r.report["failure"] = fam.failure;
  family_checks(r, fam);
  r.check("complete", !fam.truncated);
}

void wavegen_diagnose(Run& r) {
  const auto& c = r.cfg;
  if (c.wavegen.input.empty())
    fail(ErrorCode::ValidationError, "wavegen.input: manifest required for 'wavegen diagnose'");
  std::ifstream is(c.wavegen.input);
  if (!is) fail(ErrorCode::IoError, "cannot open " + c.wavegen.input);
  json manifest;
  try {
    manifest = json::parse(is);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::IoError, c.wavegen.input + ": malformed manifest: " + e.what());
  }
  const fs::path dir = fs::path(c.wavegen.input).parent_path();
  ContinuationFamily fam;
  try {
    fam.seed_lambda = manifest.at("seed").at("lambda").get<double>();
    fam.seed_Q = manifest.at("seed").at("Q").get<double>();
    fam.truncated = manifest.at("truncated").get<bool>();
    for (const auto& m : manifest.at("members")) {
      const auto w = read_field((dir / m.at("path").get<std::string>()).string(), c.gamma);
      fam.diagnostics.push_back(diagnose_member(w, w.eta.front() - w.eta.back(),
                                                m.value("iterations", 0)));
      fam.members.push_back(w);
    }
  } catch (const json::exception& e) {
    fail(ErrorCode::IoError, c.wavegen.input + ": manifest missing fields: " + e.what());
  }
  json diags = json::array();
  for (const auto& d : fam.diagnostics) diags.push_back(d.to_json());
  r.report["diagnostics"] = diags;
  family_checks(r, fam);
}

// -------------------------------------------------------------- blowup

BlowCheckOptions blow_options(const RunConfig& c) {
  BlowCheckOptions o;
  o.boundary_samples = c.blowup.boundary_samples;
  o.window_points = c.blowup.window_points;
  o.tol = std::max(c.tol, 1e-6);
  return o;
}

Window window(const RunConfig& c) {
  return {c.blowup.x_min, c.blowup.x_max, c.blowup.y_bottom, c.nx, c.ny};
}

CornerFlow corner(const RunConfig& c) {
  const auto& b = c.blowup;
  if (b.source == "stokes") return stokes_corner(c.g);
  const double beta =
      b.beta ? *b.beta : fit_corner_strength(b.alpha_plus, b.alpha_minus, c.g, blow_options(c));
  return corner_family(b.alpha_plus, b.alpha_minus, beta, c.g);
}

std::unique_ptr<FlowSource> source(const Run& r) {
  const auto& c = r.cfg;
  const auto& s = c.blowup.source;
  if (s == "stokes" || s == "corner") return std::make_unique<CornerFlow>(corner(c));
  const WaveField w = s == "field" ? read_field(c.blowup.input, c.gamma)
                                   : to_field(trivial_extreme(c.gamma, c.g), c.L, c.nx, c.ny);
  return std::make_unique<FieldSampler>(crest_at_origin(w));
}

json corner_json(const CornerFlow& f) {
  return {{"alpha_plus", f.alpha_plus()}, {"alpha_minus", f.alpha_minus()},
          {"beta", f.beta()},             {"exponent", f.exponent()},
          {"aperture", f.aperture()}};
}

void blowup_corner(Run& r) {
  const auto f = corner(r.cfg);
  const auto w = sample_window(f, window(r.cfg));
  r.write_field("blowup_corner.csv", w);
  r.report = corner_json(f);
  const double X = 1.0;
  const double Y = -std::tan(f.alpha_plus());
  const auto grad = f.gradient(X, Y);
  r.report["surface_point"] = {X, Y};
  r.report["grad_sq_at_surface_point"] = grad.squaredNorm();
  r.report["bernoulli_at_surface_point"] = grad.squaredNorm() + 2.0 * r.cfg.g * Y;
  r.report["csv"] = "blowup_corner.csv";
}

json check_json(const BlowCheck& b) {
  auto j = b.report.to_json();
  j["pass"] = b.pass;
  return j;
}

void blowup_family(Run& r) {
  const auto& c = r.cfg;
  const auto scan = scan_corner_family(c.g, c.blowup.n, c.blowup.spacing, blow_options(c));
  json hits = json::array();
  bool only_stokes = true;
  for (const auto& h : scan.passes) {
    hits.push_back({{"i_plus", h.i_plus},
                    {"i_minus", h.i_minus},
                    {"alpha_plus", h.alpha_plus},
                    {"alpha_minus", h.alpha_minus},
                    {"beta", h.beta},
                    {"trivial", h.trivial}});
    if (!h.trivial)
      only_stokes = only_stokes && std::abs(h.alpha_plus - kPi / 6.0) <= 0.5 * scan.spacing &&
                    std::abs(h.alpha_minus - kPi / 6.0) <= 0.5 * scan.spacing;
  }
  r.report = {{"n", scan.n},
              {"spacing", scan.spacing},
              {"passes", hits},
              {"trivial_passes", scan.trivial_passes},
              {"nontrivial_passes", scan.nontrivial_passes}};
  r.check("nontrivial_only_at_stokes", only_stokes);
}

void blowup_verify(Run& r) {
  const auto& c = r.cfg;
  const auto& s = c.blowup.source;
  BlowCheck res;
  if (s == "stokes" || s == "corner") {
    const auto f = corner(c);
    res = verify_blow(f, blow_options(c));
    r.report = corner_json(f);
  } else {
    const auto src = source(r);
    const double scale = c.blowup.scales.front();
    res = verify_blow(rescale(*src, scale, window(c)), blow_options(c));
    r.report = {{"scale", scale}};
  }
  r.report["check"] = check_json(res);
  r.check("verify", res.pass);
}

void blowup_rescale(Run& r) {
  const auto& c = r.cfg;
  const auto src = source(r);
  json frames = json::array();
  std::vector<double> ls, lsup;
  std::optional<Eigen::MatrixXd> first;
  double deviation = 0.0;
  for (std::size_t k = 0; k < c.blowup.scales.size(); ++k) {
    const double s = c.blowup.scales[k];
    const auto w = rescale(*src, s, window(c));
    const double sup = w.psi.cwiseAbs().maxCoeff();
    std::ostringstream name;
    name << "blowup_rescale_" << std::setw(2) << std::setfill('0') << k << ".csv";
    r.write_field(name.str(), w);
    if (!first) first = w.psi;
    else if (first->rows() == w.psi.rows() && first->cols() == w.psi.cols())
      deviation = std::max(deviation, (w.psi - *first).cwiseAbs().maxCoeff());
    frames.push_back({{"scale", s}, {"sup_psi", sup}, {"csv", name.str()}});
    if (sup > 0.0) {
      ls.push_back(std::log(s));
      lsup.push_back(std::log(sup));
    }
  }
  r.report = {{"frames", frames}, {"max_deviation_from_first", deviation}};
  if (ls.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
      mx += ls[k];
      my += lsup[k];
    }
    mx /= ls.size();
    my /= ls.size();
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < ls.size(); ++k) {
      sxy += (ls[k] - mx) * (lsup[k] - my);
      sxx += (ls[k] - mx) * (ls[k] - mx);
    }
    if (sxx > 0.0) r.report["sup_exponent"] = sxy / sxx;
  }
}

json side_json(const SideEstimate& s) {
  return {{"q", s.q},         {"drift", s.drift},     {"range_lo", s.range_lo},
          {"range_hi", s.range_hi}, {"samples", s.samples}, {"kind", to_string(s.kind)}};
}

void blowup_angle(Run& r) {
  const auto& c = r.cfg;
  const auto src = source(r);
  const double lo = std::max(c.blowup.x_min, -src->x_extent());
  const double hi = std::min(c.blowup.x_max, src->x_extent());
  const int n = 2 * c.nx + 1;
  std::vector<double> u(n), v(n);
  for (int k = 0; k < n; ++k) {
    u[k] = lo + (hi - lo) * k / (n - 1);
    v[k] = src->surface(u[k]);
  }
  const auto a = corner_angle(u, v);
  r.report = {{"plus", side_json(a.plus)}, {"minus", side_json(a.minus)},
              {"stokes_slope", 1.0 / std::sqrt(3.0)}};
}

void blowup_cone(Run& r) {
  const auto& c = r.cfg;
  const auto src = source(r);
  const Cone cone{c.blowup.axis, c.blowup.half_aperture, c.blowup.r0};
  const auto res =
      oddson_cone_check(*src, cone, c.blowup.delta, c.blowup.cone_scales, c.blowup.angles);
  r.report = {{"mu", res.mu},
              {"kappa", res.kappa},
              {"violation", res.violation},
              {"radii", res.radii},
              {"minima", res.minima}};
}

// --------------------------------------------------------------- theta

ThetaOperator theta_operator(const RunConfig& c) {
  if (c.theta.init == "file") return ThetaOperator(read_theta_csv(c.theta.input).x);
  return ThetaOperator(ThetaGrid{c.theta.x_min, c.theta.x_max, c.theta.n});
}

std::vector<double> theta_init(const RunConfig& c, const ThetaOperator& op, std::mt19937_64& rng) {
  const auto& t = c.theta;
  if (t.init == "file") return read_theta_csv(t.input).theta;
  if (t.init == "random") return random_admissible_theta(op.x(), rng);
  std::vector<double> th(op.size());
  for (std::size_t k = 0; k < th.size(); ++k) {
    const double x = op.x()[k];
    th[k] = t.init == "ramp" ? 0.5 * kPi * x / (1.0 + x) : t.init_value;
  }
  return th;
}

double sup_error(const std::vector<double>& v, double target) {
  double e = 0.0;
  for (double a : v) e = std::max(e, std::abs(a - target));
  return e;
}

void theta_quad(Run& r) {
  const auto& c = r.cfg;
  json rows = json::array();
  double worst = 0.0;
  const double exact = kPi * kPi / 2.0;
  for (double x : c.theta.x_eval) {
    const double v = log_kernel_integral(x, [](double y) { return 1.0 / y; });
    const double rel = std::abs(v - exact) / exact;
    worst = std::max(worst, rel);
    rows.push_back({{"x", x}, {"value", v}, {"relative_error", rel}});
  }
  const ThetaOperator op(ThetaGrid{c.theta.x_min, c.theta.x_max, c.theta.n});
  const double fixed =
      sup_error(theta_rhs(op, std::vector<double>(op.size(), kPi / 6.0)), kPi / 6.0);
  r.report = {{"kernel_identity", rows},
              {"exact", exact},
              {"fixed_point_sup_error", fixed}};
  r.check("kernel_identity", worst <= 1e-8);
  r.check("fixed_point", fixed <= 1e-8);
}

void theta_solve(Run& r) {
  const auto& c = r.cfg;
  const auto op = theta_operator(c);
  std::mt19937_64 rng(c.seed);
  const ThetaSolveOptions opts{c.tol, c.theta.max_iter, c.theta.omega};
  const int runs = c.theta.init == "random" ? c.theta.samples : 1;
  json starts = json::array();
  bool all_close = true;
  bool bound_ok = true;
  for (int k = 0; k < runs; ++k) {
    const auto init = theta_init(c, op, rng);
    ThetaLog log;
    const auto sol = solve_theta(op, init, opts, &log);
    const double err = sup_error(sol.theta, kPi / 6.0);
    all_close = all_close && err <= 1e-5;
    for (const auto& it : log.iterations)
      bound_ok = bound_ok && it.min_theta >= vsq_constant() - 1e-9;
    starts.push_back({{"iterations", log.iterations.size()}, {"sup_error", err}});
    if (k == 0) {
      write_theta_csv(r.file("theta_solve.csv").string(), sol);
      r.write_json("theta_solve_log.json", log.to_json());
    }
  }
  r.report = {{"runs", starts}, {"csv", "theta_solve.csv"}, {"log", "theta_solve_log.json"}};
  r.check("converged_to_pi_over_6", all_close);
  r.check("vsq_bound_after_first_iteration", bound_ok);
}

void theta_vsq(Run& r) {
  const auto& c = r.cfg;
  const auto op = theta_operator(c);
  std::mt19937_64 rng(c.seed);
  const auto th = theta_init(c, op, rng);
  const auto res = vsq_bound_check(op, th);
  r.report = {{"holds", res.holds},
              {"inf_theta", res.inf_theta},
              {"rhs_holds", res.rhs_holds},
              {"inf_rhs", res.inf_rhs},
              {"bound", vsq_constant()}};
  r.check("vsq", res.holds);
  r.check("vsq_rhs", res.rhs_holds);
}

void theta_reconstruct(Run& r) {
  const auto& c = r.cfg;
  const auto op = theta_operator(c);
  std::mt19937_64 rng(c.seed);
  const auto th = theta_init(c, op, rng);
  const auto b = reconstruct_surface(op, th, c.g);
  write_boundary_csv(r.file("theta_reconstruct.csv").string(), b);
  double dev = 0.0;
  for (std::size_t k = 0; k < b.t.size(); ++k)
    dev = std::max(dev, std::abs(b.V[k] + std::abs(b.U[k]) / std::sqrt(3.0)));
  r.report = {{"g", c.g}, {"max_deviation_from_stokes_profile", dev},
              {"csv", "theta_reconstruct.csv"}};
}

struct Command {
  std::string group, verb;
  void (*fn)(Run&);
};

const std::vector<Command>& commands() {
  static const std::vector<Command> table{
      {"vort", "hat", vort_hat},
      {"vort", "jhb", vort_jhb},
      {"vort", "qbound", vort_qbound},
      {"vort", "zxc", vort_zxc},
      {"laminar", "extreme", laminar_extreme},
      {"laminar", "regular", laminar_regular_cmd},
      {"field", "residuals", field_residuals},
      {"field", "weak", field_weak},
      {"field", "shift", field_shift},
      {"field", "stagnation", field_stagnation},
      {"pressure", "head", pressure_head_cmd},
      {"pressure", "sperb", pressure_sperb},
      {"pressure", "nqt", pressure_nqt},
      {"pressure", "sqrtfit", pressure_sqrtfit},
      {"wavegen", "continue", wavegen_continue},
      {"wavegen", "diagnose", wavegen_diagnose},
      {"blowup", "corner", blowup_corner},
      {"blowup", "family", blowup_family},
      {"blowup", "verify", blowup_verify},
      {"blowup", "rescale", blowup_rescale},
      {"blowup", "angle", blowup_angle},
      {"blowup", "cone", blowup_cone},
      {"theta", "quad", theta_quad},
      {"theta", "solve", theta_solve},
      {"theta", "vsq", theta_vsq},
      {"theta", "reconstruct", theta_reconstruct},
  };
  return table;
}

std::string read_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) fail(ErrorCode::IoError, "cannot open config " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Steady periodic water waves with vorticity: numerical checks"};
  app.require_subcommand(1);
  std::string config_path, out_dir, grid;
  double tol = 0.0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--grid", grid, "Grid size NxM");
  auto* tol_opt = app.add_option("--tol", tol, "Tolerance in (0, 1)");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for randomized runs");

  std::string chosen_group, chosen_verb;
  std::vector<std::string> groups;
  for (const auto& c : commands())
    if (groups.empty() || groups.back() != c.group) groups.push_back(c.group);
  for (const auto& g : groups) {
    auto* sub = app.add_subcommand(g, g + " commands");
    sub->require_subcommand(1);
    sub->fallthrough();
    for (const auto& c : commands()) {
      if (c.group != g) continue;
      auto* leaf = sub->add_subcommand(c.verb);
      leaf->fallthrough();
      leaf->callback([&chosen_group, &chosen_verb, c] {
        chosen_group = c.group;
        chosen_verb = c.verb;
      });
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ExitCode::Usage);
  }

  Run run;
  try {
    std::string base;
    std::string text = kDefaultConfig;
    if (!config_path.empty()) {
      text = read_text(config_path);
      base = fs::path(config_path).parent_path().string();
    }
    run.cfg = parse_config(text, base);
    if (!grid.empty()) {
      const auto x = grid.find_first_of("xX");
      int nx = 0, ny = 0;
      try {
        if (x == std::string::npos) throw std::invalid_argument("no separator");
        nx = std::stoi(grid.substr(0, x));
        ny = std::stoi(grid.substr(x + 1));
      } catch (const std::exception&) {
        fail(ErrorCode::ValidationError, "--grid: expected NxM, got '" + grid + "'");
      }
      if (nx < 8 || ny < 8) fail(ErrorCode::ValidationError, "--grid: needs at least 8x8");
      run.cfg.nx = nx;
      run.cfg.ny = ny;
    }
    if (tol_opt->count() > 0) {
      if (!(tol > 0.0 && tol < 1.0))
        fail(ErrorCode::ValidationError, "--tol: tolerance must lie in (0, 1)");
      run.cfg.tol = tol;
    }
    if (seed_opt->count() > 0) run.cfg.seed = seed;
    if (!out_dir.empty()) run.cfg.out = out_dir;
    run.out = run.cfg.out;
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + run.out.string() + ": " + ec.message());

    for (const auto& c : commands())
      if (c.group == chosen_group && c.verb == chosen_verb) c.fn(run);

    json doc = {{"command", chosen_group + " " + chosen_verb},
                {"config", run.cfg.to_json()},
                {"report", run.report},
                {"checks", run.checks}};
    const std::string text_out = dump_json(doc);
    run.write_json(chosen_group + "_" + chosen_verb + ".json", doc);
    std::cout << text_out << '\n';
    for (const auto& [name, ok] : run.checks.items())
      if (!ok.get<bool>()) {
        std::cerr << "check failed: " << name << '\n';
        return static_cast<int>(ExitCode::CheckFailed);
      }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return static_cast<int>(exit_code_for(e.code()));
  }
}
