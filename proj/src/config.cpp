#include "vwl/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

namespace vwl {

namespace {

using nlohmann::json;

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Typed reads from one JSON object; rejects keys outside `allowed`.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorCode::SchemaError, where() + ": expected an object");
    for (const auto& [key, _] : j_.items())
      if (!allowed.count(key)) fail(ErrorCode::SchemaError, join(path_, key) + ": unknown key");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }
  std::string at(const std::string& key) const { return join(path_, key); }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    if (!j_[key].is_number()) fail(ErrorCode::SchemaError, at(key) + ": expected a number");
    out = j_[key].get<double>();
    if (!std::isfinite(out)) fail(ErrorCode::ValidationError, at(key) + ": must be finite");
  }
  void number(const std::string& key, std::optional<double>& out) const {
    if (!has(key)) return;
    double v = 0.0;
    number(key, v);
    out = v;
  }
  void integer(const std::string& key, int& out) const {
    if (!has(key)) return;
    if (!j_[key].is_number_integer())
      fail(ErrorCode::SchemaError, at(key) + ": expected an integer");
    out = j_[key].get<int>();
  }
  void text(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!j_[key].is_string()) fail(ErrorCode::SchemaError, at(key) + ": expected a string");
    out = j_[key].get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    if (!j_[key].is_array()) fail(ErrorCode::SchemaError, at(key) + ": expected an array");
    out.clear();
    for (std::size_t i = 0; i < j_[key].size(); ++i) {
      if (!j_[key][i].is_number())
        fail(ErrorCode::SchemaError, at(key) + "[" + std::to_string(i) + "]: expected a number");
      out.push_back(j_[key][i].get<double>());
    }
  }

 private:
  std::string where() const { return path_.empty() ? "document" : path_; }
  const json& j_;
  std::string path_;
};

void check(bool ok, const std::string& what) {
  if (!ok) fail(ErrorCode::ValidationError, what);
}

void check_positive(double v, const std::string& path) { check(v > 0.0, path + ": must be positive"); }

void check_tolerance(double v, const std::string& path) {
  check(v > 0.0 && v < 1.0, path + ": tolerance must lie in (0, 1)");
}

std::string resolve(const std::string& p, const std::string& base, const std::string& path) {
  if (p.empty()) return p;
  std::filesystem::path fp(p);
  if (fp.is_relative() && !base.empty()) fp = std::filesystem::path(base) / fp;
  check(std::filesystem::exists(fp), path + ": file not found: " + fp.string());
  return fp.string();
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::SchemaError, std::string("document: malformed JSON: ") + e.what());
  }
  const Section top(doc, "",
                    {"gamma", "g", "B", "L", "grid", "tol", "seed", "out", "laminar", "field",
                     "pressure", "wavegen", "blowup", "theta"});
  RunConfig c;
  if (!top.has("gamma")) fail(ErrorCode::SchemaError, "gamma: missing");
  json gamma = top.raw("gamma");
  top.number("g", c.g);
  check_positive(c.g, "g");
  if (top.has("B")) {
    top.number("B", c.B);
    check_positive(c.B, "B");
    if (gamma.is_object() && !gamma.contains("B")) gamma["B"] = c.B;
  }
  c.gamma = VorticityFn::from_json(gamma, "gamma");
  if (top.has("B"))
    check(std::abs(c.gamma.B() - c.B) <= 1e-14 * c.B, "B: disagrees with gamma.B");
  c.B = c.gamma.B();
  top.number("L", c.L);
  check_positive(c.L, "L");
  top.number("tol", c.tol);
  check_tolerance(c.tol, "tol");
  if (top.has("seed")) {
    if (!top.raw("seed").is_number_unsigned())
      fail(ErrorCode::SchemaError, "seed: expected a nonnegative integer");
    c.seed = top.raw("seed").get<std::uint64_t>();
  }
  top.text("out", c.out);
  if (top.has("grid")) {
    const Section s(top.raw("grid"), "grid", {"nx", "ny"});
    s.integer("nx", c.nx);
    s.integer("ny", c.ny);
  }
  check(c.nx >= 8 && c.ny >= 8, "grid: needs at least 8 nodes per direction");

  if (top.has("laminar")) {
    const Section s(top.raw("laminar"), "laminar", {"Q", "F", "root", "samples"});
    s.number("Q", c.laminar.Q);
    s.number("F", c.laminar.F);
    std::string root = "deep";
    s.text("root", root);
    check(root == "deep" || root == "shallow", "laminar.root: expected 'deep' or 'shallow'");
    c.laminar.shallow = root == "shallow";
    s.integer("samples", c.laminar.samples);
    check(c.laminar.samples >= 8, "laminar.samples: needs at least 8");
  }
  if (top.has("field")) {
    const Section s(top.raw("field"), "field",
                    {"input", "shift", "stagnation_tol", "order", "bump"});
    auto& f = c.field;
    s.text("input", f.input);
    f.input = resolve(f.input, base_dir, "field.input");
    s.number("shift", f.shift);
    s.number("stagnation_tol", f.stagnation_tol);
    check_tolerance(f.stagnation_tol, "field.stagnation_tol");
    s.integer("order", f.order);
    check(f.order == 2 || f.order == 4, "field.order: expected 2 or 4");
    if (s.has("bump")) {
      const Section b(s.raw("bump"), "field.bump", {"cx", "cy", "radius", "amplitude", "degree"});
      b.number("cx", f.bump_cx);
      b.number("cy", f.bump_cy);
      b.number("radius", f.bump_radius);
      check_positive(f.bump_radius, "field.bump.radius");
      b.number("amplitude", f.bump_amplitude);
      b.integer("degree", f.bump_degree);
      check(f.bump_degree >= 2, "field.bump.degree: needs at least 2");
    }
  }
  if (top.has("pressure")) {
    const Section s(top.raw("pressure"), "pressure",
                    {"input", "kind", "multiplier", "sperb_margin", "relative_cutoff", "sperb_tol",
                     "nqt_tol"});
    auto& p = c.pressure;
    s.text("input", p.input);
    p.input = resolve(p.input, base_dir, "pressure.input");
    s.text("kind", p.kind);
    check(p.kind == "R" || p.kind == "T" || p.kind == "S", "pressure.kind: expected R, T or S");
    if (s.has("multiplier")) {
      VorticityFn::from_json(s.raw("multiplier"), "pressure.multiplier");
      p.multiplier = s.raw("multiplier");
    }
    s.integer("sperb_margin", p.sperb_margin);
    check(p.sperb_margin >= 2, "pressure.sperb_margin: needs at least 2");
    s.number("relative_cutoff", p.relative_cutoff);
    check_tolerance(p.relative_cutoff, "pressure.relative_cutoff");
    s.number("sperb_tol", p.sperb_tol);
    check_tolerance(p.sperb_tol, "pressure.sperb_tol");
    s.number("nqt_tol", p.nqt_tol);
    check_tolerance(p.nqt_tol, "pressure.nqt_tol");
  }
  if (top.has("wavegen")) {
    const Section s(top.raw("wavegen"), "wavegen",
                    {"targets", "seed_Q", "max_iter", "refine_fraction", "refine_ratio", "head_tol",
                     "input"});
    auto& w = c.wavegen;
    s.numbers("targets", w.targets);
    for (std::size_t k = 0; k < w.targets.size(); ++k)
      check(w.targets[k] >= 0.0 && (k == 0 || w.targets[k] > w.targets[k - 1]),
            "wavegen.targets: must be nonnegative and increasing");
    s.number("seed_Q", w.seed_Q);
    s.integer("max_iter", w.max_iter);
    check(w.max_iter >= 1, "wavegen.max_iter: needs at least 1");
    s.number("refine_fraction", w.refine_fraction);
    check(w.refine_fraction >= 0.0 && w.refine_fraction <= 1.0,
          "wavegen.refine_fraction: must lie in [0, 1]");
    s.number("refine_ratio", w.refine_ratio);
    check(w.refine_ratio >= 1.0, "wavegen.refine_ratio: must be at least 1");
    s.number("head_tol", w.head_tol);
    check_tolerance(w.head_tol, "wavegen.head_tol");
    s.text("input", w.input);
    w.input = resolve(w.input, base_dir, "wavegen.input");
  }
  if (top.has("blowup")) {
    const Section s(top.raw("blowup"), "blowup",
                    {"source", "input", "alpha_plus", "alpha_minus", "beta", "n", "spacing",
                     "scales", "window", "delta", "cone", "boundary_samples", "window_points"});
    auto& b = c.blowup;
    s.text("source", b.source);
    check(b.source == "stokes" || b.source == "corner" || b.source == "trivial_extreme" ||
              b.source == "field",
          "blowup.source: expected stokes, corner, trivial_extreme or field");
    s.text("input", b.input);
    b.input = resolve(b.input, base_dir, "blowup.input");
    check(b.source != "field" || !b.input.empty(), "blowup.input: required for source 'field'");
    s.number("alpha_plus", b.alpha_plus);
    s.number("alpha_minus", b.alpha_minus);
    s.number("beta", b.beta);
    s.integer("n", b.n);
    check(b.n >= 1, "blowup.n: needs at least 1");
    s.number("spacing", b.spacing);
    check(b.spacing >= 0.0, "blowup.spacing: must be nonnegative");
    s.numbers("scales", b.scales);
    for (double v : b.scales) check_positive(v, "blowup.scales");
    if (s.has("window")) {
      const Section w(s.raw("window"), "blowup.window", {"x_min", "x_max", "y_bottom"});
      w.number("x_min", b.x_min);
      w.number("x_max", b.x_max);
      w.number("y_bottom", b.y_bottom);
      check(b.x_min < 0.0 && b.x_max > 0.0 && b.y_bottom < 0.0,
            "blowup.window: must contain the origin with y_bottom < 0");
    }
    s.number("delta", b.delta);
    check_positive(b.delta, "blowup.delta");
    if (s.has("cone")) {
      const Section k(s.raw("cone"), "blowup.cone",
                      {"axis", "half_aperture", "r0", "scales", "angles"});
      k.number("axis", b.axis);
      k.number("half_aperture", b.half_aperture);
      check(b.half_aperture > 0.0 && b.half_aperture < 3.14159,
            "blowup.cone.half_aperture: must lie in (0, pi)");
      k.number("r0", b.r0);
      check_positive(b.r0, "blowup.cone.r0");
      k.integer("scales", b.cone_scales);
      check(b.cone_scales >= 3, "blowup.cone.scales: needs at least 3");
      k.integer("angles", b.angles);
      check(b.angles >= 3, "blowup.cone.angles: needs at least 3");
    }
    s.integer("boundary_samples", b.boundary_samples);
    check(b.boundary_samples >= 2, "blowup.boundary_samples: needs at least 2");
    s.integer("window_points", b.window_points);
    check(b.window_points >= 0, "blowup.window_points: must be nonnegative");
  }
  if (top.has("theta")) {
    const Section s(top.raw("theta"), "theta",
                    {"n", "x_min", "x_max", "init", "init_value", "input", "max_iter", "omega",
                     "samples", "x_eval"});
    auto& t = c.theta;
    s.integer("n", t.n);
    check(t.n >= 4, "theta.n: needs at least 4");
    s.number("x_min", t.x_min);
    s.number("x_max", t.x_max);
    check(t.x_min > 0.0 && t.x_max > t.x_min, "theta: needs 0 < x_min < x_max");
    s.text("init", t.init);
    check(t.init == "constant" || t.init == "ramp" || t.init == "random" || t.init == "file",
          "theta.init: expected constant, ramp, random or file");
    s.number("init_value", t.init_value);
    check(t.init_value >= 0.0 && t.init_value <= 1.5707963267948966,
          "theta.init_value: must lie in [0, pi/2]");
    s.text("input", t.input);
    t.input = resolve(t.input, base_dir, "theta.input");
    check(t.init != "file" || !t.input.empty(), "theta.input: required for init 'file'");
    s.integer("max_iter", t.max_iter);
    check(t.max_iter >= 1, "theta.max_iter: needs at least 1");
    s.number("omega", t.omega);
    check(t.omega > 0.0 && t.omega <= 1.0, "theta.omega: must lie in (0, 1]");
    s.integer("samples", t.samples);
    check(t.samples >= 1, "theta.samples: needs at least 1");
    s.numbers("x_eval", t.x_eval);
    for (double v : t.x_eval) check_positive(v, "theta.x_eval");
  }
  return c;
}

nlohmann::json RunConfig::to_json() const {
  json j;
  j["gamma"] = gamma.to_json();
  j["g"] = g;
  j["B"] = B;
  j["L"] = L;
  j["grid"] = {{"nx", nx}, {"ny", ny}};
  j["tol"] = tol;
  j["seed"] = seed;
  j["out"] = out;
  json lam = {{"F", laminar.F}, {"root", laminar.shallow ? "shallow" : "deep"},
              {"samples", laminar.samples}};
  if (laminar.Q) lam["Q"] = *laminar.Q;
  j["laminar"] = lam;
  j["field"] = {{"input", field.input},
                {"shift", field.shift},
                {"stagnation_tol", field.stagnation_tol},
                {"order", field.order},
                {"bump",
                 {{"cx", field.bump_cx},
                  {"cy", field.bump_cy},
                  {"radius", field.bump_radius},
                  {"amplitude", field.bump_amplitude},
                  {"degree", field.bump_degree}}}};
  json pr = {{"input", pressure.input},
             {"kind", pressure.kind},
             {"sperb_margin", pressure.sperb_margin},
             {"relative_cutoff", pressure.relative_cutoff},
             {"sperb_tol", pressure.sperb_tol},
             {"nqt_tol", pressure.nqt_tol}};
  if (pressure.multiplier) pr["multiplier"] = *pressure.multiplier;
  j["pressure"] = pr;
  json wg = {{"targets", wavegen.targets},
             {"max_iter", wavegen.max_iter},
             {"refine_fraction", wavegen.refine_fraction},
             {"refine_ratio", wavegen.refine_ratio},
             {"head_tol", wavegen.head_tol},
             {"input", wavegen.input}};
  if (wavegen.seed_Q) wg["seed_Q"] = *wavegen.seed_Q;
  j["wavegen"] = wg;
  json bl = {{"source", blowup.source},
             {"input", blowup.input},
             {"alpha_plus", blowup.alpha_plus},
             {"alpha_minus", blowup.alpha_minus},
             {"n", blowup.n},
             {"spacing", blowup.spacing},
             {"scales", blowup.scales},
             {"window", {{"x_min", blowup.x_min}, {"x_max", blowup.x_max}, {"y_bottom", blowup.y_bottom}}},
             {"delta", blowup.delta},
             {"cone",
              {{"axis", blowup.axis},
               {"half_aperture", blowup.half_aperture},
               {"r0", blowup.r0},
               {"scales", blowup.cone_scales},
               {"angles", blowup.angles}}},
             {"boundary_samples", blowup.boundary_samples},
             {"window_points", blowup.window_points}};
  if (blowup.beta) bl["beta"] = *blowup.beta;
  j["blowup"] = bl;
  j["theta"] = {{"n", theta.n},
                {"x_min", theta.x_min},
                {"x_max", theta.x_max},
                {"init", theta.init},
                {"init_value", theta.init_value},
                {"input", theta.input},
                {"max_iter", theta.max_iter},
                {"omega", theta.omega},
                {"samples", theta.samples},
                {"x_eval", theta.x_eval}};
  return j;
}

ExitCode exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError:
    case ErrorCode::ValidationError:
      return ExitCode::Config;
    case ErrorCode::IoError:
      return ExitCode::Io;
    case ErrorCode::NoRoot:
    case ErrorCode::SeedFailure:
    case ErrorCode::NewtonDivergence:
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::InsufficientResolution:
    case ErrorCode::Unbounded:
      return ExitCode::Numerical;
    default:
      return ExitCode::Domain;
  }
}

namespace {

void dump_into(std::string& out, const nlohmann::json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const std::string sep = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        out += pad + nlohmann::json(key).dump() + sep;
        dump_into(out, value, indent, depth + 1);
      }
      out += close + '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += '[';
      for (std::size_t k = 0; k < j.size(); ++k) {
        if (k) out += ',';
        out += pad;
        dump_into(out, j[k], indent, depth + 1);
      }
      out += close + ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out;
}

}  // namespace vwl
