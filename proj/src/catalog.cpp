#include "causal/catalog.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <numbers>
#include <sstream>

namespace causal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

using Defaults = std::vector<std::pair<std::string, std::string>>;

Defaults builtin_defaults(const std::string& name) {
  if (name == "minkowski") return {};
  if (name == "minkowski_spherical") return {{"a", "0"}};
  if (name == "einstein_static") return {{"a", "1"}};
  if (name == "de_sitter") return {{"alpha", "1"}};
  if (name == "schwarzschild_ext") return {{"M", "1"}, {"c", "3"}};
  if (name == "frw_flat") return {{"gamma", "1/3"}, {"C", "1"}};
  if (name == "steady_state") return {{"alpha", "1"}};
  if (name == "vaidya") return {{"M", "3 - tanh(t)"}, {"eps", "1e-3"}};
  throw CatalogError("unknown builtin spacetime '" + name + "'");
}

std::map<std::string, std::string> merge(const std::string& owner, const Defaults& defaults,
                                         const ParamOverrides& overrides) {
  std::map<std::string, std::string> out(defaults.begin(), defaults.end());
  for (const auto& [k, v] : overrides) {
    auto it = out.find(k);
    if (it == out.end()) throw CatalogError(owner + " has no parameter '" + k + "'");
    it->second = v;
  }
  return out;
}

SpacetimeDef skeleton(const std::string& name, std::vector<std::string> coords) {
  SpacetimeDef d;
  d.name = name;
  d.coords = std::move(coords);
  const std::size_t n = d.coords.size();
  d.domain.assign(n, Interval{-kInf, kInf});
  d.window.assign(n, std::nullopt);
  d.orientation.assign(n, "0");
  d.orientation[0] = "1";
  return d;
}

void set_diagonal(SpacetimeDef& d, const std::vector<std::string>& entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) d.metric[{static_cast<int>(i), static_cast<int>(i)}] = entries[i];
}

// Polar and azimuthal angles stay off the axis and the seam.
void angular_domain(SpacetimeDef& d, std::size_t polar) {
  d.domain[polar] = {0.0, kPi};
  d.domain[polar + 1] = {0.0, 2.0 * kPi};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw CatalogError(what);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}


// ---------------------------------------------------------------------------
// Scenario plumbing

struct Context {
  const ScenarioOptions& opts;
  Json params = Json::object();
  Json inputs = Json::array();

  void input(const std::string& role, const std::string& name, const std::string& text) {
    inputs.push_back({{"role", role}, {"name", name}, {"fnv1a", fnv1a_hex(text)}});
  }
  std::shared_ptr<const Chart> chart(const std::string& role, const SpacetimeDef& def) {
    input(role, def.name, to_text(def));
    auto c = std::make_shared<const Chart>(def);
    validate_chart(*c);
    return c;
  }
  BoundMap map(const std::string& role, const MapDef& def, std::shared_ptr<const Chart> s,
               std::shared_ptr<const Chart> t) {
    input(role, def.name, to_text(def));
    return BoundMap(def, std::move(s), std::move(t));
  }
};

struct Outcome {
  Json result;
  Json expectation;  // null when the scenario has none
  std::optional<bool> met;
  int verdict_exit = kExitInternal;
};

std::map<std::string, std::string> scenario_params(Context& ctx, const std::string& name, const Defaults& defaults) {
  auto p = merge("scenario '" + name + "'", defaults, ctx.opts.params);
  for (const auto& [k, v] : defaults) ctx.params[k] = p.at(k);
  return p;
}

double num(const std::map<std::string, std::string>& p, const std::string& key) {
  return parse_number(key, p.at(key));
}

SamplerConfig with_window(SamplerConfig config, std::size_t dim, std::size_t coord, Interval window) {
  if (config.windows.empty()) {
    config.windows.assign(dim, std::nullopt);
    config.windows[coord] = window;
  }
  return config;
}

bool margins_agree(double numeric, double analytic) {
  return std::abs(numeric - analytic) <= 1e-6 * std::max(1.0, std::abs(analytic));
}

std::string verdict_name(Verdict v) { return std::string(to_string(v)); }

// --- Example 1: de Sitter -> Einstein static, t = b tb -----------------------

Outcome desitter_to_einstein(Context& ctx) {
  auto p = scenario_params(ctx, "desitter_to_einstein", {{"a", "1"}, {"alpha", "1"}, {"b", "1.5"}, {"t_window", "3"}});
  const double a = num(p, "a"), alpha = num(p, "alpha"), b = num(p, "b"), tw = num(p, "t_window");
  require(b > 0.0, "b must be positive");
  require(tw > 0.0, "t_window must be positive");

  auto w = ctx.chart("source", builtin("de_sitter", {{"alpha", p.at("alpha")}}));
  auto v = ctx.chart("target", builtin("einstein_static", {{"a", p.at("a")}}));
  const BoundMap map = ctx.map("map", desitter_to_einstein_map(b), w, v);
  const RegionSampler sampler = w->sampler(with_window(ctx.opts.sampler, 4, 0, {-tw, tw}));
  const RelationReport r = check_proper_causal(map, sampler, ctx.opts.check);

  // Frame components of the pullback are diag(b^2, -q, -q, -q) with
  // q = a^2 / (alpha^2 cosh^2(tb / alpha)), so the margin is b^2 - q.
  auto analytic = [&](const std::vector<double>& x) {
    const double ch = std::cosh(x[0] / alpha);
    return b * b - a * a / (alpha * alpha * ch * ch);
  };
  double amin = kInf;
  for (std::size_t i = 0; i < sampler.size(); ++i) amin = std::min(amin, analytic(sampler.point(i)));
  const Verdict expected = amin >= -ctx.opts.check.tol_dp ? Verdict::HoldsSampled : Verdict::Violated;
  bool witnesses_ok = true;
  for (const auto& wit : r.witnesses) witnesses_ok = witnesses_ok && analytic(wit.point) < ctx.opts.check.tol_dp;

  Outcome o;
  o.result = to_json(r);
  o.expectation["verdict"] = verdict_name(expected);
  o.expectation["analytic_min_margin"] = amin;
  const double ratio = a / (b * alpha);
  if (ratio > 1.0) o.expectation["violation_half_width"] = alpha * std::acosh(ratio);
  o.expectation["witnesses_consistent"] = witnesses_ok;
  o.met = r.verdict == expected && margins_agree(r.min_margin, amin) && witnesses_ok;
  o.verdict_exit = exit_code(r.verdict);
  return o;
}

// --- Example 2: Minkowski region R > a <-> Schwarzschild exterior r > c ------

const Defaults kSchwarzschildDefaults = {{"M", "1"}, {"c", "3"}, {"a", "2.5"}, {"b", "3"}, {"R_max", "50"}};

struct SchwarzschildSetup {
  double M, c, a, b, r_max;
  std::shared_ptr<const Chart> lambda, w;
};

SchwarzschildSetup schwarzschild_setup(Context& ctx, const std::map<std::string, std::string>& p, bool lambda_first) {
  SchwarzschildSetup s{num(p, "M"), num(p, "c"), num(p, "a"), p.count("b") ? num(p, "b") : 1.0, num(p, "R_max"), {}, {}};
  require(s.r_max > std::max(s.a, s.c), "R_max must exceed a and c");
  const SpacetimeDef lam = builtin("minkowski_spherical", {{"a", p.at("a")}});
  const SpacetimeDef w = builtin("schwarzschild_ext", {{"M", p.at("M")}, {"c", p.at("c")}});
  if (lambda_first) {
    s.lambda = ctx.chart("source", lam);
    s.w = ctx.chart("target", w);
  } else {
    s.w = ctx.chart("source", w);
    s.lambda = ctx.chart("target", lam);
  }
  return s;
}

// Frame components of phi* g~ on Lambda_a: diag(b^2 f, -1/f, -rho^2, -rho^2)
// with f = 1 - 2M/(R - a + c), rho = (R - a + c)/R.
double m2s_margin(const SchwarzschildSetup& s, const std::vector<double>& x) {
  const double r = x[1] - s.a + s.c;
  const double f = 1.0 - 2.0 * s.M / r;
  const double rho = r / x[1];
  return s.b * s.b * f - std::max(1.0 / f, rho * rho);
}

// Identity map pulled back to W_c, frame components diag(1/f, -f, -1, -1).
double s2m_margin(const SchwarzschildSetup& s, const std::vector<double>& x) {
  const double f = 1.0 - 2.0 * s.M / x[1];
  return 1.0 / f - std::max(f, 1.0);
}

struct Expected {
  Verdict verdict;
  double min_margin;
};

Expected expect_m2s(const SchwarzschildSetup& s, const RegionSampler& sampler, double tol) {
  double amin = kInf;
  for (std::size_t i = 0; i < sampler.size(); ++i) amin = std::min(amin, m2s_margin(s, sampler.point(i)));
  return {amin >= -tol ? Verdict::HoldsSampled : Verdict::Violated, amin};
}

Expected expect_s2m(const SchwarzschildSetup& s, const RegionSampler& sampler, double tol) {
  // Points with r <= a leave Lambda_a.
  for (std::size_t i = 0; i < sampler.size(); ++i)
    if (!(sampler.point(i)[1] > s.a)) return {Verdict::Error, 0.0};
  double amin = kInf;
  for (std::size_t i = 0; i < sampler.size(); ++i) amin = std::min(amin, s2m_margin(s, sampler.point(i)));
  return {amin >= -tol ? Verdict::HoldsSampled : Verdict::Violated, amin};
}

bool relation_matches(const RelationReport& r, const Expected& e) {
  if (r.verdict != e.verdict) return false;
  return e.verdict == Verdict::Error || margins_agree(r.min_margin, e.min_margin);
}

Json expected_json(const Expected& e) {
  Json j;
  j["verdict"] = verdict_name(e.verdict);
  if (e.verdict != Verdict::Error) j["analytic_min_margin"] = e.min_margin;
  return j;
}

Outcome minkowski_to_schwarzschild(Context& ctx) {
  auto p = scenario_params(ctx, "minkowski_to_schwarzschild", kSchwarzschildDefaults);
  const SchwarzschildSetup s = schwarzschild_setup(ctx, p, true);
  require(s.b > 0.0, "b must be positive");
  const BoundMap map = ctx.map("map", minkowski_to_schwarzschild_map(s.a, s.b, s.c), s.lambda, s.w);
  const RegionSampler sampler = s.lambda->sampler(with_window(ctx.opts.sampler, 4, 1, {s.a, s.r_max}));
  const RelationReport r = check_proper_causal(map, sampler, ctx.opts.check);
  const Expected e = expect_m2s(s, sampler, ctx.opts.check.tol_dp);

  Outcome o;
  o.result = to_json(r);
  o.expectation = expected_json(e);
  o.met = relation_matches(r, e);
  o.verdict_exit = exit_code(r.verdict);
  return o;
}

Outcome schwarzschild_to_minkowski(Context& ctx) {
  Defaults defaults = kSchwarzschildDefaults;
  defaults.erase(std::remove_if(defaults.begin(), defaults.end(), [](const auto& d) { return d.first == "b"; }),
                 defaults.end());
  auto p = scenario_params(ctx, "schwarzschild_to_minkowski", defaults);
  const SchwarzschildSetup s = schwarzschild_setup(ctx, p, false);
  const BoundMap map = ctx.map("map", schwarzschild_to_minkowski_map(), s.w, s.lambda);
  const RegionSampler sampler = s.w->sampler(with_window(ctx.opts.sampler, 4, 1, {s.c, s.r_max}));
  const RelationReport r = check_proper_causal(map, sampler, ctx.opts.check);
  const Expected e = expect_s2m(s, sampler, ctx.opts.check.tol_dp);

  Outcome o;
  o.result = to_json(r);
  o.expectation = expected_json(e);
  o.met = relation_matches(r, e);
  o.verdict_exit = exit_code(r.verdict);
  return o;
}

Outcome schwarzschild_iso(Context& ctx) {
  auto p = scenario_params(ctx, "schwarzschild_iso", kSchwarzschildDefaults);
  const SchwarzschildSetup s = schwarzschild_setup(ctx, p, true);
  require(s.b > 0.0, "b must be positive");
  const BoundMap fwd = ctx.map("forward", minkowski_to_schwarzschild_map(s.a, s.b, s.c), s.lambda, s.w);
  const BoundMap bwd = ctx.map("backward", schwarzschild_to_minkowski_map(), s.w, s.lambda);
  const RegionSampler src = s.lambda->sampler(with_window(ctx.opts.sampler, 4, 1, {s.a, s.r_max}));
  const RegionSampler tgt = s.w->sampler(with_window(ctx.opts.sampler, 4, 1, {s.c, s.r_max}));
  const IsoReport r = check_isomorphism(fwd, bwd, src, tgt, ctx.opts.check);

  const Expected ef = expect_m2s(s, src, ctx.opts.check.tol_dp);
  const Expected eb = expect_s2m(s, tgt, ctx.opts.check.tol_dp);
  IsoVerdict expected = IsoVerdict::Isomorphic;
  if (ef.verdict == Verdict::Violated || eb.verdict == Verdict::Violated) expected = IsoVerdict::NotIsomorphic;
  else if (ef.verdict == Verdict::Error || eb.verdict == Verdict::Error) expected = IsoVerdict::Error;

  Outcome o;
  o.result = to_json(r);
  o.expectation["verdict"] = std::string(to_string(expected));
  o.expectation["forward"] = expected_json(ef);
  o.expectation["backward"] = expected_json(eb);
  o.met = r.verdict == expected && relation_matches(r.forward, ef) && relation_matches(r.backward, eb);
  o.verdict_exit = exit_code(r.verdict);
  return o;
}

// --- Example 4: Vaidya, t -> t + s -------------------------------------------

Outcome vaidya_flow(Context& ctx) {
  auto p = scenario_params(ctx, "vaidya_flow",
                           {{"M", "3 - tanh(t)"}, {"eps", "1e-3"}, {"s_min", "-2"}, {"s_max", "2"}, {"s_step", "0.5"}});
  const double s_min = num(p, "s_min"), s_max = num(p, "s_max"), s_step = num(p, "s_step");
  require(s_step > 0.0 && s_min <= s_max, "s grid needs s_min <= s_max and s_step > 0");
  std::vector<double> grid;
  const auto steps = static_cast<std::size_t>(std::floor((s_max - s_min) / s_step + 1e-9));
  for (std::size_t i = 0; i <= steps; ++i) grid.push_back(s_min + static_cast<double>(i) * s_step);

  auto chart = ctx.chart("spacetime", builtin("vaidya", {{"M", p.at("M")}, {"eps", p.at("eps")}}));
  const FlowDef fdef = vaidya_time_flow();
  ctx.input("flow", fdef.name, to_text(fdef));
  const BoundFlow flow(fdef, chart);
  const RegionSampler sampler = chart->sampler(ctx.opts.sampler);
  const SubmonoidReport sub = check_submonoid(flow, grid, sampler, ctx.opts.check);

  const Expr mass = parse_expr(p.at("M"), std::vector<std::string>{"t"});
  auto m_at = [&](double t) { return eval(mass, std::span<const double>(&t, 1)); };
  auto mdot_at = [&](double t) {
    const Dual td = Dual::variable(t, 0, 1);
    return eval_dual(mass, std::span<const Dual>(&td, 1)).d(0);
  };

  // Lie derivative of g along d/dt against -(2/r) Mdot dt (x) dt.
  const GeneratorField xi = flow.generator_field();
  double lie_err = 0.0, mdot_max = -kInf;
  for (std::size_t i = 0; i < sampler.size(); ++i) {
    const auto x = sampler.point(i);
    const double mdot = mdot_at(x[0]);
    mdot_max = std::max(mdot_max, mdot);
    Matrix expected = Matrix::Zero(4, 4);
    expected(0, 0) = -2.0 / x[1] * mdot;
    lie_err = std::max(lie_err, (lie_derivative_metric(*chart, xi, x) - expected).cwiseAbs().maxCoeff());
  }
  const NullConeReport cone = null_cone_nonneg(*chart, xi, sampler, ctx.opts.check);

  // phi_s is DP+ iff M(t + s) <= M(t) at every sampled t. Differences in
  // (0, 1e-6] sit inside the numerical band and accept either outcome.
  constexpr double kBand = 1e-6;
  Json per_s = Json::array();
  bool steps_ok = true;
  std::vector<bool> expected_hold;
  for (const auto& step : sub.steps) {
    double dm = -kInf;
    for (std::size_t i = 0; i < sampler.size(); ++i) {
      const double t = sampler.point(i)[0];
      dm = std::max(dm, m_at(t + step.s) - m_at(t));
    }
    const bool ambiguous = dm > 0.0 && dm <= kBand;
    const bool hold = ambiguous ? step.holds : dm <= 0.0;
    expected_hold.push_back(hold);
    steps_ok = steps_ok && (ambiguous || hold == step.holds);
    per_s.push_back({{"s", step.s}, {"max_mass_increase", dm}, {"holds", hold}});
  }
  std::size_t zero = 0;
  for (std::size_t i = 0; i < sub.steps.size(); ++i)
    if (sub.steps[i].s == 0.0) zero = i;
  std::size_t lo = zero, hi = zero;
  while (lo > 0 && expected_hold[lo - 1]) --lo;
  while (hi + 1 < expected_hold.size() && expected_hold[hi + 1]) ++hi;

  const bool cone_expected = mdot_max <= 0.0;
  const bool cone_ok = (mdot_max > 0.0 && mdot_max <= kBand) || cone.nonnegative == cone_expected;

  Outcome o;
  o.result["submonoid"] = to_json(sub);
  Json gen = Json::array();
  for (const auto& c : xi.components) gen.push_back(to_string(c));
  o.result["generator"] = gen;
  o.result["lie_derivative"] = {{"max_abs_error", lie_err}, {"samples", sampler.size()}};
  o.result["null_cone"] = to_json(cone);
  o.result["mass"] = {{"max_mass_rate", mdot_max}, {"non_increasing", mdot_max <= 0.0}};
  o.expectation["interval"] = Json::array({sub.steps[lo].s, sub.steps[hi].s});
  o.expectation["steps"] = per_s;
  o.expectation["lie_derivative_tolerance"] = 1e-9;
  o.expectation["null_cone_nonnegative"] = cone_expected;
  o.met = steps_ok && lie_err < 1e-9 && cone_ok && cone.error.empty();
  o.verdict_exit = kExitHolds;
  return o;
}

// --- Example 3: flat FRW, user-supplied candidate map ------------------------

Outcome frw_candidate(Context& ctx) {
  auto p = scenario_params(ctx, "frw_candidate", {{"gamma", "1/3"}, {"C", "1"}});
  if (!ctx.opts.map_file) throw CatalogError("frw_candidate needs a candidate map file (--map)");
  auto w = ctx.chart("source", builtin("frw_flat", {{"gamma", p.at("gamma")}, {"C", p.at("C")}}));
  auto target = ctx.chart("target", resolve_spacetime(ctx.opts.target.value_or("minkowski_spherical")));
  const std::string text = read_file(*ctx.opts.map_file);
  ctx.inputs.push_back({{"role", "map"}, {"name", *ctx.opts.map_file}, {"fnv1a", fnv1a_hex(text)}});
  const BoundMap map(parse_map(text), w, target);
  const RegionSampler sampler = w->sampler(ctx.opts.sampler);
  const RelationReport r = check_proper_causal(map, sampler, ctx.opts.check);

  const double gamma = num(p, "gamma");
  Outcome o;
  o.result = to_json(r);
  o.result["metadata"] = {
      {"gamma", gamma},
      {"scale_factor_exponent", 2.0 / (3.0 * (1.0 + gamma))},
      {"claimed_equivalent",
       std::abs(gamma + 1.0 / 3.0) < 1e-12 ? "whole Minkowski spacetime" : "steady state region of de Sitter"},
      {"asserted", false}};
  o.verdict_exit = exit_code(r.verdict);
  return o;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> builtin_names() {
  return {"minkowski", "minkowski_spherical", "einstein_static", "de_sitter",
          "schwarzschild_ext", "frw_flat", "steady_state", "vaidya"};
}

double parse_number(const std::string& key, const std::string& text) {
  try {
    const Expr e = parse_expr(text, std::vector<std::string>{});
    const double v = eval(e, std::span<const double>{});
    if (!std::isfinite(v)) throw CatalogError("parameter '" + key + "' is not finite");
    return v;
  } catch (const ExprError& ex) {
    throw CatalogError("parameter '" + key + "': " + ex.what());
  }
}

SpacetimeDef builtin(const std::string& name, const ParamOverrides& params) {
  const auto p = merge("builtin '" + name + "'", builtin_defaults(name), params);
  auto number = [&](const std::string& key) { return parse_number(key, p.at(key)); };

  if (name == "minkowski") {
    SpacetimeDef d = skeleton(name, {"t", "x", "y", "z"});
    set_diagonal(d, {"1", "-1", "-1", "-1"});
    return d;
  }
  if (name == "minkowski_spherical") {
    const double a = number("a");
    require(a >= 0.0, "minkowski_spherical: a must be >= 0");
    SpacetimeDef d = skeleton(name, {"T", "R", "Th", "Ph"});
    d.params = {{"a", a}};
    d.domain[1] = {a, kInf};
    angular_domain(d, 2);
    set_diagonal(d, {"1", "-1", "-R^2", "-R^2*sin(Th)^2"});
    return d;
  }
  if (name == "einstein_static") {
    const double a = number("a");
    require(a > 0.0, "einstein_static: a must be > 0");
    SpacetimeDef d = skeleton(name, {"t", "chi", "th", "ph"});
    d.params = {{"a", a}};
    d.domain[1] = {0.0, kPi};
    angular_domain(d, 2);
    set_diagonal(d, {"1", "-a^2", "-a^2*sin(chi)^2", "-a^2*sin(chi)^2*sin(th)^2"});
    return d;
  }
  if (name == "de_sitter") {
    const double alpha = number("alpha");
    require(alpha > 0.0, "de_sitter: alpha must be > 0");
    SpacetimeDef d = skeleton(name, {"tb", "chib", "thb", "phb"});
    d.params = {{"alpha", alpha}};
    d.domain[1] = {0.0, kPi};
    angular_domain(d, 2);
    const std::string s = "alpha^2*cosh(tb/alpha)^2";
    set_diagonal(d, {"1", "-" + s, "-" + s + "*sin(chib)^2", "-" + s + "*sin(chib)^2*sin(thb)^2"});
    return d;
  }
  if (name == "schwarzschild_ext") {
    const double m = number("M"), c = number("c");
    require(m > 0.0, "schwarzschild_ext: M must be > 0");
    require(c >= 2.0 * m, "schwarzschild_ext: c must be >= 2M");
    SpacetimeDef d = skeleton(name, {"t", "r", "th", "ph"});
    d.params = {{"M", m}, {"c", c}};
    d.domain[1] = {c, kInf};
    angular_domain(d, 2);
    set_diagonal(d, {"1 - 2*M/r", "-1/(1 - 2*M/r)", "-r^2", "-r^2*sin(th)^2"});
    return d;
  }
  if (name == "frw_flat") {
    const double gamma = number("gamma"), c = number("C");
    require(gamma > -1.0 && gamma < 1.0, "frw_flat: gamma must lie in (-1, 1)");
    require(c > 0.0, "frw_flat: C must be > 0");
    SpacetimeDef d = skeleton(name, {"t", "chi", "th", "ph"});
    d.params = {{"gamma", gamma}, {"C", c}};
    d.domain[0] = {0.0, kInf};
    d.domain[1] = {0.0, kInf};
    angular_domain(d, 2);
    const std::string a2 = "C^2*t^(4/(3*(1 + gamma)))";
    set_diagonal(d, {"1", "-" + a2, "-" + a2 + "*chi^2", "-" + a2 + "*chi^2*sin(th)^2"});
    return d;
  }
  if (name == "steady_state") {
    const double alpha = number("alpha");
    require(alpha > 0.0, "steady_state: alpha must be > 0");
    SpacetimeDef d = skeleton(name, {"t", "x", "y", "z"});
    d.params = {{"alpha", alpha}};
    const std::string s = "-exp(2*t/alpha)";
    set_diagonal(d, {"1", s, s, s});
    return d;
  }
  // vaidya: M is an expression in t and is inlined into g_tt.
  const std::string mass = p.at("M");
  try {
    (void)parse_expr(mass, std::vector<std::string>{"t"});
  } catch (const ExprError& ex) {
    throw CatalogError(std::string("vaidya: M must be an expression in t: ") + ex.what());
  }
  const double eps = number("eps");
  require(eps > 0.0, "vaidya: eps must be > 0");
  SpacetimeDef d = skeleton(name, {"t", "r", "th", "ph"});
  d.params = {{"eps", eps}};
  d.domain[1] = {0.0, kInf};
  d.window[1] = Interval{0.1, 20.0};
  angular_domain(d, 2);
  d.metric[{0, 0}] = "1 - 2*(" + mass + ")/r";
  d.metric[{1, 0}] = "-1";
  d.metric[{2, 2}] = "-r^2";
  d.metric[{3, 3}] = "-r^2*sin(th)^2";
  // -d/dr is future null; the eps d/dt tilt makes it timelike.
  d.orientation = {"eps", "-1", "0", "0"};
  return d;
}

void validate_chart(const Chart& chart, std::size_t count) {
  SamplerConfig config;
  config.count = count;
  const RegionSampler sampler = chart.sampler(config);
  for (std::size_t i = 0; i < sampler.size(); ++i) {
    const auto x = sampler.point(i);
    try {
      (void)chart.point_at(x);
    } catch (const std::exception& e) {
      std::string at;
      for (double v : x) at += (at.empty() ? "" : ", ") + fmt(v);
      throw CatalogError("chart '" + chart.name() + "' fails validation at (" + at + "): " + e.what());
    }
  }
}

SpacetimeDef resolve_spacetime(const std::string& arg, const ParamOverrides& params,
                               std::vector<std::string>* consumed) {
  const auto names = builtin_names();
  if (std::find(names.begin(), names.end(), arg) != names.end()) {
    if (!consumed) return builtin(arg, params);
    ParamOverrides known;
    for (const auto& [k, v] : builtin_defaults(arg))
      if (auto it = params.find(k); it != params.end()) {
        known.insert(*it);
        consumed->push_back(k);
      }
    return builtin(arg, known);
  }
  std::error_code ec;
  if (!std::filesystem::is_regular_file(arg, ec))
    throw CatalogError("'" + arg + "' is neither a builtin spacetime nor a readable file");
  SpacetimeDef def = parse_spacetime(read_file(arg));
  for (const auto& [k, v] : params) {
    const bool known = std::any_of(def.params.begin(), def.params.end(), [&](const auto& p) { return p.first == k; });
    if (!known && consumed) continue;
    def.set_param(k, parse_number(k, v));
    if (consumed) consumed->push_back(k);
  }
  return def;
}

MapDef desitter_to_einstein_map(double b) {
  MapDef m;
  m.name = "desitter_to_einstein";
  m.source = "de_sitter";
  m.target = "einstein_static";
  m.params = {{"b", b}};
  m.exprs = {{"t", "b*tb"}, {"chi", "chib"}, {"th", "thb"}, {"ph", "phb"}};
  return m;
}

MapDef minkowski_to_schwarzschild_map(double a, double b, double c) {
  MapDef m;
  m.name = "minkowski_to_schwarzschild";
  m.source = "minkowski_spherical";
  m.target = "schwarzschild_ext";
  m.params = {{"a", a}, {"b", b}, {"c", c}};
  m.exprs = {{"t", "b*T"}, {"r", "R - a + c"}, {"th", "Th"}, {"ph", "Ph"}};
  return m;
}

MapDef schwarzschild_to_minkowski_map() {
  MapDef m;
  m.name = "schwarzschild_to_minkowski";
  m.source = "schwarzschild_ext";
  m.target = "minkowski_spherical";
  m.exprs = {{"T", "t"}, {"R", "r"}, {"Th", "th"}, {"Ph", "ph"}};
  return m;
}

MapDef minkowski_dilation_map(double k) {
  MapDef m;
  m.name = "minkowski_dilation";
  m.source = m.target = "minkowski";
  m.params = {{"k", k}};
  m.exprs = {{"t", "k*t"}, {"x", "k*x"}, {"y", "k*y"}, {"z", "k*z"}};
  return m;
}

MapDef time_translation_map(const SpacetimeDef& chart, double shift) {
  MapDef m;
  m.name = chart.name + "_time_translation";
  m.source = m.target = chart.name;
  m.params = {{"shift", shift}};
  for (std::size_t i = 0; i < chart.coords.size(); ++i)
    m.exprs.emplace_back(chart.coords[i], i == 0 ? chart.coords[0] + " + shift" : chart.coords[i]);
  return m;
}

FlowDef vaidya_time_flow() {
  FlowDef f;
  f.name = "vaidya_time_translation";
  f.spacetime = "vaidya";
  f.exprs = {{"t", "t + s"}};
  f.s_range = {-2.0, 2.0};
  return f;
}

std::vector<std::string> scenario_names() {
  return {"desitter_to_einstein", "minkowski_to_schwarzschild", "schwarzschild_to_minkowski",
          "schwarzschild_iso",    "frw_candidate",              "vaidya_flow"};
}

ScenarioResult run_scenario(const std::string& name, const ScenarioOptions& options) {
  using Runner = Outcome (*)(Context&);
  Runner run = nullptr;
  if (name == "desitter_to_einstein") run = desitter_to_einstein;
  else if (name == "minkowski_to_schwarzschild") run = minkowski_to_schwarzschild;
  else if (name == "schwarzschild_to_minkowski") run = schwarzschild_to_minkowski;
  else if (name == "schwarzschild_iso") run = schwarzschild_iso;
  else if (name == "vaidya_flow") run = vaidya_flow;
  else if (name == "frw_candidate") run = frw_candidate;
  else throw CatalogError("unknown scenario '" + name + "'");

  const auto start = std::chrono::steady_clock::now();
  Context ctx{options};
  const Outcome o = run(ctx);

  ScenarioResult out;
  out.expectation_met = o.met;
  out.exit_code = o.met == std::optional<bool>(false) ? int(kExitInternal) : o.verdict_exit;

  Json& rep = out.report;
  rep = report_header("scenario");
  rep["scenario"] = name;
  rep["params"] = ctx.params;
  rep["inputs"] = ctx.inputs;
  rep["sampler"] = to_json(options.sampler);
  rep["threads"] = options.check.threads;
  rep["tolerances"] = to_json(options.check);
  rep["result"] = o.result;
  if (!o.expectation.is_null()) {
    rep["expectation"] = o.expectation;
    rep["expectation"]["met"] = *o.met;
  }
  rep["exit_code"] = out.exit_code;
  if (options.timing) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    rep["timing"] = {{"wall_seconds", dt.count()}};
  }
  return out;
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace causal
