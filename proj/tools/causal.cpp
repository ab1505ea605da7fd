// causal: command-line front end for proper causal relation checks.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "causal/catalog.hpp"
#include "causal/jacobian.hpp"
#include "causal/parallel.hpp"
#include "causal/report.hpp"

using namespace causal;

namespace {

struct Common {
  std::size_t samples = 4096;
  std::uint64_t seed = 0;
  double tol = kTolDp;
  double margin = 1e-3;
  std::string json_path;
  unsigned threads = 0;
  std::vector<std::string> params;
  bool grid = false;
  bool timing = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--samples", c.samples, "sample count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "Halton sequence offset");
  cmd->add_option("--tol", c.tol, "dominant-property tolerance")->check(CLI::NonNegativeNumber);
  cmd->add_option("--margin", c.margin, "distance kept from open domain bounds")->check(CLI::NonNegativeNumber);
  cmd->add_option("--json", c.json_path, "write the JSON report here ('-' for stdout)");
  cmd->add_option("--threads", c.threads, "worker threads (default: CAUSAL_THREADS or 1)");
  cmd->add_option("--param", c.params, "parameter override key=value (repeatable)");
  cmd->add_flag("--grid", c.grid, "use a tensor grid instead of Halton points");
  cmd->add_flag("--timing", c.timing, "include wall time in the report");
}

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ParamOverrides parse_params(const std::vector<std::string>& items) {
  ParamOverrides out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + item + "'");
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

SamplerConfig sampler_config(const Common& c) {
  SamplerConfig s;
  s.count = c.samples;
  s.seed = c.seed;
  s.margin = c.margin;
  s.scheme = c.grid ? SampleScheme::Grid : SampleScheme::Halton;
  return s;
}

CheckOptions check_options(const Common& c) {
  CheckOptions o;
  o.tol_dp = c.tol;
  o.threads = c.threads > 0 ? c.threads : default_threads();
  return o;
}

// Spacetime operands, map files, and params shared between them.
struct Loaded {
  std::vector<std::shared_ptr<const Chart>> charts;
  Json inputs = Json::array();
  std::vector<std::string> consumed;
};

std::shared_ptr<const Chart> load_chart(Loaded& l, const std::string& role, const std::string& arg,
                                        const ParamOverrides& params) {
  const SpacetimeDef def = resolve_spacetime(arg, params, &l.consumed);
  l.inputs.push_back({{"role", role}, {"name", def.name}, {"fnv1a", fnv1a_hex(to_text(def))}});
  auto chart = std::make_shared<const Chart>(def);
  l.charts.push_back(chart);
  return chart;
}

MapDef load_map(Loaded& l, const std::string& role, const std::string& arg, const Chart& source, const Chart& target,
                const ParamOverrides& params) {
  MapDef def;
  if (arg == "identity") {
    def = identity_map(source.def(), target.def());
  } else {
    def = parse_map(read_file(arg));
    for (auto& [k, v] : def.params)
      if (auto it = params.find(k); it != params.end()) {
        v = parse_number(k, it->second);
        l.consumed.push_back(k);
      }
  }
  l.inputs.push_back({{"role", role}, {"name", def.name.empty() ? arg : def.name}, {"fnv1a", fnv1a_hex(to_text(def))}});
  return def;
}

void require_consumed(const Loaded& l, const ParamOverrides& params) {
  for (const auto& [k, v] : params)
    if (std::find(l.consumed.begin(), l.consumed.end(), k) == l.consumed.end())
      throw UsageError("no input declares parameter '" + k + "'");
}

Json base_report(const std::string& command, const Common& c, const Loaded& l, const ParamOverrides& params) {
  Json rep = report_header(command);
  Json p = Json::object();
  for (const auto& [k, v] : params) p[k] = v;
  rep["params"] = p;
  rep["inputs"] = l.inputs;
  rep["sampler"] = to_json(sampler_config(c));
  const CheckOptions o = check_options(c);
  rep["threads"] = o.threads;
  rep["tolerances"] = to_json(o);
  return rep;
}

void emit(const Common& c, Json& rep, int code, std::chrono::steady_clock::time_point start) {
  rep["exit_code"] = code;
  if (c.timing) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    rep["timing"] = {{"wall_seconds", dt.count()}};
  }
  if (c.json_path.empty()) return;
  const std::string text = rep.dump(2) + "\n";
  if (c.json_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(c.json_path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + c.json_path + "'");
  out << text;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void print_relation(const std::string& label, const RelationReport& r) {
  std::cerr << label << to_string(r.verdict) << "  samples=" << r.samples_checked << "  min_margin=" << num(r.min_margin);
  if (r.boundary_samples) std::cerr << "  boundary=" << r.boundary_samples;
  std::cerr << "\n";
  if (!r.error.empty()) std::cerr << "  error: " << r.error << "\n";
  for (std::size_t i = 0; i < r.witnesses.size() && i < 3; ++i) {
    const auto& w = r.witnesses[i];
    std::cerr << "  witness #" << w.sample << " at (";
    for (std::size_t k = 0; k < w.point.size(); ++k) std::cerr << (k ? ", " : "") << num(w.point[k]);
    std::cerr << ")  margin=" << num(w.margin) << "\n";
  }
  if (r.conformal.everywhere)
    std::cerr << "  conformal: lambda in [" << num(r.conformal.min) << ", " << num(r.conformal.max) << "]\n";
}

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> x;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw UsageError("--point: '" + item + "' is not a number");
    }
  }
  return x;
}

std::vector<double> parse_s_grid(const std::string& text, const Interval& fallback) {
  double lo = fallback.lo, hi = fallback.hi, step = (hi - lo) / 8.0;
  if (!text.empty()) {
    const auto c1 = text.find(':'), c2 = text.rfind(':');
    if (c1 == std::string::npos || c1 == c2) throw UsageError("--s-grid expects lo:step:hi");
    try {
      lo = std::stod(text.substr(0, c1));
      step = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
      hi = std::stod(text.substr(c2 + 1));
    } catch (const std::logic_error&) {
      throw UsageError("--s-grid expects lo:step:hi");
    }
  }
  if (!(step > 0.0) || !(lo <= hi)) throw UsageError("--s-grid needs lo <= hi and step > 0");
  std::vector<double> grid;
  const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) grid.push_back(lo + static_cast<double>(i) * step);
  return grid;
}

int run_check(const Common& c, const std::string& v, const std::string& w, const std::string& m) {
  const auto start = std::chrono::steady_clock::now();
  const ParamOverrides params = parse_params(c.params);
  Loaded l;
  auto vc = load_chart(l, "source", v, params);
  auto wc = load_chart(l, "target", w, params);
  const BoundMap map(load_map(l, "map", m, *vc, *wc, params), vc, wc);
  require_consumed(l, params);
  const RelationReport r = check_proper_causal(map, vc->sampler(sampler_config(c)), check_options(c));
  print_relation("", r);
  Json rep = base_report("check", c, l, params);
  rep["result"] = to_json(r);
  const int code = exit_code(r.verdict);
  emit(c, rep, code, start);
  return code;
}

int run_iso(const Common& c, const std::string& v, const std::string& w, const std::string& f, const std::string& b) {
  const auto start = std::chrono::steady_clock::now();
  const ParamOverrides params = parse_params(c.params);
  Loaded l;
  auto vc = load_chart(l, "source", v, params);
  auto wc = load_chart(l, "target", w, params);
  const BoundMap fwd(load_map(l, "forward", f, *vc, *wc, params), vc, wc);
  const BoundMap bwd(load_map(l, "backward", b, *wc, *vc, params), wc, vc);
  require_consumed(l, params);
  const SamplerConfig sc = sampler_config(c);
  const IsoReport r = check_isomorphism(fwd, bwd, vc->sampler(sc), wc->sampler(sc), check_options(c));
  std::cerr << to_string(r.verdict) << (r.time_reversed ? "  (time reversed)" : "")
            << (r.inverse_verified ? "  inverse verified" : "") << "\n";
  print_relation("  forward:  ", r.forward);
  print_relation("  backward: ", r.backward);
  Json rep = base_report("iso", c, l, params);
  rep["result"] = to_json(r);
  const int code = exit_code(r.verdict);
  emit(c, rep, code, start);
  return code;
}

int run_cnd(const Common& c, const std::string& v, const std::string& w, const std::string& m,
            const std::string& point) {
  const auto start = std::chrono::steady_clock::now();
  const ParamOverrides params = parse_params(c.params);
  Loaded l;
  auto vc = load_chart(l, "source", v, params);
  auto wc = load_chart(l, "target", w, params);
  const BoundMap map(load_map(l, "map", m, *vc, *wc, params), vc, wc);
  require_consumed(l, params);
  const auto x = parse_point(point);
  if (x.size() != vc->dim()) throw UsageError("--point needs " + std::to_string(vc->dim()) + " coordinates");
  const CanonicalNullDirections d = canonical_null_directions(map, x, check_options(c));
  std::cerr << d.directions.size() << " canonical null direction(s)" << (d.degenerate ? ", degenerate spectrum" : "")
            << (d.family ? ", continuous family" : "") << "\n";
  Json rep = base_report("cnd", c, l, params);
  rep["point"] = x;
  rep["result"] = to_json(d);
  emit(c, rep, kExitHolds, start);
  return kExitHolds;
}

int run_flow(const Common& c, const std::string& v, const std::string& flowfile, const std::string& s_grid) {
  const auto start = std::chrono::steady_clock::now();
  const ParamOverrides params = parse_params(c.params);
  Loaded l;
  auto vc = load_chart(l, "spacetime", v, params);
  const std::string text = read_file(flowfile);
  FlowDef def = parse_flow(text);
  for (auto& [k, val] : def.params)
    if (auto it = params.find(k); it != params.end()) {
      val = parse_number(k, it->second);
      l.consumed.push_back(k);
    }
  require_consumed(l, params);
  l.inputs.push_back({{"role", "flow"}, {"name", def.name.empty() ? flowfile : def.name}, {"fnv1a", fnv1a_hex(to_text(def))}});
  const BoundFlow flow(def, vc);
  const RegionSampler sampler = vc->sampler(sampler_config(c));
  const CheckOptions opts = check_options(c);
  const SubmonoidReport sub = check_submonoid(flow, parse_s_grid(s_grid, def.s_range), sampler, opts);
  const NullConeReport cone = null_cone_nonneg(*vc, flow.generator_field(), sampler, opts);
  std::cerr << "causal for s in [" << num(sub.interval.lo) << ", " << num(sub.interval.hi) << "]"
            << (sub.group ? "  group" : "") << (sub.conformal.value_or(false) ? "  conformal" : "") << "\n";
  std::cerr << "null cone condition: " << (cone.nonnegative ? "nonnegative" : "violated")
            << "  min=" << num(cone.min_margin) << "\n";
  Json rep = base_report("flow", c, l, params);
  rep["result"] = {{"submonoid", to_json(sub)}, {"null_cone", to_json(cone)}};
  const int code = sub.interval.lo < 0.0 || sub.interval.hi > 0.0 ? kExitHolds : kExitViolated;
  emit(c, rep, code, start);
  return code;
}

int run_scenario_cmd(const Common& c, const std::string& name, const std::string& map_file, const std::string& target) {
  ScenarioOptions so;
  so.sampler = sampler_config(c);
  so.check = check_options(c);
  so.params = parse_params(c.params);
  if (!map_file.empty()) so.map_file = map_file;
  if (!target.empty()) so.target = target;
  so.timing = c.timing;
  ScenarioResult r = run_scenario(name, so);
  const Json& res = r.report["result"];
  if (res.contains("verdict")) std::cerr << res["verdict"].get<std::string>();
  if (res.contains("submonoid")) {
    const auto& iv = res["submonoid"]["interval"];
    std::cerr << "causal for s in [" << num(iv[0].get<double>()) << ", " << num(iv[1].get<double>()) << "]";
  }
  if (r.expectation_met) std::cerr << (*r.expectation_met ? "  (matches expectation)" : "  (DISAGREES with expectation)");
  std::cerr << "\n";
  Common out = c;
  out.timing = false;  // already recorded by the scenario
  emit(out, r.report, r.exit_code, std::chrono::steady_clock::now());
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks proper causal relations between Lorentzian charts."};
  app.require_subcommand(1);
  Common common;

  std::string v, w, m, b, point, flowfile, s_grid, name, map_file, target;

  auto* check = app.add_subcommand("check", "check V <_phi W on sampled points");
  check->add_option("V", v, "source spacetime (builtin name or file)")->required();
  check->add_option("W", w, "target spacetime")->required();
  check->add_option("map", m, "map file or 'identity'")->required();
  add_common(check, common);

  auto* iso = app.add_subcommand("iso", "check causal isomorphism via a forward and a backward map");
  iso->add_option("V", v)->required();
  iso->add_option("W", w)->required();
  iso->add_option("fwd", m, "map V -> W")->required();
  iso->add_option("bwd", b, "map W -> V")->required();
  add_common(iso, common);

  auto* cnd = app.add_subcommand("cnd", "canonical null directions at a point");
  cnd->add_option("V", v)->required();
  cnd->add_option("W", w)->required();
  cnd->add_option("map", m)->required();
  cnd->add_option("--point", point, "source coordinates, comma separated")->required();
  add_common(cnd, common);

  auto* flow = app.add_subcommand("flow", "maximal causal submonoid of a one-parameter family");
  flow->add_option("V", v)->required();
  flow->add_option("flowfile", flowfile)->required();
  flow->add_option("--s-grid", s_grid, "lo:step:hi (default: s_range in 8 steps)");
  add_common(flow, common);

  auto* scen = app.add_subcommand("scenario", "run a built-in scenario");
  scen->add_option("name", name)->required();
  scen->add_option("--map", map_file, "candidate map file (frw_candidate)");
  scen->add_option("--target", target, "target spacetime for frw_candidate");
  add_common(scen, common);

  auto* bi = app.add_subcommand("builtin", "print a built-in spacetime definition (no name: list)");
  bi->add_option("name", name);
  bi->add_option("--param", common.params, "parameter override key=value (repeatable)");

  auto* list = app.add_subcommand("scenarios", "list scenario names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitInput;
  }

  try {
    if (*check) return run_check(common, v, w, m);
    if (*iso) return run_iso(common, v, w, m, b);
    if (*cnd) return run_cnd(common, v, w, m, point);
    if (*flow) return run_flow(common, v, flowfile, s_grid);
    if (*scen) return run_scenario_cmd(common, name, map_file, target);
    if (*bi) {
      if (name.empty()) {
        for (const auto& n : builtin_names()) std::cout << n << "\n";
      } else {
        std::cout << to_text(builtin(name, parse_params(common.params)));
      }
      return 0;
    }
    if (*list) {
      for (const auto& n : scenario_names()) std::cout << n << "\n";
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "causal: " << e.what() << "\n";
    return kExitInput;
  } catch (const CatalogError& e) {
    std::cerr << "causal: " << e.what() << "\n";
    return kExitInput;
  } catch (const DefinitionError& e) {
    std::cerr << "causal: definition error";
    if (e.line()) std::cerr << " (line " << e.line() << ")";
    std::cerr << ": " << e.what() << "\n";
    return kExitInput;
  } catch (const ExprError& e) {
    std::cerr << "causal: expression error: " << e.what() << "\n";
    return kExitInput;
  } catch (const PreconditionError& e) {
    std::cerr << "causal: precondition failed: " << e.what() << "\n";
    return kExitInput;
  } catch (const DomainViolation& e) {
    std::cerr << "causal: " << e.what() << "\n";
    return kExitInput;
  } catch (const SingularJacobian& e) {
    std::cerr << "causal: " << e.what() << "\n";
    return kExitInput;
  } catch (const LorentzError& e) {
    std::cerr << "causal: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "causal: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
