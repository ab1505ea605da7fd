#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "causal/report.hpp"

#include "causal/flows.hpp"
#include "causal/relate.hpp"

namespace causal {

using ParamOverrides = std::map<std::string, std::string>;

/// Thrown for unknown catalog names and out-of-range parameters.
class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names accepted by builtin().
std::vector<std::string> builtin_names();

/// Built-in chart. Parameters are given as text so that Vaidya's mass
/// function can be an expression in t; unknown names are rejected.
///
///   minkowski            (t, x, y, z)
///   minkowski_spherical  (T, R, Th, Ph), R > a           a = 0
///   einstein_static      (t, chi, th, ph)                a = 1
///   de_sitter            (tb, chib, thb, phb)            alpha = 1
///   schwarzschild_ext    (t, r, th, ph), r > c >= 2M     M = 1, c = 3
///   frw_flat             (t, chi, th, ph), t > 0         gamma = 1/3, C = 1
///   steady_state         (t, x, y, z)                    alpha = 1
///   vaidya               (t, r, th, ph)                  M = "3 - tanh(t)", eps = 1e-3
SpacetimeDef builtin(const std::string& name, const ParamOverrides& params = {});

/// Validates signature and orientation at the first `count` Halton points
/// of the chart; throws CatalogError naming the first failing point.
void validate_chart(const Chart& chart, std::size_t count = 1000);

/// A builtin name or a definition file path. `params` override builtin
/// parameters, or file parameters (numeric only) for files. With `consumed`
/// set, names the chart does not know are skipped and the used ones recorded.
SpacetimeDef resolve_spacetime(const std::string& arg, const ParamOverrides& params = {},
                               std::vector<std::string>* consumed = nullptr);

/// Numeric parameter text such as "1/3" or "2*pi".
double parse_number(const std::string& key, const std::string& text);

/// Built-in maps between the charts above.
MapDef desitter_to_einstein_map(double b);
MapDef minkowski_to_schwarzschild_map(double a, double b, double c);
MapDef schwarzschild_to_minkowski_map();
MapDef minkowski_dilation_map(double k);
MapDef time_translation_map(const SpacetimeDef& chart, double shift);

/// Vaidya time translation t -> t + s.
FlowDef vaidya_time_flow();

std::vector<std::string> scenario_names();

struct ScenarioOptions {
  SamplerConfig sampler;
  CheckOptions check;
  ParamOverrides params;
  /// frw_candidate: candidate map file and target chart (builtin name or file).
  std::optional<std::string> map_file;
  std::optional<std::string> target;
  bool timing = false;
};

struct ScenarioResult {
  Json report;
  int exit_code = 3;
  std::optional<bool> expectation_met;
};

/// Exit codes: 0 holds / isomorphic, 1 violated / not, 2 input error,
/// 3 internal error or disagreement with the analytic expectation.
ScenarioResult run_scenario(const std::string& name, const ScenarioOptions& options);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace causal
