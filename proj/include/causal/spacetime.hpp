#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "causal/dp.hpp"
#include "causal/expr.hpp"
#include "causal/lorentz.hpp"
#include "causal/sampler.hpp"

namespace causal {

/// Named single-chart spacetime, as written in a definition file.
struct SpacetimeDef {
  std::string name;
  std::vector<std::string> coords;
  /// Open coordinate intervals; (-inf, inf) when not declared.
  std::vector<Interval> domain;
  /// Optional closed sampling windows (tighter than the domain).
  std::vector<std::optional<Interval>> window;
  std::vector<std::pair<std::string, double>> params;
  /// Lower-triangle components keyed by (i, j), i >= j; missing entries are 0.
  std::map<std::pair<int, int>, std::string> metric;
  /// Future-pointing causal vector field, one expression per coordinate.
  std::vector<std::string> orientation;

  std::size_t dim() const { return coords.size(); }
  void set_param(const std::string& id, double value);
};

/// Diffeomorphism given as target coordinates in terms of source coordinates.
struct MapDef {
  std::string name;
  std::string source;
  std::string target;
  /// (target coordinate, expression in source coordinates and params)
  std::vector<std::pair<std::string, std::string>> exprs;
  std::vector<std::pair<std::string, double>> params;
};

/// One-parameter family of self-maps of a spacetime.
struct FlowDef {
  std::string name;
  std::string spacetime;
  std::string s_symbol = "s";
  /// (coordinate, expression in coordinates, s and params)
  std::vector<std::pair<std::string, std::string>> exprs;
  std::vector<std::pair<std::string, double>> params;
  Interval s_range{-1.0, 1.0};
};

/// Definition-file problem; line is 1-based (0 when not tied to a line).
class DefinitionError : public std::runtime_error {
 public:
  DefinitionError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Point outside the declared open domain of a chart.
class DomainViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SpacetimeDef parse_spacetime(std::string_view text);
MapDef parse_map(std::string_view text);
FlowDef parse_flow(std::string_view text);

std::string to_text(const SpacetimeDef& def);
std::string to_text(const MapDef& def);
std::string to_text(const FlowDef& def);

std::string read_file(const std::string& path);

/// Metric and its coordinate partials at a point: dg[c] = d_c g.
struct MetricJet {
  Matrix g;
  std::vector<Matrix> dg;
};

/// Compiled spacetime: expressions parsed against coords ++ params.
class Chart {
 public:
  explicit Chart(SpacetimeDef def);

  const SpacetimeDef& def() const { return def_; }
  const std::string& name() const { return def_.name; }
  std::size_t dim() const { return def_.dim(); }
  const std::shared_ptr<const SymbolList>& symbols() const { return symbols_; }

  bool in_domain(std::span<const double> x) const;
  /// Coordinates followed by parameter values.
  std::vector<double> bind(std::span<const double> x) const;

  Matrix metric_at(std::span<const double> x) const;
  MetricJet metric_jet(std::span<const double> x) const;
  Vector orientation_at(std::span<const double> x) const;
  /// Validated metric and frame; throws on signature or orientation problems.
  OrientedPoint point_at(std::span<const double> x, double tol_null = kTolNull) const;

  RegionSampler sampler(const SamplerConfig& config) const;

 private:
  SpacetimeDef def_;
  std::shared_ptr<const SymbolList> symbols_;
  std::vector<Expr> metric_;  // row-major full n x n (shared exprs across the diagonal)
  std::vector<Expr> orientation_;
};

/// MapDef compiled against its source and target charts.
class BoundMap {
 public:
  BoundMap(MapDef def, std::shared_ptr<const Chart> source, std::shared_ptr<const Chart> target);

  const MapDef& def() const { return def_; }
  const Chart& source() const { return *source_; }
  const Chart& target() const { return *target_; }
  const std::shared_ptr<const Chart>& source_ptr() const { return source_; }
  const std::shared_ptr<const Chart>& target_ptr() const { return target_; }
  /// Component expressions ordered by target coordinate, over
  /// source coords ++ map params.
  const std::vector<Expr>& exprs() const { return exprs_; }
  std::vector<double> bind(std::span<const double> x) const;

  std::vector<double> image(std::span<const double> x) const;
  /// d(target a)/d(source b); throws SingularJacobian.
  Matrix jacobian(std::span<const double> x) const;
  /// J^T G_target(phi(x)) J; throws DomainViolation when x or phi(x) leaves
  /// its domain.
  SymTensor2 pullback(std::span<const double> x) const;

 private:
  MapDef def_;
  std::shared_ptr<const Chart> source_;
  std::shared_ptr<const Chart> target_;
  std::vector<Expr> exprs_;
  std::vector<double> param_values_;
};

inline SymTensor2 pullback_metric(const BoundMap& map, std::span<const double> x) { return map.pullback(x); }

/// Identity map def between two charts of equal dimension (coordinates
/// matched by position).
MapDef identity_map(const SpacetimeDef& source, const SpacetimeDef& target);

}  // namespace causal
