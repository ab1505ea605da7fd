#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "causal/relate.hpp"

namespace causal {

/// Vector field given by expressions over coords ++ params.
struct GeneratorField {
  std::vector<Expr> components;
  std::vector<double> param_values;

  Vector at(std::span<const double> x) const;
  /// Value and Jacobian d_b xi^a at x.
  std::pair<Vector, Matrix> jet(std::span<const double> x) const;

  /// Parses component expressions against `coords` ++ param names.
  static GeneratorField parse(const std::vector<std::string>& components, const std::vector<std::string>& coords,
                              const std::vector<std::pair<std::string, double>>& params = {});
};

/// FlowDef compiled against its chart: expressions over coords ++ [s] ++ params.
class BoundFlow {
 public:
  BoundFlow(FlowDef def, std::shared_ptr<const Chart> chart);

  const FlowDef& def() const { return def_; }
  const Chart& chart() const { return *chart_; }
  const std::shared_ptr<const Chart>& chart_ptr() const { return chart_; }

  std::vector<double> apply(std::span<const double> x, double s) const;
  /// d phi_s / ds at s = 0 by dual seeding on s.
  Vector generator(std::span<const double> x) const;
  /// Closed-form generator: symbolic d/ds at s = 0.
  GeneratorField generator_field() const;
  /// phi_s as a self-map with s folded in.
  MapDef at(double s) const;
  /// max |phi_0(x) - x| over the sampler.
  double identity_residual(const RegionSampler& sampler) const;

 private:
  FlowDef def_;
  std::shared_ptr<const Chart> chart_;
  std::shared_ptr<const SymbolList> symbols_;
  std::vector<Expr> exprs_;
  std::vector<double> param_values_;
};

inline Vector generator(const BoundFlow& flow, std::span<const double> x) { return flow.generator(x); }

/// (L_xi g)_ab = xi^c d_c g_ab + g_cb d_a xi^c + g_ac d_b xi^c.
Matrix lie_derivative_metric(const Chart& chart, const GeneratorField& xi, std::span<const double> x);

struct SubmonoidStep {
  double s = 0.0;
  Verdict verdict = Verdict::Error;
  bool holds = false;
  double min_margin = 0.0;
  std::string error;
};

struct SubmonoidReport {
  std::vector<SubmonoidStep> steps;  // sorted by s
  /// Largest contiguous run of holding grid values containing s = 0.
  Interval interval{0.0, 0.0};
  bool group = false;
  /// Set when `group`: every holding phi_s was conformal at every sample.
  std::optional<bool> conformal;
  double identity_residual = 0.0;
};

SubmonoidReport check_submonoid(const BoundFlow& flow, std::vector<double> s_grid, const RegionSampler& sampler,
                                const CheckOptions& opts = {});

struct NullConeWitness {
  std::size_t sample = 0;
  std::vector<double> point;
  Vector k;
  double value = 0.0;
};

struct NullConeReport {
  bool nonnegative = true;
  double min_margin = 0.0;
  std::vector<double> min_point;
  std::size_t samples_checked = 0;
  std::vector<NullConeWitness> witnesses;
  std::string error;
};

/// Minimum of (L_xi g)(k, k) over future null k (unit frame time part).
NullConeReport null_cone_nonneg(const Chart& chart, const GeneratorField& xi, const RegionSampler& sampler,
                                const CheckOptions& opts = {});

}  // namespace causal
