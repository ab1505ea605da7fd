#include "causal/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "causal/jacobian.hpp"
#include "causal/parallel.hpp"

namespace causal {

Vector GeneratorField::at(std::span<const double> x) const {
  std::vector<double> vals(x.begin(), x.end());
  vals.insert(vals.end(), param_values.begin(), param_values.end());
  Vector v(static_cast<Eigen::Index>(components.size()));
  for (std::size_t a = 0; a < components.size(); ++a) v[a] = eval(components[a], vals);
  return v;
}

std::pair<Vector, Matrix> GeneratorField::jet(std::span<const double> x) const {
  std::vector<double> vals(x.begin(), x.end());
  vals.insert(vals.end(), param_values.begin(), param_values.end());
  return {at(x), jacobian(components, vals, x.size())};
}

GeneratorField GeneratorField::parse(const std::vector<std::string>& components, const std::vector<std::string>& coords,
                                     const std::vector<std::pair<std::string, double>>& params) {
  SymbolList syms = coords;
  GeneratorField g;
  for (const auto& [k, v] : params) {
    syms.push_back(k);
    g.param_values.push_back(v);
  }
  auto shared = std::make_shared<const SymbolList>(std::move(syms));
  for (const auto& c : components) g.components.push_back(parse_expr(c, shared));
  return g;
}

BoundFlow::BoundFlow(FlowDef def, std::shared_ptr<const Chart> chart) : def_(std::move(def)), chart_(std::move(chart)) {
  if (!def_.spacetime.empty() && def_.spacetime != chart_->name())
    throw DefinitionError(0, "flow '" + def_.name + "' is defined on '" + def_.spacetime + "', got '" + chart_->name() + "'");
  const auto& coords = chart_->def().coords;
  for (const auto& c : coords)
    if (c == def_.s_symbol) throw DefinitionError(0, "flow parameter '" + def_.s_symbol + "' clashes with a coordinate");
  SymbolList syms = coords;
  syms.push_back(def_.s_symbol);
  for (const auto& [k, v] : def_.params) {
    syms.push_back(k);
    param_values_.push_back(v);
  }
  symbols_ = std::make_shared<const SymbolList>(std::move(syms));

  // Coordinates without an entry are carried along unchanged.
  exprs_.clear();
  for (const auto& c : coords) exprs_.push_back(parse_expr(c, symbols_));
  for (const auto& [coord, text] : def_.exprs) {
    const auto it = std::find(coords.begin(), coords.end(), coord);
    if (it == coords.end()) throw DefinitionError(0, "flow entry for unknown coordinate '" + coord + "'");
    try {
      exprs_[static_cast<std::size_t>(it - coords.begin())] = parse_expr(text, symbols_);
    } catch (const ExprError& ex) {
      throw DefinitionError(0, "flow " + coord + ": " + ex.what());
    }
  }
}

std::vector<double> BoundFlow::apply(std::span<const double> x, double s) const {
  std::vector<double> vals(x.begin(), x.end());
  vals.push_back(s);
  vals.insert(vals.end(), param_values_.begin(), param_values_.end());
  std::vector<double> y(exprs_.size());
  for (std::size_t a = 0; a < exprs_.size(); ++a) y[a] = eval(exprs_[a], vals);
  return y;
}

Vector BoundFlow::generator(std::span<const double> x) const {
  std::vector<Dual> vals;
  for (double v : x) vals.push_back(Dual::constant(v, 1));
  vals.push_back(Dual::variable(0.0, 0, 1));
  for (double v : param_values_) vals.push_back(Dual::constant(v, 1));
  Vector xi(static_cast<Eigen::Index>(exprs_.size()));
  for (std::size_t a = 0; a < exprs_.size(); ++a) xi[a] = eval_dual(exprs_[a], vals).d(0);
  return xi;
}

GeneratorField BoundFlow::generator_field() const {
  const auto& coords = chart_->def().coords;
  SymbolList out_syms = coords;
  for (const auto& [k, v] : def_.params) out_syms.push_back(k);
  auto shared = std::make_shared<const SymbolList>(out_syms);
  std::vector<Expr> repl;
  for (const auto& c : coords) repl.push_back(parse_expr(c, shared));
  repl.push_back(Expr::constant(0.0, shared));
  for (const auto& [k, v] : def_.params) repl.push_back(parse_expr(k, shared));

  GeneratorField g;
  g.param_values = param_values_;
  const std::size_t s_slot = coords.size();
  for (const Expr& e : exprs_) g.components.push_back(substitute(differentiate(e, s_slot), repl));
  return g;
}

MapDef BoundFlow::at(double s) const {
  const auto& coords = chart_->def().coords;
  auto shared = std::make_shared<const SymbolList>(coords);
  std::vector<Expr> repl;
  for (const auto& c : coords) repl.push_back(parse_expr(c, shared));
  repl.push_back(Expr::constant(s, shared));
  for (double v : param_values_) repl.push_back(Expr::constant(v, shared));
  MapDef m;
  m.name = (def_.name.empty() ? std::string("flow") : def_.name) + "@" + std::to_string(s);
  m.source = m.target = chart_->name();
  for (std::size_t a = 0; a < coords.size(); ++a) m.exprs.emplace_back(coords[a], to_string(substitute(exprs_[a], repl)));
  return m;
}

double BoundFlow::identity_residual(const RegionSampler& sampler) const {
  double worst = 0.0;
  for (std::size_t i = 0; i < sampler.size(); ++i) {
    const auto x = sampler.point(i);
    const auto y = apply(x, 0.0);
    for (std::size_t k = 0; k < x.size(); ++k) worst = std::max(worst, std::abs(y[k] - x[k]));
  }
  return worst;
}

Matrix lie_derivative_metric(const Chart& chart, const GeneratorField& xi, std::span<const double> x) {
  const MetricJet jet = chart.metric_jet(x);
  const auto [v, dv] = xi.jet(x);
  const std::size_t n = chart.dim();
  if (static_cast<std::size_t>(v.size()) != n) throw std::invalid_argument("generator has wrong dimension");
  Matrix l = dv.transpose() * jet.g + jet.g * dv;
  for (std::size_t c = 0; c < n; ++c) l += v[static_cast<Eigen::Index>(c)] * jet.dg[c];
  return l;
}

SubmonoidReport check_submonoid(const BoundFlow& flow, std::vector<double> s_grid, const RegionSampler& sampler,
                                const CheckOptions& opts) {
  SubmonoidReport rep;
  rep.identity_residual = flow.identity_residual(sampler);
  if (rep.identity_residual > 1e-10)
    throw PreconditionError("flow is not the identity at s = 0 (residual " + std::to_string(rep.identity_residual) + ")");

  if (std::find(s_grid.begin(), s_grid.end(), 0.0) == s_grid.end()) s_grid.push_back(0.0);
  std::sort(s_grid.begin(), s_grid.end());
  s_grid.erase(std::unique(s_grid.begin(), s_grid.end()), s_grid.end());

  bool all_conformal = true;
  for (double s : s_grid) {
    SubmonoidStep step;
    step.s = s;
    try {
      const BoundMap phi(flow.at(s), flow.chart_ptr(), flow.chart_ptr());
      const RelationReport r = check_proper_causal(phi, sampler, opts);
      step.verdict = r.verdict;
      step.min_margin = r.min_margin;
      step.error = r.error;
      step.holds = r.verdict == Verdict::HoldsSampled;
      if (step.holds && !r.conformal.everywhere) all_conformal = false;
    } catch (const std::exception& e) {
      step.verdict = Verdict::Error;
      step.error = e.what();
    }
    rep.steps.push_back(std::move(step));
  }

  const auto zero = static_cast<std::size_t>(std::find(s_grid.begin(), s_grid.end(), 0.0) - s_grid.begin());
  std::size_t lo = zero, hi = zero;
  if (rep.steps[zero].holds) {
    while (lo > 0 && rep.steps[lo - 1].holds) --lo;
    while (hi + 1 < rep.steps.size() && rep.steps[hi + 1].holds) ++hi;
  }
  rep.interval = {s_grid[lo], s_grid[hi]};
  const bool all_hold = std::all_of(rep.steps.begin(), rep.steps.end(), [](const auto& s) { return s.holds; });
  rep.group = all_hold && s_grid.front() < 0.0 && s_grid.back() > 0.0;
  if (rep.group) rep.conformal = all_conformal;
  return rep;
}

NullConeReport null_cone_nonneg(const Chart& chart, const GeneratorField& xi, const RegionSampler& sampler,
                                const CheckOptions& opts) {
  const std::size_t n = sampler.size();
  struct Result {
    std::vector<double> x;
    double margin = 0.0;
    Vector k;
    std::string error;
  };
  std::vector<Result> results(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    Result& r = results[i];
    try {
      r.x = sampler.point(i);
      const OrientedPoint p = chart.point_at(r.x, opts.tol_null);
      const Matrix l_hat = p.to_frame(lie_derivative_metric(chart, xi, r.x));
      const NullConeMinimum m = null_cone_minimum(l_hat);
      Vector kh(m.n.size() + 1);
      kh[0] = 1.0;
      kh.tail(m.n.size()) = m.n;
      r.margin = m.margin;
      r.k = p.frame() * kh;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });

  NullConeReport rep;
  rep.samples_checked = n;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::vector<NullConeWitness> bad;
  for (std::size_t i = 0; i < n; ++i) {
    const Result& r = results[i];
    if (!r.error.empty()) {
      if (rep.error.empty()) rep.error = "sample " + std::to_string(i) + ": " + r.error;
      continue;
    }
    if (r.margin < rep.min_margin) {
      rep.min_margin = r.margin;
      rep.min_point = r.x;
    }
    if (r.margin < -opts.tol_dp) bad.push_back({i, r.x, r.k, r.margin});
  }
  std::stable_sort(bad.begin(), bad.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  if (bad.size() > opts.max_witnesses) bad.resize(opts.max_witnesses);
  rep.nonnegative = bad.empty() && rep.error.empty();
  rep.witnesses = std::move(bad);
  if (n == 0) rep.min_margin = 0.0;
  return rep;
}

}  // namespace causal
