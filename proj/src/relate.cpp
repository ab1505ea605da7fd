#include "causal/relate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "causal/parallel.hpp"

namespace causal {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::HoldsSampled: return "HOLDS_SAMPLED";
    case Verdict::TimeReversed: return "TIME_REVERSED";
    case Verdict::Violated: return "VIOLATED";
    case Verdict::Error: return "ERROR";
  }
  return "?";
}

std::string_view to_string(IsoVerdict v) {
  switch (v) {
    case IsoVerdict::Isomorphic: return "ISOMORPHIC";
    case IsoVerdict::NotIsomorphic: return "NOT_ISOMORPHIC";
    case IsoVerdict::Error: return "ERROR";
  }
  return "?";
}

namespace {

struct SampleResult {
  std::vector<double> x;
  std::string error;
  DPVerdict dp;
  int orientation = 0;  // +1 preserved, -1 reversed, 0 not evaluated
  ConformalFit fit;
};

std::string point_text(const std::vector<double>& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (std::size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

}  // namespace

RelationReport check_proper_causal(const BoundMap& map, const RegionSampler& sampler, const CheckOptions& opts) {
  const std::size_t n = sampler.size();
  std::vector<SampleResult> results(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    SampleResult& r = results[i];
    try {
      r.x = sampler.point(i);
      const SymTensor2 t = map.pullback(r.x);
      const OrientedPoint p = map.source().point_at(r.x, opts.tol_null);
      r.dp = dp2_check(p, t, opts.tol_dp);
      r.fit = conformal_fit(p, t);
      if (r.dp.status == DPStatus::InDPplus) {
        const Matrix j = map.jacobian(r.x);
        const OrientedPoint q = map.target().point_at(map.image(r.x), opts.tol_null);
        const Vector pushed = j * p.future();
        const double time = (q.frame_inverse() * pushed)[0];
        r.orientation = time > 0 ? 1 : (time < 0 ? -1 : 0);
      }
    } catch (const std::exception& e) {
      r.error = e.what();
      if (r.error.empty()) r.error = "unknown failure";
    }
  });

  RelationReport rep;
  rep.samples_checked = n;
  rep.box = sampler.box();
  rep.min_margin = std::numeric_limits<double>::infinity();
  rep.conformal.lambda.resize(n);
  rep.conformal.everywhere = n > 0;
  rep.conformal.min = std::numeric_limits<double>::infinity();
  rep.conformal.max = -std::numeric_limits<double>::infinity();

  bool violated = false;
  std::size_t preserved = 0;
  std::vector<Witness> bad;
  for (std::size_t i = 0; i < n; ++i) {
    const SampleResult& r = results[i];
    if (!r.error.empty()) {
      if (rep.error.empty()) rep.error = "sample " + std::to_string(i) + " at " + point_text(r.x) + ": " + r.error;
      rep.conformal.everywhere = false;
      continue;
    }
    if (r.dp.margin < rep.min_margin) {
      rep.min_margin = r.dp.margin;
      rep.min_margin_point = r.x;
    }
    if (r.dp.boundary) ++rep.boundary_samples;
    if (r.dp.status != DPStatus::InDPplus) {
      violated = true;
      bad.push_back({i, r.x, r.dp.witness_k, r.dp.witness_l, r.dp.margin});
    } else if (r.orientation > 0) {
      ++preserved;
    } else if (r.orientation < 0) {
      ++rep.reversed_samples;
    }
    if (r.fit.residual < opts.tol_conformal && r.fit.lambda > 0) {
      rep.conformal.lambda[i] = r.fit.lambda;
      ++rep.conformal.count;
      rep.conformal.min = std::min(rep.conformal.min, r.fit.lambda);
      rep.conformal.max = std::max(rep.conformal.max, r.fit.lambda);
      rep.conformal.max_residual = std::max(rep.conformal.max_residual, r.fit.residual);
    } else {
      rep.conformal.everywhere = false;
    }
  }
  std::stable_sort(bad.begin(), bad.end(), [](const Witness& a, const Witness& b) { return a.margin < b.margin; });
  if (bad.size() > opts.max_witnesses) bad.resize(opts.max_witnesses);
  rep.witnesses = std::move(bad);
  if (rep.conformal.count == 0) rep.conformal.min = rep.conformal.max = 0.0;

  if (!rep.error.empty()) {
    rep.verdict = Verdict::Error;
  } else if (violated) {
    rep.verdict = Verdict::Violated;
  } else if (preserved > 0 && rep.reversed_samples > 0) {
    rep.verdict = Verdict::Error;
    rep.error = "time orientation preserved at " + std::to_string(preserved) + " samples and reversed at " +
                std::to_string(rep.reversed_samples) + " (orientation data inconsistent)";
  } else if (rep.reversed_samples > 0) {
    rep.verdict = Verdict::TimeReversed;
  } else if (preserved == n) {
    rep.verdict = Verdict::HoldsSampled;
  } else {
    rep.verdict = Verdict::Error;
    rep.error = "pushed orientation field is not causal at some samples";
  }
  if (n == 0) rep.min_margin = 0.0;
  return rep;
}

CanonicalNullDirections canonical_null_directions(const BoundMap& map, std::span<const double> x,
                                                  const CheckOptions& opts) {
  const SymTensor2 t = map.pullback(x);
  const OrientedPoint p = map.source().point_at(x, opts.tol_null);
  if (dp2_check(p, t, opts.tol_dp).status != DPStatus::InDPplus)
    throw PreconditionError("pullback is not in DP+ at this point");
  const NullEigenResult ne = null_eigenvectors(p, t, opts.tol_null);

  CanonicalNullDirections out;
  out.degenerate = ne.degenerate;
  out.family = ne.family;
  out.directions = ne.pairs;
  const Matrix j = map.jacobian(x);
  const OrientedPoint q = map.target().point_at(map.image(x), opts.tol_null);
  for (const auto& d : out.directions) {
    // Null band widened for the eigen-solver residual.
    if (!is_null(causal_character(q, j * d.vector, std::max(opts.tol_null, 1e-7)))) out.pushforward_null = false;
  }
  return out;
}

ConformalSummary check_conformal(const BoundMap& map, const RegionSampler& sampler, const CheckOptions& opts) {
  const std::size_t n = sampler.size();
  std::vector<std::optional<ConformalFit>> fits(n);
  parallel_for(n, opts.threads, [&](std::size_t i) {
    try {
      const auto x = sampler.point(i);
      fits[i] = conformal_fit(map.source().point_at(x, opts.tol_null), map.pullback(x));
    } catch (const std::exception&) {
      fits[i].reset();
    }
  });
  ConformalSummary s;
  s.lambda.resize(n);
  s.everywhere = n > 0;
  s.min = std::numeric_limits<double>::infinity();
  s.max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (fits[i] && fits[i]->residual < opts.tol_conformal && fits[i]->lambda > 0) {
      s.lambda[i] = fits[i]->lambda;
      ++s.count;
      s.min = std::min(s.min, fits[i]->lambda);
      s.max = std::max(s.max, fits[i]->lambda);
      s.max_residual = std::max(s.max_residual, fits[i]->residual);
    } else {
      s.everywhere = false;
    }
  }
  if (s.count == 0) s.min = s.max = 0.0;
  return s;
}

namespace {

// max over samples of |g(f(x)) - x|_inf / max(1, |x|_inf); inf when f(x)
// leaves g's domain or evaluation fails.
double round_trip(const BoundMap& f, const BoundMap& g, const RegionSampler& sampler, unsigned threads) {
  std::vector<double> res(sampler.size(), 0.0);
  parallel_for(sampler.size(), threads, [&](std::size_t i) {
    try {
      const auto x = sampler.point(i);
      const auto y = f.image(x);
      if (!g.source().in_domain(y)) {
        res[i] = std::numeric_limits<double>::infinity();
        return;
      }
      const auto z = g.image(y);
      double err = 0.0, scale = 1.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        err = std::max(err, std::abs(z[k] - x[k]));
        scale = std::max(scale, std::abs(x[k]));
      }
      res[i] = err / scale;
    } catch (const std::exception&) {
      res[i] = std::numeric_limits<double>::infinity();
    }
  });
  double worst = 0.0;
  for (double r : res) worst = std::max(worst, r);
  return worst;
}

bool holds(Verdict v) { return v == Verdict::HoldsSampled || v == Verdict::TimeReversed; }

}  // namespace

IsoReport check_isomorphism(const BoundMap& fwd, const BoundMap& bwd, const RegionSampler& source_sampler,
                            const RegionSampler& target_sampler, const CheckOptions& opts) {
  if (fwd.source().name() != bwd.target().name() || fwd.target().name() != bwd.source().name())
    throw DefinitionError(0, "isomorphism maps must run V -> W and W -> V");
  IsoReport rep;
  rep.forward = check_proper_causal(fwd, source_sampler, opts);
  rep.backward = check_proper_causal(bwd, target_sampler, opts);
  // A witness in either direction is conclusive even if the other errored.
  if (rep.forward.verdict == Verdict::Violated || rep.backward.verdict == Verdict::Violated)
    rep.verdict = IsoVerdict::NotIsomorphic;
  else if (rep.forward.verdict == Verdict::Error || rep.backward.verdict == Verdict::Error)
    rep.verdict = IsoVerdict::Error;
  else if (holds(rep.forward.verdict) && holds(rep.backward.verdict))
    rep.verdict = IsoVerdict::Isomorphic;
  else
    rep.verdict = IsoVerdict::NotIsomorphic;
  rep.time_reversed =
      rep.forward.verdict == Verdict::TimeReversed || rep.backward.verdict == Verdict::TimeReversed;

  rep.inverse_residual = std::max(round_trip(fwd, bwd, source_sampler, opts.threads),
                                  round_trip(bwd, fwd, target_sampler, opts.threads));
  rep.inverse_verified = rep.inverse_residual < 1e-8;
  if (rep.inverse_verified) {
    rep.forward_conformal = check_conformal(fwd, source_sampler, opts);
    rep.backward_conformal = check_conformal(bwd, target_sampler, opts);
  }
  return rep;
}

CurveCheck curve_pushforward_check(const BoundMap& map, const std::vector<std::string>& curve, const std::string& param,
                                   std::span<const double> u_samples, const CheckOptions& opts) {
  const std::size_t n = map.source().dim();
  if (curve.size() != n) throw std::invalid_argument("curve needs one expression per source coordinate");
  auto symbols = std::make_shared<const SymbolList>(SymbolList{param});
  std::vector<Expr> comps;
  for (const auto& c : curve) comps.push_back(parse_expr(c, symbols));

  CurveCheck out;
  for (double u : u_samples) {
    const Dual ud = Dual::variable(u, 0, 1);
    std::vector<double> x(n);
    Vector tangent(n);
    for (std::size_t a = 0; a < n; ++a) {
      const Dual v = eval_dual(comps[a], std::span<const Dual>(&ud, 1));
      x[a] = v.value();
      tangent[a] = v.d(0);
    }
    std::ostringstream at;
    at.precision(17);
    at << u;
    if (!map.source().in_domain(x)) throw PreconditionError("curve leaves the source domain at u = " + at.str());
    const OrientedPoint p = map.source().point_at(x, opts.tol_null);
    if (causal_character(p, tangent, opts.tol_null) != CausalClass::FutureTimelike)
      throw PreconditionError("curve tangent is not future timelike at u = " + at.str());
    const auto y = map.image(x);
    if (!map.target().in_domain(y)) throw DomainViolation("curve image leaves the target domain at u = " + at.str());
    const OrientedPoint q = map.target().point_at(y, opts.tol_null);
    if (causal_character(q, map.jacobian(x) * tangent, opts.tol_null) != CausalClass::FutureTimelike) {
      out.ok = false;
      out.failing_u.push_back(u);
    }
  }
  return out;
}

MapDef compose_maps(const BoundMap& f, const BoundMap& g) {
  if (f.target().name() != g.source().name())
    throw DefinitionError(0, "cannot compose: '" + f.def().name + "' ends in '" + f.target().name() + "' but '" +
                                 g.def().name + "' starts in '" + g.source().name() + "'");
  const auto& vcoords = f.source().def().coords;
  auto vsyms = std::make_shared<const SymbolList>(vcoords);

  // f with its parameters folded, over V coordinates only.
  std::vector<Expr> f_repl;
  for (const auto& c : vcoords) f_repl.push_back(parse_expr(c, vsyms));
  for (const auto& [k, v] : f.def().params) f_repl.push_back(Expr::constant(v, vsyms));
  std::vector<Expr> f_folded;
  for (const Expr& e : f.exprs()) f_folded.push_back(substitute(e, f_repl));

  std::vector<Expr> g_repl = f_folded;
  for (const auto& [k, v] : g.def().params) g_repl.push_back(Expr::constant(v, vsyms));

  MapDef out;
  out.name = (g.def().name.empty() ? "g" : g.def().name) + "_after_" + (f.def().name.empty() ? "f" : f.def().name);
  out.source = f.source().name();
  out.target = g.target().name();
  const auto& ucoords = g.target().def().coords;
  for (std::size_t a = 0; a < ucoords.size(); ++a) out.exprs.emplace_back(ucoords[a], to_string(substitute(g.exprs()[a], g_repl)));
  return out;
}

}  // namespace causal
