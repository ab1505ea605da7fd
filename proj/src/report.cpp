#include "causal/report.hpp"

namespace causal {

Json to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json to_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json to_json(const std::vector<Interval>& box) {
  Json a = Json::array();
  for (const auto& iv : box) a.push_back(Json::array({iv.lo, iv.hi}));
  return a;
}

Json to_json(const ConformalSummary& c) {
  Json j;
  j["everywhere"] = c.everywhere;
  j["samples_with_lambda"] = c.count;
  if (c.count > 0) {
    j["lambda_min"] = c.min;
    j["lambda_max"] = c.max;
    j["max_residual"] = c.max_residual;
  }
  return j;
}

Json to_json(const RelationReport& r) {
  Json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["samples_checked"] = r.samples_checked;
  j["min_margin"] = r.min_margin;
  j["min_margin_point"] = to_json(r.min_margin_point);
  j["boundary_samples"] = r.boundary_samples;
  j["reversed_samples"] = r.reversed_samples;
  j["chart_box"] = to_json(r.box);
  Json w = Json::array();
  for (const auto& wit : r.witnesses) {
    Json e;
    e["sample"] = wit.sample;
    e["point"] = to_json(wit.point);
    e["k"] = to_json(wit.k);
    e["l"] = to_json(wit.l);
    e["margin"] = wit.margin;
    w.push_back(std::move(e));
  }
  j["witnesses"] = std::move(w);
  j["conformal"] = to_json(r.conformal);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

Json to_json(const IsoReport& r) {
  Json j;
  j["verdict"] = std::string(to_string(r.verdict));
  j["time_reversed"] = r.time_reversed;
  j["inverse_verified"] = r.inverse_verified;
  j["inverse_residual"] = r.inverse_residual;
  j["forward"] = to_json(r.forward);
  j["backward"] = to_json(r.backward);
  if (r.forward_conformal) j["forward_conformal"] = to_json(*r.forward_conformal);
  if (r.backward_conformal) j["backward_conformal"] = to_json(*r.backward_conformal);
  return j;
}

Json to_json(const SubmonoidReport& r) {
  Json j;
  j["interval"] = Json::array({r.interval.lo, r.interval.hi});
  j["group"] = r.group;
  if (r.conformal) j["conformal"] = *r.conformal;
  j["identity_residual"] = r.identity_residual;
  Json steps = Json::array();
  for (const auto& s : r.steps) {
    Json e;
    e["s"] = s.s;
    e["verdict"] = std::string(to_string(s.verdict));
    e["holds"] = s.holds;
    e["min_margin"] = s.min_margin;
    if (!s.error.empty()) e["error"] = s.error;
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  return j;
}

Json to_json(const NullConeReport& r) {
  Json j;
  j["nonnegative"] = r.nonnegative;
  j["min_margin"] = r.min_margin;
  j["min_point"] = to_json(r.min_point);
  j["samples_checked"] = r.samples_checked;
  Json w = Json::array();
  for (const auto& wit : r.witnesses) {
    Json e;
    e["sample"] = wit.sample;
    e["point"] = to_json(wit.point);
    e["k"] = to_json(wit.k);
    e["value"] = wit.value;
    w.push_back(std::move(e));
  }
  j["witnesses"] = std::move(w);
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

Json to_json(const CanonicalNullDirections& c) {
  Json j;
  j["degenerate"] = c.degenerate;
  j["family"] = c.family;
  j["pushforward_null"] = c.pushforward_null;
  Json d = Json::array();
  for (const auto& p : c.directions) {
    Json e;
    e["eigenvalue"] = p.eigenvalue;
    e["vector"] = to_json(p.vector);
    e["residual"] = p.residual;
    d.push_back(std::move(e));
  }
  j["directions"] = std::move(d);
  return j;
}

Json to_json(const SamplerConfig& s) {
  Json j;
  j["scheme"] = std::string(to_string(s.scheme));
  j["count"] = s.count;
  j["seed"] = s.seed;
  j["margin"] = s.margin;
  j["infinite_window"] = s.infinite_window;
  return j;
}

Json to_json(const CheckOptions& o) {
  Json j;
  j["tol_dp"] = o.tol_dp;
  j["tol_null"] = o.tol_null;
  j["tol_conformal"] = o.tol_conformal;
  return j;
}

Json report_header(const std::string& command) {
  Json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
  j["command"] = command;
  return j;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::HoldsSampled:
    case Verdict::TimeReversed: return kExitHolds;
    case Verdict::Violated: return kExitViolated;
    case Verdict::Error: return kExitInput;
  }
  return kExitInternal;
}

int exit_code(IsoVerdict v) {
  switch (v) {
    case IsoVerdict::Isomorphic: return kExitHolds;
    case IsoVerdict::NotIsomorphic: return kExitViolated;
    case IsoVerdict::Error: return kExitInput;
  }
  return kExitInternal;
}

}  // namespace causal
