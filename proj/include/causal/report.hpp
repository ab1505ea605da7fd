#pragma once

#include <json.hpp>

#include "causal/flows.hpp"
#include "causal/relate.hpp"

namespace causal {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "causal";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kReportSchema = "causal-report/1";

/// Exit-code convention shared by the CLI and scenarios.
enum ExitCode : int { kExitHolds = 0, kExitViolated = 1, kExitInput = 2, kExitInternal = 3 };

Json to_json(const Vector& v);
Json to_json(const std::vector<double>& v);
Json to_json(const std::vector<Interval>& box);
Json to_json(const ConformalSummary& c);
Json to_json(const RelationReport& r);
Json to_json(const IsoReport& r);
Json to_json(const SubmonoidReport& r);
Json to_json(const NullConeReport& r);
Json to_json(const CanonicalNullDirections& c);
Json to_json(const SamplerConfig& s);
Json to_json(const CheckOptions& o);

/// Skeleton shared by every report: schema, tool, command.
Json report_header(const std::string& command);

int exit_code(Verdict v);
int exit_code(IsoVerdict v);

}  // namespace causal
