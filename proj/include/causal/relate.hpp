#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "causal/dp.hpp"
#include "causal/sampler.hpp"
#include "causal/spacetime.hpp"

namespace causal {

enum class Verdict { HoldsSampled, TimeReversed, Violated, Error };

std::string_view to_string(Verdict v);

struct CheckOptions {
  double tol_dp = kTolDp;
  double tol_null = kTolNull;
  double tol_conformal = kTolConformal;
  unsigned threads = 1;
  std::size_t max_witnesses = 16;
};

/// A sample where the pullback fails the dominant property.
struct Witness {
  std::size_t sample = 0;
  std::vector<double> point;
  Vector k;  // coordinate components, future null
  Vector l;
  double margin = 0.0;
};

struct ConformalSummary {
  std::vector<std::optional<double>> lambda;  // per sample
  bool everywhere = false;
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  /// Largest relative residual among samples that were accepted.
  double max_residual = 0.0;
};

/// Sampled verdict for V <_phi W. HOLDS_SAMPLED claims nothing off the
/// sample set; `box` records the chart region that was sampled.
struct RelationReport {
  Verdict verdict = Verdict::Error;
  std::size_t samples_checked = 0;
  double min_margin = 0.0;
  std::vector<double> min_margin_point;
  std::size_t boundary_samples = 0;
  std::size_t reversed_samples = 0;
  std::vector<Witness> witnesses;
  ConformalSummary conformal;
  std::vector<Interval> box;
  std::string error;
};

RelationReport check_proper_causal(const BoundMap& map, const RegionSampler& sampler, const CheckOptions& opts = {});

struct CanonicalNullDirections {
  std::vector<NullEigenpair> directions;
  bool degenerate = false;
  bool family = false;
  /// phi' v classified Null in the target for every returned v.
  bool pushforward_null = true;
};

/// Null eigenvectors of the pullback at x; requires the pullback to be DP+.
CanonicalNullDirections canonical_null_directions(const BoundMap& map, std::span<const double> x,
                                                  const CheckOptions& opts = {});

ConformalSummary check_conformal(const BoundMap& map, const RegionSampler& sampler, const CheckOptions& opts = {});

enum class IsoVerdict { Isomorphic, NotIsomorphic, Error };

std::string_view to_string(IsoVerdict v);

struct IsoReport {
  IsoVerdict verdict = IsoVerdict::Error;
  RelationReport forward;
  RelationReport backward;
  bool time_reversed = false;
  bool inverse_verified = false;
  double inverse_residual = 0.0;
  std::optional<ConformalSummary> forward_conformal;
  std::optional<ConformalSummary> backward_conformal;
};

IsoReport check_isomorphism(const BoundMap& fwd, const BoundMap& bwd, const RegionSampler& source_sampler,
                            const RegionSampler& target_sampler, const CheckOptions& opts = {});

class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CurveCheck {
  bool ok = true;
  std::vector<double> failing_u;
};

/// Pushes the tangent of a future timelike curve (n expressions in `param`)
/// through the map and requires FutureTimelike in the target at every u.
CurveCheck curve_pushforward_check(const BoundMap& map, const std::vector<std::string>& curve,
                                   const std::string& param, std::span<const double> u_samples,
                                   const CheckOptions& opts = {});

/// f : V -> W then g : W -> U, by substituting f into g. Map parameters are
/// folded in as numbers.
MapDef compose_maps(const BoundMap& f, const BoundMap& g);

}  // namespace causal
