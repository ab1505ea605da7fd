#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace causal {

/// Open (domain) or closed (window) coordinate interval; bounds may be +-inf.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains_open(double x) const { return x > lo && x < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Van der Corput radical inverse of `index` in base `base`.
double radical_inverse(std::uint64_t index, unsigned base);

/// 0 -> 2, 1 -> 3, 2 -> 5, ...
unsigned nth_prime(int k);

enum class SampleScheme { Grid, Halton };

std::string_view to_string(SampleScheme s);

struct SamplerConfig {
  std::size_t count = 4096;
  SampleScheme scheme = SampleScheme::Halton;
  /// Halton point i uses sequence index i + 1 + seed.
  std::uint64_t seed = 0;
  /// Distance kept from every finite open domain bound.
  double margin = 1e-3;
  /// Half-width reached on infinite sides of the tanh compactification.
  double infinite_window = 10.0;
  /// Per-coordinate sampling windows; unset entries fall back to the chart's.
  std::vector<std::optional<Interval>> windows;
};

/// Deterministic point set inside a coordinate box.
///
/// Per coordinate the effective range is the window (when given) clipped to
/// the domain shrunk by the margin. Finite ranges map linearly; infinite sides
/// go through x = x0 +- s * atanh(u * tanh(W / s)) with s = W / 3, so no
/// point is further than W from the finite end (or from 0).
class RegionSampler {
 public:
  RegionSampler(std::vector<Interval> domain, std::vector<std::optional<Interval>> chart_windows, SamplerConfig config);

  std::size_t size() const { return size_; }
  std::size_t dim() const { return ranges_.size(); }
  const SamplerConfig& config() const { return config_; }
  /// Effective ranges actually covered (finite after compactification).
  const std::vector<Interval>& box() const { return box_; }

  std::vector<double> point(std::size_t i) const;
  /// Maps unit-cube coordinates into the region.
  std::vector<double> map_unit(const std::vector<double>& u) const;

 private:
  struct Range {
    double lo, hi;  // may be infinite
  };
  double map_coord(std::size_t k, double u) const;

  std::vector<Range> ranges_;
  std::vector<Interval> box_;
  SamplerConfig config_;
  std::size_t size_ = 0;
  std::size_t grid_side_ = 0;
};

}  // namespace causal
