#include "causal/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace causal {

double radical_inverse(std::uint64_t index, unsigned base) {
  const double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

unsigned nth_prime(int k) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
  if (k < 0 || k >= static_cast<int>(std::size(kPrimes))) throw std::out_of_range("nth_prime: dimension too large");
  return kPrimes[k];
}

std::string_view to_string(SampleScheme s) { return s == SampleScheme::Grid ? "grid" : "halton"; }

RegionSampler::RegionSampler(std::vector<Interval> domain, std::vector<std::optional<Interval>> chart_windows,
                             SamplerConfig config)
    : config_(std::move(config)) {
  const std::size_t n = domain.size();
  if (n == 0) throw std::invalid_argument("sampler: empty domain");
  if (!(config_.margin >= 0.0)) throw std::invalid_argument("sampler: margin must be non-negative");
  if (!(config_.infinite_window > 0.0)) throw std::invalid_argument("sampler: infinite window must be positive");
  if (config_.count == 0) throw std::invalid_argument("sampler: sample count must be positive");

  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < n; ++k) {
    double lo = std::isfinite(domain[k].lo) ? domain[k].lo + config_.margin : -inf;
    double hi = std::isfinite(domain[k].hi) ? domain[k].hi - config_.margin : inf;
    std::optional<Interval> win;
    if (k < config_.windows.size() && config_.windows[k]) win = config_.windows[k];
    else if (k < chart_windows.size()) win = chart_windows[k];
    if (win) {
      lo = std::max(lo, win->lo);
      hi = std::min(hi, win->hi);
    }
    if (!(lo <= hi)) throw std::invalid_argument("sampler: empty sampling range for coordinate " + std::to_string(k));
    ranges_.push_back({lo, hi});
  }
  box_.resize(n);
  for (std::size_t k = 0; k < n; ++k) box_[k] = {map_coord(k, 0.0), map_coord(k, 1.0)};

  if (config_.scheme == SampleScheme::Grid) {
    grid_side_ = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::pow(double(config_.count), 1.0 / n) + 1e-9)));
    size_ = 1;
    for (std::size_t k = 0; k < n; ++k) size_ *= grid_side_;
  } else {
    if (n > 16) throw std::invalid_argument("sampler: Halton supports at most 16 dimensions");
    size_ = config_.count;
  }
}

double RegionSampler::map_coord(std::size_t k, double u) const {
  const Range& r = ranges_[k];
  const double w = config_.infinite_window;
  const double s = w / 3.0;
  const double edge = std::tanh(w / s);
  const bool flo = std::isfinite(r.lo), fhi = std::isfinite(r.hi);
  if (flo && fhi) return r.lo + u * (r.hi - r.lo);
  if (flo) return r.lo + s * std::atanh(u * edge);
  if (fhi) return r.hi - s * std::atanh((1.0 - u) * edge);
  return s * std::atanh((2.0 * u - 1.0) * edge);
}

std::vector<double> RegionSampler::map_unit(const std::vector<double>& u) const {
  std::vector<double> x(ranges_.size());
  for (std::size_t k = 0; k < ranges_.size(); ++k) x[k] = map_coord(k, u.at(k));
  return x;
}

std::vector<double> RegionSampler::point(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("sampler: index out of range");
  const std::size_t n = ranges_.size();
  std::vector<double> u(n);
  if (config_.scheme == SampleScheme::Grid) {
    std::size_t rem = i;
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = rem % grid_side_;
      rem /= grid_side_;
      u[k] = grid_side_ == 1 ? 0.5 : static_cast<double>(j) / static_cast<double>(grid_side_ - 1);
    }
  } else {
    const std::uint64_t index = static_cast<std::uint64_t>(i) + 1 + config_.seed;
    for (std::size_t k = 0; k < n; ++k) u[k] = radical_inverse(index, nth_prime(static_cast<int>(k)));
  }
  return map_unit(u);
}

}  // namespace causal
