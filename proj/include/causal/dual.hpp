#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace causal {

/// First-order forward-mode dual number with a runtime-sized gradient.
///
/// A constant carries an empty gradient; it is promoted to the seed length of
/// whatever it meets. Two non-empty gradients of different length are a usage
/// error (mixed seed lengths).
class Dual {
 public:
  Dual() = default;
  Dual(double value) : value_(value) {}  // NOLINT: implicit from double
  Dual(double value, std::vector<double> grad) : value_(value), grad_(std::move(grad)) {}

  /// Variable number `index` of `size` seeds.
  static Dual variable(double value, std::size_t index, std::size_t size) {
    std::vector<double> g(size, 0.0);
    g.at(index) = 1.0;
    return {value, std::move(g)};
  }

  static Dual constant(double value, std::size_t size) { return {value, std::vector<double>(size, 0.0)}; }

  double value() const { return value_; }
  const std::vector<double>& grad() const { return grad_; }
  std::size_t seeds() const { return grad_.size(); }
  bool is_constant() const {
    for (double g : grad_)
      if (g != 0.0) return false;
    return true;
  }

  /// Partial w.r.t. seed i; zero for constants.
  double d(std::size_t i) const { return i < grad_.size() ? grad_[i] : 0.0; }

  /// f(x) with f'(x) = slope.
  Dual chain(double value, double slope) const {
    Dual r(value);
    r.grad_.resize(grad_.size());
    for (std::size_t i = 0; i < grad_.size(); ++i) r.grad_[i] = slope * grad_[i];
    return r;
  }

  Dual operator-() const { return chain(-value_, -1.0); }

  friend Dual operator+(const Dual& a, const Dual& b) { return combine(a, b, a.value_ + b.value_, 1.0, 1.0); }
  friend Dual operator-(const Dual& a, const Dual& b) { return combine(a, b, a.value_ - b.value_, 1.0, -1.0); }
  friend Dual operator*(const Dual& a, const Dual& b) { return combine(a, b, a.value_ * b.value_, b.value_, a.value_); }
  friend Dual operator/(const Dual& a, const Dual& b) {
    const double q = a.value_ / b.value_;
    return combine(a, b, q, 1.0 / b.value_, -q / b.value_);
  }

 private:
  // value with gradient ca*a' + cb*b'
  static Dual combine(const Dual& a, const Dual& b, double value, double ca, double cb) {
    if (!a.grad_.empty() && !b.grad_.empty() && a.grad_.size() != b.grad_.size())
      throw std::invalid_argument("dual: mixed seed lengths");
    Dual r(value);
    const std::size_t n = std::max(a.grad_.size(), b.grad_.size());
    r.grad_.assign(n, 0.0);
    for (std::size_t i = 0; i < a.grad_.size(); ++i) r.grad_[i] += ca * a.grad_[i];
    for (std::size_t i = 0; i < b.grad_.size(); ++i) r.grad_[i] += cb * b.grad_[i];
    return r;
  }

  double value_ = 0.0;
  std::vector<double> grad_;
};

}  // namespace causal
