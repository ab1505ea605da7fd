#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <string_view>

namespace causal {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Relative half-width of the null band used when classifying vectors.
inline constexpr double kTolNull = 1e-9;

class LorentzError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AsymmetricError : public LorentzError {
 public:
  using LorentzError::LorentzError;
};

class SignatureError : public LorentzError {
 public:
  SignatureError(int positive, int negative, int zero);
  int positive() const { return positive_; }
  int negative() const { return negative_; }
  int zero() const { return zero_; }

 private:
  int positive_, negative_, zero_;
};

class DegenerateMetric : public LorentzError {
 public:
  using LorentzError::LorentzError;
};

/// Covariant metric components at a point, signature (+,-,...,-).
class MetricValue {
 public:
  /// Symmetry to 1e-12 relative and exact Lorentzian signature, else throws.
  static MetricValue validate(const Matrix& g);

  int dim() const { return static_cast<int>(g_.rows()); }
  const Matrix& components() const { return g_; }
  double operator()(const Vector& a, const Vector& b) const { return a.dot(g_ * b); }

 private:
  explicit MetricValue(Matrix g) : g_(std::move(g)) {}
  Matrix g_;
};

inline MetricValue validate_metric(const Matrix& g) { return MetricValue::validate(g); }

enum class CausalClass { FutureTimelike, PastTimelike, FutureNull, PastNull, Spacelike, Zero };

std::string_view to_string(CausalClass c);

inline bool is_future_causal(CausalClass c) { return c == CausalClass::FutureTimelike || c == CausalClass::FutureNull; }
inline bool is_past_causal(CausalClass c) { return c == CausalClass::PastTimelike || c == CausalClass::PastNull; }
inline bool is_null(CausalClass c) { return c == CausalClass::FutureNull || c == CausalClass::PastNull; }
inline bool is_timelike(CausalClass c) { return c == CausalClass::FutureTimelike || c == CausalClass::PastTimelike; }

/// Orthonormal frame columns e_0..e_{n-1}: E^T G E = diag(1,-1,...,-1) and
/// e_0 future pointing with respect to `future`.
Matrix orthonormal_frame(const MetricValue& g, const Vector& future, double tol_null = kTolNull);

/// A time-oriented point: metric plus declared future causal vector, with its
/// orthonormal frame cached.
class OrientedPoint {
 public:
  OrientedPoint(Vector coords, MetricValue metric, Vector future, double tol_null = kTolNull);

  int dim() const { return metric_.dim(); }
  const Vector& coords() const { return coords_; }
  const MetricValue& metric() const { return metric_; }
  const Matrix& g() const { return metric_.components(); }
  const Vector& future() const { return future_; }

  /// Columns are the frame vectors in coordinate components.
  const Matrix& frame() const { return frame_; }
  /// Maps coordinate components to frame components.
  const Matrix& frame_inverse() const { return frame_inv_; }

  /// Frame components T(e_a, e_b) of a covariant 2-tensor.
  Matrix to_frame(const Matrix& t) const { return frame_.transpose() * t * frame_; }
  /// Frame components w(e_a) of a covector.
  Vector covector_to_frame(const Vector& w) const { return frame_.transpose() * w; }

 private:
  Vector coords_;
  MetricValue metric_;
  Vector future_;
  Matrix frame_;
  Matrix frame_inv_;
};

inline Matrix orthonormal_frame(const OrientedPoint& p) { return p.frame(); }

/// Minkowski diag(1,-1,...,-1).
Matrix minkowski_eta(int n);

CausalClass causal_character(const OrientedPoint& p, const Vector& v, double tol_null = kTolNull);

/// G^{-1} w.
Vector raise_index(const MetricValue& g, const Vector& w);
inline Vector raise_index(const OrientedPoint& p, const Vector& w) { return raise_index(p.metric(), w); }

/// G v.
inline Vector lower_index(const MetricValue& g, const Vector& v) { return g.components() * v; }

}  // namespace causal
