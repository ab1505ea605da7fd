#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "causal/lorentz.hpp"

namespace causal {

/// Frame-normalized tolerance for dominant-property decisions.
inline constexpr double kTolDp = 1e-9;
/// Relative residual below which T is taken to be lambda * G.
inline constexpr double kTolConformal = 1e-8;

/// Covariant symmetric 2-tensor at a point (symmetrized on construction).
class SymTensor2 {
 public:
  explicit SymTensor2(const Matrix& t);
  const Matrix& components() const { return t_; }
  int dim() const { return static_cast<int>(t_.rows()); }
  SymTensor2 operator-() const { return SymTensor2(-t_); }

 private:
  Matrix t_;
};

enum class DPStatus { InDPplus, InDPminus, NotDP };

std::string_view to_string(DPStatus s);

/// Outcome of a dominant-property test.
///
/// `margin` is the minimum of T(k, l) (or w(k) for 1-forms) over future null
/// k, l normalized to unit frame time component; it always refers to T, not
/// to -T. Witness vectors are coordinate components of the minimizing pair
/// (both entries equal k for 1-forms). `boundary` marks |margin| <= tol.
struct DPVerdict {
  DPStatus status = DPStatus::NotDP;
  double margin = 0.0;
  bool boundary = false;
  Vector witness_k;
  Vector witness_l;
};

DPVerdict dp1_check(const OrientedPoint& p, const Vector& w, double tol_dp = kTolDp);

DPVerdict dp2_check(const OrientedPoint& p, const SymTensor2& t, double tol_dp = kTolDp);

/// Frame-level core of dp2_check: minimum of B(n, m) = T(e0+n, e0+m) over
/// unit spatial n, m, for frame components `t_hat`. Returns the margin and
/// the minimizing spatial directions.
struct NullPairMinimum {
  double margin = 0.0;
  Vector n;
  Vector m;
};
NullPairMinimum null_pair_minimum(const Matrix& t_hat);

/// Minimum of T(k, k) over future null k = e0 + n, |n| = 1 (frame components).
struct NullConeMinimum {
  double margin = 0.0;
  Vector n;
};
NullConeMinimum null_cone_minimum(const Matrix& t_hat);

struct NullEigenpair {
  double eigenvalue = 0.0;
  /// Future pointing, frame time component 1, coordinate components.
  Vector vector;
  /// ||T v - lambda G v||_inf in frame components.
  double residual = 0.0;
};

struct NullEigenResult {
  std::vector<NullEigenpair> pairs;
  /// T = lambda G: every null direction is an eigenvector; `pairs` then holds
  /// a basis of n null eigenvectors.
  bool degenerate = false;
  /// Some eigenspace contains a whole cone of null directions; `pairs` holds
  /// spanning representatives for it.
  bool family = false;
};

NullEigenResult null_eigenvectors(const OrientedPoint& p, const SymTensor2& t, double tol_null = kTolNull);

/// Both sides of the equivalence T(X, X) = 0 <=> X is a null eigenvector,
/// for T in DP+ and X future causal (X frame-normalized to unit time part).
struct ZeroTestResult {
  bool value_zero = false;
  bool eigenvector = false;
  double value = 0.0;
  double residual = 0.0;
  double lambda = 0.0;
};

ZeroTestResult dp_zero_test(const OrientedPoint& p, const SymTensor2& t, const Vector& x, double tol = 1e-8);

struct ConformalFit {
  double lambda = 0.0;
  double residual = 0.0;  // ||T - lambda G||_inf / ||T||_inf in frame components
};

/// Least-squares lambda and relative residual, regardless of acceptance.
ConformalFit conformal_fit(const OrientedPoint& p, const SymTensor2& t);

/// lambda > 0 with T = lambda G to within `tol`, else nullopt.
std::optional<double> conformal_factor(const OrientedPoint& p, const SymTensor2& t, double tol = kTolConformal);

}  // namespace causal
