#include "causal/lorentz.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace causal {

SignatureError::SignatureError(int positive, int negative, int zero)
    : LorentzError("metric signature is (" + std::to_string(positive) + " positive, " + std::to_string(negative) +
                   " negative, " + std::to_string(zero) + " near-zero), expected (1, n-1, 0)"),
      positive_(positive),
      negative_(negative),
      zero_(zero) {}

MetricValue MetricValue::validate(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() < 2) throw LorentzError("metric must be square with n >= 2");
  if (!g.allFinite()) throw LorentzError("metric has non-finite components");
  const double scale = g.cwiseAbs().maxCoeff();
  const double asym = (g - g.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, std::numeric_limits<double>::min()))
    throw AsymmetricError("metric is not symmetric (max |g_ab - g_ba| = " + std::to_string(asym) + ")");

  Matrix sym = 0.5 * (g + g.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double emax = ev.cwiseAbs().maxCoeff();
  const double zero_tol = static_cast<double>(g.rows()) * std::numeric_limits<double>::epsilon() * emax;
  int pos = 0, neg = 0, zero = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) <= zero_tol)
      ++zero;
    else if (ev[i] > 0)
      ++pos;
    else
      ++neg;
  }
  if (pos != 1 || zero != 0 || neg != g.rows() - 1) throw SignatureError(pos, neg, zero);
  return MetricValue(std::move(sym));
}

std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::FutureTimelike: return "FutureTimelike";
    case CausalClass::PastTimelike: return "PastTimelike";
    case CausalClass::FutureNull: return "FutureNull";
    case CausalClass::PastNull: return "PastNull";
    case CausalClass::Spacelike: return "Spacelike";
    case CausalClass::Zero: return "Zero";
  }
  return "?";
}

Matrix minkowski_eta(int n) {
  Matrix eta = -Matrix::Identity(n, n);
  eta(0, 0) = 1.0;
  return eta;
}

Matrix orthonormal_frame(const MetricValue& metric, const Vector& future, double tol_null) {
  const Matrix& g = metric.components();
  const int n = metric.dim();
  if (future.size() != n) throw LorentzError("future vector has wrong dimension");

  // Timelike seed: the future field itself, or the timelike eigenvector of G
  // oriented along it.
  Vector seed = future;
  const double q = metric(future, future);
  if (!(q > tol_null * future.squaredNorm() * g.cwiseAbs().maxCoeff())) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(g);
    Eigen::Index top = 0;
    es.eigenvalues().maxCoeff(&top);
    seed = es.eigenvectors().col(top);
    const double s = metric(seed, future);
    if (s == 0.0) throw DegenerateMetric("future vector is orthogonal to the timelike axis");
    if (s < 0) seed = -seed;
  }
  const double n0 = metric(seed, seed);
  if (!(n0 > 0.0) || std::sqrt(n0) < 1e-13) throw DegenerateMetric("cannot normalize the timelike frame vector");

  Matrix e(n, n);
  e.col(0) = seed / std::sqrt(n0);

  // Metric Gram-Schmidt on coordinate basis vectors, skipping candidates that
  // are (numerically) spent by the vectors already accepted.
  int accepted = 1;
  for (int c = 0; c < n && accepted < n; ++c) {
    Vector v = Vector::Unit(n, c);
    const double row_scale = g.row(c).cwiseAbs().maxCoeff();
    for (int pass = 0; pass < 2; ++pass) {
      v -= metric(v, e.col(0)) * e.col(0);
      for (int j = 1; j < accepted; ++j) v += metric(v, e.col(j)) * e.col(j);
    }
    const double nrm2 = -metric(v, v);
    if (!(nrm2 > 1e-8 * row_scale)) continue;
    if (std::sqrt(nrm2) < 1e-13) continue;
    e.col(accepted++) = v / std::sqrt(nrm2);
  }
  if (accepted < n) throw DegenerateMetric("spatial frame vectors are degenerate");
  return e;
}

OrientedPoint::OrientedPoint(Vector coords, MetricValue metric, Vector future, double tol_null)
    : coords_(std::move(coords)), metric_(std::move(metric)), future_(std::move(future)) {
  if (future_.size() != metric_.dim()) throw LorentzError("future vector has wrong dimension");
  if (future_.squaredNorm() == 0.0) throw LorentzError("future vector is zero");
  const double q = metric_(future_, future_);
  const double scale = metric_.components().cwiseAbs().maxCoeff();
  if (q < -tol_null * future_.squaredNorm() * scale)
    throw LorentzError("declared future vector is spacelike");
  frame_ = orthonormal_frame(metric_, future_, tol_null);
  // E^T G E = eta  =>  E^{-1} = eta E^T G
  frame_inv_ = minkowski_eta(metric_.dim()) * frame_.transpose() * metric_.components();
}

CausalClass causal_character(const OrientedPoint& p, const Vector& v, double tol_null) {
  const Vector vh = p.frame_inverse() * v;
  const double sigma = vh.squaredNorm();
  if (sigma < 1e-26) return CausalClass::Zero;
  // Frame components give q exactly as vh0^2 - |vh|^2 up to rounding.
  const double q = p.metric()(v, v);
  const bool future = vh[0] > 0.0;
  if (std::abs(q) <= tol_null * sigma) return future ? CausalClass::FutureNull : CausalClass::PastNull;
  if (q > 0.0) return future ? CausalClass::FutureTimelike : CausalClass::PastTimelike;
  return CausalClass::Spacelike;
}

Vector raise_index(const MetricValue& g, const Vector& w) {
  Eigen::FullPivLU<Matrix> lu(g.components());
  if (!lu.isInvertible()) throw DegenerateMetric("metric is not invertible");
  return lu.solve(w);
}

}  // namespace causal
