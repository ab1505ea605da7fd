#include "causal/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "causal/sphere.hpp"

namespace causal {

SymTensor2::SymTensor2(const Matrix& t) {
  if (t.rows() != t.cols()) throw std::invalid_argument("tensor must be square");
  const double scale = t.cwiseAbs().maxCoeff();
  const double asym = (t - t.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, std::numeric_limits<double>::min()))
    throw std::invalid_argument("tensor is not symmetric");
  t_ = 0.5 * (t + t.transpose());
}

std::string_view to_string(DPStatus s) {
  switch (s) {
    case DPStatus::InDPplus: return "InDPplus";
    case DPStatus::InDPminus: return "InDPminus";
    case DPStatus::NotDP: return "NotDP";
  }
  return "?";
}

namespace {

Vector frame_null(const Vector& spatial) {
  Vector k(spatial.size() + 1);
  k[0] = 1.0;
  k.tail(spatial.size()) = spatial;
  return k;
}

void check_dim(const OrientedPoint& p, Eigen::Index n) {
  if (n != p.dim()) throw std::invalid_argument("tensor dimension does not match the point");
}

}  // namespace

DPVerdict dp1_check(const OrientedPoint& p, const Vector& w, double tol_dp) {
  check_dim(p, w.size());
  const Vector wh = p.covector_to_frame(w);
  const auto spatial = wh.tail(wh.size() - 1);
  const double len = spatial.norm();

  DPVerdict v;
  v.margin = wh[0] - len;
  v.boundary = std::abs(v.margin) <= tol_dp;
  const double minus_margin = -wh[0] - len;
  if (v.margin >= -tol_dp)
    v.status = DPStatus::InDPplus;
  else if (minus_margin >= -tol_dp)
    v.status = DPStatus::InDPminus;
  else
    v.status = DPStatus::NotDP;

  Vector dir = len > 0 ? Vector(-spatial / len) : Vector::Unit(spatial.size(), 0);
  v.witness_k = p.frame() * frame_null(dir);
  v.witness_l = v.witness_k;
  return v;
}

NullPairMinimum null_pair_minimum(const Matrix& t_hat) {
  const int n = static_cast<int>(t_hat.rows());
  if (n < 2) throw std::invalid_argument("null_pair_minimum: dimension must be >= 2");
  const int d = n - 1;
  const double c = t_hat(0, 0);
  const Vector b = t_hat.col(0).tail(d);
  const Matrix a = t_hat.bottomRightCorner(d, d);

  // For fixed n the inner minimum over m is w0 - |w| with w = T(., e0 + n).
  auto objective = [&](const Vector& x, Vector* grad) {
    const Vector w = b + a * x;
    const double len = w.norm();
    if (grad) {
      *grad = b;
      if (len > 0) *grad -= a * (w / len);
    }
    return c + b.dot(x) - len;
  };
  SphereMinimum best = minimize_on_sphere(d, objective);

  NullPairMinimum out;
  out.margin = best.value;
  out.n = best.point;
  const Vector w = b + a * best.point;
  out.m = w.norm() > 0 ? Vector(-w / w.norm()) : best.point;
  return out;
}

NullConeMinimum null_cone_minimum(const Matrix& t_hat) {
  const int n = static_cast<int>(t_hat.rows());
  if (n < 2) throw std::invalid_argument("null_cone_minimum: dimension must be >= 2");
  const int d = n - 1;
  const double c = t_hat(0, 0);
  const Vector b = t_hat.col(0).tail(d);
  const Matrix a = t_hat.bottomRightCorner(d, d);
  auto objective = [&](const Vector& x, Vector* grad) {
    const Vector ax = a * x;
    if (grad) *grad = 2.0 * (b + ax);
    return c + 2.0 * b.dot(x) + x.dot(ax);
  };
  SphereMinimum best = minimize_on_sphere(d, objective);
  return {best.value, best.point};
}

DPVerdict dp2_check(const OrientedPoint& p, const SymTensor2& t, double tol_dp) {
  check_dim(p, t.dim());
  const Matrix t_hat = p.to_frame(t.components());
  const NullPairMinimum plus = null_pair_minimum(t_hat);

  DPVerdict v;
  v.margin = plus.margin;
  v.boundary = std::abs(plus.margin) <= tol_dp;
  v.witness_k = p.frame() * frame_null(plus.n);
  v.witness_l = p.frame() * frame_null(plus.m);
  if (plus.margin >= -tol_dp) {
    v.status = DPStatus::InDPplus;
    return v;
  }
  const NullPairMinimum minus = null_pair_minimum(-t_hat);
  v.status = minus.margin >= -tol_dp ? DPStatus::InDPminus : DPStatus::NotDP;
  return v;
}

ConformalFit conformal_fit(const OrientedPoint& p, const SymTensor2& t) {
  check_dim(p, t.dim());
  const int n = p.dim();
  const Matrix t_hat = p.to_frame(t.components());
  const Matrix eta = minkowski_eta(n);
  ConformalFit fit;
  fit.lambda = (eta * t_hat).trace() / n;
  const double scale = std::max(t_hat.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  fit.residual = (t_hat - fit.lambda * eta).cwiseAbs().maxCoeff() / scale;
  return fit;
}

std::optional<double> conformal_factor(const OrientedPoint& p, const SymTensor2& t, double tol) {
  const ConformalFit fit = conformal_fit(p, t);
  if (fit.residual < tol && fit.lambda > 0.0) return fit.lambda;
  return std::nullopt;
}

NullEigenResult null_eigenvectors(const OrientedPoint& p, const SymTensor2& t, double tol_null) {
  check_dim(p, t.dim());
  const int n = p.dim();
  const Matrix eta = minkowski_eta(n);
  const Matrix t_hat = p.to_frame(t.components());
  const double scale = std::max(t_hat.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());

  NullEigenResult out;
  std::vector<Vector> found;  // frame components, for de-duplication

  auto add = [&](Vector vh, double lambda_hint) {
    if (vh[0] < 0) vh = -vh;
    if (!(vh[0] > 1e-12 * vh.norm())) return;
    vh /= vh[0];
    if (std::abs(vh.dot(eta * vh)) > tol_null * vh.squaredNorm() * 1e3) return;
    for (const Vector& f : found)
      if ((f - vh).cwiseAbs().maxCoeff() < 1e-8) return;
    // Least-squares eigenvalue for this vector.
    const Vector gv = eta * vh;
    const Vector tv = t_hat * vh;
    const double lambda = gv.squaredNorm() > 0 ? gv.dot(tv) / gv.squaredNorm() : lambda_hint;
    NullEigenpair pair;
    pair.eigenvalue = lambda;
    pair.residual = (tv - lambda * gv).cwiseAbs().maxCoeff();
    pair.vector = p.frame() * vh;
    found.push_back(vh);
    out.pairs.push_back(std::move(pair));
  };

  // Basis of null vectors for an eta-orthonormal set: u0 +- u1, u0 + ui.
  auto add_cone_basis = [&](const Vector& u0, const std::vector<Vector>& spatial, double lambda) {
    if (spatial.empty()) return;
    add(u0 + spatial[0], lambda);
    add(u0 - spatial[0], lambda);
    for (std::size_t i = 1; i < spatial.size(); ++i) add(u0 + spatial[i], lambda);
  };

  const ConformalFit fit = conformal_fit(p, t);
  if (fit.residual < kTolConformal) {
    out.degenerate = true;
    out.family = true;
    std::vector<Vector> spatial;
    for (int i = 1; i < n; ++i) spatial.push_back(Vector::Unit(n, i));
    add_cone_basis(Vector::Unit(n, 0), spatial, fit.lambda);
    return out;
  }

  // Spectrum of eta T_hat; defective (Jordan) blocks split by ~sqrt(eps), so
  // near-real eigenvalues are clustered before kernel extraction.
  Eigen::EigenSolver<Matrix> es(eta * t_hat, false);
  std::vector<double> reals;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const auto ev = es.eigenvalues()[i];
    if (std::abs(ev.imag()) <= 1e-6 * scale) reals.push_back(ev.real());
  }
  std::sort(reals.begin(), reals.end());
  std::vector<double> clusters;
  for (std::size_t i = 0; i < reals.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < reals.size() && reals[j] - reals[i] <= 1e-6 * scale) sum += reals[j++];
    clusters.push_back(sum / static_cast<double>(j - i));
    i = j;
  }

  for (double lambda : clusters) {
    Eigen::SelfAdjointEigenSolver<Matrix> ks(t_hat - lambda * eta);
    std::vector<Vector> kernel;
    for (int i = 0; i < n; ++i)
      if (std::abs(ks.eigenvalues()[i]) <= 1e-7 * scale) kernel.push_back(ks.eigenvectors().col(i));
    if (kernel.empty()) continue;

    const int k = static_cast<int>(kernel.size());
    Matrix basis(n, k);
    for (int i = 0; i < k; ++i) basis.col(i) = kernel[i];
    Eigen::SelfAdjointEigenSolver<Matrix> rs(basis.transpose() * eta * basis);
    std::vector<Vector> pos, neg, zero;
    for (int i = 0; i < k; ++i) {
      const double nu = rs.eigenvalues()[i];
      const Vector u = basis * rs.eigenvectors().col(i);
      if (std::abs(nu) <= 1e-9)
        zero.push_back(u);
      else if (nu > 0)
        pos.push_back(u / std::sqrt(nu));
      else
        neg.push_back(u / std::sqrt(-nu));
    }
    if (!pos.empty() && !neg.empty()) {
      out.family = true;
      add_cone_basis(pos[0], neg, lambda);
    }
    for (const Vector& z : zero) add(z, lambda);
  }
  return out;
}

ZeroTestResult dp_zero_test(const OrientedPoint& p, const SymTensor2& t, const Vector& x, double tol) {
  check_dim(p, x.size());
  if (dp2_check(p, t).status != DPStatus::InDPplus) throw std::invalid_argument("dp_zero_test: T is not in DP+");
  if (!is_future_causal(causal_character(p, x))) throw std::invalid_argument("dp_zero_test: X is not future causal");

  const Matrix eta = minkowski_eta(p.dim());
  const Matrix t_hat = p.to_frame(t.components());
  Vector xh = p.frame_inverse() * x;
  xh /= xh[0];

  ZeroTestResult r;
  const Vector tx = t_hat * xh;
  const Vector gx = eta * xh;
  r.value = xh.dot(tx);
  r.lambda = gx.dot(tx) / gx.squaredNorm();
  r.residual = (tx - r.lambda * gx).cwiseAbs().maxCoeff();
  r.value_zero = std::abs(r.value) <= tol;
  r.eigenvector = r.residual <= tol && std::abs(xh.dot(gx)) <= tol;
  return r;
}

}  // namespace causal
