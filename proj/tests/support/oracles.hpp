#pragma once

// Reference computations used by the tests. None of these call into the
// library's search or eigen routines; they are deliberately naive.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline Matrix eta(int n) {
  Matrix e = -Matrix::Identity(n, n);
  e(0, 0) = 1.0;
  return e;
}

// Frame null vector e0 + n with n at polar angles (th, ph) in 3 spatial dims.
inline Vector null4(double th, double ph) {
  Vector k(4);
  k << 1.0, std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th);
  return k;
}

// min over unit m of T(k, e0 + m) = w0 - |w_spatial| with w = T k.
inline double inner_min(const Matrix& t, const Vector& k) {
  const Vector w = t * k;
  return w[0] - w.tail(w.size() - 1).norm();
}

struct PairResult {
  double margin;
  double th, ph;
};

// Null-pair margin of a 4x4 frame tensor: 64 x 64 cell-centred grid over
// (theta, phi), then a shrinking 9 x 9 pattern search around the best cells.
inline PairResult null_pair_margin(const Matrix& t) {
  constexpr int kGrid = 64;
  const double pi = std::numbers::pi;
  const double dth = pi / kGrid, dph = 2.0 * pi / kGrid;
  std::vector<PairResult> cells;
  cells.reserve(kGrid * kGrid);
  for (int i = 0; i < kGrid; ++i)
    for (int j = 0; j < kGrid; ++j) {
      const double th = (i + 0.5) * dth, ph = j * dph;
      cells.push_back({inner_min(t, null4(th, ph)), th, ph});
    }
  std::partial_sort(cells.begin(), cells.begin() + 8, cells.end(),
                    [](const PairResult& a, const PairResult& b) { return a.margin < b.margin; });
  PairResult best = cells.front();
  for (int c = 0; c < 8; ++c) {
    PairResult cur = cells[c];
    double hth = dth, hph = dph;
    for (int round = 0; round < 40; ++round) {
      PairResult local = cur;
      for (int a = -4; a <= 4; ++a)
        for (int b = -4; b <= 4; ++b) {
          const double th = std::clamp(cur.th + a * hth / 4.0, 0.0, pi);
          const double ph = cur.ph + b * hph / 4.0;
          const double v = inner_min(t, null4(th, ph));
          if (v < local.margin) local = {v, th, ph};
        }
      cur = local;
      hth *= 0.5;
      hph *= 0.5;
    }
    if (cur.margin < best.margin) best = cur;
  }
  return best;
}

enum class Status { Plus, Minus, Not };

inline Status status_from_margins(double plus, double minus, double tol) {
  if (plus >= -tol) return Status::Plus;
  if (minus >= -tol) return Status::Minus;
  return Status::Not;
}

// Central difference with step h.
inline double central_diff(const std::function<double(double)>& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// Rotation in the spatial block from a random unit quaternion.
inline Matrix random_rotation4(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  q.normalize();
  Matrix r = Matrix::Identity(4, 4);
  r.block(1, 1, 3, 3) = q.toRotationMatrix();
  return r;
}

inline Matrix boost_x(double rapidity) {
  Matrix b = Matrix::Identity(4, 4);
  b(0, 0) = b(1, 1) = std::cosh(rapidity);
  b(0, 1) = b(1, 0) = std::sinh(rapidity);
  return b;
}

// Proper orthochronous Lorentz transformation: rotation * boost * rotation.
inline Matrix random_lorentz(std::mt19937_64& rng, double max_rapidity = 2.0) {
  std::uniform_real_distribution<double> u(-max_rapidity, max_rapidity);
  return random_rotation4(rng) * boost_x(u(rng)) * random_rotation4(rng);
}

// Future causal frame vector: e0 scaled plus a spatial part of norm <= time.
inline Vector random_future_causal(std::mt19937_64& rng, int n, bool null = false) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector s(n - 1);
  for (int i = 0; i < n - 1; ++i) s[i] = g(rng);
  s.normalize();
  Vector v(n);
  v[0] = 0.5 + 2.0 * u(rng);
  v.tail(n - 1) = s * v[0] * (null ? 1.0 : u(rng));
  return v;
}

}  // namespace oracle
