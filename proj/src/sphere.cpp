#include "causal/sphere.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <utility>

#include "causal/sampler.hpp"

namespace causal {
namespace {

std::vector<Vector> icosphere(int levels) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                                    {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& p : v) p.normalize();
  std::vector<std::array<int, 3>> faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                           {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                           {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                           {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[a] + v[b]).normalized());
      const int idx = static_cast<int>(v.size()) - 1;
      mid.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      const int a = midpoint(f[0], f[1]);
      const int b = midpoint(f[1], f[2]);
      const int c = midpoint(f[2], f[0]);
      next.push_back({f[0], a, c});
      next.push_back({f[1], b, a});
      next.push_back({f[2], c, b});
      next.push_back({a, b, c});
    }
    faces = std::move(next);
  }
  std::vector<Vector> out;
  out.reserve(v.size());
  for (const auto& p : v) out.emplace_back(Vector(p));
  return out;
}

std::vector<Vector> build_grid(int d) {
  std::vector<Vector> out;
  if (d == 1) {
    out.push_back(Vector::Constant(1, 1.0));
    out.push_back(Vector::Constant(1, -1.0));
  } else if (d == 2) {
    constexpr int kAngles = 256;
    for (int i = 0; i < kAngles; ++i) {
      const double a = 2.0 * std::numbers::pi * i / kAngles;
      Vector p(2);
      p << std::cos(a), std::sin(a);
      out.push_back(p);
    }
  } else if (d == 3) {
    out = icosphere(3);
  } else {
    // Box-Muller on Halton coordinates gives isotropic directions.
    constexpr std::size_t kCount = 4096;
    const int pairs = (d + 1) / 2;
    for (std::size_t i = 0; i < kCount; ++i) {
      Vector p(d);
      for (int k = 0; k < pairs; ++k) {
        const double u1 = radical_inverse(i + 1, nth_prime(2 * k));
        const double u2 = radical_inverse(i + 1, nth_prime(2 * k + 1));
        const double r = std::sqrt(-2.0 * std::log(std::max(u1, 1e-300)));
        p[2 * k] = r * std::cos(2.0 * std::numbers::pi * u2);
        if (2 * k + 1 < d) p[2 * k + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
      }
      if (p.norm() > 0) out.push_back(p.normalized());
    }
  }
  return out;
}

Vector tangent(const Vector& g, const Vector& x) { return g - g.dot(x) * x; }

SphereMinimum polish(const SphereObjective& f, Vector x, double fx, int steps) {
  Vector grad(x.size());
  f(x, &grad);
  Vector gt = tangent(grad, x);
  double gn = gt.norm();
  double t = gn > 0 ? 0.1 / gn : 0.0;
  for (int it = 0; it < steps && gn > 1e-14; ++it) {
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      Vector y = (x - t * gt).normalized();
      const double fy = f(y, nullptr);
      if (fy <= fx - 1e-4 * t * gn * gn) {
        // Flat valleys: stop once a step no longer changes the value.
        moved = fx - fy > 1e-15 * (1.0 + std::abs(fx));
        x = std::move(y);
        fx = fy;
        break;
      }
      t *= 0.5;
    }
    if (!moved) break;
    t *= 2.0;
    f(x, &grad);
    gt = tangent(grad, x);
    gn = gt.norm();
  }
  return {std::move(x), fx};
}

}  // namespace

const std::vector<Vector>& sphere_grid(int d) {
  static std::mutex mu;
  static std::map<int, std::vector<Vector>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, build_grid(d)).first;
  return it->second;
}

SphereMinimum minimize_on_sphere(int d, const SphereObjective& f, int polish_steps) {
  if (d < 1) throw std::invalid_argument("minimize_on_sphere: dimension must be >= 1");
  const auto& grid = sphere_grid(d);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f(grid[i], nullptr);

  std::vector<std::size_t> order(grid.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });

  SphereMinimum best{grid[order[0]], vals[order[0]]};
  if (d == 1) return best;

  // Distinct basins: seeds at least ~20 degrees apart.
  constexpr int kSeeds = 6;
  constexpr double kMinCos = 0.94;
  std::vector<std::size_t> seeds;
  for (std::size_t idx : order) {
    bool far = true;
    for (std::size_t s : seeds)
      if (grid[idx].dot(grid[s]) > kMinCos) {
        far = false;
        break;
      }
    if (far) seeds.push_back(idx);
    if (static_cast<int>(seeds.size()) == kSeeds) break;
  }
  for (std::size_t s : seeds) {
    SphereMinimum m = polish(f, grid[s], vals[s], polish_steps);
    if (m.value < best.value) best = std::move(m);
  }
  return best;
}

}  // namespace causal
