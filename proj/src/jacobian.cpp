#include "causal/jacobian.hpp"

#include <cmath>
#include <vector>

namespace causal {

Matrix jacobian(std::span<const Expr> components, std::span<const double> values, std::size_t seeded) {
  if (seeded > values.size()) throw std::invalid_argument("jacobian: more seeds than bound symbols");
  std::vector<Dual> duals;
  duals.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    duals.push_back(i < seeded ? Dual::variable(values[i], i, seeded) : Dual::constant(values[i], seeded));
  Matrix j(static_cast<Eigen::Index>(components.size()), static_cast<Eigen::Index>(seeded));
  for (std::size_t a = 0; a < components.size(); ++a) {
    const Dual r = eval_dual(components[a], duals);
    for (std::size_t b = 0; b < seeded; ++b) j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = r.d(b);
  }
  return j;
}

bool is_singular(const Matrix& j, double tol_det) {
  if (j.rows() != j.cols()) return true;
  const double scale = j.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  const double det = (j / scale).determinant();
  return !(std::abs(det) >= tol_det);
}

}  // namespace causal
