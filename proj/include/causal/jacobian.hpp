#pragma once

#include <span>

#include "causal/expr.hpp"
#include "causal/lorentz.hpp"

namespace causal {

/// Raised when |det J| < 1e-12 * max|J_ab|^n.
class SingularJacobian : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// J(a, b) = d component_a / d symbol_b for the first `seeded` symbols, by
/// dual seeding. `values` binds every symbol of the components (all
/// components must share one symbol list).
Matrix jacobian(std::span<const Expr> components, std::span<const double> values, std::size_t seeded);

/// Relative singularity test with tol_det = 1e-12 scaled by the max-norm.
bool is_singular(const Matrix& j, double tol_det = 1e-12);

}  // namespace causal
