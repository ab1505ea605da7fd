#pragma once

#include <functional>
#include <vector>

#include "causal/lorentz.hpp"

namespace causal {

/// Objective on the unit sphere S^{d-1} in R^d. Writes the Euclidean gradient
/// into `grad` when non-null.
using SphereObjective = std::function<double(const Vector& x, Vector* grad)>;

struct SphereMinimum {
  Vector point;
  double value = 0.0;
};

/// Deterministic search directions for S^{d-1}: {+1, -1} for d = 1, 256
/// equally spaced angles for d = 2, the 642-vertex level-3 icosphere for
/// d = 3, and 4096 Halton-derived directions beyond that.
const std::vector<Vector>& sphere_grid(int d);

/// Coarse grid followed by projected-gradient polish from the best few grid
/// points; ties are broken by grid index so the result is reproducible.
SphereMinimum minimize_on_sphere(int d, const SphereObjective& f, int polish_steps = 300);

}  // namespace causal
