#pragma once

#include <cmath>
#include <stdexcept>

#include "ebm/grid.hpp"

// Operators linking the 1-D profile (micro) and the 0-D mean temperature
// (macro): restriction R, lifting L and matching P.
namespace ebm::parareal {

using Vector = VectorX<double>;

class Coupling {
 public:
  explicit Coupling(Grid grid) : grid_(std::move(grid)) {}

  const Grid& grid() const { return grid_; }

  /// R: area-weighted spatial mean.
  double restrict(const Vector& profile) const { return spatial_mean(profile, grid_); }

  /// L(T) = T * Psi with Psi = 1, so R(L(T)) = T.
  Vector lift(double T) const {
    if (!(T > 0.0)) throw std::domain_error("lift: mean temperature must be positive");
    return Vector::Constant(grid_.interior_size(), T);
  }

  /// P(T, prior) = prior * (T / R(prior)). A prior already consistent with T
  /// is returned unchanged bit for bit, since the factor is then exactly one.
  Vector project(double T, const Vector& prior) const {
    const double mean = restrict(prior);
    if (mean == 0.0 || !std::isfinite(mean)) throw std::domain_error("project: prior has zero or non-finite mean");
    return prior * (T / mean);
  }

 private:
  Grid grid_;
};

}  // namespace ebm::parareal
