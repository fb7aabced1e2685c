#pragma once

#include <Eigen/Dense>

#include "ebm/constants.hpp"
#include "ebm/forcing.hpp"
#include "ebm/grid.hpp"
#include "ebm/physics.hpp"

// Spatially averaged (0-D) energy-balance model used as the coarse propagator.
namespace ebm {

enum class MacroForcing { constant, variable };

/// dT/dt in K per year of the 0-D model. `mean_insolation` is the averaged
/// insolation Qbar; the variable variant scales it by 1 + dQ(t) without the
/// random fluctuations.
template <typename Scalar>
Scalar rhs_0d(double t, const Scalar& T, MacroForcing variant, const ForcingSpec& forcing, double mean_insolation,
              const CoefficientParams& p = {}) {
  Scalar q(mean_insolation);
  if (variant == MacroForcing::variable) q *= Scalar(1.0 + delta_q_deterministic(t, forcing));
  return Scalar(kSecondsPerYear) * ((Scalar(1) - albedo_0d(T, p)) * q - outgoing_radiation(T, p)) /
         heat_capacity(T, p);
}

/// Grid-quadrature mean of the insolation profile.
template <typename Scalar>
Scalar mean_insolation(const BasicGrid<Scalar>& grid, const CoefficientParams& p = {}) {
  VectorX<Scalar> q = grid.nodes().unaryExpr([&](Scalar phi) { return insolation(phi, p); });
  return spatial_mean(q, grid);
}

template <typename Scalar>
class MacroModel {
 public:
  using Vector = VectorX<Scalar>;

  MacroModel(CoefficientParams params, ForcingSpec forcing, double mean_insolation, MacroForcing variant)
      : params_(params), forcing_(std::move(forcing)), q_bar_(mean_insolation), variant_(variant) {}

  Scalar rate(double t, const Scalar& T) const { return rhs_0d(t, T, variant_, forcing_, q_bar_, params_); }

  template <typename Derived>
  Vector operator()(double t, const Eigen::MatrixBase<Derived>& state) const {
    Vector out(1);
    out[0] = rate(t, state[0]);
    return out;
  }

  MacroForcing variant() const { return variant_; }
  double mean_insolation() const { return q_bar_; }

 private:
  CoefficientParams params_;
  ForcingSpec forcing_;
  double q_bar_;
  MacroForcing variant_;
};

}  // namespace ebm
