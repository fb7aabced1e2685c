#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "ebm/constants.hpp"
#include "ebm/forcing.hpp"
#include "ebm/grid.hpp"
#include "ebm/physics.hpp"

// Finite-difference semi-discretization of the 1-D energy-balance equation
//
//   C(T) T_t = (1/sin phi) d/dphi (k sin phi dT/dphi) + (1 - alpha) Q (1 + dQ(t)) - eps sigma T^4
//
// on the interior nodes of a BasicGrid, with zero-gradient boundaries.
namespace ebm {

/// How the gradient at the two outermost half nodes is formed.
enum class NeumannRule {
  ghost_node,            // T_0 = T_1, T_I = T_{I-1}: zero boundary flux
  extrapolated_gradient  // Theta_{1/2} = Theta_{3/2}/3, linear through dT/dphi = 0 at the boundary
};

template <typename Scalar>
class MicroModel {
 public:
  using Vector = VectorX<Scalar>;
  /// Optional k(phi, T); when empty the constant k_diff is used.
  using Diffusivity = std::function<Scalar(Scalar, Scalar)>;

  MicroModel(BasicGrid<Scalar> grid, CoefficientParams params, ForcingSpec forcing,
             NeumannRule rule = NeumannRule::ghost_node, Diffusivity diffusivity = {})
      : grid_(std::move(grid)),
        params_(params),
        forcing_(std::move(forcing)),
        rule_(rule),
        diffusivity_(std::move(diffusivity)) {
    using std::cos;
    using std::sin;
    const int n = grid_.interior_size();
    sin_node_.resize(n);
    warm_albedo_.resize(n);
    insolation_.resize(n);
    for (int j = 0; j < n; ++j) {
      const Scalar phi = grid_.nodes()[j + 1];
      const Scalar c = cos(phi);
      sin_node_[j] = sin(phi);
      warm_albedo_[j] = Scalar(warm_albedo_from_cos2(double(c * c), params_));
      insolation_[j] = ebm::insolation(phi, params_);
    }
    sin_half_.resize(grid_.cells());
    for (int i = 0; i < grid_.cells(); ++i) sin_half_[i] = sin(grid_.half_nodes()[i]);
  }

  const BasicGrid<Scalar>& grid() const { return grid_; }
  const CoefficientParams& params() const { return params_; }
  const ForcingSpec& forcing() const { return forcing_; }
  NeumannRule neumann_rule() const { return rule_; }
  Eigen::Index size() const { return grid_.interior_size(); }

  /// kappa at half node i_half (0..I-1), i.e. k evaluated at phi_{i_half+1/2}.
  template <typename Derived>
  Scalar flux_coefficient(int i_half, const Eigen::MatrixBase<Derived>& state) const {
    const int I = grid_.cells();
    if (i_half < 0 || i_half >= I)
      throw std::out_of_range("flux_coefficient: half-node index " + std::to_string(i_half) + " outside [0, " +
                              std::to_string(I - 1) + "]");
    if (!diffusivity_) return Scalar(params_.k_diff);
    const Scalar phi = grid_.half_nodes()[i_half];
    if (i_half == 0) return diffusivity_(phi, state[0]);
    if (i_half == I - 1) return diffusivity_(phi, state[I - 2]);
    return diffusivity_(phi, (state[i_half - 1] + state[i_half]) / Scalar(2));
  }

  /// Discrete (1/sin phi) d/dphi (k sin phi dT/dphi) at every interior node, W m^-2.
  template <typename Derived>
  Vector diffusion(const Eigen::MatrixBase<Derived>& state) const {
    grid_.check_interior(state.size());
    const int I = grid_.cells();
    const Scalar dphi = grid_.dphi();
    // flux[i] = F_{i+1/2}, i = 0..I-1
    Vector flux(I);
    for (int i = 1; i < I - 1; ++i)
      flux[i] = flux_coefficient(i, state) * sin_half_[i] * (state[i] - state[i - 1]) / dphi;
    Scalar theta_lo(0), theta_hi(0);
    if (rule_ == NeumannRule::extrapolated_gradient && I > 2) {
      theta_lo = (state[1] - state[0]) / dphi / Scalar(3);
      theta_hi = (state[I - 2] - state[I - 3]) / dphi / Scalar(3);
    }
    flux[0] = flux_coefficient(0, state) * sin_half_[0] * theta_lo;
    flux[I - 1] = flux_coefficient(I - 1, state) * sin_half_[I - 1] * theta_hi;

    Vector out(I - 1);
    for (int j = 0; j < I - 1; ++j) out[j] = (flux[j + 1] - flux[j]) / (sin_node_[j] * dphi);
    return out;
  }

  /// Right-hand side f(t, T) in K per year.
  template <typename Derived>
  Vector operator()(double t, const Eigen::MatrixBase<Derived>& state) const {
    for (Eigen::Index j = 0; j < state.size(); ++j)
      if (!std::isfinite(double(state[j])))
        throw std::domain_error("micro_rhs: non-finite temperature at node " + std::to_string(j + 1));
    Vector rate = diffusion(state);
    const Scalar forcing_factor = Scalar(1) + Scalar(delta_q(t, forcing_));
    for (Eigen::Index j = 0; j < rate.size(); ++j) {
      const Scalar T = state[j];
      const Scalar albedo = T <= Scalar(params_.T_s) ? Scalar(params_.alpha_max) : warm_albedo_[j];
      const Scalar source = (Scalar(1) - albedo) * insolation_[j] * forcing_factor - outgoing_radiation(T, params_);
      rate[j] = Scalar(kSecondsPerYear) * (rate[j] + source) / heat_capacity(T, params_);
    }
    return rate;
  }

  /// Uniform initial profile.
  Vector uniform(Scalar T) const { return Vector::Constant(size(), T); }

 private:
  BasicGrid<Scalar> grid_;
  CoefficientParams params_;
  ForcingSpec forcing_;
  NeumannRule rule_;
  Diffusivity diffusivity_;
  Vector sin_node_, warm_albedo_, insolation_, sin_half_;
};

/// Convenience form of MicroModel::operator() for one-off evaluations.
template <typename Scalar, typename Derived>
VectorX<Scalar> micro_rhs(double t, const Eigen::MatrixBase<Derived>& state, const BasicGrid<Scalar>& grid,
                          const CoefficientParams& params, const ForcingSpec& forcing) {
  return MicroModel<Scalar>(grid, params, forcing)(t, state);
}

}  // namespace ebm
