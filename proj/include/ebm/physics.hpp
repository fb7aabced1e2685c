#pragma once

#include <cmath>
#include <stdexcept>

#include "ebm/constants.hpp"

// Coefficient laws of the energy-balance model. All functions are templated on
// the scalar type so they compose with Eigen expressions and alternative
// number types.
namespace ebm {

/// Heat capacity C(T) = (C1 + C2 tanh(C3 (T - T_s))) * 1e8, in J m^-2 K^-1.
template <typename Scalar>
Scalar heat_capacity(const Scalar& T, const CoefficientParams& p = {}) {
  using std::tanh;
  return (Scalar(p.C1) + Scalar(p.C2) * tanh(Scalar(p.C3) * (T - Scalar(p.T_s)))) * Scalar(1e8);
}

/// Emissivity 1 - eps1 tanh((T/T_eps)^6).
template <typename Scalar>
Scalar emissivity(const Scalar& T, const CoefficientParams& p = {}) {
  using std::tanh;
  const Scalar r = T / Scalar(p.T_eps);
  const Scalar r2 = r * r;
  return Scalar(1) - Scalar(p.eps1) * tanh(r2 * r2 * r2);
}

/// Latitude-dependent albedo of the 1-D model. The value at exactly T_s
/// belongs to the ice branch.
template <typename Scalar>
Scalar albedo_1d(const Scalar& phi, const Scalar& T, const CoefficientParams& p = {}) {
  using std::cos;
  if (T <= Scalar(p.T_s)) return Scalar(p.alpha_max);
  const Scalar c = cos(phi);
  return Scalar(p.alpha1) + Scalar(p.alpha2) * (Scalar(p.alpha3) * c * c - Scalar(p.alpha4));
}

/// Ice-free part of albedo_1d at a node whose cos^2(phi) is already known.
inline double warm_albedo_from_cos2(double cos2_phi, const CoefficientParams& p = {}) {
  return p.alpha1 + p.alpha2 * (p.alpha3 * cos2_phi - p.alpha4);
}

/// Step albedo of the 0-D model.
template <typename Scalar>
Scalar albedo_0d(const Scalar& T, const CoefficientParams& p = {}) {
  return T <= Scalar(p.T_s) ? Scalar(p.alpha_max) : Scalar(p.alpha_min);
}

/// Insolation Q(phi) = (S/4)(Q1 + Q2 sin^2 phi), W m^-2.
template <typename Scalar>
Scalar insolation(const Scalar& phi, const CoefficientParams& p = {}) {
  using std::sin;
  const Scalar s = sin(phi);
  return Scalar(kMeanInsolation) * (Scalar(p.Q1) + Scalar(p.Q2) * s * s);
}

/// Black-body emission eps(T) sigma T^4, W m^-2.
template <typename Scalar>
Scalar outgoing_radiation(const Scalar& T, const CoefficientParams& p = {}) {
  const Scalar T2 = T * T;
  return emissivity(T, p) * Scalar(kStefanBoltzmann) * T2 * T2;
}

/// Stationary temperature ((1-alpha) Q / (eps sigma))^(1/4) of the 0-D model
/// with frozen coefficients.
template <typename Scalar>
Scalar stationary_0d(const Scalar& alpha, const Scalar& eps, const Scalar& Q) {
  using std::sqrt;
  if (!(eps > Scalar(0))) throw std::domain_error("stationary_0d: emissivity must be positive");
  if (!(alpha >= Scalar(0) && alpha < Scalar(1)))
    throw std::domain_error("stationary_0d: albedo must lie in [0, 1)");
  if (!(Q > Scalar(0))) throw std::domain_error("stationary_0d: insolation must be positive");
  return sqrt(sqrt((Scalar(1) - alpha) * Q / (eps * Scalar(kStefanBoltzmann))));
}

}  // namespace ebm
