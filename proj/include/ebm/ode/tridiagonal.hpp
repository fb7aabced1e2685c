#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace ebm::ode {

/// Thomas algorithm for a tridiagonal system. `lower[i]` multiplies x[i-1] in
/// row i (lower[0] unused), `upper[i]` multiplies x[i+1] (upper[n-1] unused).
/// No pivoting: intended for the diagonally dominant matrices I - h J that
/// arise from diffusion operators.
template <typename DerivedL, typename DerivedD, typename DerivedU, typename DerivedB>
Eigen::Matrix<typename DerivedB::Scalar, Eigen::Dynamic, 1> solve_tridiagonal(
    const Eigen::MatrixBase<DerivedL>& lower, const Eigen::MatrixBase<DerivedD>& diag,
    const Eigen::MatrixBase<DerivedU>& upper, const Eigen::MatrixBase<DerivedB>& rhs) {
  using Scalar = typename DerivedB::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Eigen::Index n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiagonal: inconsistent band lengths");
  Vector c(n), x(n);
  Scalar denom = diag[0];
  if (denom == Scalar(0)) throw std::runtime_error("solve_tridiagonal: zero pivot");
  c[0] = n > 1 ? upper[0] / denom : Scalar(0);
  x[0] = rhs[0] / denom;
  for (Eigen::Index i = 1; i < n; ++i) {
    denom = diag[i] - lower[i] * c[i - 1];
    if (denom == Scalar(0)) throw std::runtime_error("solve_tridiagonal: zero pivot");
    c[i] = i + 1 < n ? upper[i] / denom : Scalar(0);
    x[i] = (rhs[i] - lower[i] * x[i - 1]) / denom;
  }
  for (Eigen::Index i = n - 2; i >= 0; --i) x[i] -= c[i] * x[i + 1];
  return x;
}

}  // namespace ebm::ode
