#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ebm {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Uniform colatitude grid on [0, pi/2] with I cells. Unknowns live on the
/// interior nodes 1..I-1; nodes 0 (pole) and I (equator) are reconstructed
/// from the zero-gradient ghost relations T_0 = T_1, T_I = T_{I-1}.
template <typename Scalar>
class BasicGrid {
 public:
  explicit BasicGrid(int cells) : I_(cells) {
    if (cells < 2) throw std::invalid_argument("grid needs at least 2 cells, got " + std::to_string(cells));
    using std::cos;
    using std::sin;
    const Scalar half_pi = Scalar(std::numbers::pi_v<double> / 2.0);
    dphi_ = half_pi / Scalar(I_);
    nodes_.resize(I_ + 1);
    for (int i = 0; i <= I_; ++i) nodes_[i] = Scalar(i) * dphi_;
    nodes_[I_] = half_pi;
    half_nodes_.resize(I_);
    for (int i = 0; i < I_; ++i) half_nodes_[i] = (Scalar(i) + Scalar(0.5)) * dphi_;

    // Exact areas of the dual cells [phi_{i-1/2}, phi_{i+1/2}] on the unit
    // half sphere; they sum to 1 and are proportional to sin(phi_i) inside.
    const Scalar s_half = sin(dphi_ / Scalar(2));
    mean_weights_.resize(I_ + 1);
    mean_weights_[0] = Scalar(1) - cos(dphi_ / Scalar(2));
    for (int i = 1; i < I_; ++i) mean_weights_[i] = Scalar(2) * sin(nodes_[i]) * s_half;
    mean_weights_[I_] = s_half;
    mean_weights_ /= mean_weights_.sum();

    interior_weights_ = mean_weights_.segment(1, I_ - 1);
    interior_weights_[0] += mean_weights_[0];
    interior_weights_[I_ - 2] += mean_weights_[I_];
  }

  int cells() const { return I_; }
  int interior_size() const { return I_ - 1; }
  Scalar dphi() const { return dphi_; }
  /// phi_i = i * dphi, i = 0..I.
  const VectorX<Scalar>& nodes() const { return nodes_; }
  /// phi_{i+1/2} = (i + 1/2) * dphi, i = 0..I-1.
  const VectorX<Scalar>& half_nodes() const { return half_nodes_; }
  /// Interior nodes 1..I-1 (the state layout).
  auto interior_nodes() const { return nodes_.segment(1, I_ - 1); }

  /// Quadrature weights over all I+1 nodes; they sum to one.
  const VectorX<Scalar>& mean_weights() const { return mean_weights_; }
  /// Same rule applied to an interior state through the ghost relations.
  const VectorX<Scalar>& interior_weights() const { return interior_weights_; }

  /// Full nodal profile (I+1 values) from an interior state.
  template <typename Derived>
  VectorX<Scalar> full_profile(const Eigen::MatrixBase<Derived>& interior) const {
    check_interior(interior.size());
    VectorX<Scalar> full(I_ + 1);
    full.segment(1, I_ - 1) = interior;
    full[0] = interior[0];
    full[I_] = interior[I_ - 2];
    return full;
  }

  void check_interior(Eigen::Index n) const {
    if (n != I_ - 1)
      throw std::invalid_argument("state length " + std::to_string(n) + " does not match grid with " +
                                  std::to_string(I_ - 1) + " interior nodes");
  }

 private:
  int I_;
  Scalar dphi_;
  VectorX<Scalar> nodes_;
  VectorX<Scalar> half_nodes_;
  VectorX<Scalar> mean_weights_;
  VectorX<Scalar> interior_weights_;
};

using Grid = BasicGrid<double>;

inline Grid build_grid(int cells) { return Grid(cells); }

/// Area-weighted mean over the half sphere. Accepts either an interior state
/// (I-1 values) or a full nodal profile (I+1 values).
template <typename Scalar, typename Derived>
Scalar spatial_mean(const Eigen::MatrixBase<Derived>& profile, const BasicGrid<Scalar>& grid) {
  const Eigen::Index n = profile.size();
  if (n == grid.cells() + 1) return grid.mean_weights().dot(profile);
  if (n == grid.interior_size()) return grid.interior_weights().dot(profile);
  throw std::invalid_argument("spatial_mean: profile length " + std::to_string(n) +
                              " matches neither the interior nor the full grid");
}

}  // namespace ebm
