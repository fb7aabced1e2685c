#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebm/ode/tridiagonal.hpp"

// Time integrators for y' = f(t, y) on Eigen vectors.
//
// explicit_euler: y_{n+1} = y_n + h f(t_n, y_n) with a fixed step; the last
//   step is shortened so the integration ends exactly on t1.
// adaptive_stiff: implicit Euler advanced with a trapezoidal error estimate
//   e = h/2 (f_{n+1} - f_n). A step is accepted when
//   |e|_inf <= rel_tol |y_n|_inf + abs_tol; the next step aims for
//   error_target times that bound. The implicit stage is solved by a
//   damped Newton iteration on a finite-difference Jacobian that is refreshed
//   once per step and again after a convergence failure.
namespace ebm::ode {

enum class Method { explicit_euler, adaptive_stiff };

struct IntegratorSpec {
  Method kind = Method::explicit_euler;
  double fixed_step = 0.005;  // years, explicit Euler only
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 selects a starting step automatically
  double min_step = 1e-12;
  int max_newton_iterations = 8;
  // Fraction of the tolerance the step-size controller aims for. Acceptance
  // still uses the full tolerance; aiming lower keeps the accumulated global
  // error of the first-order method within 100x the tolerance.
  double error_target = 0.05;
  // Half bandwidth of df/dy; negative means dense. The micro model is tridiagonal (1).
  int jacobian_bandwidth = -1;

  static IntegratorSpec euler(double step) {
    IntegratorSpec s;
    s.kind = Method::explicit_euler;
    s.fixed_step = step;
    return s;
  }
  static IntegratorSpec adaptive(double rel_tol = 1e-6, double abs_tol = 1e-6, int bandwidth = -1) {
    IntegratorSpec s;
    s.kind = Method::adaptive_stiff;
    s.rel_tol = rel_tol;
    s.abs_tol = abs_tol;
    s.jacobian_bandwidth = bandwidth;
    return s;
  }

  void validate() const {
    if (kind == Method::explicit_euler && !(fixed_step > 0.0))
      throw std::invalid_argument("integrator: fixed_step must be positive");
    if (kind == Method::adaptive_stiff) {
      if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw std::invalid_argument("integrator: tolerances must be positive");
      if (!(max_step > 0.0)) throw std::invalid_argument("integrator: max_step must be positive");
      if (initial_step < 0.0) throw std::invalid_argument("integrator: initial_step must be non-negative");
      if (max_newton_iterations < 1) throw std::invalid_argument("integrator: need at least one Newton iteration");
      if (!(error_target > 0.0 && error_target <= 1.0))
        throw std::invalid_argument("integrator: error_target must lie in (0, 1]");
    }
  }
};

struct SolveStats {
  long steps_taken = 0;
  long rhs_evaluations = 0;
  long rejected_steps = 0;
  long jacobian_evaluations = 0;

  SolveStats& operator+=(const SolveStats& o) {
    steps_taken += o.steps_taken;
    rhs_evaluations += o.rhs_evaluations;
    rejected_steps += o.rejected_steps;
    jacobian_evaluations += o.jacobian_evaluations;
    return *this;
  }
};

template <typename Scalar>
struct SolveResult {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> final_state;
  SolveStats stats;
};

template <typename Scalar>
struct DenseSolution {
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> states;  // one per output time
  SolveStats stats;
};

class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t) : std::runtime_error(format(what, t)), time_(t) {}
  double time() const { return time_; }

 private:
  static std::string format(const std::string& what, double t) {
    std::ostringstream s;
    s.precision(17);
    s << what << " at t = " << t;
    return s.str();
  }
  double time_;
};

namespace detail {

template <typename Vector>
bool all_finite(const Vector& v) {
  return v.allFinite();
}

// Number of fixed steps needed to cover `span` with step h; tolerant to the
// representation error of h (0.005 * 200 must give 200 steps, not 201).
inline long euler_step_count(double span, double h) {
  const double q = span / h;
  const double n = std::ceil(q - 1e-9 * std::max(1.0, q));
  return std::max(1L, static_cast<long>(n));
}

template <typename Rhs, typename Scalar>
void euler_advance(const Rhs& f, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y, double t0, double t1, double h,
                   SolveStats& stats) {
  const long n = euler_step_count(t1 - t0, h);
  for (long j = 0; j < n; ++j) {
    const double t = t0 + static_cast<double>(j) * h;
    const double step = j + 1 == n ? t1 - t : h;
    y += Scalar(step) * f(t, y);
    ++stats.rhs_evaluations;
    ++stats.steps_taken;
    if (!all_finite(y)) throw IntegrationError("explicit Euler produced a non-finite state", t + step);
  }
}

// State carried between segments of an adaptive integration.
template <typename Scalar>
struct AdaptiveState {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  Vector y;
  Vector f;         // f(t, y)
  double t = 0.0;
  double h = 0.0;   // proposed next step, unclipped
};

template <typename Scalar>
class IterationMatrix {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  explicit IterationMatrix(int bandwidth) : bandwidth_(bandwidth) {}

  // Finite-difference df/dy at (t, y) with f0 = f(t, y). Banded Jacobians use
  // column grouping so a tridiagonal system costs three extra evaluations.
  template <typename Rhs>
  void update_jacobian(const Rhs& f, double t, const Vector& y, const Vector& f0, SolveStats& stats) {
    const Eigen::Index n = y.size();
    const Scalar sqrt_eps = std::sqrt(std::numeric_limits<Scalar>::epsilon());
    jac_.setZero(n, n);
    const bool banded = bandwidth_ >= 0 && 2 * bandwidth_ + 1 < n;
    const Eigen::Index stride = banded ? 2 * bandwidth_ + 1 : n;
    Vector delta(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      using std::abs;
      const Scalar d = sqrt_eps * std::max(Scalar(1), abs(y[j]));
      delta[j] = (y[j] + d) - y[j];  // exactly representable increment
    }
    for (Eigen::Index group = 0; group < stride; ++group) {
      Vector probe = y;
      for (Eigen::Index j = group; j < n; j += stride) probe[j] += delta[j];
      const Vector df = f(t, probe) - f0;
      ++stats.rhs_evaluations;
      for (Eigen::Index j = group; j < n; j += stride) {
        Eigen::Index lo = 0, hi = n - 1;
        if (banded) {
          lo = std::max<Eigen::Index>(0, j - bandwidth_);
          hi = std::min<Eigen::Index>(n - 1, j + bandwidth_);
        }
        for (Eigen::Index i = lo; i <= hi; ++i) jac_(i, j) = df[i] / delta[j];
      }
    }
    ++stats.jacobian_evaluations;
    h_ = Scalar(-1);
  }

  // Prepare I - h J for the given step.
  void factor(Scalar h) {
    if (h == h_) return;
    h_ = h;
    const Eigen::Index n = jac_.rows();
    if (bandwidth_ == 1 && n > 2) {
      lower_.resize(n);
      diag_.resize(n);
      upper_.resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        diag_[i] = Scalar(1) - h * jac_(i, i);
        lower_[i] = i > 0 ? -h * jac_(i, i - 1) : Scalar(0);
        upper_[i] = i + 1 < n ? -h * jac_(i, i + 1) : Scalar(0);
      }
    } else {
      lu_.compute(Matrix::Identity(n, n) - h * jac_);
    }
  }

  Vector solve(const Vector& rhs) const {
    if (bandwidth_ == 1 && rhs.size() > 2) return solve_tridiagonal(lower_, diag_, upper_, rhs);
    return lu_.solve(rhs);
  }

 private:
  int bandwidth_;
  Matrix jac_;
  Scalar h_ = Scalar(-1);
  Vector lower_, diag_, upper_;
  Eigen::PartialPivLU<Matrix> lu_;
};

template <typename Scalar>
Scalar inf_norm(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& v) {
  return v.size() == 0 ? Scalar(0) : v.cwiseAbs().maxCoeff();
}

// Starting step for a first-order method, after Hairer, Norsett and Wanner.
template <typename Scalar>
double initial_step(const AdaptiveState<Scalar>& s, double span, const IntegratorSpec& spec) {
  if (spec.initial_step > 0.0) return std::min({spec.initial_step, spec.max_step, span});
  const auto scale = (spec.abs_tol + spec.rel_tol * s.y.cwiseAbs().array()).matrix();
  const double d0 = double(s.y.cwiseQuotient(scale).cwiseAbs().maxCoeff());
  const double d1 = double(s.f.cwiseQuotient(scale).cwiseAbs().maxCoeff());
  double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h = std::min({h, spec.max_step, span});
  return std::max(h, spec.min_step);
}

// Solve z - y - h f(t1, z) = 0. Returns false when Newton stalls.
template <typename Rhs, typename Scalar>
bool newton_solve(const Rhs& f, double t_new, Scalar h, const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& y,
                  Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& z, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& fz,
                  IterationMatrix<Scalar>& matrix, Scalar newton_tol, int max_iterations, SolveStats& stats) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (!all_finite(z)) return false;
  fz = f(t_new, z);
  ++stats.rhs_evaluations;
  Vector residual = z - y - h * fz;
  Scalar res_norm = inf_norm(residual);
  matrix.factor(h);
  for (int it = 0; it < max_iterations; ++it) {
    const Vector dz = matrix.solve(-residual);
    if (!all_finite(dz)) return false;
    Scalar lambda(1);
    for (int damp = 0;; ++damp) {
      Vector trial = z + lambda * dz;
      if (!all_finite(trial)) return false;
      Vector f_trial = f(t_new, trial);
      ++stats.rhs_evaluations;
      Vector r_trial = trial - y - h * f_trial;
      const Scalar r_norm = inf_norm(r_trial);
      if (r_norm <= res_norm || r_norm <= newton_tol || damp == 3) {
        z = std::move(trial);
        fz = std::move(f_trial);
        residual = std::move(r_trial);
        res_norm = r_norm;
        break;
      }
      lambda /= Scalar(2);
    }
    if (lambda * inf_norm(dz) <= newton_tol) return true;
  }
  return false;
}

// Advance an adaptive integration to exactly t_target. The last step is
// clipped onto t_target; the unclipped proposal survives in s.h so the next
// segment starts from the step size the controller wanted.
template <typename Rhs, typename Scalar>
void adaptive_advance(const Rhs& f, AdaptiveState<Scalar>& s, double t_target, const IntegratorSpec& spec,
                      IterationMatrix<Scalar>& matrix, SolveStats& stats) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const double t_scale = std::max({1.0, std::abs(s.t), std::abs(t_target)});
  while (s.t < t_target) {
    double h = std::min(s.h, spec.max_step);
    bool lands = false;
    if (s.t + h >= t_target - 1e-14 * t_scale) {
      h = t_target - s.t;
      lands = true;
    }
    const Scalar y_norm = inf_norm(s.y);
    const Scalar tol = Scalar(spec.rel_tol) * y_norm + Scalar(spec.abs_tol);

    matrix.update_jacobian(f, s.t, s.y, s.f, stats);
    Vector z = s.y + Scalar(h) * s.f;
    Vector fz;
    bool converged =
        newton_solve(f, s.t + h, Scalar(h), s.y, z, fz, matrix, Scalar(0.01) * tol, spec.max_newton_iterations, stats);
    if (!converged && all_finite(z)) {
      // Retry once with a Jacobian taken at the stalled iterate.
      const Vector f_at = f(s.t + h, z);
      ++stats.rhs_evaluations;
      if (all_finite(f_at)) {
        matrix.update_jacobian(f, s.t + h, z, f_at, stats);
        z = s.y + Scalar(h) * s.f;
        converged = newton_solve(f, s.t + h, Scalar(h), s.y, z, fz, matrix, Scalar(0.01) * tol,
                                 spec.max_newton_iterations, stats);
      }
    }
    if (!converged) {
      ++stats.rejected_steps;
      s.h = 0.25 * h;
      if (s.h < spec.min_step) throw IntegrationError("Newton iteration failed below the minimum step", s.t);
      continue;
    }

    const Scalar err = inf_norm(Vector(Scalar(h / 2) * (fz - s.f)));
    double factor = 5.0;
    if (err > Scalar(0)) factor = std::min(5.0, std::max(0.2, 0.9 * std::sqrt(spec.error_target * double(tol / err))));
    if (err <= tol) {
      s.t = lands ? t_target : s.t + h;
      s.y = std::move(z);
      s.f = std::move(fz);
      ++stats.steps_taken;
      // A clipped step says nothing about the step the controller wanted.
      s.h = lands ? std::max(s.h, h * factor) : h * factor;
    } else {
      ++stats.rejected_steps;
      s.h = h * std::min(factor, 1.0);
      if (s.h < spec.min_step) throw IntegrationError("step size fell below the minimum step", s.t);
    }
  }
}

}  // namespace detail

/// Integrate from t0 to t1 and return the state at t1.
template <typename Rhs, typename Derived>
SolveResult<typename Derived::Scalar> integrate(const Rhs& f, const Eigen::MatrixBase<Derived>& y0, double t0,
                                                double t1, const IntegratorSpec& spec) {
  using Scalar = typename Derived::Scalar;
  spec.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integrate: need t1 > t0");
  if (!y0.allFinite()) throw IntegrationError("non-finite initial state", t0);
  SolveResult<Scalar> result;
  if (spec.kind == Method::explicit_euler) {
    result.final_state = y0;
    detail::euler_advance(f, result.final_state, t0, t1, spec.fixed_step, result.stats);
    return result;
  }
  detail::AdaptiveState<Scalar> s;
  s.t = t0;
  s.y = y0;
  s.f = f(t0, s.y);
  ++result.stats.rhs_evaluations;
  s.h = detail::initial_step(s, t1 - t0, spec);
  detail::IterationMatrix<Scalar> matrix(spec.jacobian_bandwidth);
  detail::adaptive_advance(f, s, t1, spec, matrix, result.stats);
  result.final_state = std::move(s.y);
  return result;
}

/// Integrate from t0 to t1 and record the state at each requested time
/// (sorted, inside [t0, t1]). Euler restarts its fixed grid at every output
/// time; the adaptive method clips steps onto the output times.
template <typename Rhs, typename Derived>
DenseSolution<typename Derived::Scalar> integrate_dense(const Rhs& f, const Eigen::MatrixBase<Derived>& y0,
                                                        double t0, double t1, std::span<const double> output_times,
                                                        const IntegratorSpec& spec) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  spec.validate();
  if (!(t1 > t0)) throw std::invalid_argument("integrate_dense: need t1 > t0");
  if (!y0.allFinite()) throw IntegrationError("non-finite initial state", t0);
  for (std::size_t i = 0; i < output_times.size(); ++i) {
    if (output_times[i] < t0 || output_times[i] > t1)
      throw std::invalid_argument("integrate_dense: output time outside [t0, t1]");
    if (i > 0 && output_times[i] < output_times[i - 1])
      throw std::invalid_argument("integrate_dense: output times must be sorted");
  }

  DenseSolution<Scalar> out;
  out.states.reserve(output_times.size());
  if (spec.kind == Method::explicit_euler) {
    Vector y = y0;
    double t = t0;
    for (double target : output_times) {
      if (target > t) {
        detail::euler_advance(f, y, t, target, spec.fixed_step, out.stats);
        t = target;
      }
      out.states.push_back(y);
    }
    if (t < t1) detail::euler_advance(f, y, t, t1, spec.fixed_step, out.stats);
    return out;
  }

  detail::AdaptiveState<Scalar> s;
  s.t = t0;
  s.y = y0;
  s.f = f(t0, s.y);
  ++out.stats.rhs_evaluations;
  s.h = detail::initial_step(s, t1 - t0, spec);
  detail::IterationMatrix<Scalar> matrix(spec.jacobian_bandwidth);
  for (double target : output_times) {
    if (target > s.t) detail::adaptive_advance(f, s, target, spec, matrix, out.stats);
    out.states.push_back(s.y);
  }
  if (s.t < t1) detail::adaptive_advance(f, s, t1, spec, matrix, out.stats);
  return out;
}

}  // namespace ebm::ode
