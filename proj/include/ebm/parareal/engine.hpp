#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ebm/macro_model.hpp"
#include "ebm/micro_model.hpp"
#include "ebm/ode/integrator.hpp"
#include "ebm/parareal/coupling.hpp"

// Micro/macro parareal iteration.
//
// Iteration k -> k+1, for subintervals [t_n, t_{n+1}], n = 0..N-1:
//   (a) in parallel: Gbar^{n+1} = G(T_k^n), Fbar^{n+1} = F(U_k^n)
//   (b) jumps:       J^{n+1} = R(Fbar^{n+1}) - Gbar^{n+1}
//   (c) serially:    T_{k+1}^{n+1} = G(T_{k+1}^n) + J^{n+1}
//                    U_{k+1}^{n+1} = P(T_{k+1}^{n+1}, Fbar^{n+1})
// where U are micro profiles, T macro means, F the micro propagator and G the
// macro propagator. The 0th iterate is a serial macro sweep lifted to profiles.
namespace ebm::parareal {

struct PararealConfig {
  int N = 10;
  double t_end = 1000.0;
  double T0 = 285.0;
  ode::IntegratorSpec micro_spec = ode::IntegratorSpec::euler(0.005);
  ode::IntegratorSpec macro_spec = ode::IntegratorSpec::euler(10.0);
  MacroForcing macro_forcing = MacroForcing::constant;
  int max_iterations = -1;            // negative: N
  std::optional<double> stop_tol;     // absolute, K; empty or non-finite disables the tolerance stop
  int workers = 1;

  double dt() const { return t_end / N; }
  int iteration_limit() const { return max_iterations < 0 ? N : max_iterations; }
  /// Throws std::invalid_argument on inconsistent settings.
  void validate() const;
};

/// Serial micro solution sampled at t = 0, 1, ..., t_end.
struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  ode::SolveStats stats;
  double wallclock_s = 0.0;

  double max_abs() const;
};

struct IterationCost {
  double wallclock_fine_s = 0.0;
  double wallclock_coarse_s = 0.0;
  long rhs_evals_fine = 0;
  long rhs_evals_coarse = 0;
};

struct PararealState {
  int k = 0;
  std::vector<double> macro_values;  // T_k^n, n = 0..N
  std::vector<Vector> micro_values;  // U_k^n, n = 0..N
  std::vector<double> jump_values;   // J^n used to build this iterate, n = 1..N (index 0 unused)
  IterationCost cost;                // cost of producing this iterate
};

/// Result of phase (a) applied to one iterate.
struct FineSweep {
  std::vector<double> coarse_end;             // G(T_k^n), stored at n+1
  std::vector<Vector> fine_end;               // F(U_k^n), stored at n+1
  std::vector<std::vector<Vector>> interior;  // per subinterval: states at integer times strictly inside
  std::vector<double> fine_subinterval_s;     // wall-clock of each fine propagation
  IterationCost cost;
};

class PropagatorFailure : public std::runtime_error {
 public:
  PropagatorFailure(int iteration, int subinterval, const std::string& what);
  int iteration() const { return iteration_; }
  int subinterval() const { return subinterval_; }

 private:
  int iteration_;
  int subinterval_;
};

struct IterationRecord {
  int iteration = 0;
  double err_inf = 0.0;         // max over integer times and nodes
  double err_coarse = 0.0;      // max over the subinterval endpoints t_n
  double jump_max = 0.0;
  IterationCost cost;
};

struct ConvergenceHistory {
  int N = 0;
  std::vector<IterationRecord> records;
  double stop_tol = 0.0;  // +inf when no tolerance stop was active
  double macro_sweep_s = 0.0;              // mean coarse wall-clock per iteration
  double mean_fine_subinterval_s = 0.0;    // mean wall-clock of one F_dt call
  double total_wallclock_s = 0.0;
  PararealState final_state;
  std::vector<std::pair<int, std::vector<Vector>>> snapshots;  // dense solutions at requested iterations

  /// Smallest k with err_inf < tol, if reached.
  std::optional<int> iterations_to(double tol) const;
};

class Engine {
 public:
  Engine(PararealConfig config, MicroModel<double> micro, MacroModel<double> macro);

  const PararealConfig& config() const { return config_; }
  const Coupling& coupling() const { return coupling_; }
  const MicroModel<double>& micro() const { return micro_; }
  const MacroModel<double>& macro() const { return macro_; }

  double subinterval_start(int n) const;

  /// F over [t_n, t_{n+1}].
  ode::SolveResult<double> fine(int n, const Vector& state) const;
  /// G over [t_n, t_{n+1}].
  ode::SolveResult<double> coarse(int n, double T) const;

  PararealState initialize() const;
  FineSweep propagate(const PararealState& state) const;
  PararealState correct(const PararealState& state, const FineSweep& sweep) const;
  PararealState iterate(const PararealState& state) const { return correct(state, propagate(state)); }

  /// Dense solution of the iterate at integer times 1..t_end, pieced
  /// together from the iterate's endpoint values and the sweep started from it.
  std::vector<Vector> dense_solution(const PararealState& state, const FineSweep& sweep) const;

  /// Iterates until the error to `reference` drops below the stop tolerance
  /// or the iteration limit is reached.
  ConvergenceHistory run(const Trajectory& reference, const std::set<int>& snapshot_iterations = {}) const;

 private:
  std::vector<double> interior_times(int n) const;

  PararealConfig config_;
  MicroModel<double> micro_;
  MacroModel<double> macro_;
  Coupling coupling_;
};

/// Serial micro integration over [0, t_end] with the same integrator as the
/// parareal fine propagator, sampled at every integer year.
Trajectory compute_reference(const MicroModel<double>& micro, const ode::IntegratorSpec& spec, double t_end,
                             double T0);

/// Default stop tolerance: 1e-2 for adaptive micro integration, otherwise
/// 1e-13 * max(1, |reference|_inf).
double default_stop_tol(const ode::IntegratorSpec& micro_spec, const Trajectory& reference);

/// max over t = 1..t_end of |a(t) - b(t)|_inf; a is indexed from t = 1, b from t = 0.
double max_error(const std::vector<Vector>& dense, const Trajectory& reference);

}  // namespace ebm::parareal
