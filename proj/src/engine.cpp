#include "ebm/parareal/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "ebm/parareal/parallel.hpp"

namespace ebm::parareal {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string failure_message(int iteration, int subinterval, const std::string& what) {
  std::ostringstream s;
  s << "propagator failed in iteration " << iteration << ", subinterval " << subinterval << ": " << what;
  return s.str();
}

}  // namespace

void PararealConfig::validate() const {
  if (N < 1) throw std::invalid_argument("parareal: N must be at least 1");
  if (!(t_end > 0.0) || t_end != std::round(t_end)) throw std::invalid_argument("parareal: t_end must be a positive integer");
  if (!(T0 > 0.0)) throw std::invalid_argument("parareal: initial temperature must be positive");
  if (workers < 1) throw std::invalid_argument("parareal: workers must be at least 1");
  micro_spec.validate();
  macro_spec.validate();
  if (micro_spec.kind == ode::Method::explicit_euler && micro_spec.fixed_step > dt())
    throw std::invalid_argument("parareal: micro step exceeds the subinterval length");
}

double Trajectory::max_abs() const {
  double m = 0.0;
  for (const auto& s : states) m = std::max(m, s.cwiseAbs().maxCoeff());
  return m;
}

PropagatorFailure::PropagatorFailure(int iteration, int subinterval, const std::string& what)
    : std::runtime_error(failure_message(iteration, subinterval, what)), iteration_(iteration), subinterval_(subinterval) {}

std::optional<int> ConvergenceHistory::iterations_to(double tol) const {
  for (const auto& r : records)
    if (r.err_inf < tol) return r.iteration;
  return std::nullopt;
}

Engine::Engine(PararealConfig config, MicroModel<double> micro, MacroModel<double> macro)
    : config_(std::move(config)), micro_(std::move(micro)), macro_(std::move(macro)), coupling_(micro_.grid()) {
  config_.validate();
}

double Engine::subinterval_start(int n) const {
  return static_cast<double>(n) * config_.t_end / static_cast<double>(config_.N);
}

std::vector<double> Engine::interior_times(int n) const {
  const double a = subinterval_start(n), b = subinterval_start(n + 1);
  std::vector<double> times;
  for (double m = std::floor(a) + 1.0; m < b; m += 1.0) times.push_back(m);
  return times;
}

ode::SolveResult<double> Engine::fine(int n, const Vector& state) const {
  // Restart at every integer year exactly as the sampled reference does, so
  // fixed-step trajectories line up bit for bit.
  std::vector<double> outputs = interior_times(n);
  const double t1 = subinterval_start(n + 1);
  outputs.push_back(t1);
  auto dense = ode::integrate_dense(micro_, state, subinterval_start(n), t1, outputs, config_.micro_spec);
  return {std::move(dense.states.back()), dense.stats};
}

ode::SolveResult<double> Engine::coarse(int n, double T) const {
  Vector y(1);
  y[0] = T;
  return ode::integrate(macro_, y, subinterval_start(n), subinterval_start(n + 1), config_.macro_spec);
}

PararealState Engine::initialize() const {
  const int N = config_.N;
  PararealState s;
  s.k = 0;
  s.macro_values.resize(N + 1);
  s.micro_values.resize(N + 1);
  s.jump_values.assign(N + 1, 0.0);
  s.micro_values[0] = micro_.uniform(config_.T0);
  s.macro_values[0] = coupling_.restrict(s.micro_values[0]);
  const auto start = Clock::now();
  for (int n = 0; n < N; ++n) {
    try {
      const auto g = coarse(n, s.macro_values[n]);
      s.macro_values[n + 1] = g.final_state[0];
      s.cost.rhs_evals_coarse += g.stats.rhs_evaluations;
    } catch (const std::exception& e) {
      throw PropagatorFailure(0, n, e.what());
    }
    s.micro_values[n + 1] = coupling_.lift(s.macro_values[n + 1]);
  }
  s.cost.wallclock_coarse_s = seconds_since(start);
  return s;
}

FineSweep Engine::propagate(const PararealState& state) const {
  const int N = config_.N;
  FineSweep sweep;
  sweep.coarse_end.assign(N + 1, 0.0);
  sweep.fine_end.resize(N + 1);
  sweep.interior.resize(N);
  sweep.fine_subinterval_s.assign(N, 0.0);

  const auto coarse_start = Clock::now();
  for (int n = 0; n < N; ++n) {
    try {
      const auto g = coarse(n, state.macro_values[n]);
      sweep.coarse_end[n + 1] = g.final_state[0];
      sweep.cost.rhs_evals_coarse += g.stats.rhs_evaluations;
    } catch (const std::exception& e) {
      throw PropagatorFailure(state.k + 1, n, e.what());
    }
  }
  sweep.cost.wallclock_coarse_s = seconds_since(coarse_start);

  std::vector<long> evals(N, 0);
  const auto fine_start = Clock::now();
  parallel_for(static_cast<std::size_t>(N), config_.workers, [&](std::size_t idx) {
    const int n = static_cast<int>(idx);
    const auto start = Clock::now();
    try {
      std::vector<double> outputs = interior_times(n);
      const double t1 = subinterval_start(n + 1);
      outputs.push_back(t1);
      auto dense = ode::integrate_dense(micro_, state.micro_values[n], subinterval_start(n), t1, outputs,
                                        config_.micro_spec);
      sweep.fine_end[n + 1] = std::move(dense.states.back());
      dense.states.pop_back();
      sweep.interior[n] = std::move(dense.states);
      evals[n] = dense.stats.rhs_evaluations;
    } catch (const std::exception& e) {
      throw PropagatorFailure(state.k + 1, n, e.what());
    }
    sweep.fine_subinterval_s[n] = seconds_since(start);
  });
  sweep.cost.wallclock_fine_s = seconds_since(fine_start);
  for (long e : evals) sweep.cost.rhs_evals_fine += e;
  return sweep;
}

PararealState Engine::correct(const PararealState& state, const FineSweep& sweep) const {
  const int N = config_.N;
  PararealState next;
  next.k = state.k + 1;
  next.macro_values.resize(N + 1);
  next.micro_values.resize(N + 1);
  next.jump_values.assign(N + 1, 0.0);
  next.macro_values[0] = state.macro_values[0];
  next.micro_values[0] = state.micro_values[0];
  next.cost = sweep.cost;

  const auto start = Clock::now();
  for (int n = 0; n < N; ++n) {
    const double jump = coupling_.restrict(sweep.fine_end[n + 1]) - sweep.coarse_end[n + 1];
    next.jump_values[n + 1] = jump;
    try {
      const auto g = coarse(n, next.macro_values[n]);
      next.cost.rhs_evals_coarse += g.stats.rhs_evaluations;
      next.macro_values[n + 1] = g.final_state[0] + jump;
      next.micro_values[n + 1] = coupling_.project(next.macro_values[n + 1], sweep.fine_end[n + 1]);
    } catch (const std::exception& e) {
      throw PropagatorFailure(next.k, n, e.what());
    }
  }
  next.cost.wallclock_coarse_s += seconds_since(start);
  return next;
}

std::vector<Vector> Engine::dense_solution(const PararealState& state, const FineSweep& sweep) const {
  std::vector<Vector> dense;
  dense.reserve(static_cast<std::size_t>(config_.t_end));
  for (int n = 0; n < config_.N; ++n) {
    for (const auto& s : sweep.interior[n]) dense.push_back(s);
    const double t1 = subinterval_start(n + 1);
    if (t1 == std::round(t1)) dense.push_back(state.micro_values[n + 1]);
  }
  return dense;
}

ConvergenceHistory Engine::run(const Trajectory& reference, const std::set<int>& snapshot_iterations) const {
  if (reference.states.size() != static_cast<std::size_t>(config_.t_end) + 1)
    throw std::invalid_argument("run: reference must hold one state per integer year including t = 0");
  const auto run_start = Clock::now();
  ConvergenceHistory history;
  history.N = config_.N;
  double tol = config_.stop_tol ? *config_.stop_tol : default_stop_tol(config_.micro_spec, reference);
  if (!std::isfinite(tol)) tol = std::numeric_limits<double>::infinity();
  history.stop_tol = tol;
  const bool tolerance_stop = std::isfinite(tol);

  PararealState state = initialize();
  double fine_total = 0.0;
  long fine_count = 0;
  double coarse_total = 0.0;
  int coarse_count = 0;
  for (;;) {
    FineSweep sweep = propagate(state);
    for (double s : sweep.fine_subinterval_s) fine_total += s;
    fine_count += static_cast<long>(sweep.fine_subinterval_s.size());

    std::vector<Vector> dense = dense_solution(state, sweep);
    IterationRecord rec;
    rec.iteration = state.k;
    rec.err_inf = max_error(dense, reference);
    for (int n = 1; n <= config_.N; ++n) {
      const double t = subinterval_start(n);
      const auto idx = static_cast<std::size_t>(std::llround(t));
      if (t == std::round(t))
        rec.err_coarse = std::max(rec.err_coarse, (state.micro_values[n] - reference.states[idx]).cwiseAbs().maxCoeff());
      rec.jump_max = std::max(rec.jump_max, std::abs(state.jump_values[n]));
    }
    rec.cost = state.cost;
    if (state.k > 0) {
      coarse_total += state.cost.wallclock_coarse_s;
      ++coarse_count;
    }
    history.records.push_back(rec);
    if (snapshot_iterations.count(state.k)) history.snapshots.emplace_back(state.k, std::move(dense));

    if ((tolerance_stop && rec.err_inf < tol) || state.k >= config_.iteration_limit()) break;
    state = correct(state, sweep);
  }
  history.final_state = std::move(state);
  history.mean_fine_subinterval_s = fine_count ? fine_total / static_cast<double>(fine_count) : 0.0;
  history.macro_sweep_s = coarse_count ? coarse_total / coarse_count : 0.0;
  history.total_wallclock_s = seconds_since(run_start);
  return history;
}

Trajectory compute_reference(const MicroModel<double>& micro, const ode::IntegratorSpec& spec, double t_end,
                             double T0) {
  if (!(t_end >= 1.0) || t_end != std::round(t_end)) throw std::invalid_argument("reference: t_end must be a positive integer");
  const auto start = Clock::now();
  Trajectory ref;
  const auto years = static_cast<std::size_t>(t_end);
  std::vector<double> outputs(years);
  for (std::size_t i = 0; i < years; ++i) outputs[i] = static_cast<double>(i + 1);
  const Vector y0 = micro.uniform(T0);
  auto dense = ode::integrate_dense(micro, y0, 0.0, t_end, outputs, spec);
  ref.times.resize(years + 1);
  for (std::size_t i = 0; i <= years; ++i) ref.times[i] = static_cast<double>(i);
  ref.states.reserve(years + 1);
  ref.states.push_back(y0);
  for (auto& s : dense.states) ref.states.push_back(std::move(s));
  ref.stats = dense.stats;
  ref.wallclock_s = seconds_since(start);
  return ref;
}

double default_stop_tol(const ode::IntegratorSpec& micro_spec, const Trajectory& reference) {
  if (micro_spec.kind == ode::Method::adaptive_stiff) return 1e-2;
  return 1e-13 * std::max(1.0, reference.max_abs());
}

double max_error(const std::vector<Vector>& dense, const Trajectory& reference) {
  if (dense.size() + 1 != reference.states.size())
    throw std::invalid_argument("max_error: dense solution and reference cover different times");
  double err = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i)
    err = std::max(err, (dense[i] - reference.states[i + 1]).cwiseAbs().maxCoeff());
  return err;
}

}  // namespace ebm::parareal
