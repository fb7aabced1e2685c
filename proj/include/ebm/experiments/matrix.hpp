#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ebm/experiments/config.hpp"
#include "ebm/parareal/engine.hpp"

// The benchmark matrix: {euler, adaptive} micro integrators x {constant,
// variable} macro forcing x subinterval counts, each compared with the serial
// micro reference computed by the same integrator.
namespace ebm::experiments {

/// Threshold used for "converged to machine precision".
double machine_precision_threshold(const parareal::Trajectory& reference);

inline constexpr double kReasonableTolerance = 1e-2;

MicroModel<double> make_micro_model(const ExperimentConfig& cfg);
MacroModel<double> make_macro_model(const ExperimentConfig& cfg);

/// Serial reference for cfg.micro, sampled at every integer year.
parareal::Trajectory compute_reference(const ExperimentConfig& cfg);

parareal::ConvergenceHistory run_parareal(const ExperimentConfig& cfg, const parareal::Trajectory& reference,
                                          const std::set<int>& snapshot_iterations = {});

struct ExperimentMatrix {
  std::vector<MicroKind> micro_kinds{MicroKind::euler, MicroKind::adaptive};
  std::vector<MacroForcing> macro_forcings{MacroForcing::variable, MacroForcing::constant};
  std::vector<int> N_values{100, 50, 40, 25, 20, 10};
  ExperimentConfig shared;
  // Subinterval count and iterations for which plot data is emitted.
  int plot_N = 100;
  std::set<int> plot_iterations{1, 4};
};

struct SpeedupRow {
  MicroKind micro = MicroKind::euler;
  MacroForcing forcing = MacroForcing::constant;
  int N = 0;
  std::optional<int> k_to_tol;
  std::optional<int> k_to_eps;  // Euler only
  double measured_parallel_wallclock_s = 0.0;
  double serial_reference_wallclock_s = 0.0;
  double macro_cost_fraction = 0.0;  // coarse time per iteration / one fine subinterval
  std::string error;                 // non-empty when the configuration failed

  /// N / k, with macro and communication cost discarded.
  static std::optional<double> theoretical_speedup(int N, const std::optional<int>& k) {
    if (!k || *k == 0) return std::nullopt;
    return static_cast<double>(N) / static_cast<double>(*k);
  }
};

struct MatrixReport {
  std::vector<SpeedupRow> rows;
  std::vector<std::pair<std::string, parareal::ConvergenceHistory>> histories;  // keyed by configuration name
  int failures = 0;

  const SpeedupRow* find(MicroKind micro, MacroForcing forcing, int N) const;
};

std::string configuration_name(MicroKind micro, MacroForcing forcing, int N);

/// Runs every configuration sequentially and writes into out_dir:
///   reference_<micro>.csv, convergence_<micro>_<forcing>_N<N>.csv,
///   table1.csv, speedup.csv and the plot-data files of emit_plot_data.
/// Failed configurations are recorded in the report and skipped.
MatrixReport run_matrix(const ExperimentMatrix& matrix, const std::filesystem::path& out_dir, std::ostream* log = nullptr);

/// Long-format plot data for one run:
///   error_vs_iteration_<tag>.csv   N,iteration,err_inf (appended per N by run_matrix)
///   spatial_mean_<tag>.csv         series,t,mean; series = reference, macro, parareal_k<k>
///   reldiff_<tag>_k<k>.csv         t,phi,rel_diff over the interior nodes
void emit_plot_data(const ExperimentConfig& cfg, const parareal::ConvergenceHistory& history,
                    const parareal::Trajectory& reference, const std::filesystem::path& out_dir,
                    const std::string& tag);

std::string error_vs_iteration_rows(const parareal::ConvergenceHistory& history);

std::string table1_csv(const MatrixReport& report, const ExperimentMatrix& matrix);
std::string speedup_csv(const MatrixReport& report);

}  // namespace ebm::experiments
