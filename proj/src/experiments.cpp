#include "ebm/experiments/matrix.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>

#include "ebm/experiments/csv_io.hpp"

namespace ebm::experiments {

namespace fs = std::filesystem;

double machine_precision_threshold(const parareal::Trajectory& reference) {
  return 1e-13 * std::max(1.0, reference.max_abs());
}

MicroModel<double> make_micro_model(const ExperimentConfig& cfg) {
  return MicroModel<double>(Grid(cfg.I), cfg.params, cfg.forcing);
}

MacroModel<double> make_macro_model(const ExperimentConfig& cfg) {
  const Grid grid(cfg.I);
  return MacroModel<double>(cfg.params, cfg.forcing, mean_insolation(grid, cfg.params), cfg.macro_forcing);
}

parareal::Trajectory compute_reference(const ExperimentConfig& cfg) {
  return parareal::compute_reference(make_micro_model(cfg), cfg.micro_spec(), cfg.t_end, cfg.T0);
}

parareal::ConvergenceHistory run_parareal(const ExperimentConfig& cfg, const parareal::Trajectory& reference,
                                          const std::set<int>& snapshot_iterations) {
  parareal::Engine engine(cfg.parareal_config(), make_micro_model(cfg), make_macro_model(cfg));
  return engine.run(reference, snapshot_iterations);
}

std::string configuration_name(MicroKind micro, MacroForcing forcing, int N) {
  return to_string(micro) + "_" + to_string(forcing) + "_N" + std::to_string(N);
}

const SpeedupRow* MatrixReport::find(MicroKind micro, MacroForcing forcing, int N) const {
  for (const auto& r : rows)
    if (r.micro == micro && r.forcing == forcing && r.N == N) return &r;
  return nullptr;
}

std::string error_vs_iteration_rows(const parareal::ConvergenceHistory& history) {
  std::ostringstream s;
  for (const auto& r : history.records) s << history.N << ',' << r.iteration << ',' << format_double(r.err_inf) << '\n';
  return s.str();
}

namespace {

// Serial macro solution on its own Euler grid, linearly interpolated to
// every integer year.
std::vector<double> macro_series(const ExperimentConfig& cfg) {
  const auto macro = make_macro_model(cfg);
  const auto spec = cfg.macro_spec();
  const Grid grid(cfg.I);
  std::vector<double> knots_t{0.0};
  std::vector<double> knots_T{spatial_mean(parareal::Vector::Constant(cfg.I - 1, cfg.T0), grid)};
  const long steps = ode::detail::euler_step_count(cfg.t_end, spec.fixed_step);
  for (long j = 0; j < steps; ++j) {
    const double t0 = static_cast<double>(j) * spec.fixed_step;
    const double t1 = j + 1 == steps ? cfg.t_end : static_cast<double>(j + 1) * spec.fixed_step;
    parareal::Vector y(1);
    y[0] = knots_T.back();
    knots_T.push_back(ode::integrate(macro, y, t0, t1, spec).final_state[0]);
    knots_t.push_back(t1);
  }
  std::vector<double> out;
  std::size_t seg = 0;
  for (int t = 0; t <= static_cast<int>(cfg.t_end); ++t) {
    while (seg + 2 < knots_t.size() && knots_t[seg + 1] < t) ++seg;
    const double w = (t - knots_t[seg]) / (knots_t[seg + 1] - knots_t[seg]);
    out.push_back(knots_T[seg] + w * (knots_T[seg + 1] - knots_T[seg]));
  }
  return out;
}

}  // namespace

void emit_plot_data(const ExperimentConfig& cfg, const parareal::ConvergenceHistory& history,
                    const parareal::Trajectory& reference, const fs::path& out_dir, const std::string& tag) {
  const Grid grid(cfg.I);
  const int years = static_cast<int>(cfg.t_end);

  std::ostringstream err;
  err << "N,iteration,err_inf\n" << error_vs_iteration_rows(history);
  write_text(out_dir / ("error_vs_iteration_" + tag + ".csv"), err.str());

  std::ostringstream mean;
  mean << "series,t,mean\n";
  for (int t = 1; t <= years; ++t)
    mean << "reference," << t << ',' << format_double(spatial_mean(reference.states[t], grid)) << '\n';
  const auto macro = macro_series(cfg);
  for (int t = 1; t <= years; ++t) mean << "macro," << t << ',' << format_double(macro[t]) << '\n';
  for (const auto& [k, dense] : history.snapshots)
    for (int t = 1; t <= years; ++t)
      mean << "parareal_k" << k << ',' << t << ',' << format_double(spatial_mean(dense[t - 1], grid)) << '\n';
  write_text(out_dir / ("spatial_mean_" + tag + ".csv"), mean.str());

  for (const auto& [k, dense] : history.snapshots) {
    std::ostringstream rel;
    rel << "t,phi,rel_diff\n";
    for (int t = 1; t <= years; ++t)
      for (int j = 0; j < cfg.I - 1; ++j) {
        const double r = reference.states[t][j];
        rel << t << ',' << format_double(grid.nodes()[j + 1]) << ',' << format_double((dense[t - 1][j] - r) / r) << '\n';
      }
    write_text(out_dir / ("reldiff_" + tag + "_k" + std::to_string(k) + ".csv"), rel.str());
  }
}

MatrixReport run_matrix(const ExperimentMatrix& matrix, const fs::path& out_dir, std::ostream* log) {
  fs::create_directories(out_dir);
  MatrixReport report;
  write_fluctuations(out_dir / "fluctuations.txt", matrix.shared.forcing.fluctuations);

  for (MicroKind micro : matrix.micro_kinds) {
    ExperimentConfig base = matrix.shared;
    base.micro = micro;
    parareal::Trajectory reference;
    std::string ref_error;
    try {
      // Always recomputed so that the serial wall-clock time is measured.
      reference = compute_reference(base);
      write_trajectory_csv(out_dir / ("reference_" + to_string(micro) + ".csv"), reference);
    } catch (const std::exception& e) {
      ref_error = e.what();
    }
    if (log && ref_error.empty())
      *log << "reference " << to_string(micro) << ": " << reference.wallclock_s << " s" << std::endl;

    for (MacroForcing forcing : matrix.macro_forcings) {
      const std::string series_tag = to_string(micro) + "_" + to_string(forcing);
      std::ostringstream err_rows;
      err_rows << "N,iteration,err_inf\n";
      for (int N : matrix.N_values) {
        SpeedupRow row;
        row.micro = micro;
        row.forcing = forcing;
        row.N = N;
        row.serial_reference_wallclock_s = reference.wallclock_s;
        const std::string name = configuration_name(micro, forcing, N);
        if (!ref_error.empty()) {
          row.error = "reference failed: " + ref_error;
          ++report.failures;
          report.rows.push_back(row);
          continue;
        }
        try {
          ExperimentConfig cfg = base;
          cfg.macro_forcing = forcing;
          cfg.N = N;
          // Euler runs continue to machine precision, adaptive ones to 1e-2.
          if (!cfg.stop_tol) {
            cfg.stop_tol = micro == MicroKind::euler ? machine_precision_threshold(reference) : kReasonableTolerance;
          }
          const bool plots = N == matrix.plot_N;
          auto history = run_parareal(cfg, reference, plots ? matrix.plot_iterations : std::set<int>{});
          row.k_to_tol = history.iterations_to(kReasonableTolerance);
          if (micro == MicroKind::euler) row.k_to_eps = history.iterations_to(machine_precision_threshold(reference));
          row.measured_parallel_wallclock_s = history.total_wallclock_s;
          row.macro_cost_fraction =
              history.mean_fine_subinterval_s > 0.0 ? history.macro_sweep_s / history.mean_fine_subinterval_s : 0.0;
          write_convergence_csv(out_dir / ("convergence_" + name + ".csv"), history);
          err_rows << error_vs_iteration_rows(history);
          if (plots) emit_plot_data(cfg, history, reference, out_dir, name);
          if (log)
            *log << name << ": k(1e-2) = " << (row.k_to_tol ? std::to_string(*row.k_to_tol) : "-")
                 << ", k(eps) = " << (row.k_to_eps ? std::to_string(*row.k_to_eps) : "-") << ", "
                 << history.records.size() - 1 << " iterations, " << history.total_wallclock_s << " s" << std::endl;
          history.snapshots.clear();
          report.histories.emplace_back(name, std::move(history));
        } catch (const std::exception& e) {
          row.error = e.what();
          ++report.failures;
          if (log) *log << name << ": FAILED: " << e.what() << std::endl;
        }
        report.rows.push_back(row);
      }
      write_text(out_dir / ("error_vs_iteration_" + series_tag + ".csv"), err_rows.str());
    }
  }
  write_text(out_dir / "table1.csv", table1_csv(report, matrix));
  write_text(out_dir / "speedup.csv", speedup_csv(report));
  return report;
}

std::string table1_csv(const MatrixReport& report, const ExperimentMatrix& matrix) {
  std::ostringstream s;
  s << "micro,macro_forcing,criterion";
  for (int N : matrix.N_values) s << ",N=" << N;
  s << '\n';
  auto cell = [](const std::optional<int>& k) { return k ? std::to_string(*k) : std::string("-"); };
  for (MicroKind micro : matrix.micro_kinds)
    for (MacroForcing forcing : matrix.macro_forcings) {
      std::vector<std::string> criteria;
      if (micro == MicroKind::euler) criteria.push_back("eps");
      criteria.push_back("1e-2");
      for (const auto& crit : criteria) {
        s << to_string(micro) << ',' << to_string(forcing) << ',' << crit;
        for (int N : matrix.N_values) {
          const SpeedupRow* r = report.find(micro, forcing, N);
          s << ',' << (r == nullptr || !r->error.empty() ? "fail" : cell(crit == "eps" ? r->k_to_eps : r->k_to_tol));
        }
        s << '\n';
      }
    }
  return s.str();
}

std::string speedup_csv(const MatrixReport& report) {
  std::ostringstream s;
  s << "micro,macro_forcing,N,k_to_tol,speedup_tol,k_to_eps,speedup_eps,measured_parallel_wallclock_s,"
       "serial_reference_wallclock_s,macro_cost_fraction,status\n";
  auto opt_int = [](const std::optional<int>& k) { return k ? std::to_string(*k) : std::string(); };
  auto opt_dbl = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  for (const auto& r : report.rows) {
    s << to_string(r.micro) << ',' << to_string(r.forcing) << ',' << r.N << ',' << opt_int(r.k_to_tol) << ','
      << opt_dbl(SpeedupRow::theoretical_speedup(r.N, r.k_to_tol)) << ',' << opt_int(r.k_to_eps) << ','
      << opt_dbl(SpeedupRow::theoretical_speedup(r.N, r.k_to_eps)) << ',' << format_double(r.measured_parallel_wallclock_s)
      << ',' << format_double(r.serial_reference_wallclock_s) << ',' << format_double(r.macro_cost_fraction) << ','
      << (r.error.empty() ? "ok" : "failed") << '\n';
  }
  return s.str();
}

}  // namespace ebm::experiments
