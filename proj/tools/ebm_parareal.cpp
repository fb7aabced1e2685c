// Command-line harness for the micro/macro parareal experiments.
#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "ebm/experiments/config.hpp"
#include "ebm/experiments/csv_io.hpp"
#include "ebm/experiments/matrix.hpp"

namespace fs = std::filesystem;
using namespace ebm;
using namespace ebm::experiments;

namespace {

struct Options {
  std::optional<std::string> config_file;
  std::optional<int> N;
  std::optional<std::string> micro;
  std::optional<std::string> macro_forcing;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::string out = "out";
};

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig cfg = o.config_file ? load_config(*o.config_file) : ExperimentConfig{};
  if (o.N) cfg.N = *o.N;
  if (o.micro) cfg.micro = parse_micro_kind(*o.micro);
  if (o.macro_forcing) cfg.macro_forcing = parse_macro_forcing(*o.macro_forcing);
  if (o.seed) cfg.forcing.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  cfg.finalize();
  return cfg;
}

int cmd_reference(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const auto ref = compute_reference(cfg);
  const fs::path path = out / ("reference_" + to_string(cfg.micro) + ".csv");
  write_trajectory_csv(path, ref);
  std::cout << "wrote " << path.string() << " (" << ref.wallclock_s << " s, " << ref.stats.rhs_evaluations
            << " rhs evaluations)\n";
  return 0;
}

int cmd_run(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const auto ref = compute_reference(cfg);
  write_trajectory_csv(out / ("reference_" + to_string(cfg.micro) + ".csv"), ref);
  const auto history = run_parareal(cfg, ref, {1, 4});
  const std::string name = configuration_name(cfg.micro, cfg.macro_forcing, cfg.N);
  write_convergence_csv(out / ("convergence_" + name + ".csv"), history);
  emit_plot_data(cfg, history, ref, out, name);
  for (const auto& r : history.records)
    std::cout << "k=" << r.iteration << "  err_inf=" << format_double(r.err_inf) << '\n';
  const auto k = history.iterations_to(kReasonableTolerance);
  std::cout << name << ": k(1e-2) = " << (k ? std::to_string(*k) : "-") << '\n';
  return 0;
}

int cmd_matrix(const ExperimentConfig& cfg, const fs::path& out) {
  ExperimentMatrix matrix;
  matrix.shared = cfg;
  const auto report = run_matrix(matrix, out, &std::cout);
  std::cout << table1_csv(report, matrix);
  return report.failures == 0 ? 0 : 1;
}

int cmd_emit_fluctuations(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const fs::path path = out / "fluctuations.txt";
  write_fluctuations(path, cfg.forcing.fluctuations);
  std::cout << "wrote " << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micro/macro parareal for a 1-D energy balance model"};
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--config", o.config_file, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--n", o.N, "number of parareal subintervals");
  app.add_option("--micro", o.micro, "micro integrator")->check(CLI::IsMember({"euler", "adaptive"}));
  app.add_option("--macro-forcing", o.macro_forcing, "macro forcing")->check(CLI::IsMember({"constant", "variable"}));
  app.add_option("--seed", o.seed, "fluctuation table seed");
  app.add_option("--workers", o.workers, "worker threads for the fine phase");
  app.add_option("--out", o.out, "output directory");

  auto* reference = app.add_subcommand("reference", "serial micro reference solution");
  auto* run = app.add_subcommand("run", "one parareal run");
  auto* matrix = app.add_subcommand("matrix", "full experiment matrix");
  auto* emit = app.add_subcommand("emit-fluctuations", "write the fluctuation table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  ExperimentConfig cfg;
  try {
    cfg = build_config(o);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  }

  try {
    const fs::path out = o.out;
    if (reference->parsed()) return cmd_reference(cfg, out);
    if (run->parsed()) return cmd_run(cfg, out);
    if (matrix->parsed()) return cmd_matrix(cfg, out);
    if (emit->parsed()) return cmd_emit_fluctuations(cfg, out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
