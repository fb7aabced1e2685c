// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Usage: acceptance [output-dir]
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ebm/experiments/config.hpp"
#include "ebm/experiments/csv_io.hpp"
#include "ebm/experiments/matrix.hpp"
#include "suites.hpp"

using namespace ebm;
using namespace ebm::experiments;
namespace fs = std::filesystem;

namespace {

// Criterion 1
constexpr double kPrefixRelTol = 1e-12;
const std::vector<int> kExactnessN{10, 20, 100};
// Criterion 2
constexpr int kCountSlack = 2;
// Criterion 3
constexpr double kMinSpeedupAtTol = 8.0;
constexpr double kEpsSpeedupLo = 2.5, kEpsSpeedupHi = 6.0;
const std::vector<int> kEpsSpeedupN{25, 20, 10};
// Criterion 4
constexpr double kMaxMacroFraction = 0.05;
// Criterion 8
constexpr int kDeterminismN = 20;
const std::vector<int> kWorkerCounts{1, 8};

struct Outcome {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string num(double v, int precision = 3) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

Outcome suite_outcome(int id, const std::string& name, const std::vector<testing::Check>& checks) {
  std::vector<std::string> failed;
  for (const auto& c : checks)
    if (!c.pass) failed.push_back(c.name + " (" + c.detail + ")");
  const std::string detail = failed.empty() ? std::to_string(checks.size()) + " checks" : join(failed, "; ");
  return {id, name, failed.empty(), detail};
}

ExperimentConfig base_config() {
  ExperimentConfig cfg;
  cfg.finalize();
  return cfg;
}

Outcome exactness(const parareal::Trajectory& reference) {
  const double scale = reference.max_abs();
  const double eps_threshold = machine_precision_threshold(reference);
  std::vector<std::string> notes;
  bool pass = true;
  for (int N : kExactnessN) {
    ExperimentConfig cfg = base_config();
    cfg.N = N;
    const parareal::Engine engine(cfg.parareal_config(), make_micro_model(cfg), make_macro_model(cfg));
    auto state = engine.initialize();
    double worst_prefix = 0.0;
    int k_eps = -1;
    for (int k = 0; k <= N; ++k) {
      const auto sweep = engine.propagate(state);
      const auto dense = engine.dense_solution(state, sweep);
      const auto t_k = static_cast<std::size_t>(engine.subinterval_start(k));
      for (std::size_t t = 1; t <= t_k; ++t)
        worst_prefix = std::max(worst_prefix, (dense[t - 1] - reference.states[t]).cwiseAbs().maxCoeff());
      if (parareal::max_error(dense, reference) < eps_threshold) {
        k_eps = k;
        break;
      }
      state = engine.correct(state, sweep);
    }
    const bool ok = worst_prefix <= kPrefixRelTol * scale && k_eps >= 0 && k_eps <= N;
    pass = pass && ok;
    notes.push_back("N=" + std::to_string(N) + ": prefix err " + num(worst_prefix) + ", eps at k=" +
                    (k_eps >= 0 ? std::to_string(k_eps) : std::string("never")));
    std::cout << "  exactness " << notes.back() << std::endl;
  }
  return {1, "parareal exactness", pass, join(notes, "; ")};
}

struct PaperRow {
  MicroKind micro;
  MacroForcing forcing;
  std::vector<int> counts;  // N = 100, 50, 40, 25, 20, 10
};

const std::vector<PaperRow> kPaperCounts{
    {MicroKind::euler, MacroForcing::variable, {9, 5, 4, 3, 2, 1}},
    {MicroKind::euler, MacroForcing::constant, {9, 5, 4, 3, 2, 1}},
    {MicroKind::adaptive, MacroForcing::variable, {12, 5, 4, 3, 3, 1}},
    {MicroKind::adaptive, MacroForcing::constant, {10, 5, 4, 3, 3, 1}},
};

Outcome table_counts(const MatrixReport& report, const ExperimentMatrix& matrix) {
  bool pass = true;
  std::vector<std::string> notes;
  for (const auto& row : kPaperCounts) {
    std::vector<std::string> cells;
    bool row_ok = true;
    int previous = 1 << 30;
    for (std::size_t i = 0; i < matrix.N_values.size(); ++i) {
      const auto* r = report.find(row.micro, row.forcing, matrix.N_values[i]);
      if (r == nullptr || !r->k_to_tol) {
        row_ok = false;
        cells.push_back("-/" + std::to_string(row.counts[i]));
        continue;
      }
      const int k = *r->k_to_tol;
      if (std::abs(k - row.counts[i]) > kCountSlack || k > previous) row_ok = false;
      previous = k;
      cells.push_back(std::to_string(k) + "/" + std::to_string(row.counts[i]));
    }
    pass = pass && row_ok;
    notes.push_back(to_string(row.micro) + "," + to_string(row.forcing) + " [" + join(cells, " ") + "]" +
                    (row_ok ? "" : " MISMATCH"));
  }
  return {2, "iteration counts to 1e-2 (measured/reference)", pass, join(notes, "; ")};
}

Outcome speedup(const MatrixReport& report) {
  double best = 0.0;
  std::string best_name;
  for (const auto& r : report.rows) {
    const auto s = SpeedupRow::theoretical_speedup(r.N, r.k_to_tol);
    if (s && *s > best) {
      best = *s;
      best_name = configuration_name(r.micro, r.forcing, r.N);
    }
  }
  bool pass = best >= kMinSpeedupAtTol;
  std::vector<std::string> eps_notes;
  for (MacroForcing forcing : {MacroForcing::variable, MacroForcing::constant})
    for (int N : kEpsSpeedupN) {
      const auto* r = report.find(MicroKind::euler, forcing, N);
      const auto s = r ? SpeedupRow::theoretical_speedup(N, r->k_to_eps) : std::nullopt;
      const bool ok = s && *s >= kEpsSpeedupLo && *s <= kEpsSpeedupHi;
      pass = pass && ok;
      eps_notes.push_back(to_string(forcing) + " N=" + std::to_string(N) + ": " + (s ? num(*s) : std::string("-")));
    }
  return {3, "theoretical speedup", pass,
          "best N/k at 1e-2 = " + num(best) + " (" + best_name + "); N/k to eps: " + join(eps_notes, ", ")};
}

Outcome macro_cost(const MatrixReport& report) {
  double worst = 0.0;
  int rows = 0;
  for (const auto& r : report.rows) {
    if (r.forcing != MacroForcing::constant || !r.error.empty()) continue;
    worst = std::max(worst, r.macro_cost_fraction);
    ++rows;
  }
  return {4, "macro sweep cost per iteration / fine subinterval", rows > 0 && worst < kMaxMacroFraction,
          "max fraction " + num(worst) + " over " + std::to_string(rows) + " constant-forcing runs"};
}

std::string convergence_without_wallclock(const parareal::ConvergenceHistory& h, const fs::path& path) {
  write_convergence_csv(path, h);
  std::ifstream in(path);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string f;
    for (int col = 0; std::getline(fields, f, ','); ++col)
      if (col != 4 && col != 5) out << f << ',';
    out << '\n';
  }
  return out.str();
}

Outcome determinism(const fs::path& dir) {
  bool pass = true;
  std::vector<std::string> notes;
  const std::vector<std::pair<MicroKind, MacroForcing>> configs{{MicroKind::euler, MacroForcing::variable},
                                                                {MicroKind::adaptive, MacroForcing::constant}};
  for (const auto& [micro, forcing] : configs) {
    std::vector<std::string> runs;
    for (int workers : kWorkerCounts) {
      ExperimentConfig cfg = base_config();
      cfg.micro = micro;
      cfg.macro_forcing = forcing;
      cfg.N = kDeterminismN;
      cfg.workers = workers;
      const auto ref = compute_reference(cfg);
      const auto h = run_parareal(cfg, ref);
      runs.push_back(convergence_without_wallclock(
          h, dir / ("determinism_" + configuration_name(micro, forcing, kDeterminismN) + "_w" + std::to_string(workers) +
                    ".csv")));
    }
    const bool same = std::all_of(runs.begin(), runs.end(), [&](const std::string& r) { return r == runs.front(); });
    pass = pass && same;
    notes.push_back(configuration_name(micro, forcing, kDeterminismN) + (same ? " identical" : " DIFFERS"));
  }
  return {8, "determinism across worker counts 1 and 8", pass, join(notes, "; ")};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path out = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  fs::create_directories(out);
  std::vector<Outcome> outcomes;

  outcomes.push_back(suite_outcome(5, "physics suite", testing::physics_suite()));
  outcomes.push_back(suite_outcome(6, "discretization suite", testing::discretization_suite()));
  outcomes.push_back(suite_outcome(7, "operator suite", testing::operator_suite()));

  try {
    std::cout << "running exactness checks" << std::endl;
    outcomes.push_back(exactness(compute_reference(base_config())));
  } catch (const std::exception& e) {
    outcomes.push_back({1, "parareal exactness", false, e.what()});
  }

  try {
    std::cout << "running the experiment matrix" << std::endl;
    ExperimentMatrix matrix;
    matrix.shared = base_config();
    const auto report = run_matrix(matrix, out / "matrix", &std::cout);
    outcomes.push_back(table_counts(report, matrix));
    outcomes.push_back(speedup(report));
    outcomes.push_back(macro_cost(report));
  } catch (const std::exception& e) {
    for (int id : {2, 3, 4}) outcomes.push_back({id, "experiment matrix", false, e.what()});
  }

  try {
    std::cout << "running determinism checks" << std::endl;
    outcomes.push_back(determinism(out));
  } catch (const std::exception& e) {
    outcomes.push_back({8, "determinism", false, e.what()});
  }

  std::sort(outcomes.begin(), outcomes.end(), [](const Outcome& a, const Outcome& b) { return a.id < b.id; });
  std::cout << "\n";
  bool all = true;
  for (const auto& o : outcomes) {
    all = all && o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << o.id << ": " << o.name << " -- " << o.detail << '\n';
  }
  return all ? 0 : 1;
}
