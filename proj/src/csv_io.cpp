#include "ebm/experiments/csv_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ebm::experiments {

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

void write_convergence_csv(const std::filesystem::path& path, const parareal::ConvergenceHistory& history) {
  std::ostringstream s;
  s << kConvergenceHeader << '\n';
  for (const auto& r : history.records) {
    s << r.iteration << ',' << format_double(r.err_inf) << ',' << format_double(r.err_coarse) << ','
      << format_double(r.jump_max) << ',' << format_double(r.cost.wallclock_fine_s) << ','
      << format_double(r.cost.wallclock_coarse_s) << ',' << r.cost.rhs_evals_fine << ',' << r.cost.rhs_evals_coarse
      << '\n';
  }
  write_text(path, s.str());
}

void write_profiles_csv(const std::filesystem::path& path, const std::vector<double>& times,
                        const std::vector<parareal::Vector>& states) {
  if (times.size() != states.size()) throw std::invalid_argument("write_profiles_csv: times and states differ in length");
  const Eigen::Index n = states.empty() ? 0 : states.front().size();
  std::ostringstream s;
  s << 't';
  for (Eigen::Index j = 1; j <= n; ++j) s << ",phi_" << j;
  s << '\n';
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].size() != n) throw std::invalid_argument("write_profiles_csv: ragged states");
    s << format_double(times[i]);
    for (Eigen::Index j = 0; j < n; ++j) s << ',' << format_double(states[i][j]);
    s << '\n';
  }
  write_text(path, s.str());
}

void write_trajectory_csv(const std::filesystem::path& path, const parareal::Trajectory& trajectory) {
  write_profiles_csv(path, trajectory.times, trajectory.states);
}

parareal::Trajectory read_trajectory_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,", 0) != 0) throw std::runtime_error("missing profile header in " + path.string());
  parareal::Trajectory traj;
  std::size_t width = 0;
  for (char c : line) width += c == ',';
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t next = line.find(',', pos);
      const std::string field = line.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw std::runtime_error("bad number '" + field + "' in " + path.string());
      }
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (row.size() != width + 1) throw std::runtime_error("ragged row in " + path.string());
    traj.times.push_back(row[0]);
    traj.states.emplace_back(Eigen::Map<const parareal::Vector>(row.data() + 1, static_cast<Eigen::Index>(width)));
  }
  return traj;
}

}  // namespace ebm::experiments
