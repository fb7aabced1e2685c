#include "ebm/forcing.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ebm {

namespace {

bool in_closed(double t, double a, double b) { return t >= a && t <= b; }

void check_time(double t, const ForcingSpec& spec) {
  if (!(t >= 0.0 && t <= static_cast<double>(spec.t_end))) {
    std::ostringstream msg;
    msg << "forcing evaluated at t = " << t << " outside [0, " << spec.t_end << "]";
    throw std::out_of_range(msg.str());
  }
}

}  // namespace

ForcingSpec ForcingSpec::with_seed(std::uint64_t seed, int t_end) {
  ForcingSpec spec;
  spec.seed = seed;
  spec.t_end = t_end;
  spec.fluctuations = generate_fluctuations(seed, t_end);
  return spec;
}

void ForcingSpec::validate() const {
  if (t_end < 1) throw std::invalid_argument("forcing: t_end must be at least 1");
  if (!(a1 < b1) || !(a2 < b2) || !(a3 < b3))
    throw std::invalid_argument("forcing: every interval needs a < b");
  if (include_random) {
    if (fluctuations.size() != static_cast<std::size_t>(t_end))
      throw std::invalid_argument("forcing: fluctuation table length must equal t_end");
    for (double r : fluctuations)
      if (!(r >= -1.0 && r <= 1.0))
        throw std::invalid_argument("forcing: fluctuation entries must lie in [-1, 1]");
  }
}

std::vector<double> generate_fluctuations(std::uint64_t seed, int t_end) {
  if (t_end < 1) throw std::invalid_argument("generate_fluctuations: t_end must be at least 1");
  std::mt19937_64 engine(seed);
  std::vector<double> table(static_cast<std::size_t>(t_end));
  for (auto& r : table) {
    // 53 high bits -> [0, 1), then affine map to [-1, 1).
    const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    r = 2.0 * u - 1.0;
  }
  return table;
}

double interpolated_fluctuation(double t, const ForcingSpec& spec) {
  check_time(t, spec);
  if (spec.fluctuations.empty()) return 0.0;
  const auto value_at = [&](long i) { return i == 0 ? 0.0 : spec.fluctuations[static_cast<std::size_t>(i - 1)]; };
  const long lo = static_cast<long>(std::floor(t));
  if (lo >= spec.t_end) return value_at(spec.t_end);
  const double w = t - static_cast<double>(lo);
  const double r0 = value_at(lo);
  if (w == 0.0) return r0;
  return r0 + w * (value_at(lo + 1) - r0);
}

double delta_q_deterministic(double t, const ForcingSpec& spec) {
  check_time(t, spec);
  double dq = 0.0;
  if (in_closed(t, spec.a1, spec.b1)) dq += spec.q1;
  if (in_closed(t, spec.a2, spec.b2)) dq += spec.q2;
  if (in_closed(t, spec.a3, spec.b3)) dq += spec.q3 * (t - spec.a3);
  return dq;
}

double delta_q(double t, const ForcingSpec& spec) {
  double dq = delta_q_deterministic(t, spec);
  if (spec.include_random) dq += spec.q4 * interpolated_fluctuation(t, spec);
  return dq;
}

void write_fluctuations(const std::filesystem::path& path, const std::vector<double>& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  for (std::size_t i = 0; i < table.size(); ++i) out << (i + 1) << ' ' << table[i] << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_fluctuations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fluctuation table " + path.string());
  std::vector<double> table;
  std::string line;
  long expected = 1;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long t = 0;
    double value = 0.0;
    if (!(fields >> t >> value) || t != expected)
      throw std::runtime_error("malformed fluctuation table line " + std::to_string(expected) + ": " + line);
    table.push_back(value);
    ++expected;
  }
  return table;
}

}  // namespace ebm
