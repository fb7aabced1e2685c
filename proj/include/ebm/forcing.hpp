#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

// Time-dependent relative perturbation of the solar forcing: two jumps, a
// linear trend and a fixed table of random fluctuations sampled at integer
// years and linearly interpolated in between.
namespace ebm {

inline constexpr std::uint64_t kDefaultFluctuationSeed = 20180613;

struct ForcingSpec {
  double q1 = 0.05, a1 = 283.0, b1 = 335.0;
  double q2 = -0.03, a2 = 487.0, b2 = 564.0;
  double q3 = 0.0001, a3 = 700.0, b3 = 1000.0;
  double q4 = 0.05;

  int t_end = 1000;
  bool include_random = true;
  std::uint64_t seed = kDefaultFluctuationSeed;
  // fluctuations[t - 1] = R(t) for t = 1..t_end, each in [-1, 1].
  std::vector<double> fluctuations;

  /// Default parameters with the table generated from `seed`.
  static ForcingSpec with_seed(std::uint64_t seed, int t_end = 1000);

  /// Throws std::invalid_argument on inverted intervals, out-of-range table
  /// entries, or a table whose length differs from t_end.
  void validate() const;
};

/// R(t) for t = 1..t_end drawn uniformly from [-1, 1) by a 64-bit Mersenne
/// twister. Only the raw engine output is used, so the sequence is identical
/// on every standard library.
std::vector<double> generate_fluctuations(std::uint64_t seed, int t_end);

/// Linear interpolation of the table with R(0) := 0.
double interpolated_fluctuation(double t, const ForcingSpec& spec);

/// Jumps and trend only (the random term is omitted).
double delta_q_deterministic(double t, const ForcingSpec& spec);

/// Full perturbation; the random term is added when spec.include_random is
/// set. Throws std::out_of_range for t outside [0, t_end].
double delta_q(double t, const ForcingSpec& spec);

/// One "t value" line per integer year, values printed with 17 significant
/// digits.
void write_fluctuations(const std::filesystem::path& path, const std::vector<double>& table);
std::vector<double> read_fluctuations(const std::filesystem::path& path);

}  // namespace ebm
