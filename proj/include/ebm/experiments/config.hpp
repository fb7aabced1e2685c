#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "ebm/constants.hpp"
#include "ebm/forcing.hpp"
#include "ebm/macro_model.hpp"
#include "ebm/ode/integrator.hpp"
#include "ebm/parareal/engine.hpp"

namespace ebm::experiments {

enum class MicroKind { euler, adaptive };

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of an experiment. Loaded from a flat JSON object whose keys
/// are the field names below; unknown keys are rejected.
struct ExperimentConfig {
  CoefficientParams params;
  ForcingSpec forcing;  // fluctuation table filled by finalize()
  std::optional<std::string> fluctuation_file;

  int I = 45;
  double T0 = 285.0;
  double t_end = 1000.0;

  double micro_step = 0.005;
  double macro_step = 10.0;
  double rel_tol = 1e-6;
  double abs_tol = 1e-6;
  double max_step = 0.0;      // adaptive; 0 means unbounded
  double initial_step = 0.0;  // adaptive; 0 means automatic
  double error_target = 0.05;  // adaptive; controller aim as a fraction of the tolerance

  int N = 10;
  MicroKind micro = MicroKind::euler;
  MacroForcing macro_forcing = MacroForcing::constant;
  int max_iterations = -1;          // negative: N
  std::optional<double> stop_tol;   // default depends on the micro integrator
  int workers = 1;

  ode::IntegratorSpec micro_spec() const;
  ode::IntegratorSpec macro_spec() const;
  parareal::PararealConfig parareal_config() const;

  /// Generate or load the fluctuation table and validate everything.
  void finalize();
};

ExperimentConfig load_config(const std::filesystem::path& path);
void apply_json(ExperimentConfig& cfg, const std::string& json_text);

std::string to_string(MicroKind kind);
std::string to_string(MacroForcing forcing);
MicroKind parse_micro_kind(const std::string& s);
MacroForcing parse_macro_forcing(const std::string& s);

}  // namespace ebm::experiments
