#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ebm/parareal/engine.hpp"

// CSV writers and readers. Numbers are printed with 17 significant digits and
// '.' as decimal separator, so every double round-trips exactly.
namespace ebm::experiments {

inline constexpr const char* kConvergenceHeader =
    "iteration,err_inf,err_at_tol_times,jump_max,wallclock_fine_s,wallclock_coarse_s,rhs_evals_fine,rhs_evals_coarse";

std::string format_double(double v);

void write_convergence_csv(const std::filesystem::path& path, const parareal::ConvergenceHistory& history);

/// Header "t,phi_1,...,phi_{I-1}", one row per time.
void write_profiles_csv(const std::filesystem::path& path, const std::vector<double>& times,
                        const std::vector<parareal::Vector>& states);
void write_trajectory_csv(const std::filesystem::path& path, const parareal::Trajectory& trajectory);
parareal::Trajectory read_trajectory_csv(const std::filesystem::path& path);

/// Write `content` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace ebm::experiments
