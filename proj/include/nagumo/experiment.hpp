#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nagumo/config.hpp"
#include "nagumo/statistics.hpp"

namespace nagumo {

/// Everything recorded from one experiment (all trajectories merged).
struct RunResult {
  Histogram histogram;
  RunningAverages averages;
  MomentAccumulator lambda_moments, eta_moments;
  double initial_first_integral = std::numeric_limits<double>::quiet_NaN();
  double first_integral_drift = std::numeric_limits<double>::quiet_NaN();
  bool lambda_warned = false;
  double lambda_warn_time = std::numeric_limits<double>::quiet_NaN();
  std::int64_t steps_per_trajectory = 0;
  std::vector<std::uint64_t> trajectory_streams;
  double wall_seconds = 0.0;
};

/// Runs the configured regime for every trajectory (in parallel, with
/// per-trajectory stream ids derived from the base seed) and merges the
/// records in trajectory order. The first integral is monitored whenever
/// the lambda dynamics is noise-free (deterministic regime, or sdc with
/// gamma = 0). Throws ConfigError or DivergenceError.
RunResult run_experiment(const ExperimentConfig& cfg);

/// True when the single-site density exp(-V/D)/Z is the exact stationary
/// u-marginal for this configuration (single cell, or uncoupled lattice).
bool exact_marginal_available(const ExperimentConfig& cfg);

/// Single-site density on the histogram domain, gridded so that every
/// histogram bin holds a whole number of Simpson panels.
DensityGrid reference_density(const ExperimentConfig& cfg);

void write_histogram_csv(const std::filesystem::path& path, const Histogram& hist,
                         const DensityGrid& reference);
void write_plot_script(const std::filesystem::path& path);

nlohmann::json make_summary(const ExperimentConfig& cfg, const RunResult& result);

/// Artifacts of one `run` invocation, written under cfg.output.directory.
struct RunArtifacts {
  std::filesystem::path csv, summary, plot;
  nlohmann::json summary_json;
  RunResult result;
};
RunArtifacts execute_run(const ExperimentConfig& cfg);

/// Configuration of one panel of the bistable sojourn-density experiment:
/// sdc regime, single cell, k = 4, D = 0.04, gamma = 1, dt = 1e-3,
/// 50 bins on [-0.5, 1.5]; t = 1e5 at desk scale, 1e6 at full scale.
ExperimentConfig fig1_config(double alpha, bool full_scale);

struct Fig1Panel {
  ExperimentConfig config;
  RunArtifacts artifacts;
  double l1 = 0.0;
};
Fig1Panel reproduce_fig1_panel(double alpha, bool full_scale, const std::filesystem::path& outdir,
                               std::uint64_t seed);

}  // namespace nagumo
