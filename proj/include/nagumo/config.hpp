#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nagumo/dynamics.hpp"
#include "nagumo/model.hpp"

namespace nagumo {

enum class Regime { Langevin, Deterministic, Sdc };

std::string to_string(Regime r);
std::string to_string(BoundaryCondition bc);
std::string to_string(EtaMode m);

struct RunConfig {
  Regime regime = Regime::Sdc;
  double dt = 1e-3;
  double t_total = 1e5;
  double burn_in = 1e3;
  std::int64_t record_stride = 10;
  std::uint64_t seed = 12345;
  int trajectories = 1;
};

struct OutputConfig {
  std::string directory = "out";
  int bins = 50;
  double lo = -0.5;
  double hi = 1.5;
  bool emit_plot_script = true;
};

/// Full description of one experiment, as read from a config file.
struct ExperimentConfig {
  NonlinearityParams reaction;
  LatticeSpec lattice;
  NoiseConfig noise;
  RunConfig run;
  OutputConfig output;

  /// Field-level validation messages; empty means the config is usable.
  std::vector<std::string> validate() const;
};

/// Invalid configuration, carrying one message per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Parses the flat key = value format with [model]/[noise]/[run]/[output]
/// groups; '#' and ';' start comments. Unknown groups or keys are errors.
/// Throws ConfigError listing every problem found.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& path);

/// Seed precedence: command-line flag beats the NAGUMO_SEED environment
/// variable, which beats the config file. Throws ConfigError if the
/// environment value is not an unsigned integer.
void apply_seed_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> flag_seed);

}  // namespace nagumo
