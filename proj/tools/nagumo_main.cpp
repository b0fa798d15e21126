#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "nagumo/config.hpp"
#include "nagumo/experiment.hpp"
#include "nagumo/validation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFailure = 1;
constexpr int kExitConfigError = 2;
constexpr int kExitDivergence = 3;

void print_run_report(const nagumo::RunArtifacts& art) {
  const auto& j = art.summary_json;
  std::cout << "wrote " << art.csv.string() << " and " << art.summary.string() << "\n";
  if (!j["l1_empirical_vs_exact"].is_null())
    std::cout << "L1(empirical, exact) = " << j["l1_empirical_vs_exact"].get<double>() << "\n";
  if (!j["first_integral"].contains("skipped"))
    std::cout << "first-integral max drift = " << j["first_integral"]["max_drift"].get<double>()
              << "\n";
  if (art.result.lambda_warned)
    std::cerr << "warning: |lambda| exceeded 50 at t = " << art.result.lambda_warn_time << "\n";
}

int do_run(const std::string& config_path, std::optional<std::uint64_t> seed_flag) {
  nagumo::ExperimentConfig cfg = nagumo::load_config_file(config_path);
  nagumo::apply_seed_overrides(cfg, seed_flag);
  const auto art = nagumo::execute_run(cfg);
  print_run_report(art);
  return kExitOk;
}

int do_fig1(std::optional<double> alpha, bool full_scale) {
  nagumo::ExperimentConfig defaults;
  nagumo::apply_seed_overrides(defaults, std::nullopt);  // honour NAGUMO_SEED
  const std::filesystem::path outdir = "fig1";

  std::vector<double> alphas = alpha ? std::vector<double>{*alpha}
                                     : std::vector<double>{0.25, 0.5};
  for (const double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) throw nagumo::ConfigError({"--alpha must lie in (0,1)"});
    const auto panel = nagumo::reproduce_fig1_panel(a, full_scale, outdir, defaults.run.seed);
    std::cout << "alpha = " << a << ": L1(empirical, exact) = " << panel.l1 << "  ("
              << panel.artifacts.csv.string() << ", "
              << panel.artifacts.result.wall_seconds << " s)\n";
  }
  return kExitOk;
}

int do_validate(bool as_json) {
  const auto report = nagumo::run_validation();
  if (as_json) {
    std::cout << report.to_json().dump(2) << "\n";
  } else {
    for (const auto& c : report.checks) {
      std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.value << " "
                << c.comparison << " " << c.threshold;
      if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
      std::cout << "\n";
    }
    std::cout << (report.all_pass() ? "all checks passed" : "SOME CHECKS FAILED") << "\n";
  }
  return report.all_pass() ? kExitOk : kExitValidationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise models for a chain of diffusively coupled Nagumo cells"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment described by a config file");
  std::string config_path;
  run->add_option("config", config_path, "Flat key = value config file")->required();
  std::optional<std::uint64_t> seed_flag;
  run->add_option("--seed", seed_flag,
                  "Override the seed (precedence: flag > NAGUMO_SEED > config file)");

  auto* fig1 = app.add_subcommand(
      "reproduce-fig1", "Sojourn density of the ergodized single cell against the exact density");
  std::optional<double> alpha;
  fig1->add_option("--alpha", alpha, "Run a single panel at this threshold (default: 0.25 and 0.5)");
  bool full_scale = false;
  fig1->add_flag("--full-paper-scale", full_scale, "t = 1e6 instead of the desk-scale 1e5");

  auto* validate = app.add_subcommand("validate", "Run the desk-scale property suite");
  bool as_json = false;
  validate->add_flag("--json", as_json, "Emit a machine-readable verdict");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return do_run(config_path, seed_flag);
    if (fig1->parsed()) return do_fig1(alpha, full_scale);
    return do_validate(as_json);
  } catch (const nagumo::ConfigError& e) {
    std::cerr << "config error:\n";
    for (const auto& issue : e.issues()) std::cerr << "  " << issue << "\n";
    return kExitConfigError;
  } catch (const nagumo::DivergenceError& e) {
    std::cerr << "numerical divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  }
}
