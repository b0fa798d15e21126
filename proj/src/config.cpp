#include "nagumo/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nagumo {

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Langevin: return "langevin";
    case Regime::Deterministic: return "deterministic";
    case Regime::Sdc: return "sdc";
  }
  return "?";
}

std::string to_string(BoundaryCondition bc) {
  switch (bc) {
    case BoundaryCondition::Neumann: return "neumann";
    case BoundaryCondition::Periodic: return "periodic";
    case BoundaryCondition::SingleCell: return "single_cell";
  }
  return "?";
}

std::string to_string(EtaMode m) {
  return m == EtaMode::Independent ? "independent" : "synchronous";
}

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(issues.empty() ? "invalid configuration"
                                        : "invalid configuration: " + issues.front() +
                                              (issues.size() > 1 ? " (and more)" : "")),
      issues_(std::move(issues)) {}

std::vector<std::string> ExperimentConfig::validate() const {
  std::vector<std::string> issues;
  auto require = [&issues](bool ok, const std::string& msg) {
    if (!ok) issues.push_back(msg);
  };
  require(reaction.k > 0.0, "model.k must be > 0");
  require(reaction.alpha > 0.0 && reaction.alpha < 1.0, "model.alpha must lie in (0,1)");
  require(lattice.n >= 1, "model.n must be >= 1");
  require(lattice.l >= 0.0, "model.l must be >= 0");
  require(!(lattice.bc == BoundaryCondition::SingleCell && lattice.n != 1),
          "model.bc = single_cell requires model.n = 1");
  require(noise.D > 0.0, "noise.D must be > 0");
  require(noise.Q_lambda > 0.0, "noise.Q_lambda must be > 0");
  require(noise.Q_eta > 0.0, "noise.Q_eta must be > 0");
  require(noise.gamma >= 0.0, "noise.gamma must be >= 0");
  require(run.dt > 0.0, "run.dt must be > 0");
  require(run.burn_in >= 0.0, "run.burn_in must be >= 0");
  require(run.t_total > run.burn_in, "run.t_total must exceed run.burn_in");
  require(run.record_stride >= 1, "run.record_stride must be >= 1");
  require(run.trajectories >= 1, "run.trajectories must be >= 1");
  require(output.bins >= 1, "output.bins must be >= 1");
  require(output.lo < output.hi, "output.lo must be < output.hi");
  require(!output.directory.empty(), "output.directory must not be empty");
  return issues;
}

namespace {

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> issues;

  auto number = [&issues](const std::string& key, const std::string& v,
                          double& out) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument(v);
      out = d;
      return true;
    } catch (const std::exception&) {
      issues.push_back(key + ": not a number: '" + v + "'");
      return false;
    }
  };
  auto integer = [&](const std::string& key, const std::string& v, std::int64_t& out) {
    double d;
    if (!number(key, v, d)) return false;
    if (d != std::floor(d)) {
      issues.push_back(key + ": expected an integer, got '" + v + "'");
      return false;
    }
    out = static_cast<std::int64_t>(d);
    return true;
  };
  auto boolean = [&issues](const std::string& key, const std::string& v, bool& out) {
    if (v == "true" || v == "1" || v == "yes") {
      out = true;
    } else if (v == "false" || v == "0" || v == "no") {
      out = false;
    } else {
      issues.push_back(key + ": expected true/false, got '" + v + "'");
      return false;
    }
    return true;
  };

  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back("line " + std::to_string(lineno) + ": malformed section header");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "model" && section != "noise" && section != "run" && section != "output")
        issues.push_back("line " + std::to_string(lineno) + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      issues.push_back("line " + std::to_string(lineno) + ": expected key = value");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qual = section + "." + key;

    if (section == "model") {
      if (key == "k") number(qual, value, cfg.reaction.k);
      else if (key == "alpha") number(qual, value, cfg.reaction.alpha);
      else if (key == "n") { std::int64_t n; if (integer(qual, value, n)) cfg.lattice.n = n; }
      else if (key == "l") number(qual, value, cfg.lattice.l);
      else if (key == "bc") {
        if (value == "neumann") cfg.lattice.bc = BoundaryCondition::Neumann;
        else if (value == "periodic") cfg.lattice.bc = BoundaryCondition::Periodic;
        else if (value == "single_cell") cfg.lattice.bc = BoundaryCondition::SingleCell;
        else issues.push_back(qual + ": expected neumann|periodic|single_cell, got '" + value + "'");
      } else issues.push_back(qual + ": unknown key");
    } else if (section == "noise") {
      if (key == "D") number(qual, value, cfg.noise.D);
      else if (key == "Q_lambda") number(qual, value, cfg.noise.Q_lambda);
      else if (key == "Q_eta") number(qual, value, cfg.noise.Q_eta);
      else if (key == "gamma") number(qual, value, cfg.noise.gamma);
      else if (key == "eta_mode") {
        if (value == "independent") cfg.noise.eta_mode = EtaMode::Independent;
        else if (value == "synchronous") cfg.noise.eta_mode = EtaMode::Synchronous;
        else issues.push_back(qual + ": expected independent|synchronous, got '" + value + "'");
      } else issues.push_back(qual + ": unknown key");
    } else if (section == "run") {
      if (key == "regime") {
        if (value == "langevin") cfg.run.regime = Regime::Langevin;
        else if (value == "deterministic") cfg.run.regime = Regime::Deterministic;
        else if (value == "sdc") cfg.run.regime = Regime::Sdc;
        else issues.push_back(qual + ": expected langevin|deterministic|sdc, got '" + value + "'");
      } else if (key == "dt") number(qual, value, cfg.run.dt);
      else if (key == "t_total") number(qual, value, cfg.run.t_total);
      else if (key == "burn_in") number(qual, value, cfg.run.burn_in);
      else if (key == "record_stride") integer(qual, value, cfg.run.record_stride);
      else if (key == "seed") {
        std::int64_t s;
        if (integer(qual, value, s)) {
          if (s < 0) issues.push_back(qual + ": seed must be non-negative");
          else cfg.run.seed = static_cast<std::uint64_t>(s);
        }
      } else if (key == "trajectories") {
        std::int64_t t;
        if (integer(qual, value, t)) cfg.run.trajectories = static_cast<int>(t);
      } else issues.push_back(qual + ": unknown key");
    } else if (section == "output") {
      if (key == "directory") cfg.output.directory = value;
      else if (key == "bins") { std::int64_t b; if (integer(qual, value, b)) cfg.output.bins = static_cast<int>(b); }
      else if (key == "lo") number(qual, value, cfg.output.lo);
      else if (key == "hi") number(qual, value, cfg.output.hi);
      else if (key == "emit_plot_script") boolean(qual, value, cfg.output.emit_plot_script);
      else issues.push_back(qual + ": unknown key");
    } else {
      issues.push_back("line " + std::to_string(lineno) + ": key outside any known section");
    }
  }

  const auto field_issues = cfg.validate();
  issues.insert(issues.end(), field_issues.begin(), field_issues.end());
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file: " + path.string()});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

void apply_seed_overrides(ExperimentConfig& cfg, std::optional<std::uint64_t> flag_seed) {
  if (flag_seed) {
    cfg.run.seed = *flag_seed;
    return;
  }
  if (const char* env = std::getenv("NAGUMO_SEED")) {
    std::uint64_t value = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size())
      throw ConfigError({"NAGUMO_SEED must be an unsigned integer, got '" + s + "'"});
    cfg.run.seed = value;
  }
}

}  // namespace nagumo
