#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "stagecp/adaptive.hpp"
#include "stagecp/intervals.hpp"
#include "stagecp/risk_control.hpp"

namespace stagecp {

enum class Protocol { Split, Online };

/// Everything a run needs. Field names double as config keys and CLI flags.
struct ExperimentConfig {
  std::string scenario = "IID_LINEAR";
  std::string input;                  // CSV path; overrides scenario
  std::string schema = "RAW_TRIPLETS";
  Protocol protocol = Protocol::Split;
  std::vector<std::string> methods{"SR", "SC", "WSC"};

  double alpha = 0.1;
  double delta = 0.1;
  double tau = 0.0;
  double gamma = 0.01;
  double eta = 0.01;
  std::size_t k = 100;
  double c = 0.05;
  double d = 0.05;
  double conf_ratio = 0.5;
  FwerMethod fwer = FwerMethod::FixedSequence;
  SelectionMode selection = SelectionMode::Coverage;
  int grid_steps = 10;

  std::size_t repetitions = 1;
  std::uint64_t seed = 0;
  AbstentionPolicy policy = AbstentionPolicy::Reporting;
  std::string output_dir = "out";
  std::size_t threads = 0;  // 0: hardware concurrency

  // Data layout. Split: train, conf, cal, test in that order. Online: train,
  // k warm-up points, then test.
  std::size_t n_train = 1000;
  std::size_t n_conf = 500;
  std::size_t n_cal = 500;
  std::size_t n_test = 2000;

  // Scenario knobs; negative values keep the scenario defaults.
  std::int64_t shift_start = 0;  // relative to the first test point
  double rate = -1.0;
  double noise_std = -1.0;
  double w_std = -1.0;
  std::int64_t phase_length = -1;

  double wsc_decay = 0.99;
  double pid_ki = 0.05;
  double ocid_gamma0 = 0.1;
  std::size_t sliding_window = 200;
  std::size_t record_rep = 0;  // repetition written to the per-step files
};

std::string_view to_string(Protocol p);
std::string_view to_string(AbstentionPolicy p);
std::string_view to_string(FwerMethod m);

/// Key registry: name, help text, setter from string, getter to string.
struct ConfigKey {
  std::string name;
  std::string help;
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key; throws ConfigError for unknown keys or bad values.
void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat `key = value` lines; `#` starts a comment; strings may be quoted;
/// lists are comma separated, optionally inside [ ].
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// Throws ConfigError on out-of-range values.
void validate_config(const ExperimentConfig& cfg);

/// Canonical text form, parseable by parse_config.
std::string dump_config(const ExperimentConfig& cfg);

}  // namespace stagecp
