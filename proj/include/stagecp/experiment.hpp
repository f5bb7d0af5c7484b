#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stagecp/adaptive.hpp"
#include "stagecp/config.hpp"
#include "stagecp/csv_io.hpp"

namespace stagecp {

/// Scored stream for one repetition, after the training prefix.
/// Split: conf, cal, test. Online: k warm-up points, then test.
struct PreparedData {
  std::vector<StageOutputs> outputs;
  std::size_t n_pre = 0;  // points before the first test point
};

PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t rep);

/// Per-step output of one method in one repetition.
struct MethodRun {
  std::string method;
  std::vector<ResultRecord> records;  // `covered` follows cfg.policy
  std::vector<std::uint8_t> covered_algorithmic;
  std::vector<std::uint8_t> covered_reporting;
};

struct RepResult {
  std::vector<MethodRun> runs;                   // cfg.methods order
  std::vector<AdaptiveStepRecord> diagnostics;   // online SR only
};

RepResult run_repetition(const ExperimentConfig& cfg, std::size_t rep);
RepResult run_repetition(const ExperimentConfig& cfg, const PreparedData& data);

struct MethodSummary {
  std::string method;
  double coverage_mean = 0.0;  // cfg.policy
  double coverage_std = 0.0;
  double coverage_algorithmic_mean = 0.0;
  double coverage_algorithmic_std = 0.0;
  double coverage_reporting_mean = 0.0;
  double coverage_reporting_std = 0.0;
  double width_mean = 0.0;  // over finite intervals; nan when none
  double width_std = 0.0;
  std::size_t abstained_steps = 0;
  std::size_t abstained_reps = 0;  // reps in which every step abstained
  std::size_t reps_with_abstention = 0;
  double min_sliding_coverage = 0.0;  // mean over reps
};

struct ImprovementRow {
  std::string method;
  std::string baseline;
  double mean_coverage_gain = 0.0;  // mean over reps
  double max_sliding_gain = 0.0;    // mean over reps of the max windowed gain
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<MethodSummary> summaries;
  std::vector<ImprovementRow> improvements;
  RepResult recorded;  // repetition cfg.record_rep
  /// True when some method abstained at every step of every repetition.
  bool abstained_everywhere = false;
};

/// Runs every repetition (in parallel) and reduces in repetition order.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Trailing-window mean; a single overall mean when the series is shorter.
std::vector<double> sliding_coverage(std::span<const std::uint8_t> covered, std::size_t window);

/// Writes results.csv, summary.csv, improvements.csv, sliding_coverage.csv,
/// diagnostics.csv (online SR) and config.txt. Returns the paths written.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& dir);

std::string summary_csv(const std::vector<MethodSummary>& summaries);
std::string diagnostics_csv(const std::vector<AdaptiveStepRecord>& diagnostics);

struct SweepPoint {
  double value = 0.0;
  ExperimentResult result;
};

/// Re-runs the experiment once per value of `param` (tau, delta, gamma, eta
/// or k) with shared seeds. Throws ConfigError for other parameters or an
/// empty grid.
std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& param,
                              std::span<const double> values);

std::string sweep_csv(const std::string& param, const std::vector<SweepPoint>& points);

}  // namespace stagecp
