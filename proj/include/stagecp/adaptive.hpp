#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "stagecp/intervals.hpp"
#include "stagecp/risk_control.hpp"

namespace stagecp {

struct ComponentCoverage {
  int cov = 1;           // 1 when the interval covered (abstention covers)
  double cov_dr1 = 0.0;  // ReLU(delta_r1 - threshold)
  double cov_r2 = 0.0;   // ReLU(r2 - threshold)
};

ComponentCoverage component_coverage(const ResidualComponents& components, double dr1_threshold,
                                     double r2_threshold, const PredictionInterval& interval,
                                     double y);

/// alpha_t + gamma (alpha - err), err = 1 - cov.
double update_alpha(double alpha_t, int cov, double target_alpha, double gamma);

/// How the pair is chosen after a covered step.
/// Coverage: the accepted pair whose conformal-set coverage is nearest
/// 1 - alpha_t, so alpha_t steers the width.
/// Sticky: keep the previous pair while it stays accepted.
enum class SelectionMode { Coverage, Sticky };

struct SelectionInput {
  std::span<const Lambda> lambda_val;  // testing order
  // Coverage mode only: conformal-set coverage of each accepted pair and
  // the coverage to aim for.
  std::span<const double> conf_coverage;
  double target_coverage = 0.9;
  Lambda prev{1.0, 1.0};
  double mean_dr1 = 0.0;  // window means
  double mean_r2 = 0.0;
  ComponentCoverage prev_coverage;
  // Gates that keep c_t and d_t bounded.
  bool dr1_threshold_finite = true;
  bool r2_threshold_finite = true;
  bool dr1_clean = false;  // no excess over the recent window
  bool r2_clean = false;
  bool c_can_tighten = true;  // c_t <= 1
  bool d_can_tighten = true;
};

struct Selection {
  Lambda lambda;
  int delta_c = 0;
  int delta_d = 0;
};

/// Chooses (a_t, b_t) and the quantile-level signals.
///
/// After a cover: with conf_coverage given, the accepted pair nearest the
/// target coverage (the previous pair wins ties); otherwise the previous pair
/// when still accepted, else the nearest accepted pair. After a miss the
/// dominant component's coefficient is raised to the next accepted value; when no larger value exists its level
/// is widened (delta = -1) and the widest accepted pair is used. A level is
/// tightened (+1) only after a cover with a clean window for that component.
Selection select_lambda_adaptive(const SelectionInput& in);

struct AdaptiveOptions {
  double alpha = 0.1;  // target miscoverage
  double delta = 0.1;  // FWER level
  double tau = 0.0;
  double gamma = 0.01;
  double eta = 0.01;
  std::size_t k = 100;
  double conf_ratio = 0.5;
  double c0 = 0.05;
  double d0 = 0.05;
  double alpha0 = -1.0;  // initial alpha_t; negative means use alpha
  FwerMethod method = FwerMethod::FixedSequence;
  SelectionMode selection = SelectionMode::Coverage;
  std::vector<Lambda> grid = default_lambda_grid();
};

struct AdaptiveStepRecord {
  std::int64_t t = 0;
  PredictionInterval interval;
  bool covered = true;            // algorithmic policy
  bool covered_reporting = true;  // abstention counts as a miss
  Lambda lambda;
  double c = 0.0;
  double d = 0.0;
  double alpha_t = 0.0;
  double mean_dr1 = 0.0;
  double mean_r2 = 0.0;
  double mean_total = 0.0;
  ComponentThresholds thresholds;
  ComponentCoverage coverage;
  std::size_t n_accepted = 0;
  int delta_c = 0;
  int delta_d = 0;
};

/// The online recalibration loop. Holds the last k scored points and the
/// (alpha_t, a_t, b_t, c_t, d_t) state. Not thread-safe; one per stream.
class AdaptiveController {
 public:
  explicit AdaptiveController(AdaptiveOptions options);

  /// Adds a scored point to the window without producing an interval.
  void observe(const StageOutputs& point);
  bool ready() const { return window_.size() >= options_.k; }

  /// Builds the interval for `point` from the current window, scores it,
  /// updates the state and then appends the point to the window.
  /// Throws WindowTooShort before k points have been observed.
  AdaptiveStepRecord step(const StageOutputs& point);

  double alpha_t() const { return alpha_t_; }
  double c_t() const { return c_t_; }
  double d_t() const { return d_t_; }
  Lambda lambda() const { return prev_lambda_; }
  const AdaptiveOptions& options() const { return options_; }

 private:
  AdaptiveOptions options_;
  std::deque<StageOutputs> window_;
  std::deque<ComponentCoverage> signals_;  // last k component signals
  double alpha_t_;
  double c_t_;
  double d_t_;
  Lambda prev_lambda_{1.0, 1.0};
  ComponentCoverage prev_coverage_;
};

/// Runs `stream[warmup..]` through a controller warmed on `stream[0..warmup)`.
std::vector<AdaptiveStepRecord> run_adaptive(std::span<const StageOutputs> stream,
                                             std::size_t warmup, const AdaptiveOptions& options);

}  // namespace stagecp
