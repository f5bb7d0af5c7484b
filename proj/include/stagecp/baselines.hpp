#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "stagecp/intervals.hpp"

namespace stagecp {

enum class BaselineMethod { SC, WSC, ACI, DTACI, PID, OCID };

std::string_view to_string(BaselineMethod method);
std::optional<BaselineMethod> parse_baseline(std::string_view name);

struct BaselineOptions {
  double alpha = 0.1;
  double gamma = 0.01;      // ACI step; PID proportional learning rate
  double wsc_decay = 0.99;  // weight of a point one step older
  std::vector<double> dtaci_gammas{0.001, 0.002, 0.004, 0.008, 0.016, 0.032, 0.064, 0.128};
  double dtaci_horizon = 100.0;  // I in the expert-weight tuning
  double pid_ki = 0.05;
  double pid_csat = -1.0;  // negative: the largest score of the first window
  double ocid_gamma0 = 0.1;
  double ocid_decay = 0.1;  // step decays like (t+1)^-(1/2 + decay)
};

/// Weights decay^age with the newest point (last in the span) at weight 1.
std::vector<double> age_weights(std::size_t n, double decay);

/// Split conformal over a full-residual window.
PredictionInterval baseline_split_conformal(std::span<const double> scores, double alpha,
                                            double center);
/// Weighted split conformal, scores oldest first.
PredictionInterval baseline_weighted(std::span<const double> scores, double alpha, double decay,
                                     double center);

/// Largest level beta whose conformal interval still contains a point with
/// score s: 1 - (j-1)/(m+1), j-1 = number of scores strictly below s.
double covering_level(std::span<const double> scores, double s);

/// Pinball loss used to score DtACI experts.
double pinball_loss(double beta, double theta, double alpha);

struct BaselineStepRecord {
  PredictionInterval interval;
  bool covered = true;            // algorithmic policy
  bool covered_reporting = true;  // abstention counts as a miss
  double alpha_t = 0.0;           // level used for the interval
};

/// One online baseline stream. Call step() once per test point with the
/// current window of full residuals (oldest first).
class BaselineController {
 public:
  BaselineController(BaselineMethod method, BaselineOptions options);

  BaselineStepRecord step(std::span<const double> window_scores, double center, double y);

  BaselineMethod method() const { return method_; }
  double alpha_t() const { return alpha_t_; }
  /// DtACI expert levels and weights; empty for other methods.
  const std::vector<double>& expert_levels() const { return expert_alpha_; }
  const std::vector<double>& expert_weights() const { return expert_w_; }
  /// Last aggregate DtACI level before clipping.
  double unclipped_alpha() const { return unclipped_alpha_; }

 private:
  PredictionInterval interval_at_level(std::span<const double> scores, double level,
                                       double center) const;

  BaselineMethod method_;
  BaselineOptions options_;
  double alpha_t_;
  double unclipped_alpha_;
  std::size_t t_ = 0;

  std::vector<double> expert_alpha_;
  std::vector<double> expert_w_;
  double dtaci_eta_ = 0.0;
  double dtaci_sigma_ = 0.0;

  bool pid_started_ = false;
  double pid_p_ = 0.0;
  double pid_err_sum_ = 0.0;
  double pid_scale_ = 0.0;
  double pid_csat_ = 0.0;
};

}  // namespace stagecp
