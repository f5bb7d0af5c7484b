#pragma once

#include <span>
#include <vector>

#include "stagecp/core_types.hpp"
#include "stagecp/predictors.hpp"
#include "stagecp/residuals.hpp"

namespace stagecp {

/// Finite: a real interval [lo, hi].
/// Abstained: no interval is offered (infinite width).
/// Empty: the empty set, produced when an online miscoverage level exceeds 1.
enum class IntervalKind { Finite, Abstained, Empty };

/// How an abstained interval is scored.
/// Algorithmic: the infinite interval covers (online bookkeeping).
/// Reporting: abstention counts as a miss (summary tables).
enum class AbstentionPolicy { Algorithmic, Reporting };

struct PredictionInterval {
  IntervalKind kind = IntervalKind::Finite;
  double center = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double half_width = 0.0;  // (hi - lo) / 2; +inf when abstained

  static PredictionInterval symmetric(double center, double half_width);
  static PredictionInterval asymmetric(double center, double lo, double hi);
  static PredictionInterval abstained(double center);
  static PredictionInterval empty(double center);

  bool is_abstained() const { return kind == IntervalKind::Abstained; }
  /// hi - lo; +inf when abstained and 0 when empty.
  double width() const;
};

bool covers(const PredictionInterval& interval, double y,
            AbstentionPolicy policy = AbstentionPolicy::Algorithmic);

struct ScalingConfig {
  double a = 1.0;
  double b = 1.0;
  double c = 0.05;
  double d = 0.05;
  double alpha = 0.1;
};

/// Calibration scores in column form.
struct ComponentScores {
  std::vector<double> total;
  std::vector<double> delta_r1;
  std::vector<double> r2;
};

ComponentScores component_scores(std::span<const ResidualComponents> components);
ComponentScores component_scores(std::span<const StageOutputs> outputs);

/// Q_{1-c}({delta_r1}) and Q_{1-d}({r2}); either may be +inf.
struct ComponentThresholds {
  double delta_r1 = 0.0;
  double r2 = 0.0;
};

ComponentThresholds component_thresholds(const ComponentScores& scores, double c, double d);

/// a * q1 + b * q2 where a zero coefficient masks an infinite quantile.
double scaled_half_width(double a, double q1, double b, double q2);

/// Finite symmetric interval, or Abstained when half_width is +inf.
PredictionInterval interval_from_half_width(double center, double half_width);

// Score-level constructions. `center` is the end-to-end prediction for the
// test point; the spans hold calibration scores.
PredictionInterval interval_split_conformal(std::span<const double> total_scores, double alpha,
                                            double center);
PredictionInterval interval_separate(const ComponentScores& scores, double c, double d,
                                     double center);
PredictionInterval interval_unified(const ComponentScores& scores, const ScalingConfig& cfg,
                                    double center);
PredictionInterval interval_signed(std::span<const SignedResidualComponents> conf,
                                   const ScalingConfig& cfg, double center);

// Pipeline-level constructions over a raw conformal set.
PredictionInterval interval_split_conformal(const TwoStagePipeline& pipeline,
                                            std::span<const TripletPoint> conf, double alpha,
                                            std::span<const double> w);
PredictionInterval interval_separate(const TwoStagePipeline& pipeline,
                                     std::span<const TripletPoint> conf, double c, double d,
                                     std::span<const double> w);
PredictionInterval interval_unified(const TwoStagePipeline& pipeline,
                                    std::span<const TripletPoint> conf, const ScalingConfig& cfg,
                                    std::span<const double> w);
PredictionInterval interval_signed(const TwoStagePipeline& pipeline,
                                   std::span<const TripletPoint> conf, const ScalingConfig& cfg,
                                   std::span<const double> w);

}  // namespace stagecp
