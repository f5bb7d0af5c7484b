#include "stagecp/intervals.hpp"

#include <cmath>

#include "stagecp/quantiles.hpp"

namespace stagecp {

PredictionInterval PredictionInterval::symmetric(double center, double half_width) {
  return {IntervalKind::Finite, center, center - half_width, center + half_width, half_width};
}

PredictionInterval PredictionInterval::asymmetric(double center, double lo, double hi) {
  return {IntervalKind::Finite, center, lo, hi, 0.5 * (hi - lo)};
}

PredictionInterval PredictionInterval::abstained(double center) {
  return {IntervalKind::Abstained, center, -kInf, kInf, kInf};
}

PredictionInterval PredictionInterval::empty(double center) {
  return {IntervalKind::Empty, center, center, center, 0.0};
}

double PredictionInterval::width() const {
  switch (kind) {
    case IntervalKind::Abstained: return kInf;
    case IntervalKind::Empty: return 0.0;
    case IntervalKind::Finite: break;
  }
  return hi - lo;
}

bool covers(const PredictionInterval& interval, double y, AbstentionPolicy policy) {
  switch (interval.kind) {
    case IntervalKind::Abstained: return policy == AbstentionPolicy::Algorithmic;
    case IntervalKind::Empty: return false;
    case IntervalKind::Finite: break;
  }
  return interval.lo <= y && y <= interval.hi;
}

ComponentScores component_scores(std::span<const ResidualComponents> components) {
  return {total_residuals(components), delta_r1_values(components), r2_values(components)};
}

ComponentScores component_scores(std::span<const StageOutputs> outputs) {
  const auto comps = decompose_all(outputs);
  return component_scores(comps);
}

ComponentThresholds component_thresholds(const ComponentScores& scores, double c, double d) {
  return {conformal_quantile(scores.delta_r1, c), conformal_quantile(scores.r2, d)};
}

double scaled_half_width(double a, double q1, double b, double q2) {
  const double first = a == 0.0 ? 0.0 : a * q1;
  const double second = b == 0.0 ? 0.0 : b * q2;
  return first + second;
}

PredictionInterval interval_from_half_width(double center, double half_width) {
  if (std::isinf(half_width)) return PredictionInterval::abstained(center);
  return PredictionInterval::symmetric(center, half_width);
}

PredictionInterval interval_split_conformal(std::span<const double> total_scores, double alpha,
                                            double center) {
  return interval_from_half_width(center, conformal_quantile(total_scores, alpha));
}

PredictionInterval interval_separate(const ComponentScores& scores, double c, double d,
                                     double center) {
  const auto q = component_thresholds(scores, c, d);
  return interval_from_half_width(center, scaled_half_width(1.0, q.delta_r1, 1.0, q.r2));
}

PredictionInterval interval_unified(const ComponentScores& scores, const ScalingConfig& cfg,
                                    double center) {
  const auto q = component_thresholds(scores, cfg.c, cfg.d);
  return interval_from_half_width(center, scaled_half_width(cfg.a, q.delta_r1, cfg.b, q.r2));
}

PredictionInterval interval_signed(std::span<const SignedResidualComponents> conf,
                                   const ScalingConfig& cfg, double center) {
  if (conf.empty()) throw Error(ErrorKind::EmptyScores, "empty conformal set");
  // The end-to-end error is r2_signed + (-delta_r1_signed), so the upstream
  // term enters with its sign flipped.
  std::vector<double> upstream, downstream;
  upstream.reserve(conf.size());
  downstream.reserve(conf.size());
  for (const auto& s : conf) {
    upstream.push_back(-s.delta_r1_signed);
    downstream.push_back(s.r2_signed);
  }
  const double lo_shift = scaled_half_width(cfg.a, signed_lower_quantile(upstream, cfg.c / 2),
                                            cfg.b, signed_lower_quantile(downstream, cfg.d / 2));
  const double hi_shift = scaled_half_width(cfg.a, signed_upper_quantile(upstream, cfg.c / 2),
                                            cfg.b, signed_upper_quantile(downstream, cfg.d / 2));
  if (!std::isfinite(lo_shift) || !std::isfinite(hi_shift)) {
    return PredictionInterval::abstained(center);
  }
  return PredictionInterval::asymmetric(center, center + lo_shift, center + hi_shift);
}

PredictionInterval interval_split_conformal(const TwoStagePipeline& pipeline,
                                            std::span<const TripletPoint> conf, double alpha,
                                            std::span<const double> w) {
  const auto scores = component_scores(evaluate_all(pipeline, conf));
  return interval_split_conformal(scores.total, alpha, pipeline.predict(w).y_hat);
}

PredictionInterval interval_separate(const TwoStagePipeline& pipeline,
                                     std::span<const TripletPoint> conf, double c, double d,
                                     std::span<const double> w) {
  const auto scores = component_scores(evaluate_all(pipeline, conf));
  return interval_separate(scores, c, d, pipeline.predict(w).y_hat);
}

PredictionInterval interval_unified(const TwoStagePipeline& pipeline,
                                    std::span<const TripletPoint> conf, const ScalingConfig& cfg,
                                    std::span<const double> w) {
  const auto scores = component_scores(evaluate_all(pipeline, conf));
  return interval_unified(scores, cfg, pipeline.predict(w).y_hat);
}

PredictionInterval interval_signed(const TwoStagePipeline& pipeline,
                                   std::span<const TripletPoint> conf, const ScalingConfig& cfg,
                                   std::span<const double> w) {
  const auto signed_scores = decompose_signed_all(evaluate_all(pipeline, conf));
  return interval_signed(signed_scores, cfg, pipeline.predict(w).y_hat);
}

}  // namespace stagecp
