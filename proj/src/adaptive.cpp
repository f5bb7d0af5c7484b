#include "stagecp/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stagecp/quantiles.hpp"

namespace stagecp {

namespace {

double relu_excess(double value, double threshold) {
  if (std::isinf(threshold)) return 0.0;
  return std::max(0.0, value - threshold);
}

Lambda nearest(std::span<const Lambda> candidates, Lambda target) {
  Lambda best = candidates.front();
  double best_dist = std::numeric_limits<double>::infinity();
  for (const Lambda& l : candidates) {
    const double da = l.a - target.a;
    const double db = l.b - target.b;
    const double dist = da * da + db * db;
    if (dist < best_dist) {
      best_dist = dist;
      best = l;
    }
  }
  return best;
}

// Accepted pair with the smallest coefficient strictly above the previous one
// on the chosen axis; ties prefer the other coefficient closest to its
// previous value, then the smaller one.
std::optional<Lambda> next_step_up(std::span<const Lambda> candidates, Lambda prev,
                                   bool upstream) {
  auto primary = [&](const Lambda& l) { return upstream ? l.a : l.b; };
  auto secondary = [&](const Lambda& l) { return upstream ? l.b : l.a; };
  std::optional<Lambda> best;
  for (const Lambda& l : candidates) {
    if (!(primary(l) > primary(prev))) continue;
    if (!best) {
      best = l;
      continue;
    }
    const double p_new = primary(l), p_best = primary(*best);
    if (p_new != p_best) {
      if (p_new < p_best) best = l;
      continue;
    }
    const double gap_new = std::fabs(secondary(l) - secondary(prev));
    const double gap_best = std::fabs(secondary(*best) - secondary(prev));
    if (gap_new < gap_best || (gap_new == gap_best && secondary(l) < secondary(*best))) best = l;
  }
  return best;
}

}  // namespace

ComponentCoverage component_coverage(const ResidualComponents& components, double dr1_threshold,
                                     double r2_threshold, const PredictionInterval& interval,
                                     double y) {
  ComponentCoverage out;
  out.cov = covers(interval, y, AbstentionPolicy::Algorithmic) ? 1 : 0;
  out.cov_dr1 = relu_excess(components.delta_r1, dr1_threshold);
  out.cov_r2 = relu_excess(components.r2, r2_threshold);
  return out;
}

double update_alpha(double alpha_t, int cov, double target_alpha, double gamma) {
  const double err = 1.0 - static_cast<double>(cov);
  return alpha_t + gamma * (target_alpha - err);
}

Selection select_lambda_adaptive(const SelectionInput& in) {
  Selection out;
  out.lambda = in.prev;

  if (in.prev_coverage.cov == 1) {
    if (!in.conf_coverage.empty() && in.conf_coverage.size() == in.lambda_val.size()) {
      double best_gap = kInf;
      for (std::size_t i = 0; i < in.lambda_val.size(); ++i) {
        const double gap = std::fabs(in.conf_coverage[i] - in.target_coverage);
        if (gap < best_gap || (gap == best_gap && in.lambda_val[i] == in.prev)) {
          best_gap = gap;
          out.lambda = in.lambda_val[i];
        }
      }
    } else if (!in.lambda_val.empty() &&
               std::find(in.lambda_val.begin(), in.lambda_val.end(), in.prev) ==
               in.lambda_val.end()) {
      out.lambda = nearest(in.lambda_val, in.prev);
    }
    if (in.lambda_val.empty()) {
      // Nothing validated: widen whichever component just exceeded its
      // threshold so later windows have candidates again.
      out.delta_c = in.prev_coverage.cov_dr1 > 0.0 && in.dr1_threshold_finite ? -1 : 0;
      out.delta_d = in.prev_coverage.cov_r2 > 0.0 && in.r2_threshold_finite ? -1 : 0;
      return out;
    }
    out.delta_c = in.dr1_clean && in.c_can_tighten ? 1 : 0;
    out.delta_d = in.r2_clean && in.d_can_tighten ? 1 : 0;
    return out;
  }

  const bool upstream = in.mean_dr1 > in.mean_r2;
  if (auto up = next_step_up(in.lambda_val, in.prev, upstream)) {
    out.lambda = *up;
    return out;
  }
  if (!in.lambda_val.empty()) out.lambda = in.lambda_val.front();
  if (upstream) {
    out.delta_c = in.prev_coverage.cov_dr1 > 0.0 && in.dr1_threshold_finite ? -1 : 0;
  } else {
    out.delta_d = in.prev_coverage.cov_r2 > 0.0 && in.r2_threshold_finite ? -1 : 0;
  }
  return out;
}

AdaptiveController::AdaptiveController(AdaptiveOptions options)
    : options_(std::move(options)),
      alpha_t_(options_.alpha0 < 0.0 ? options_.alpha : options_.alpha0),
      c_t_(options_.c0),
      d_t_(options_.d0) {
  const std::size_t n_conf = window_conf_size(options_.k, options_.conf_ratio);
  if (n_conf == 0 || n_conf >= options_.k) {
    throw Error(ErrorKind::InvalidArgument,
                "window k=" + std::to_string(options_.k) +
                    " leaves an empty conformal or calibration part");
  }
  if (!(options_.gamma >= 0.0) || !(options_.eta >= 0.0)) {
    throw Error(ErrorKind::InvalidArgument, "step sizes must be non-negative");
  }
  if (options_.grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty lambda grid");
}

void AdaptiveController::observe(const StageOutputs& point) {
  window_.push_back(point);
  while (window_.size() > options_.k) window_.pop_front();
}

AdaptiveStepRecord AdaptiveController::step(const StageOutputs& point) {
  if (!ready()) {
    throw Error(ErrorKind::WindowTooShort, "only " + std::to_string(window_.size()) +
                                               " of " + std::to_string(options_.k) +
                                               " window points observed");
  }
  const std::size_t k = options_.k;
  const std::size_t n_conf = window_conf_size(k, options_.conf_ratio);

  std::vector<ResidualComponents> conf_comps, cal_comps;
  conf_comps.reserve(n_conf);
  cal_comps.reserve(k - n_conf);
  double sum_dr1 = 0.0, sum_r2 = 0.0, sum_total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const auto comp = decompose(window_[i]);
    sum_dr1 += comp.delta_r1;
    sum_r2 += comp.r2;
    sum_total += comp.r_total;
    (i < n_conf ? conf_comps : cal_comps).push_back(comp);
  }
  const auto conf_scores = component_scores(conf_comps);
  const auto cal_scores = component_scores(cal_comps);
  const auto q = component_thresholds(conf_scores, c_t_, d_t_);

  CalibrationVerdict verdict;
  if (alpha_t_ >= 0.0) {
    verdict = calibrate(cal_scores, q, options_.grid,
                        {alpha_t_, options_.delta, options_.tau, options_.method});
  }

  AdaptiveStepRecord rec;
  rec.t = point.t;
  rec.c = c_t_;
  rec.d = d_t_;
  rec.alpha_t = alpha_t_;
  rec.mean_dr1 = sum_dr1 / static_cast<double>(k);
  rec.mean_r2 = sum_r2 / static_cast<double>(k);
  rec.mean_total = sum_total / static_cast<double>(k);
  rec.thresholds = q;
  rec.n_accepted = verdict.lambda_val.size();

  SelectionInput in;
  in.lambda_val = verdict.lambda_val;
  in.prev = prev_lambda_;
  in.mean_dr1 = rec.mean_dr1;
  in.mean_r2 = rec.mean_r2;
  in.prev_coverage = prev_coverage_;
  in.dr1_threshold_finite = std::isfinite(q.delta_r1);
  in.r2_threshold_finite = std::isfinite(q.r2);
  in.dr1_clean = !signals_.empty() && std::all_of(signals_.begin(), signals_.end(),
                                                  [](const auto& s) { return s.cov_dr1 == 0.0; });
  in.r2_clean = !signals_.empty() && std::all_of(signals_.begin(), signals_.end(),
                                                 [](const auto& s) { return s.cov_r2 == 0.0; });
  in.c_can_tighten = c_t_ <= 1.0;
  in.d_can_tighten = d_t_ <= 1.0;
  std::vector<double> conf_coverage;
  if (options_.selection == SelectionMode::Coverage) {
    conf_coverage.reserve(verdict.lambda_val.size());
    for (const Lambda& l : verdict.lambda_val) {
      conf_coverage.push_back(1.0 - empirical_risk(conf_scores, q, l));
    }
    in.conf_coverage = conf_coverage;
    in.target_coverage = 1.0 - std::clamp(alpha_t_, 0.0, 1.0);
  }
  const Selection sel = select_lambda_adaptive(in);
  rec.lambda = sel.lambda;
  rec.delta_c = sel.delta_c;
  rec.delta_d = sel.delta_d;

  const double center = point.mu2_xhat;
  if (verdict.abstains()) {
    rec.interval = PredictionInterval::abstained(center);
  } else if (alpha_t_ > 1.0) {
    rec.interval = PredictionInterval::empty(center);
  } else {
    rec.interval = interval_from_half_width(
        center, scaled_half_width(sel.lambda.a, q.delta_r1, sel.lambda.b, q.r2));
  }

  rec.coverage = component_coverage(decompose(point), q.delta_r1, q.r2, rec.interval, point.y);
  rec.covered = rec.coverage.cov == 1;
  rec.covered_reporting = covers(rec.interval, point.y, AbstentionPolicy::Reporting);

  alpha_t_ = update_alpha(alpha_t_, rec.coverage.cov, options_.alpha, options_.gamma);
  c_t_ += options_.eta * sel.delta_c;
  d_t_ += options_.eta * sel.delta_d;
  prev_lambda_ = sel.lambda;
  prev_coverage_ = rec.coverage;
  signals_.push_back(rec.coverage);
  while (signals_.size() > k) signals_.pop_front();
  observe(point);
  return rec;
}

std::vector<AdaptiveStepRecord> run_adaptive(std::span<const StageOutputs> stream,
                                             std::size_t warmup, const AdaptiveOptions& options) {
  if (warmup > stream.size()) {
    throw Error(ErrorKind::InsufficientData, "warm-up longer than the stream");
  }
  AdaptiveController controller(options);
  for (std::size_t i = 0; i < warmup; ++i) controller.observe(stream[i]);
  std::vector<AdaptiveStepRecord> out;
  out.reserve(stream.size() - warmup);
  for (std::size_t i = warmup; i < stream.size(); ++i) out.push_back(controller.step(stream[i]));
  return out;
}

}  // namespace stagecp
