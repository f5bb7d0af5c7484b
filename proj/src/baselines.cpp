#include "stagecp/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stagecp/quantiles.hpp"

namespace stagecp {

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::SC: return "SC";
    case BaselineMethod::WSC: return "WSC";
    case BaselineMethod::ACI: return "ACI";
    case BaselineMethod::DTACI: return "DTACI";
    case BaselineMethod::PID: return "PID";
    case BaselineMethod::OCID: return "OCID";
  }
  return "?";
}

std::optional<BaselineMethod> parse_baseline(std::string_view name) {
  for (auto m : {BaselineMethod::SC, BaselineMethod::WSC, BaselineMethod::ACI,
                 BaselineMethod::DTACI, BaselineMethod::PID, BaselineMethod::OCID}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<double> age_weights(std::size_t n, double decay) {
  std::vector<double> w(n);
  double v = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    w[i] = v;
    v *= decay;
  }
  return w;
}

PredictionInterval baseline_split_conformal(std::span<const double> scores, double alpha,
                                            double center) {
  return interval_from_half_width(center, conformal_quantile(scores, alpha));
}

PredictionInterval baseline_weighted(std::span<const double> scores, double alpha, double decay,
                                     double center) {
  const auto w = age_weights(scores.size(), decay);
  return interval_from_half_width(center, weighted_quantile(scores, w, alpha));
}

double covering_level(std::span<const double> scores, double s) {
  const auto below = std::count_if(scores.begin(), scores.end(), [&](double v) { return v < s; });
  return 1.0 - static_cast<double>(below) / static_cast<double>(scores.size() + 1);
}

double pinball_loss(double beta, double theta, double alpha) {
  return alpha * (beta - theta) - std::min(0.0, beta - theta);
}

BaselineController::BaselineController(BaselineMethod method, BaselineOptions options)
    : method_(method),
      options_(std::move(options)),
      alpha_t_(options_.alpha),
      unclipped_alpha_(options_.alpha) {
  if (!(options_.alpha > 0.0 && options_.alpha < 1.0)) {
    throw Error(ErrorKind::InvalidLevel, "alpha must lie in (0, 1)");
  }
  if (method_ == BaselineMethod::DTACI) {
    const std::size_t n = options_.dtaci_gammas.size();
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "DtACI needs at least one step size");
    expert_alpha_.assign(n, options_.alpha);
    expert_w_.assign(n, 1.0 / static_cast<double>(n));
    const double a = options_.alpha;
    const double horizon = options_.dtaci_horizon;
    dtaci_sigma_ = 1.0 / (2.0 * horizon);
    dtaci_eta_ = std::sqrt(3.0 / horizon) *
                 std::sqrt((std::log(static_cast<double>(n) * horizon) + 2.0) /
                           ((1 - a) * (1 - a) * a * a * a + a * a * (1 - a) * (1 - a) * (1 - a)));
  }
}

PredictionInterval BaselineController::interval_at_level(std::span<const double> scores,
                                                         double level, double center) const {
  if (level > 1.0) return PredictionInterval::empty(center);
  return interval_from_half_width(center, conformal_quantile(scores, level));
}

BaselineStepRecord BaselineController::step(std::span<const double> scores, double center,
                                            double y) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "empty baseline window");
  BaselineStepRecord rec;
  const double alpha = options_.alpha;
  const double score = std::fabs(y - center);

  switch (method_) {
    case BaselineMethod::SC:
      rec.alpha_t = alpha;
      rec.interval = baseline_split_conformal(scores, alpha, center);
      break;

    case BaselineMethod::WSC:
      rec.alpha_t = alpha;
      rec.interval = baseline_weighted(scores, alpha, options_.wsc_decay, center);
      break;

    case BaselineMethod::ACI:
    case BaselineMethod::OCID: {
      rec.alpha_t = alpha_t_;
      rec.interval = interval_at_level(scores, alpha_t_, center);
      const double err = covers(rec.interval, y) ? 0.0 : 1.0;
      double gamma = options_.gamma;
      if (method_ == BaselineMethod::OCID) {
        gamma = options_.ocid_gamma0 *
                std::pow(static_cast<double>(t_ + 1), -(0.5 + options_.ocid_decay));
      }
      alpha_t_ += gamma * (alpha - err);
      break;
    }

    case BaselineMethod::DTACI: {
      const double total_w = std::accumulate(expert_w_.begin(), expert_w_.end(), 0.0);
      double agg = 0.0;
      for (std::size_t i = 0; i < expert_w_.size(); ++i) {
        agg += expert_w_[i] / total_w * expert_alpha_[i];
      }
      unclipped_alpha_ = agg;
      rec.alpha_t = std::clamp(agg, 0.0, 1.0);
      rec.interval = interval_at_level(scores, rec.alpha_t, center);

      const double beta = covering_level(scores, score);
      double w_sum = 0.0;
      for (std::size_t i = 0; i < expert_w_.size(); ++i) {
        expert_w_[i] *= std::exp(-dtaci_eta_ * pinball_loss(beta, expert_alpha_[i], alpha));
        w_sum += expert_w_[i];
      }
      const double n = static_cast<double>(expert_w_.size());
      for (std::size_t i = 0; i < expert_w_.size(); ++i) {
        const double w = w_sum > 0.0 ? expert_w_[i] / w_sum : 1.0 / n;
        expert_w_[i] = (1.0 - dtaci_sigma_) * w + dtaci_sigma_ / n;
        const bool expert_covers = covers(interval_at_level(scores, expert_alpha_[i], center), y);
        expert_alpha_[i] += options_.dtaci_gammas[i] * (alpha - (expert_covers ? 0.0 : 1.0));
      }
      break;
    }

    case BaselineMethod::PID: {
      if (!pid_started_) {
        pid_started_ = true;
        pid_p_ = conformal_quantile(scores, alpha);
        const double max_score = *std::max_element(scores.begin(), scores.end());
        pid_scale_ = max_score;
        pid_csat_ = options_.pid_csat < 0.0 ? max_score : options_.pid_csat;
        if (std::isinf(pid_p_)) pid_p_ = max_score;
      }
      const double integral = pid_csat_ * std::tanh(options_.pid_ki * pid_err_sum_);
      const double q = std::max(0.0, pid_p_ + integral);
      rec.alpha_t = alpha;
      rec.interval = PredictionInterval::symmetric(center, q);
      const double err = covers(rec.interval, y) ? 0.0 : 1.0;
      pid_p_ += options_.gamma * pid_scale_ * (err - alpha);
      pid_err_sum_ += err - alpha;
      break;
    }
  }

  rec.covered = covers(rec.interval, y, AbstentionPolicy::Algorithmic);
  rec.covered_reporting = covers(rec.interval, y, AbstentionPolicy::Reporting);
  ++t_;
  return rec;
}

}  // namespace stagecp
