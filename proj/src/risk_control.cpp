#include "stagecp/risk_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stagecp/quantiles.hpp"

namespace stagecp {

void order_lambda_grid(std::vector<Lambda>& grid) {
  std::stable_sort(grid.begin(), grid.end(), [](const Lambda& x, const Lambda& y) {
    const double sx = x.a + x.b;
    const double sy = y.a + y.b;
    if (sx != sy) return sx > sy;
    return x.a > y.a;
  });
}

std::vector<Lambda> default_lambda_grid(int steps) {
  if (steps < 1) throw Error(ErrorKind::InvalidArgument, "grid needs at least one step");
  // Integer ordering so float rounding in a+b cannot reorder ties.
  std::vector<std::pair<int, int>> idx;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) idx.emplace_back(i, j);
  }
  std::stable_sort(idx.begin(), idx.end(), [](const auto& x, const auto& y) {
    if (x.first + x.second != y.first + y.second) {
      return x.first + x.second > y.first + y.second;
    }
    return x.first > y.first;
  });
  std::vector<Lambda> grid;
  grid.reserve(idx.size());
  const double s = static_cast<double>(steps);
  for (const auto& [i, j] : idx) grid.push_back({i / s, j / s});
  return grid;
}

double empirical_risk(std::span<const StageOutputs> cal,
                      const std::function<PredictionInterval(const StageOutputs&)>& builder,
                      AbstentionPolicy policy) {
  if (cal.empty()) throw Error(ErrorKind::EmptyCalibration, "calibration set is empty");
  std::size_t misses = 0;
  for (const auto& point : cal) {
    if (!covers(builder(point), point.y, policy)) ++misses;
  }
  return static_cast<double>(misses) / static_cast<double>(cal.size());
}

double empirical_risk(const ComponentScores& cal, const ComponentThresholds& q, Lambda lambda) {
  if (cal.total.empty()) throw Error(ErrorKind::EmptyCalibration, "calibration set is empty");
  const double hw = scaled_half_width(lambda.a, q.delta_r1, lambda.b, q.r2);
  std::size_t misses = 0;
  for (double r : cal.total) misses += r > hw ? 1 : 0;
  return static_cast<double>(misses) / static_cast<double>(cal.total.size());
}

std::vector<double> binomial_cdf_table(std::size_t l, double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidLevel, "level must lie in (0, 1)");
  const double n = static_cast<double>(l);
  const double log_p = std::log(p);
  const double log_q = std::log1p(-p);
  const double log_n_fact = std::lgamma(n + 1.0);
  std::vector<double> cdf(l + 1);
  double log_cdf = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= l; ++i) {
    const double k = static_cast<double>(i);
    const double term = log_n_fact - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                        k * log_p + (n - k) * log_q;
    // log(exp(log_cdf) + exp(term)) without overflow
    const double hi = std::max(log_cdf, term);
    const double lo = std::min(log_cdf, term);
    log_cdf = hi + std::log1p(std::exp(lo - hi));
    cdf[i] = std::min(1.0, std::exp(log_cdf));
  }
  cdf[l] = 1.0;
  return cdf;
}

namespace {

std::size_t miss_count(std::size_t l, double risk_hat) {
  const double raw = std::floor(static_cast<double>(l) * risk_hat + 1e-9);
  if (raw <= 0.0) return 0;
  return std::min(l, static_cast<std::size_t>(raw));
}

}  // namespace

double binomial_p_value(std::size_t l, double alpha, double tau, double risk_hat) {
  if (l == 0) throw Error(ErrorKind::InvalidArgument, "calibration size must be positive");
  const double p = alpha + tau;
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorKind::InvalidLevel, "alpha + tau must lie in (0, 1)");
  }
  return binomial_cdf_table(l, p)[miss_count(l, risk_hat)];
}

double mixing_p_value(std::size_t l, double alpha, double risk_hat, std::span<const double> phi) {
  if (l == 0) throw Error(ErrorKind::InvalidArgument, "calibration size must be positive");
  double prev = std::numeric_limits<double>::infinity();
  for (double v : phi) {
    if (!(v >= 0.0) || !std::isfinite(v) || v > prev) {
      throw Error(ErrorKind::InvalidMixingCoefficients,
                  "mixing coefficients must be finite, non-negative and non-increasing");
    }
    prev = v;
  }
  double spread = 1.0;
  for (std::size_t i = 0; i < std::min(l, phi.size()); ++i) spread += phi[i];
  const double eps = std::max(0.0, alpha - risk_hat);
  const double n = static_cast<double>(l);
  return std::min(1.0, 2.0 * std::exp(-2.0 * n * eps * eps / (spread * spread)));
}

std::vector<double> geometric_mixing_coefficients(std::size_t n, double scale, double rate) {
  if (!(scale >= 0.0) || !(rate >= 0.0 && rate <= 1.0)) {
    throw Error(ErrorKind::InvalidMixingCoefficients, "need scale >= 0 and rate in [0, 1]");
  }
  std::vector<double> phi(n);
  double v = scale;
  for (auto& x : phi) {
    v *= rate;
    x = v;
  }
  return phi;
}

std::vector<std::size_t> bonferroni(std::span<const double> p_values, double delta) {
  std::vector<std::size_t> out;
  if (p_values.empty()) return out;
  const double threshold = delta / static_cast<double>(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    if (p_values[i] <= threshold) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> fixed_sequence_test(std::span<const double> p_values, double delta) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < p_values.size() && p_values[i] <= delta; ++i) out.push_back(i);
  return out;
}

CalibrationVerdict calibrate(const ComponentScores& cal, const ComponentThresholds& q,
                             std::span<const Lambda> grid, const CalibrationOptions& options) {
  const std::size_t l = cal.total.size();
  if (l == 0) throw Error(ErrorKind::EmptyCalibration, "calibration set is empty");
  const double level = options.alpha + options.tau;

  std::vector<double> cdf;
  if (level > 0.0 && level < 1.0) cdf = binomial_cdf_table(l, level);

  CalibrationVerdict verdict;
  verdict.records.reserve(grid.size());
  std::vector<double> p_values;
  p_values.reserve(grid.size());
  for (const Lambda& lambda : grid) {
    CandidateRecord rec;
    rec.lambda = lambda;
    rec.empirical_risk = empirical_risk(cal, q, lambda);
    if (level <= 0.0) {
      rec.p_value = 1.0;
    } else if (level >= 1.0) {
      rec.p_value = 0.0;
    } else {
      rec.p_value = cdf[miss_count(l, rec.empirical_risk)];
    }
    p_values.push_back(rec.p_value);
    verdict.records.push_back(rec);
  }

  const auto accepted = options.method == FwerMethod::Bonferroni
                            ? bonferroni(p_values, options.delta)
                            : fixed_sequence_test(p_values, options.delta);
  for (std::size_t i : accepted) {
    verdict.records[i].accepted = true;
    verdict.lambda_val.push_back(grid[i]);
  }
  return verdict;
}

std::optional<Lambda> select_lambda_nonadaptive(std::span<const Lambda> lambda_val,
                                                const ComponentScores& conf,
                                                const ComponentThresholds& q, double alpha) {
  std::optional<Lambda> best;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const Lambda& lambda : lambda_val) {
    const double coverage = 1.0 - empirical_risk(conf, q, lambda);
    const double gap = std::fabs(coverage - (1.0 - alpha));
    if (gap < best_gap) {
      best_gap = gap;
      best = lambda;
    }
  }
  return best;
}

}  // namespace stagecp
