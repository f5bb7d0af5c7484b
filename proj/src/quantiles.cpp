#include "stagecp/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "stagecp/error.hpp"

namespace stagecp {

namespace {

// Absorbs representation error in products like 10 * 0.9 so the rank does
// not jump by one.
constexpr double kRankSlack = 1e-9;

double required_mass(double total, double level) { return (total + 1.0) * (1.0 - level); }

double kth_smallest(std::span<const double> scores, std::size_t k) {
  std::vector<double> v(scores.begin(), scores.end());
  auto nth = v.begin() + static_cast<std::ptrdiff_t>(k - 1);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

}  // namespace

long long conformal_rank(std::size_t m, double level) {
  return static_cast<long long>(
      std::ceil(required_mass(static_cast<double>(m), level) - kRankSlack));
}

double conformal_quantile(std::span<const double> scores, double level) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "no scores to take a quantile of");
  if (level < 0.0) return kInf;
  const long long k = conformal_rank(scores.size(), level);
  if (k > static_cast<long long>(scores.size())) return kInf;
  if (k <= 0) return 0.0;
  return kth_smallest(scores, static_cast<std::size_t>(k));
}

double weighted_quantile(std::span<const double> scores, std::span<const double> weights,
                         double level) {
  if (scores.size() != weights.size()) {
    throw Error(ErrorKind::LengthMismatch, "scores and weights differ in length");
  }
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "no scores to take a quantile of");
  double total = 0.0;
  for (double p : weights) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorKind::InvalidArgument, "weights must be finite and non-negative");
    }
    total += p;
  }
  if (total <= 0.0) throw Error(ErrorKind::AllZeroWeights, "all weights are zero");
  if (level < 0.0) return kInf;

  // Work in unnormalised mass: cumulative / (1 + total) >= 1 - level.
  const double target = required_mass(total, level) - kRankSlack;
  if (target <= 0.0) return 0.0;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return scores[i] < scores[j]; });
  double cumulative = 0.0;
  for (std::size_t i : order) {
    cumulative += weights[i];
    if (cumulative >= target) return scores[i];
  }
  return kInf;
}

double signed_upper_quantile(std::span<const double> scores, double level) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "no scores to take a quantile of");
  if (level < 0.0) return kInf;
  const long long k = conformal_rank(scores.size(), level);
  if (k > static_cast<long long>(scores.size())) return kInf;
  if (k <= 0) return -kInf;
  return kth_smallest(scores, static_cast<std::size_t>(k));
}

double signed_lower_quantile(std::span<const double> scores, double level) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "no scores to take a quantile of");
  if (level < 0.0) return -kInf;
  const long long k = conformal_rank(scores.size(), level);
  if (k > static_cast<long long>(scores.size())) return -kInf;
  if (k <= 0) return kInf;
  return kth_smallest(scores, scores.size() + 1 - static_cast<std::size_t>(k));
}

}  // namespace stagecp
