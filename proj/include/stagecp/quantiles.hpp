#pragma once

#include <limits>
#include <span>

namespace stagecp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Finite-sample conformal quantile Q_{1-level}: the k-th smallest score with
/// k = ceil((m+1)(1-level)).
///
/// level < 0 or k > m gives +inf (abstention), k <= 0 gives 0.
/// Throws EmptyScores when scores is empty.
double conformal_quantile(std::span<const double> scores, double level);

/// Weighted version with the leftover mass 1/(1+sum p) placed at +inf.
/// Unit weights reproduce conformal_quantile exactly.
/// Throws LengthMismatch, AllZeroWeights, EmptyScores.
double weighted_quantile(std::span<const double> scores, std::span<const double> weights,
                         double level);

/// Rank used by conformal_quantile, before clamping: ceil((m+1)(1-level)).
long long conformal_rank(std::size_t m, double level);

/// Upper tail of signed scores: Q_{1-level}, the k-th smallest with the same
/// rank rule; +inf when k > m or level < 0, -inf when k <= 0.
double signed_upper_quantile(std::span<const double> scores, double level);

/// Mirror image: the k-th largest; -inf when k > m or level < 0, +inf when k <= 0.
double signed_lower_quantile(std::span<const double> scores, double level);

}  // namespace stagecp
