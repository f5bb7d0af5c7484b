#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stagecp/intervals.hpp"

namespace stagecp {

struct Lambda {
  double a = 1.0;
  double b = 1.0;
  friend bool operator==(const Lambda&, const Lambda&) = default;
};

/// Sorts into testing order: descending a+b, ties by descending a.
void order_lambda_grid(std::vector<Lambda>& grid);

/// {0, 1/steps, ..., 1}^2 in testing order; steps=10 gives 121 candidates.
std::vector<Lambda> default_lambda_grid(int steps = 10);

enum class FwerMethod { FixedSequence, Bonferroni };

struct CandidateRecord {
  Lambda lambda;
  double empirical_risk = 0.0;
  double p_value = 1.0;
  bool accepted = false;
};

struct CalibrationVerdict {
  std::vector<CandidateRecord> records;  // testing order
  std::vector<Lambda> lambda_val;        // accepted, testing order
  bool abstains() const { return lambda_val.empty(); }
};

/// Fraction of calibration points whose interval misses y.
double empirical_risk(std::span<const StageOutputs> cal,
                      const std::function<PredictionInterval(const StageOutputs&)>& builder,
                      AbstentionPolicy policy = AbstentionPolicy::Algorithmic);

/// Same quantity for the unified interval: a miss is total > a*q1 + b*q2.
/// An infinite half width covers everything (algorithmic policy).
double empirical_risk(const ComponentScores& cal, const ComponentThresholds& q, Lambda lambda);

/// P(Bin(l, alpha+tau) <= floor(l*risk_hat)). Throws InvalidLevel unless
/// alpha+tau lies in (0,1), InvalidArgument when l == 0.
double binomial_p_value(std::size_t l, double alpha, double tau, double risk_hat);

/// cdf[i] = P(Bin(l, p) <= i) for i = 0..l, accumulated in log space.
std::vector<double> binomial_cdf_table(std::size_t l, double p);

/// Concentration p-value for phi-mixing calibration data:
/// min(1, 2 exp(-2 l eps^2 / Delta^2)), eps = max(0, alpha - risk_hat),
/// Delta = 1 + sum of the first l mixing coefficients.
double mixing_p_value(std::size_t l, double alpha, double risk_hat, std::span<const double> phi);

/// Geometric mixing coefficients phi(i) = scale * rate^i, i = 1..n.
std::vector<double> geometric_mixing_coefficients(std::size_t n, double scale, double rate);

std::vector<std::size_t> bonferroni(std::span<const double> p_values, double delta);

/// Longest prefix with every p <= delta.
std::vector<std::size_t> fixed_sequence_test(std::span<const double> p_values, double delta);

struct CalibrationOptions {
  double alpha = 0.1;  // tested miscoverage
  double delta = 0.1;  // FWER level
  double tau = 0.0;
  FwerMethod method = FwerMethod::FixedSequence;
};

/// Runs the risk test for every candidate using thresholds taken from the
/// conformal set. Levels alpha+tau outside (0,1) are handled without error:
/// <= 0 rejects everything, >= 1 accepts everything.
CalibrationVerdict calibrate(const ComponentScores& cal, const ComponentThresholds& q,
                             std::span<const Lambda> grid, const CalibrationOptions& options);

/// Accepted candidate whose coverage on the conformal set is nearest 1-alpha;
/// ties go to the earliest in testing order. nullopt means abstain.
std::optional<Lambda> select_lambda_nonadaptive(std::span<const Lambda> lambda_val,
                                                const ComponentScores& conf,
                                                const ComponentThresholds& q, double alpha);

}  // namespace stagecp
