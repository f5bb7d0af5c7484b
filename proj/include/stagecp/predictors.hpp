#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "stagecp/core_types.hpp"

namespace stagecp {

/// A fitted, deterministic map R^in -> R^out.
class StageModel {
 public:
  virtual ~StageModel() = default;
  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual Vector predict(std::span<const double> input) const = 0;
};

using StagePtr = std::shared_ptr<const StageModel>;

/// y = W x + b. Result type of ordinary least squares.
class LinearStage final : public StageModel {
 public:
  LinearStage(Eigen::MatrixXd weights, Eigen::VectorXd intercept);

  std::size_t input_dim() const override { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(weights_.rows()); }
  Vector predict(std::span<const double> input) const override;

  const Eigen::MatrixXd& weights() const { return weights_; }
  const Eigen::VectorXd& intercept() const { return intercept_; }

 private:
  Eigen::MatrixXd weights_;  // out x in
  Eigen::VectorXd intercept_;
};

/// Wraps an arbitrary callable; used for hand-built models in tests and for
/// auxiliary-input downstream stages.
class FunctionStage final : public StageModel {
 public:
  using Fn = std::function<Vector(std::span<const double>)>;

  FunctionStage(std::size_t input_dim, std::size_t output_dim, Fn fn);

  std::size_t input_dim() const override { return input_dim_; }
  std::size_t output_dim() const override { return output_dim_; }
  Vector predict(std::span<const double> input) const override;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  Fn fn_;
};

/// Least squares with intercept. Throws RankDeficient when the smallest
/// singular value of the augmented design is below 1e-10 times the largest,
/// InsufficientData with fewer than dim+1 rows.
LinearStage fit_ols(std::span<const Vector> inputs, std::span<const Vector> targets);

struct PipelinePrediction {
  Vector x_hat;
  double y_hat = 0.0;
};

/// mu2(mu1(w)) with scalar output.
class TwoStagePipeline {
 public:
  TwoStagePipeline(StagePtr upstream, StagePtr downstream);

  const StageModel& upstream() const { return *upstream_; }
  const StageModel& downstream() const { return *downstream_; }

  PipelinePrediction predict(std::span<const double> w) const;
  double predict_given_x(std::span<const double> x) const;

  /// Evaluates the three predictions residual decomposition needs.
  StageOutputs evaluate(const TripletPoint& point) const;

 private:
  StagePtr upstream_;
  StagePtr downstream_;
};

PipelinePrediction predict_pipeline(const TwoStagePipeline& pipeline, std::span<const double> w);
double predict_given_x(const TwoStagePipeline& pipeline, std::span<const double> x);

/// Fits both stages by OLS on (w, x) and (x, y) pairs.
TwoStagePipeline fit_pipeline(std::span<const TripletPoint> train);

std::vector<StageOutputs> evaluate_all(const TwoStagePipeline& pipeline,
                                       std::span<const TripletPoint> points);

}  // namespace stagecp
