#include "stagecp/predictors.hpp"

#include <string>

namespace stagecp {

namespace {

void check_dim(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(want) + ", got " +
                                                  std::to_string(got));
  }
}

}  // namespace

LinearStage::LinearStage(Eigen::MatrixXd weights, Eigen::VectorXd intercept)
    : weights_(std::move(weights)), intercept_(std::move(intercept)) {
  check_dim(static_cast<std::size_t>(intercept_.size()),
            static_cast<std::size_t>(weights_.rows()), "intercept");
}

Vector LinearStage::predict(std::span<const double> input) const {
  check_dim(input.size(), input_dim(), "linear stage input");
  const Eigen::Map<const Eigen::VectorXd> in(input.data(), static_cast<Eigen::Index>(input.size()));
  const Eigen::VectorXd out = weights_ * in + intercept_;
  return Vector(out.data(), out.data() + out.size());
}

FunctionStage::FunctionStage(std::size_t input_dim, std::size_t output_dim, Fn fn)
    : input_dim_(input_dim), output_dim_(output_dim), fn_(std::move(fn)) {}

Vector FunctionStage::predict(std::span<const double> input) const {
  check_dim(input.size(), input_dim_, "function stage input");
  Vector out = fn_(input);
  check_dim(out.size(), output_dim_, "function stage output");
  return out;
}

LinearStage fit_ols(std::span<const Vector> inputs, std::span<const Vector> targets) {
  if (inputs.size() != targets.size()) {
    throw Error(ErrorKind::LengthMismatch, "inputs and targets differ in length");
  }
  if (inputs.empty()) {
    throw Error(ErrorKind::InsufficientData, "no training rows");
  }
  const auto n = static_cast<Eigen::Index>(inputs.size());
  const auto p = static_cast<Eigen::Index>(inputs.front().size());
  const auto q = static_cast<Eigen::Index>(targets.front().size());
  if (n < p + 1) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(p + 1) + " rows to fit " + std::to_string(p) +
                    " inputs plus intercept");
  }

  Eigen::MatrixXd design(n, p + 1);
  Eigen::MatrixXd response(n, q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& in = inputs[static_cast<std::size_t>(i)];
    const auto& out = targets[static_cast<std::size_t>(i)];
    check_dim(in.size(), static_cast<std::size_t>(p), "training input");
    check_dim(out.size(), static_cast<std::size_t>(q), "training target");
    for (Eigen::Index j = 0; j < p; ++j) design(i, j) = in[static_cast<std::size_t>(j)];
    design(i, p) = 1.0;
    for (Eigen::Index j = 0; j < q; ++j) response(i, j) = out[static_cast<std::size_t>(j)];
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < 1e-10 * sv(0)) {
    throw Error(ErrorKind::RankDeficient, "design matrix is singular");
  }
  const Eigen::MatrixXd coef = svd.solve(response);  // (p+1) x q

  Eigen::MatrixXd weights = coef.topRows(p).transpose();
  Eigen::VectorXd intercept = coef.row(p).transpose();
  return LinearStage(std::move(weights), std::move(intercept));
}

TwoStagePipeline::TwoStagePipeline(StagePtr upstream, StagePtr downstream)
    : upstream_(std::move(upstream)), downstream_(std::move(downstream)) {
  if (!upstream_ || !downstream_) {
    throw Error(ErrorKind::InvalidArgument, "pipeline stages must be non-null");
  }
  check_dim(upstream_->output_dim(), downstream_->input_dim(), "pipeline stage interface");
  check_dim(downstream_->output_dim(), 1, "pipeline output");
}

PipelinePrediction TwoStagePipeline::predict(std::span<const double> w) const {
  PipelinePrediction out;
  out.x_hat = upstream_->predict(w);
  out.y_hat = downstream_->predict(out.x_hat).front();
  return out;
}

double TwoStagePipeline::predict_given_x(std::span<const double> x) const {
  return downstream_->predict(x).front();
}

StageOutputs TwoStagePipeline::evaluate(const TripletPoint& point) const {
  StageOutputs out;
  out.t = point.t.value_or(0);
  out.y = point.y;
  out.mu2_x = predict_given_x(point.x);
  out.mu2_xhat = predict(point.w).y_hat;
  return out;
}

PipelinePrediction predict_pipeline(const TwoStagePipeline& pipeline, std::span<const double> w) {
  return pipeline.predict(w);
}

double predict_given_x(const TwoStagePipeline& pipeline, std::span<const double> x) {
  return pipeline.predict_given_x(x);
}

TwoStagePipeline fit_pipeline(std::span<const TripletPoint> train) {
  validate_points(train);
  std::vector<Vector> w, x, y;
  w.reserve(train.size());
  x.reserve(train.size());
  y.reserve(train.size());
  for (const auto& p : train) {
    w.push_back(p.w);
    x.push_back(p.x);
    y.push_back({p.y});
  }
  auto upstream = std::make_shared<LinearStage>(fit_ols(w, x));
  auto downstream = std::make_shared<LinearStage>(fit_ols(x, y));
  return TwoStagePipeline(std::move(upstream), std::move(downstream));
}

std::vector<StageOutputs> evaluate_all(const TwoStagePipeline& pipeline,
                                       std::span<const TripletPoint> points) {
  std::vector<StageOutputs> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(pipeline.evaluate(p));
  return out;
}

}  // namespace stagecp
