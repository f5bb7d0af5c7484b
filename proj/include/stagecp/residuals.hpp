#pragma once

#include <span>
#include <vector>

#include "stagecp/core_types.hpp"
#include "stagecp/predictors.hpp"

namespace stagecp {

/// Stage-wise split of the end-to-end absolute residual.
///
///   r2       = |y - mu2(x)|                      downstream error given true x
///   delta_r1 = | |y - mu2(x)| - |y - mu2(xhat)| | change caused by using xhat
///   r_total  = |y - mu2(xhat)|
///
/// r_total <= delta_r1 + r2 holds exactly, including under rounding.
struct ResidualComponents {
  double r_total = 0.0;
  double delta_r1 = 0.0;
  double r2 = 0.0;
};

/// Signed variant: r2_signed - delta_r1_signed == y - mu2(xhat).
struct SignedResidualComponents {
  double r2_signed = 0.0;        // y - mu2(x)
  double delta_r1_signed = 0.0;  // mu2(xhat) - mu2(x)
};

/// N-stage generalisation: deltas[i] is the change in final error caused by
/// feeding stage i+1 its predicted rather than its true input.
struct MultiStageComponents {
  std::vector<double> deltas;
  double r_last = 0.0;
  double r_total = 0.0;
};

ResidualComponents decompose(const StageOutputs& outputs);
ResidualComponents decompose(const TwoStagePipeline& pipeline, const TripletPoint& point);

SignedResidualComponents decompose_signed(const StageOutputs& outputs);
SignedResidualComponents decompose_signed(const TwoStagePipeline& pipeline,
                                          const TripletPoint& point);

/// `mu2_aux` takes the concatenation [x, x_aux].
ResidualComponents decompose_aux(const StageModel& mu2_aux, const AuxiliaryPoint& point,
                                 std::span<const double> x_hat);

/// `chain` holds w_1 .. w_{N+1}; w_{N+1} must be scalar.
MultiStageComponents decompose_multistage(std::span<const StagePtr> stages,
                                          std::span<const Vector> chain);

std::vector<ResidualComponents> decompose_all(std::span<const StageOutputs> outputs);
std::vector<SignedResidualComponents> decompose_signed_all(std::span<const StageOutputs> outputs);

// Column extraction helpers for quantile computations.
std::vector<double> total_residuals(std::span<const ResidualComponents> components);
std::vector<double> delta_r1_values(std::span<const ResidualComponents> components);
std::vector<double> r2_values(std::span<const ResidualComponents> components);

}  // namespace stagecp
