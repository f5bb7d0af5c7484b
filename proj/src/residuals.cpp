#include "stagecp/residuals.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stagecp {

namespace {

// |A - B| with the rounding nudged up so that A + |A - B| >= B survives
// floating point.
double absolute_gap(double a, double b) {
  double gap = std::fabs(a - b);
  while (a + gap < b) gap = std::nextafter(gap, std::numeric_limits<double>::infinity());
  return gap;
}

ResidualComponents components_from(double y, double mu2_x, double mu2_xhat) {
  ResidualComponents out;
  out.r2 = std::fabs(y - mu2_x);
  out.r_total = std::fabs(y - mu2_xhat);
  out.delta_r1 = absolute_gap(out.r2, out.r_total);
  return out;
}

Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector out(a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

ResidualComponents decompose(const StageOutputs& outputs) {
  return components_from(outputs.y, outputs.mu2_x, outputs.mu2_xhat);
}

ResidualComponents decompose(const TwoStagePipeline& pipeline, const TripletPoint& point) {
  return decompose(pipeline.evaluate(point));
}

SignedResidualComponents decompose_signed(const StageOutputs& outputs) {
  return {outputs.y - outputs.mu2_x, outputs.mu2_xhat - outputs.mu2_x};
}

SignedResidualComponents decompose_signed(const TwoStagePipeline& pipeline,
                                          const TripletPoint& point) {
  return decompose_signed(pipeline.evaluate(point));
}

ResidualComponents decompose_aux(const StageModel& mu2_aux, const AuxiliaryPoint& point,
                                 std::span<const double> x_hat) {
  if (x_hat.size() != point.base.x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "x_hat and x differ in dimension");
  }
  const double given_x = mu2_aux.predict(concat(point.base.x, point.x_aux)).front();
  const double given_xhat = mu2_aux.predict(concat(x_hat, point.x_aux)).front();
  return components_from(point.base.y, given_x, given_xhat);
}

MultiStageComponents decompose_multistage(std::span<const StagePtr> stages,
                                          std::span<const Vector> chain) {
  const std::size_t n = stages.size();
  if (n < 2) throw Error(ErrorKind::TooFewStages, "need at least two stages");
  if (chain.size() != n + 1) {
    throw Error(ErrorKind::DimensionMismatch,
                "chain must hold " + std::to_string(n + 1) + " entries");
  }
  if (chain.back().size() != 1) {
    throw Error(ErrorKind::DimensionMismatch, "final target must be scalar");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (stages[i]->input_dim() != chain[i].size() ||
        stages[i]->output_dim() != chain[i + 1].size()) {
      throw Error(ErrorKind::DimensionMismatch,
                  "stage " + std::to_string(i + 1) + " does not match the chain");
    }
  }

  const double target = chain.back().front();
  // err[i] = |target - mu_N(...mu_{i+1}(w_{i+1}))|, 0-based stage i fed its true input.
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector v = chain[i];
    for (std::size_t s = i; s < n; ++s) v = stages[s]->predict(v);
    err[i] = std::fabs(target - v.front());
  }

  MultiStageComponents out;
  out.r_total = err.front();
  out.r_last = err.back();
  out.deltas.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) out.deltas[i] = std::fabs(err[i + 1] - err[i]);

  auto bound = [&] {
    double s = 0.0;
    for (double d : out.deltas) s += d;
    return s + out.r_last;
  };
  while (bound() < out.r_total) {
    out.deltas.front() =
        std::nextafter(out.deltas.front(), std::numeric_limits<double>::infinity());
  }
  return out;
}

std::vector<ResidualComponents> decompose_all(std::span<const StageOutputs> outputs) {
  std::vector<ResidualComponents> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(decompose(o));
  return out;
}

std::vector<SignedResidualComponents> decompose_signed_all(std::span<const StageOutputs> outputs) {
  std::vector<SignedResidualComponents> out;
  out.reserve(outputs.size());
  for (const auto& o : outputs) out.push_back(decompose_signed(o));
  return out;
}

std::vector<double> total_residuals(std::span<const ResidualComponents> components) {
  std::vector<double> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.r_total);
  return out;
}

std::vector<double> delta_r1_values(std::span<const ResidualComponents> components) {
  std::vector<double> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.delta_r1);
  return out;
}

std::vector<double> r2_values(std::span<const ResidualComponents> components) {
  std::vector<double> out;
  out.reserve(components.size());
  for (const auto& c : components) out.push_back(c.r2);
  return out;
}

}  // namespace stagecp
