#include "stagecp/core_types.hpp"

#include <cmath>
#include <string>

namespace stagecp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TooFewStages: return "TooFewStages";
    case ErrorKind::EmptyScores: return "EmptyScores";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::AllZeroWeights: return "AllZeroWeights";
    case ErrorKind::EmptyCalibration: return "EmptyCalibration";
    case ErrorKind::InvalidLevel: return "InvalidLevel";
    case ErrorKind::InvalidMixingCoefficients: return "InvalidMixingCoefficients";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Rng make_rng(Seed seed) { return Rng(seed.value); }

Seed derive_seed(Seed base, std::uint64_t stream) {
  // splitmix64 over (base, stream)
  std::uint64_t z = base.value + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return Seed{z ^ (z >> 31)};
}

void validate_points(std::span<const TripletPoint> points) {
  if (points.empty()) return;
  const auto w_dim = points.front().w.size();
  const auto x_dim = points.front().x.size();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    if (p.w.size() != w_dim || p.x.size() != x_dim) {
      throw Error(ErrorKind::DimensionMismatch,
                  "point " + std::to_string(i) + " has inconsistent w/x dimensions");
    }
    bool finite = std::isfinite(p.y);
    for (double v : p.w) finite = finite && std::isfinite(v);
    for (double v : p.x) finite = finite && std::isfinite(v);
    if (!finite) {
      throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(i) + " is not finite");
    }
  }
}

SplitDataset split_dataset(std::span<const TripletPoint> points, std::size_t n_train,
                           std::size_t n_conf, std::size_t n_cal) {
  if (n_train + n_conf + n_cal > points.size()) {
    throw Error(ErrorKind::InsufficientData,
                "requested " + std::to_string(n_train + n_conf + n_cal) + " points but only " +
                    std::to_string(points.size()) + " available");
  }
  SplitDataset out;
  out.train.assign(points.begin(), points.begin() + n_train);
  out.conf.assign(points.begin() + n_train, points.begin() + n_train + n_conf);
  out.cal.assign(points.begin() + n_train + n_conf, points.begin() + n_train + n_conf + n_cal);
  return out;
}

std::size_t window_conf_size(std::size_t k, double conf_ratio) {
  if (!(conf_ratio > 0.0 && conf_ratio < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "conf_ratio must lie in (0, 1)");
  }
  return static_cast<std::size_t>(std::floor(static_cast<double>(k) * conf_ratio));
}

SplitDataset sliding_window(std::span<const TripletPoint> points, std::size_t t, std::size_t k,
                            double conf_ratio) {
  const auto split = window_split(points, t, k, conf_ratio);
  SplitDataset out;
  out.conf.assign(split.conf.begin(), split.conf.end());
  out.cal.assign(split.cal.begin(), split.cal.end());
  return out;
}

}  // namespace stagecp
