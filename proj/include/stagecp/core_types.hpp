#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "stagecp/error.hpp"

namespace stagecp {

using Vector = std::vector<double>;

/// One observation of a two-stage system: upstream input w, intermediate x,
/// target y, plus an optional integer time index.
struct TripletPoint {
  Vector w;
  Vector x;
  double y = 0.0;
  std::optional<std::int64_t> t;
};

/// A triplet with second-stage auxiliary features x'.
struct AuxiliaryPoint {
  TripletPoint base;
  Vector x_aux;
};

struct SplitDataset {
  std::vector<TripletPoint> train;
  std::vector<TripletPoint> conf;
  std::vector<TripletPoint> cal;
};

/// The three numbers every conformal construction needs for one point:
/// the target, the downstream prediction from the true intermediate, and the
/// end-to-end prediction. This is also the PRECOMPUTED CSV row.
struct StageOutputs {
  std::int64_t t = 0;
  double y = 0.0;
  double mu2_x = 0.0;     // mu2(x)
  double mu2_xhat = 0.0;  // mu2(mu1(w))
};

struct Seed {
  std::uint64_t value = 0;
};

using Rng = std::mt19937_64;

Rng make_rng(Seed seed);

/// Independent child seed for stream `stream` (repetition, scenario, ...).
Seed derive_seed(Seed base, std::uint64_t stream);

/// Throws DimensionMismatch when w/x sizes vary and InvalidArgument on
/// non-finite values.
void validate_points(std::span<const TripletPoint> points);

/// Contiguous time-ordered split into train/conf/cal.
SplitDataset split_dataset(std::span<const TripletPoint> points, std::size_t n_train,
                           std::size_t n_conf, std::size_t n_cal);

template <class T>
struct WindowSplit {
  std::span<const T> conf;
  std::span<const T> cal;
};

/// Number of conf points in a window of length k.
std::size_t window_conf_size(std::size_t k, double conf_ratio);

/// The k points at [t-k, t-1] split into conf (older) and cal (newer).
template <class T>
WindowSplit<T> window_split(std::span<const T> points, std::size_t t, std::size_t k,
                            double conf_ratio = 0.5) {
  if (t < k) {
    throw Error(ErrorKind::WindowTooShort,
                "t=" + std::to_string(t) + " is shorter than window k=" + std::to_string(k));
  }
  if (t > points.size()) {
    throw Error(ErrorKind::InsufficientData, "t exceeds the number of points");
  }
  const std::size_t n_conf = window_conf_size(k, conf_ratio);
  const auto window = points.subspan(t - k, k);
  return {window.first(n_conf), window.subspan(n_conf)};
}

SplitDataset sliding_window(std::span<const TripletPoint> points, std::size_t t, std::size_t k,
                            double conf_ratio = 0.5);

}  // namespace stagecp
