#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "stagecp/core_types.hpp"

namespace stagecp {

enum class ScenarioKind {
  IID_LINEAR,
  GRADUAL_UP,
  RAPID_UP,
  GRADUAL_DOWN,
  RAPID_DOWN,
  THREE_PHASE,
  COVARIATE_SHIFT,
  AR1_MIXING,
};

std::string_view to_string(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario(std::string_view name);

/// Base system: x = 3w + nu1, y = 4x + nu2.
///
/// GRADUAL_* / RAPID_*: from shift_start the noise std of nu1 (UP) or nu2
/// (DOWN) grows as noise_std * (1 + rate * (t - shift_start)).
/// THREE_PHASE: upstream becomes x = 8w + 1 + nu1 on
/// [shift_start, shift_start + phase_length), reverts, then from
/// shift_start + 2 * phase_length downstream becomes y = 7x + 5 + nu2.
/// COVARIATE_SHIFT: w ~ N(0,1), N(3,2), N(0,1), N(-3,2) over the same three
/// boundaries (second argument is a standard deviation).
/// AR1_MIXING: w_t = ar_coef * w_{t-1} + U(-ar_noise, ar_noise); nu1, nu2 are
/// U(-ar_noise, ar_noise).
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::IID_LINEAR;
  std::size_t length = 3000;
  double w_std = 0.1;
  double noise_std = 0.1;
  std::size_t shift_start = 1000;
  double rate = 0.0;
  std::size_t phase_length = 400;
  double ar_coef = 0.8;
  double ar_noise = 0.5;
  Seed seed{};
};

/// Scenario with the documented defaults for `kind`: N(0, 0.1) scales for the
/// Table-1 style scenarios, N(0, 1) for the three-phase and covariate ones,
/// rate 0.005 for gradual and 0.05 for rapid shifts.
ScenarioSpec default_scenario(ScenarioKind kind);

double default_rate(ScenarioKind kind);

/// Deterministic in spec.seed. Points carry t = 0..length-1.
/// Throws InvalidSpec for empty length, schedules outside the series,
/// negative scales or a non-stationary AR coefficient.
std::vector<TripletPoint> generate(const ScenarioSpec& spec);

/// Stationary AR(1) with uniform innovations on [-half_width, half_width].
/// Writes the innovations to `innovations` when given.
std::vector<double> ar1_series(std::size_t n, double coef, double half_width, Rng& rng,
                               std::vector<double>* innovations = nullptr);

}  // namespace stagecp
