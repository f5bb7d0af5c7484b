#include "stagecp/synth_data.hpp"

#include <cmath>
#include <random>
#include <string>

namespace stagecp {

namespace {

constexpr ScenarioKind kAllKinds[] = {
    ScenarioKind::IID_LINEAR,  ScenarioKind::GRADUAL_UP,      ScenarioKind::RAPID_UP,
    ScenarioKind::GRADUAL_DOWN, ScenarioKind::RAPID_DOWN,     ScenarioKind::THREE_PHASE,
    ScenarioKind::COVARIATE_SHIFT, ScenarioKind::AR1_MIXING,
};

void validate(const ScenarioSpec& s) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::InvalidSpec, msg); };
  if (s.length == 0) fail("length must be positive");
  if (!(s.w_std >= 0.0) || !(s.noise_std >= 0.0)) fail("scales must be non-negative");
  if (!(s.rate >= 0.0)) fail("rate must be non-negative");
  if (!(s.ar_noise >= 0.0)) fail("ar_noise must be non-negative");
  if (!(std::fabs(s.ar_coef) < 1.0)) fail("ar_coef must lie in (-1, 1)");
  const bool scheduled = s.kind != ScenarioKind::IID_LINEAR && s.kind != ScenarioKind::AR1_MIXING;
  if (scheduled && s.shift_start > s.length) {
    fail("shift_start " + std::to_string(s.shift_start) + " lies beyond length " +
         std::to_string(s.length));
  }
  if ((s.kind == ScenarioKind::THREE_PHASE || s.kind == ScenarioKind::COVARIATE_SHIFT) &&
      s.phase_length == 0) {
    fail("phase_length must be positive");
  }
}

// 0 before the first boundary, then 1, 2, 3.
int phase_of(const ScenarioSpec& s, std::size_t t) {
  if (t < s.shift_start) return 0;
  const std::size_t since = t - s.shift_start;
  if (since < s.phase_length) return 1;
  if (since < 2 * s.phase_length) return 2;
  return 3;
}

double growth(const ScenarioSpec& s, std::size_t t) {
  if (t < s.shift_start) return 1.0;
  return 1.0 + s.rate * static_cast<double>(t - s.shift_start);
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::IID_LINEAR: return "IID_LINEAR";
    case ScenarioKind::GRADUAL_UP: return "GRADUAL_UP";
    case ScenarioKind::RAPID_UP: return "RAPID_UP";
    case ScenarioKind::GRADUAL_DOWN: return "GRADUAL_DOWN";
    case ScenarioKind::RAPID_DOWN: return "RAPID_DOWN";
    case ScenarioKind::THREE_PHASE: return "THREE_PHASE";
    case ScenarioKind::COVARIATE_SHIFT: return "COVARIATE_SHIFT";
    case ScenarioKind::AR1_MIXING: return "AR1_MIXING";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario(std::string_view name) {
  for (auto k : kAllKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

double default_rate(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::GRADUAL_UP:
    case ScenarioKind::GRADUAL_DOWN: return 0.005;
    case ScenarioKind::RAPID_UP:
    case ScenarioKind::RAPID_DOWN: return 0.05;
    default: return 0.0;
  }
}

ScenarioSpec default_scenario(ScenarioKind kind) {
  ScenarioSpec s;
  s.kind = kind;
  s.rate = default_rate(kind);
  if (kind == ScenarioKind::THREE_PHASE || kind == ScenarioKind::COVARIATE_SHIFT) {
    s.w_std = 1.0;
    s.noise_std = 1.0;
    s.shift_start = 100;
    s.length = 1300;
  }
  return s;
}

std::vector<double> ar1_series(std::size_t n, double coef, double half_width, Rng& rng,
                               std::vector<double>* innovations) {
  std::uniform_real_distribution<double> unif(-half_width, half_width);
  std::vector<double> out(n);
  if (innovations) innovations->resize(n);
  // Burn-in so the series starts near stationarity.
  double v = 0.0;
  for (int i = 0; i < 200; ++i) v = coef * v + unif(rng);
  for (std::size_t i = 0; i < n; ++i) {
    const double e = unif(rng);
    v = coef * v + e;
    out[i] = v;
    if (innovations) (*innovations)[i] = e;
  }
  return out;
}

std::vector<TripletPoint> generate(const ScenarioSpec& spec) {
  validate(spec);
  Rng rng = make_rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(-spec.ar_noise, spec.ar_noise);

  std::vector<double> ar_w;
  if (spec.kind == ScenarioKind::AR1_MIXING) {
    ar_w = ar1_series(spec.length, spec.ar_coef, spec.ar_noise, rng);
  }

  std::vector<TripletPoint> out;
  out.reserve(spec.length);
  for (std::size_t t = 0; t < spec.length; ++t) {
    double w = 0.0;
    double nu1 = 0.0;
    double nu2 = 0.0;
    double up_slope = 3.0, up_icpt = 0.0, down_slope = 4.0, down_icpt = 0.0;

    switch (spec.kind) {
      case ScenarioKind::AR1_MIXING:
        w = ar_w[t];
        nu1 = unif(rng);
        nu2 = unif(rng);
        break;
      case ScenarioKind::COVARIATE_SHIFT: {
        static constexpr double kMean[] = {0.0, 3.0, 0.0, -3.0};
        static constexpr double kStd[] = {1.0, 2.0, 1.0, 2.0};
        const int ph = phase_of(spec, t);
        w = kMean[ph] + kStd[ph] * spec.w_std * normal(rng);
        nu1 = spec.noise_std * normal(rng);
        nu2 = spec.noise_std * normal(rng);
        break;
      }
      default: {
        w = spec.w_std * normal(rng);
        const double z1 = normal(rng);
        const double z2 = normal(rng);
        double s1 = spec.noise_std, s2 = spec.noise_std;
        if (spec.kind == ScenarioKind::GRADUAL_UP || spec.kind == ScenarioKind::RAPID_UP) {
          s1 *= growth(spec, t);
        } else if (spec.kind == ScenarioKind::GRADUAL_DOWN ||
                   spec.kind == ScenarioKind::RAPID_DOWN) {
          s2 *= growth(spec, t);
        } else if (spec.kind == ScenarioKind::THREE_PHASE) {
          const int ph = phase_of(spec, t);
          if (ph == 1) {
            up_slope = 8.0;
            up_icpt = 1.0;
          } else if (ph == 3) {
            down_slope = 7.0;
            down_icpt = 5.0;
          }
        }
        nu1 = s1 * z1;
        nu2 = s2 * z2;
        break;
      }
    }

    TripletPoint p;
    const double x = up_slope * w + up_icpt + nu1;
    p.w = {w};
    p.x = {x};
    p.y = down_slope * x + down_icpt + nu2;
    p.t = static_cast<std::int64_t>(t);
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace stagecp
