#include <doctest.h>

#include <cmath>

#include "stagecp/synth_data.hpp"
#include "test_helpers.hpp"

using namespace stagecp;

namespace {

struct Fit {
  double slope, intercept, slope_se, intercept_se;
};

// Simple regression with textbook standard errors.
Fit regress(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx, icpt = my - slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - icpt - slope * x[i];
    sse += r * r;
  }
  const double s2 = sse / (n - 2);
  return {slope, icpt, std::sqrt(s2 / sxx), std::sqrt(s2 * (1 / n + mx * mx / sxx))};
}

}  // namespace

TEST_CASE("scenario names round trip") {
  for (auto k : {ScenarioKind::IID_LINEAR, ScenarioKind::GRADUAL_UP, ScenarioKind::RAPID_UP,
                 ScenarioKind::GRADUAL_DOWN, ScenarioKind::RAPID_DOWN, ScenarioKind::THREE_PHASE,
                 ScenarioKind::COVARIATE_SHIFT, ScenarioKind::AR1_MIXING}) {
    CHECK(parse_scenario(to_string(k)) == k);
  }
  CHECK_FALSE(parse_scenario("NOPE").has_value());
}

TEST_CASE("noiseless IID data satisfies the structural equations exactly") {
  auto spec = default_scenario(ScenarioKind::IID_LINEAR);
  spec.noise_std = 0.0;
  spec.length = 500;
  for (const auto& p : generate(spec)) {
    CHECK(p.x[0] == 3.0 * p.w[0]);
    CHECK(p.y == 4.0 * p.x[0]);
    CHECK(p.y == doctest::Approx(12.0 * p.w[0]));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  for (auto k : {ScenarioKind::IID_LINEAR, ScenarioKind::RAPID_DOWN, ScenarioKind::AR1_MIXING,
                 ScenarioKind::COVARIATE_SHIFT}) {
    auto spec = default_scenario(k);
    spec.seed = Seed{123};
    const auto a = generate(spec);
    const auto b = generate(spec);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].w == b[i].w);
      CHECK(a[i].y == b[i].y);
      CHECK(*a[i].t == static_cast<std::int64_t>(i));
    }
    spec.seed = Seed{124};
    CHECK(generate(spec)[5].y != a[5].y);
  }
}

TEST_CASE("three-phase upstream shift recovers slope 8 and intercept 1") {
  auto spec = default_scenario(ScenarioKind::THREE_PHASE);
  spec.seed = Seed{5};
  const auto pts = generate(spec);
  std::vector<double> w, x, x2, y2;
  for (std::size_t t = 100; t < 500; ++t) {
    w.push_back(pts[t].w[0]);
    x.push_back(pts[t].x[0]);
  }
  const auto f = regress(w, x);
  CHECK(std::fabs(f.slope - 8.0) <= 3 * f.slope_se);
  CHECK(std::fabs(f.intercept - 1.0) <= 3 * f.intercept_se);

  for (std::size_t t = 900; t < 1300; ++t) {
    x2.push_back(pts[t].x[0]);
    y2.push_back(pts[t].y);
  }
  const auto g = regress(x2, y2);
  CHECK(std::fabs(g.slope - 7.0) <= 3 * g.slope_se);
  CHECK(std::fabs(g.intercept - 5.0) <= 3 * g.intercept_se);

  std::vector<double> w0, x0;
  for (std::size_t t = 500; t < 900; ++t) {
    w0.push_back(pts[t].w[0]);
    x0.push_back(pts[t].x[0]);
  }
  const auto r = regress(w0, x0);
  CHECK(std::fabs(r.slope - 3.0) <= 3 * r.slope_se);
}

TEST_CASE("covariate shift moments") {
  auto spec = default_scenario(ScenarioKind::COVARIATE_SHIFT);
  spec.seed = Seed{6};
  const auto pts = generate(spec);
  auto moments = [&](std::size_t a, std::size_t b) {
    double m = 0, v = 0;
    for (std::size_t t = a; t < b; ++t) m += pts[t].w[0];
    m /= static_cast<double>(b - a);
    for (std::size_t t = a; t < b; ++t) v += (pts[t].w[0] - m) * (pts[t].w[0] - m);
    return std::pair{m, v / static_cast<double>(b - a - 1)};
  };
  const auto [m1, v1] = moments(100, 500);
  CHECK(std::fabs(m1 - 3.0) <= 3 * 2.0 / std::sqrt(400.0));
  // sd of the sample variance of a normal: sigma^2 sqrt(2/(n-1))
  CHECK(std::fabs(v1 - 4.0) <= 3 * 4.0 * std::sqrt(2.0 / 399.0));
  const auto [m3, v3] = moments(900, 1300);
  CHECK(std::fabs(m3 + 3.0) <= 3 * 2.0 / std::sqrt(400.0));
  const auto [m0, v0] = moments(0, 100);
  CHECK(std::fabs(m0) <= 3 * 1.0 / std::sqrt(100.0));
  CHECK(std::fabs(v3 - 4.0) <= 3 * 4.0 * std::sqrt(2.0 / 399.0));
  CHECK(v0 < 2.0);
}

TEST_CASE("AR(1) innovations are bounded and the series is stationary") {
  Rng rng = make_rng(Seed{8});
  std::vector<double> innov;
  const auto series = ar1_series(20000, 0.8, 0.5, rng, &innov);
  for (double e : innov) CHECK(std::fabs(e) <= 0.5);
  for (std::size_t i = 1; i < series.size(); ++i) {
    CHECK(series[i] == doctest::Approx(0.8 * series[i - 1] + innov[i]).epsilon(1e-12));
  }
  // Stationary variance: (1/12) / (1 - 0.64)
  double m = 0, v = 0;
  for (double s : series) m += s;
  m /= series.size();
  for (double s : series) v += (s - m) * (s - m);
  v /= series.size() - 1;
  CHECK(v == doctest::Approx((1.0 / 12.0) / 0.36).epsilon(0.1));

  auto spec = default_scenario(ScenarioKind::AR1_MIXING);
  for (const auto& p : generate(spec)) {
    CHECK(std::fabs(p.x[0] - 3.0 * p.w[0]) <= 0.5);
  }
}

TEST_CASE("noise grows faster for rapid shifts") {
  CHECK(default_rate(ScenarioKind::RAPID_UP) > default_rate(ScenarioKind::GRADUAL_UP));
  CHECK(default_rate(ScenarioKind::RAPID_DOWN) > default_rate(ScenarioKind::GRADUAL_DOWN));
  CHECK(default_rate(ScenarioKind::IID_LINEAR) == 0.0);

  auto spec = default_scenario(ScenarioKind::GRADUAL_UP);
  spec.length = 20000;
  spec.shift_start = 10000;
  spec.rate = 0.0002;
  const auto pts = generate(spec);
  auto upstream_sd = [&](std::size_t a, std::size_t b) {
    double v = 0;
    for (std::size_t t = a; t < b; ++t) {
      const double e = pts[t].x[0] - 3.0 * pts[t].w[0];
      v += e * e;
    }
    return std::sqrt(v / static_cast<double>(b - a));
  };
  CHECK(upstream_sd(0, 10000) == doctest::Approx(0.1).epsilon(0.05));
  // Over the last 1000 points the multiplier is about 1 + 0.0002 * 9500 = 2.9.
  CHECK(upstream_sd(19000, 20000) == doctest::Approx(0.1 * 2.9).epsilon(0.08));
  // Downstream noise is untouched.
  double v = 0;
  for (std::size_t t = 19000; t < 20000; ++t) {
    const double e = pts[t].y - 4.0 * pts[t].x[0];
    v += e * e;
  }
  CHECK(std::sqrt(v / 1000) == doctest::Approx(0.1).epsilon(0.1));
}

TEST_CASE("invalid specs are rejected") {
  ScenarioSpec s;
  s.length = 0;
  CHECK_THROWS_KIND(generate(s), ErrorKind::InvalidSpec);
  s = default_scenario(ScenarioKind::GRADUAL_UP);
  s.shift_start = s.length + 1;
  CHECK_THROWS_KIND(generate(s), ErrorKind::InvalidSpec);
  s = default_scenario(ScenarioKind::AR1_MIXING);
  s.ar_coef = 1.0;
  CHECK_THROWS_KIND(generate(s), ErrorKind::InvalidSpec);
  s = default_scenario(ScenarioKind::IID_LINEAR);
  s.noise_std = -1;
  CHECK_THROWS_KIND(generate(s), ErrorKind::InvalidSpec);
}
