#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "stagecp/intervals.hpp"
#include "stagecp/quantiles.hpp"
#include "test_helpers.hpp"

using namespace stagecp;

namespace {

// k-th smallest (1-based) with k = ceil((m+1)(1-level)); +inf past the end.
double upper_oracle(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  const double k = std::ceil((static_cast<double>(v.size()) + 1.0) * (1.0 - level) - 1e-9);
  if (k > static_cast<double>(v.size())) return kInf;
  if (k <= 0) return -kInf;
  return v[static_cast<std::size_t>(k) - 1];
}

double lower_oracle(std::vector<double> v, double level) {
  for (auto& x : v) x = -x;
  return -upper_oracle(v, level);
}

ComponentScores scores_of(std::vector<double> dr1, std::vector<double> r2) {
  ComponentScores s;
  for (std::size_t i = 0; i < dr1.size(); ++i) s.total.push_back(dr1[i] + r2[i]);
  s.delta_r1 = std::move(dr1);
  s.r2 = std::move(r2);
  return s;
}

StagePtr linear(double slope, double intercept) {
  Eigen::MatrixXd w(1, 1);
  w(0, 0) = slope;
  Eigen::VectorXd b(1);
  b(0) = intercept;
  return std::make_shared<LinearStage>(w, b);
}

}  // namespace

TEST_CASE("split conformal interval") {
  std::vector<double> zeros(20, 0.0);
  const auto z = interval_split_conformal(zeros, 0.1, 3.0);
  CHECK(z.kind == IntervalKind::Finite);
  CHECK(z.width() == 0.0);
  CHECK(z.lo == 3.0);

  const std::vector<double> s{1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto iv = interval_split_conformal(s, 0.1, 0.0);
  CHECK(iv.half_width == 9.0);
  CHECK(iv.lo == -9.0);
  CHECK(iv.hi == 9.0);

  const auto a = interval_split_conformal(std::vector<double>{1, 2, 3, 4}, 0.1, 0.0);
  CHECK(a.is_abstained());
  CHECK(std::isinf(a.half_width));
  CHECK_THROWS_KIND(interval_split_conformal(std::vector<double>{}, 0.1, 0.0),
                    ErrorKind::EmptyScores);
}

TEST_CASE("separate interval sums component quantiles") {
  const auto s = scores_of({1, 2, 3}, {2, 4, 6});
  const auto iv = interval_separate(s, 0.25, 0.25, 10.0);
  CHECK(iv.half_width == 9.0);
  CHECK(iv.lo == 1.0);
  CHECK(iv.hi == 19.0);

  const auto zero_up = scores_of({0, 0, 0, 0, 0, 0, 0, 0, 0}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK(interval_separate(zero_up, 0.1, 0.1, 0.0).half_width == 9.0);
}

TEST_CASE("unified interval reductions") {
  const auto s = scores_of({1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, {2, 2, 3, 3, 4, 4, 5, 5, 6, 6});
  const auto sep = interval_separate(s, 0.2, 0.3, 1.0);
  const auto uni = interval_unified(s, {1.0, 1.0, 0.2, 0.3, 0.1}, 1.0);
  CHECK(uni.lo == sep.lo);
  CHECK(uni.hi == sep.hi);
  CHECK(uni.half_width == sep.half_width);

  const auto only_r2 = interval_unified(s, {0.0, 1.0, 0.2, 0.3, 0.1}, 0.0);
  CHECK(only_r2.half_width == conformal_quantile(s.r2, 0.3));
  const auto point = interval_unified(s, {0.0, 0.0, 0.2, 0.3, 0.1}, 4.0);
  CHECK(point.width() == 0.0);
  CHECK(point.lo == 4.0);

  // A masked coefficient hides an infinite quantile.
  const auto tiny = scores_of({1, 2}, {1, 2});
  CHECK(interval_unified(tiny, {0.0, 1.0, 0.01, 0.5, 0.1}, 0.0).kind == IntervalKind::Finite);
  CHECK(interval_unified(tiny, {0.5, 1.0, 0.01, 0.5, 0.1}, 0.0).is_abstained());
}

TEST_CASE("unified width is monotone in a, b, c, d") {
  std::mt19937_64 rng(8);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> dr1(60), r2(60);
  for (auto& v : dr1) v = e(rng);
  for (auto& v : r2) v = e(rng);
  const auto s = scores_of(dr1, r2);
  auto hw = [&](double a, double b, double c, double d) {
    return interval_unified(s, {a, b, c, d, 0.1}, 0.0).half_width;
  };
  for (double x = 0.0; x < 1.0; x += 0.1) {
    CHECK(hw(x, 0.5, 0.1, 0.1) <= hw(x + 0.1, 0.5, 0.1, 0.1));
    CHECK(hw(0.5, x, 0.1, 0.1) <= hw(0.5, x + 0.1, 0.1, 0.1));
  }
  for (double l = 0.02; l < 0.5; l += 0.02) {
    CHECK(hw(1, 1, l, 0.1) >= hw(1, 1, l + 0.02, 0.1));
    CHECK(hw(1, 1, 0.1, l) >= hw(1, 1, 0.1, l + 0.02));
  }
}

TEST_CASE("signed interval against a two-tail oracle") {
  // r2_signed = y - mu2(x); delta_r1_signed = mu2(xhat) - mu2(x).
  const std::vector<double> r2s{-2, -1, 1, 2, 3, -4, 0.5, 5, -3};
  const std::vector<double> d1s{0.3, -0.2, 1.1, -1.5, 0.0, 0.7, -0.9, 2.0, -0.4};
  std::vector<SignedResidualComponents> conf;
  for (std::size_t i = 0; i < r2s.size(); ++i) conf.push_back({r2s[i], d1s[i]});
  const ScalingConfig cfg{0.5, 1.0, 0.2, 0.2, 0.1};
  const auto iv = interval_signed(conf, cfg, 100.0);

  std::vector<double> up;
  for (double d : d1s) up.push_back(-d);
  const double lo = 100.0 + 0.5 * lower_oracle(up, 0.1) + lower_oracle(r2s, 0.1);
  const double hi = 100.0 + 0.5 * upper_oracle(up, 0.1) + upper_oracle(r2s, 0.1);
  REQUIRE(iv.kind == IntervalKind::Finite);
  CHECK(iv.lo == lo);
  CHECK(iv.hi == hi);

  const auto point = interval_signed(conf, {0.0, 0.0, 0.2, 0.2, 0.1}, 7.0);
  CHECK(point.lo == 7.0);
  CHECK(point.hi == 7.0);

  const std::vector<SignedResidualComponents> sym{{-3, 0}, {-2, 0}, {-1, 0}, {1, 0}, {2, 0},
                                                  {3, 0},  {-4, 0}, {4, 0}, {0, 0}};
  const auto s = interval_signed(sym, {1.0, 1.0, 0.2, 0.2, 0.1}, 0.0);
  CHECK(s.lo == -s.hi);

  const std::vector<SignedResidualComponents> few{{1, 0}, {-1, 0}};
  CHECK(interval_signed(few, cfg, 0.0).is_abstained());
}

TEST_CASE("signed interval covers exactly the shifted end-to-end error") {
  // With a=b=1 and no upstream error the interval is the two-tail interval of y - mu2(xhat).
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<SignedResidualComponents> conf;
  std::vector<double> err;
  for (int i = 0; i < 99; ++i) {
    const double e = n(rng);
    conf.push_back({e, 0.0});
    err.push_back(e);
  }
  const auto iv = interval_signed(conf, {1.0, 1.0, 0.1, 0.1, 0.1}, 0.0);
  CHECK(iv.lo == lower_oracle(err, 0.05) + 0.0);
  CHECK(iv.hi == upper_oracle(err, 0.05) + 0.0);
}

TEST_CASE("covers and abstention policies") {
  const auto iv = PredictionInterval::asymmetric(1.0, 0.0, 2.0);
  CHECK(covers(iv, 1.0));
  CHECK(covers(iv, 0.0));
  CHECK(covers(iv, 2.0));
  CHECK_FALSE(covers(iv, 3.0));
  const auto na = PredictionInterval::abstained(0.0);
  CHECK(covers(na, 1e300, AbstentionPolicy::Algorithmic));
  CHECK_FALSE(covers(na, 0.0, AbstentionPolicy::Reporting));
  const auto none = PredictionInterval::empty(0.0);
  CHECK_FALSE(covers(none, 0.0, AbstentionPolicy::Algorithmic));
  CHECK(none.width() == 0.0);
  CHECK(std::isinf(na.width()));
  const auto sym = PredictionInterval::symmetric(2.0, 1.5);
  CHECK(sym.hi - sym.lo == 2 * sym.half_width);
}

TEST_CASE("pipeline-level constructions agree with score-level ones") {
  const TwoStagePipeline p(linear(3, 0), linear(4, 0));
  std::vector<TripletPoint> conf;
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 40; ++i) {
    const double w = n(rng), x = 3 * w + 0.1 * n(rng);
    conf.push_back(testing::point(w, x, 4 * x + 0.1 * n(rng)));
  }
  const std::vector<double> w_test{0.5};
  const auto scores = component_scores(evaluate_all(p, conf));
  const double center = 6.0;
  CHECK(interval_separate(p, conf, 0.1, 0.1, w_test).hi ==
        interval_separate(scores, 0.1, 0.1, center).hi);
  CHECK(interval_split_conformal(p, conf, 0.1, w_test).hi ==
        interval_split_conformal(scores.total, 0.1, center).hi);
  const ScalingConfig cfg{0.3, 0.8, 0.1, 0.1, 0.1};
  CHECK(interval_unified(p, conf, cfg, w_test).lo == interval_unified(scores, cfg, center).lo);
  CHECK(interval_signed(p, conf, cfg, w_test).kind == IntervalKind::Finite);
}

TEST_CASE("separate interval coverage on IID data") {
  // Each component threshold controls its own tail, so the sum covers at 1-c-d.
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 1.0);
  auto draw = [&] {
    const double w = n(rng) * 0.1;
    const double x = 3 * w + 0.1 * n(rng);
    const double y = 4 * x + 0.1 * n(rng);
    const double xhat = 3 * w;
    return StageOutputs{0, y, 4 * x, 4 * xhat};
  };
  std::vector<StageOutputs> conf(500);
  for (auto& o : conf) o = draw();
  const auto scores = component_scores(conf);
  const int trials = 2000;
  int hits_sep = 0, hits_cor = 0;
  for (int i = 0; i < trials; ++i) {
    const auto o = draw();
    if (covers(interval_separate(scores, 0.05, 0.05, o.mu2_xhat), o.y)) ++hits_sep;
    if (covers(interval_unified(scores, {1, 1, 0.1, 0.1, 0.1}, o.mu2_xhat), o.y)) ++hits_cor;
  }
  const double se = std::sqrt(0.9 * 0.1 / trials);
  CHECK(static_cast<double>(hits_sep) / trials >= 0.9 - 3 * se);
  const double se2 = std::sqrt(0.8 * 0.2 / trials);
  CHECK(static_cast<double>(hits_cor) / trials >= 0.8 - 3 * se2);
}
