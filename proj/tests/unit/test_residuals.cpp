#include <doctest.h>

#include <cmath>
#include <random>

#include "stagecp/residuals.hpp"
#include "test_helpers.hpp"

using namespace stagecp;

namespace {

StagePtr linear(double slope, double intercept) {
  Eigen::MatrixXd w(1, 1);
  w(0, 0) = slope;
  Eigen::VectorXd b(1);
  b(0) = intercept;
  return std::make_shared<LinearStage>(w, b);
}

StagePtr random_linear(std::mt19937_64& rng, std::size_t in, std::size_t out) {
  std::normal_distribution<double> n(0.0, 2.0);
  Eigen::MatrixXd w(out, in);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = n(rng);
  Eigen::VectorXd b(out);
  for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = n(rng);
  return std::make_shared<LinearStage>(w, b);
}

}  // namespace

TEST_CASE("decompose worked example") {
  const auto c = decompose(StageOutputs{0, 10.0, 9.0, 7.0});
  CHECK(c.r_total == 3.0);
  CHECK(c.r2 == 1.0);
  CHECK(c.delta_r1 == 2.0);
  CHECK(c.r_total <= c.delta_r1 + c.r2);
}

TEST_CASE("decompose degenerate cases") {
  const auto same = decompose(StageOutputs{0, 4.0, 1.5, 1.5});
  CHECK(same.delta_r1 == 0.0);
  CHECK(same.r2 == same.r_total);
  const auto zero = decompose(StageOutputs{0, 2.0, 2.0, 2.0});
  CHECK(zero.r_total == 0.0);
  CHECK(zero.delta_r1 == 0.0);
  CHECK(zero.r2 == 0.0);
}

TEST_CASE("decompose through a pipeline") {
  const TwoStagePipeline p(linear(3, 0), linear(4, 0));
  // x_hat = 3, mu2(x_hat) = 12; mu2(x) = 10
  const auto c = decompose(p, testing::point(1.0, 2.5, 11.0));
  CHECK(c.r_total == 1.0);
  CHECK(c.r2 == 1.0);
  CHECK(c.delta_r1 == 0.0);
}

TEST_CASE("decompose_signed worked example and identity") {
  const auto s = decompose_signed(StageOutputs{0, 10.0, 9.0, 7.0});
  CHECK(s.r2_signed == 1.0);
  CHECK(s.delta_r1_signed == -2.0);
  CHECK(s.r2_signed - s.delta_r1_signed == 3.0);

  const auto perfect = decompose_signed(StageOutputs{0, 5.0, 5.0, 5.0});
  CHECK(perfect.r2_signed == 0.0);
  CHECK(perfect.delta_r1_signed == 0.0);

  const TwoStagePipeline constant(linear(3, 0), linear(0, 7));
  CHECK(decompose_signed(constant, testing::point(1.0, 9.0, 2.0)).delta_r1_signed == 0.0);
}

TEST_CASE("decompose_aux") {
  // mu2(x, x') = x + x'
  const FunctionStage mu2(2, 1, [](std::span<const double> v) { return Vector{v[0] + v[1]}; });
  AuxiliaryPoint p{testing::point(0.0, 3.0, 5.0), {1.0}};
  const auto c = decompose_aux(mu2, p, std::vector<double>{0.0});
  CHECK(c.r_total == 4.0);
  CHECK(c.r2 == 1.0);
  CHECK(c.delta_r1 == 3.0);

  const auto exact = decompose_aux(mu2, p, std::vector<double>{3.0});
  CHECK(exact.delta_r1 == 0.0);

  // x' ignored: same as the plain decomposition.
  const FunctionStage ignore(2, 1, [](std::span<const double> v) { return Vector{4.0 * v[0]}; });
  const TwoStagePipeline pipe(linear(3, 0), linear(4, 0));
  AuxiliaryPoint q{testing::point(1.0, 2.5, 11.0), {42.0}};
  const auto a = decompose_aux(ignore, q, std::vector<double>{3.0});
  const auto b = decompose(pipe, q.base);
  CHECK(a.r_total == b.r_total);
  CHECK(a.delta_r1 == b.delta_r1);
  CHECK(a.r2 == b.r2);
  CHECK_THROWS_KIND(decompose_aux(mu2, p, std::vector<double>{1.0, 2.0}),
                    ErrorKind::DimensionMismatch);
}

TEST_CASE("decompose_multistage against nested brute force") {
  // w1 -> w2 = 2 w1 + 1 -> w3 = -w2 + 4 -> w4 = 3 w3
  const std::vector<StagePtr> stages{linear(2, 1), linear(-1, 4), linear(3, 0)};
  const std::vector<Vector> chain{{1.0}, {2.5}, {0.0}, {1.0}};
  const auto m = decompose_multistage(stages, chain);
  const double target = 1.0;
  const double e1 = std::fabs(target - 3.0 * (-(2.0 * 1.0 + 1.0) + 4.0));  // from w1
  const double e2 = std::fabs(target - 3.0 * (-2.5 + 4.0));                // from w2
  const double e3 = std::fabs(target - 3.0 * 0.0);                         // from w3
  REQUIRE(m.deltas.size() == 2);
  CHECK(m.r_total == e1);
  CHECK(m.r_last == e3);
  CHECK(m.deltas[0] == std::fabs(e2 - e1));
  CHECK(m.deltas[1] == std::fabs(e3 - e2));
  CHECK(m.r_total <= m.deltas[0] + m.deltas[1] + m.r_last);
}

TEST_CASE("decompose_multistage identity chain and errors") {
  const std::vector<StagePtr> ids{linear(1, 0), linear(1, 0), linear(1, 0)};
  const std::vector<Vector> chain{{2.0}, {2.0}, {2.0}, {2.0}};
  const auto m = decompose_multistage(ids, chain);
  CHECK(m.r_total == 0.0);
  CHECK(m.r_last == 0.0);
  for (double d : m.deltas) CHECK(d == 0.0);

  const std::vector<StagePtr> one{linear(1, 0)};
  const std::vector<Vector> short_chain{{1.0}, {1.0}};
  CHECK_THROWS_KIND(decompose_multistage(one, short_chain), ErrorKind::TooFewStages);
  const std::vector<Vector> bad_chain{{1.0}, {1.0}};
  CHECK_THROWS_KIND(decompose_multistage(std::span(ids).first(2), bad_chain),
                    ErrorKind::DimensionMismatch);
}

TEST_CASE("triangle bound and majority component over random instances") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> dim(1, 4);
  std::size_t violations = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const std::size_t dw = dim(rng), dx = dim(rng);
    const TwoStagePipeline p(random_linear(rng, dw, dx), random_linear(rng, dx, 1));
    TripletPoint pt;
    for (std::size_t i = 0; i < dw; ++i) pt.w.push_back(n(rng) * 10.0);
    for (std::size_t i = 0; i < dx; ++i) pt.x.push_back(n(rng) * 10.0);
    pt.y = n(rng) * 50.0;
    const auto c = decompose(p, pt);
    if (!(c.r_total <= c.delta_r1 + c.r2)) ++violations;
    CHECK(c.delta_r1 >= 0.0);
    CHECK(c.r2 >= 0.0);
    CHECK(std::max(c.delta_r1, c.r2) >= c.r_total / 2.0);
  }
  CHECK(violations == 0);
}

TEST_CASE("small downstream error pins delta_r1 to the total") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 1.0);
  int tested = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const StageOutputs o{0, n(rng), n(rng), n(rng) * 3.0};
    const auto c = decompose(o);
    const double eps = std::fabs(n(rng));
    if (!(c.r2 <= eps && eps < c.r_total)) continue;
    ++tested;
    CHECK(std::fabs(c.delta_r1 - c.r_total) <= eps);
  }
  CHECK(tested > 100);
}

TEST_CASE("Lipschitz downstream bounds the gap between r2 and the total") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const double slope = n(rng) * 3.0;
    const TwoStagePipeline p(random_linear(rng, 1, 1), linear(slope, n(rng)));
    const auto pt = testing::point(n(rng), n(rng), n(rng) * 5.0);
    const double gap = std::fabs(pt.x[0] - predict_pipeline(p, pt.w).x_hat[0]);
    const auto c = decompose(p, pt);
    CHECK(std::fabs(c.r2 - c.r_total) <= std::fabs(slope) * gap * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("signed identity over random instances") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    const StageOutputs o{0, n(rng) * 10, n(rng) * 10, n(rng) * 10};
    const auto s = decompose_signed(o);
    const double full = o.y - o.mu2_xhat;
    CHECK(std::fabs((s.r2_signed - s.delta_r1_signed) - full) <=
          4 * std::numeric_limits<double>::epsilon() * (std::fabs(o.y) + std::fabs(o.mu2_x) +
                                                        std::fabs(o.mu2_xhat)));
  }
}

TEST_CASE("two-stage multistage equals decompose exactly") {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto up = random_linear(rng, 2, 3);
    const auto down = random_linear(rng, 3, 1);
    const TwoStagePipeline p(up, down);
    TripletPoint pt{{n(rng), n(rng)}, {n(rng), n(rng), n(rng)}, n(rng) * 4, 0};
    const auto a = decompose(p, pt);
    const std::vector<StagePtr> stages{up, down};
    const std::vector<Vector> chain{pt.w, pt.x, {pt.y}};
    const auto b = decompose_multistage(stages, chain);
    CHECK(a.r_total == b.r_total);
    CHECK(a.r2 == b.r_last);
    CHECK(a.delta_r1 == b.deltas[0]);
  }
}

TEST_CASE("column helpers") {
  const std::vector<StageOutputs> outs{{0, 10.0, 9.0, 7.0}, {1, 0.0, 1.0, -2.0}};
  const auto comps = decompose_all(outs);
  CHECK(total_residuals(comps) == std::vector<double>{3.0, 2.0});
  CHECK(r2_values(comps) == std::vector<double>{1.0, 1.0});
  CHECK(delta_r1_values(comps) == std::vector<double>{2.0, 1.0});
  CHECK(decompose_signed_all(outs).size() == 2);
}
