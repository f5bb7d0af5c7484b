#include <doctest.h>

#include <limits>
#include <set>

#include "stagecp/core_types.hpp"
#include "test_helpers.hpp"

using namespace stagecp;

TEST_CASE("split_dataset slices contiguously in order") {
  const auto pts = testing::indexed_points(10);
  const auto s = split_dataset(pts, 5, 3, 2);
  REQUIRE(s.train.size() == 5);
  REQUIRE(s.conf.size() == 3);
  REQUIRE(s.cal.size() == 2);
  CHECK(*s.train.front().t == 0);
  CHECK(*s.conf.front().t == 5);
  CHECK(*s.cal.back().t == 9);
}

TEST_CASE("split_dataset rejects oversized requests") {
  const auto pts = testing::indexed_points(10);
  CHECK_THROWS_KIND(split_dataset(pts, 5, 3, 3), ErrorKind::InsufficientData);
}

TEST_CASE("split_dataset degenerate split keeps everything in train") {
  const auto pts = testing::indexed_points(6);
  const auto s = split_dataset(pts, 6, 0, 0);
  CHECK(s.train.size() == 6);
  CHECK(s.conf.empty());
  CHECK(s.cal.empty());
}

TEST_CASE("split_dataset parts are disjoint and form a prefix") {
  const auto pts = testing::indexed_points(40);
  for (std::size_t a = 0; a <= 20; a += 5) {
    for (std::size_t b = 0; b <= 10; b += 3) {
      for (std::size_t c = 0; c <= 10; c += 4) {
        const auto s = split_dataset(pts, a, b, c);
        std::vector<std::int64_t> seen;
        for (const auto* part : {&s.train, &s.conf, &s.cal}) {
          for (const auto& p : *part) seen.push_back(*p.t);
        }
        REQUIRE(seen.size() == a + b + c);
        for (std::size_t i = 0; i < seen.size(); ++i) CHECK(seen[i] == static_cast<std::int64_t>(i));
      }
    }
  }
}

TEST_CASE("sliding_window index arithmetic") {
  const auto pts = testing::indexed_points(200);
  const auto s = sliding_window(pts, 100, 100, 0.5);
  REQUIRE(s.conf.size() == 50);
  REQUIRE(s.cal.size() == 50);
  CHECK(s.train.empty());
  CHECK(*s.conf.front().t == 0);
  CHECK(*s.conf.back().t == 49);
  CHECK(*s.cal.front().t == 50);
  CHECK(*s.cal.back().t == 99);

  const auto later = sliding_window(pts, 150, 20, 0.25);
  CHECK(later.conf.size() == 5);
  CHECK(*later.conf.front().t == 130);
  CHECK(*later.cal.back().t == 149);
}

TEST_CASE("sliding_window with t == k uses the full history") {
  const auto pts = testing::indexed_points(40);
  const auto s = sliding_window(pts, 40, 40);
  CHECK(s.conf.size() + s.cal.size() == 40);
  CHECK(*s.conf.front().t == 0);
}

TEST_CASE("sliding_window rejects short histories") {
  const auto pts = testing::indexed_points(200);
  CHECK_THROWS_KIND(sliding_window(pts, 10, 100), ErrorKind::WindowTooShort);
  CHECK_THROWS_KIND(sliding_window(pts, 201, 100), ErrorKind::InsufficientData);
  CHECK_THROWS_KIND(window_conf_size(10, 0.0), ErrorKind::InvalidArgument);
}

TEST_CASE("seeds are reproducible and derived streams differ") {
  auto a = make_rng(Seed{42});
  auto b = make_rng(Seed{42});
  for (int i = 0; i < 100; ++i) CHECK(a() == b());

  std::set<std::uint64_t> children;
  for (std::uint64_t s = 0; s < 1000; ++s) children.insert(derive_seed(Seed{7}, s).value);
  CHECK(children.size() == 1000);
  CHECK(derive_seed(Seed{7}, 3).value == derive_seed(Seed{7}, 3).value);
  CHECK(derive_seed(Seed{7}, 3).value != derive_seed(Seed{8}, 3).value);
}

TEST_CASE("validate_points checks dimensions and finiteness") {
  auto pts = testing::indexed_points(5);
  CHECK_NOTHROW(validate_points(pts));
  pts[3].x.push_back(1.0);
  CHECK_THROWS_KIND(validate_points(pts), ErrorKind::DimensionMismatch);
  pts = testing::indexed_points(5);
  pts[2].y = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_KIND(validate_points(pts), ErrorKind::InvalidArgument);
}
