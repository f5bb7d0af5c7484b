#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stagecp/experiment.hpp"
#include "test_helpers.hpp"

using namespace stagecp;

namespace {

ExperimentConfig small_split() {
  ExperimentConfig cfg;
  cfg.methods = {"SR", "SR_CD", "SC", "WSC"};
  cfg.n_train = 300;
  cfg.n_conf = 200;
  cfg.n_cal = 200;
  cfg.n_test = 300;
  cfg.seed = 11;
  return cfg;
}

ExperimentConfig small_online() {
  ExperimentConfig cfg;
  cfg.protocol = Protocol::Online;
  cfg.methods = {"SR", "SC", "WSC", "ACI", "OCID", "DTACI", "PID"};
  cfg.n_train = 300;
  cfg.n_test = 400;
  cfg.delta = 0.3;
  cfg.seed = 12;
  return cfg;
}

// Records hold NaN for unused columns, so compare their serialized form.
std::string csv_of(const std::vector<ResultRecord>& records) {
  std::ostringstream out;
  write_results_csv(out, records);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void check_consistency(const ExperimentConfig& cfg) {
  const auto res = run_experiment(cfg);
  REQUIRE(res.summaries.size() == cfg.methods.size());
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    const auto& run = res.recorded.runs[m];
    const auto& s = res.summaries[m];
    CHECK(run.records.size() == cfg.n_test);
    double covered = 0, width = 0;
    std::size_t finite = 0;
    for (const auto& r : run.records) {
      covered += r.covered;
      if (!r.abstained) {
        CHECK(r.width == doctest::Approx(std::max(0.0, r.hi - r.lo)));
        width += r.width;
        ++finite;
      }
    }
    CHECK(s.coverage_mean == doctest::Approx(covered / run.records.size()));
    if (finite) CHECK(s.width_mean == doctest::Approx(width / finite));
    CHECK(s.coverage_mean >= 0.0);
    CHECK(s.coverage_mean <= 1.0);
  }
}

}  // namespace

TEST_CASE("same seed gives identical results") {
  for (auto cfg : {small_split(), small_online()}) {
    cfg.threads = 2;
    cfg.repetitions = 2;
    const auto a = run_experiment(cfg);
    const auto b = run_experiment(cfg);
    CHECK(summary_csv(a.summaries) == summary_csv(b.summaries));
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      CHECK(csv_of(a.recorded.runs[m].records) == csv_of(b.recorded.runs[m].records));
    }
    cfg.seed += 1;
    CHECK(summary_csv(run_experiment(cfg).summaries) != summary_csv(a.summaries));
  }
}

TEST_CASE("summaries agree with the per-step records") {
  check_consistency(small_split());
  check_consistency(small_online());
  auto alg = small_online();
  alg.policy = AbstentionPolicy::Algorithmic;
  check_consistency(alg);
}

TEST_CASE("repetitions share nothing but the seed schedule") {
  auto cfg = small_split();
  cfg.repetitions = 3;
  cfg.record_rep = 2;
  const auto multi = run_experiment(cfg);
  const auto single = run_repetition(cfg, 2);
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    CHECK(csv_of(multi.recorded.runs[m].records) == csv_of(single.runs[m].records));
  }
}

TEST_CASE("impossible target abstains at every step") {
  auto cfg = small_split();
  cfg.methods = {"SR", "SC"};
  cfg.alpha = 0.01;  // 0.99^200 > delta: no pair can be certified
  const auto res = run_experiment(cfg);
  CHECK(res.summaries[0].abstained_steps == cfg.n_test);
  CHECK(res.summaries[0].abstained_reps == 1);
  CHECK(res.abstained_everywhere);
  CHECK(res.summaries[0].coverage_reporting_mean == 0.0);
  CHECK(res.summaries[0].coverage_algorithmic_mean == 1.0);
  CHECK(std::isnan(res.summaries[0].width_mean));
  CHECK(res.summaries[1].abstained_steps == 0);
}

TEST_CASE("single-value sweep equals a plain run") {
  auto cfg = small_split();
  const double v[] = {0.02};
  const auto pts = sweep(cfg, "tau", v);
  REQUIRE(pts.size() == 1);
  cfg.tau = 0.02;
  CHECK(summary_csv(pts[0].result.summaries) == summary_csv(run_experiment(cfg).summaries));
  CHECK_THROWS_KIND(sweep(cfg, "alpha", v), ErrorKind::ConfigError);
  CHECK_THROWS_KIND(sweep(cfg, "tau", std::span<const double>{}), ErrorKind::ConfigError);
  const double bad_k[] = {2.5};
  CHECK_THROWS_KIND(sweep(cfg, "k", bad_k), ErrorKind::ConfigError);
}

TEST_CASE("sliding coverage") {
  const std::vector<std::uint8_t> c{1, 0, 1, 1, 0};
  const auto s = sliding_coverage(c, 2);
  CHECK(s == std::vector<double>{0.5, 0.5, 1.0, 0.5});
  CHECK(sliding_coverage(c, 10) == std::vector<double>{0.6});
}

TEST_CASE("precomputed input drives the online protocol") {
  const auto dir = std::filesystem::temp_directory_path() / "stagecp_exp_input";
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  std::vector<StageOutputs> outs;
  for (int i = 0; i < 400; ++i) {
    const double m = 0.01 * i;
    outs.push_back({i, m + std::sin(i * 1.7), m + 0.5 * std::cos(i * 0.3), m});
  }
  write_precomputed_csv(csv, outs);
  write_file(dir / "pre.csv", csv.str());
  ExperimentConfig cfg;
  cfg.protocol = Protocol::Online;
  cfg.input = (dir / "pre.csv").string();
  cfg.schema = "PRECOMPUTED";
  cfg.methods = {"SR", "SC"};
  const auto res = run_experiment(cfg);
  CHECK(res.recorded.runs[0].records.size() == 400 - cfg.k);
  CHECK(res.recorded.runs[0].records.front().t == 0);  // test index
}

TEST_CASE("outputs are rewritten byte for byte") {
  const auto dir = std::filesystem::temp_directory_path() / "stagecp_exp_out";
  std::filesystem::remove_all(dir);
  auto cfg = small_online();
  const auto paths = write_outputs(run_experiment(cfg), dir);
  REQUIRE_FALSE(paths.empty());
  const auto first = slurp(dir / "results.csv");
  write_outputs(run_experiment(cfg), dir);
  CHECK(slurp(dir / "results.csv") == first);
  std::istringstream in(first);
  CHECK(read_results_csv(in).size() == cfg.methods.size() * cfg.n_test);
}
