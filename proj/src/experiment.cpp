#include "stagecp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "stagecp/baselines.hpp"
#include "stagecp/quantiles.hpp"
#include "stagecp/synth_data.hpp"

namespace stagecp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t pre_test_length(const ExperimentConfig& cfg) {
  return cfg.protocol == Protocol::Split ? cfg.n_conf + cfg.n_cal : cfg.k;
}

ScenarioSpec scenario_for(const ExperimentConfig& cfg, std::size_t rep) {
  const auto kind = parse_scenario(cfg.scenario);
  if (!kind) throw Error(ErrorKind::ConfigError, "unknown scenario '" + cfg.scenario + "'");
  ScenarioSpec spec = default_scenario(*kind);
  const std::size_t test_start = cfg.n_train + pre_test_length(cfg);
  spec.length = test_start + cfg.n_test;
  const std::int64_t start = static_cast<std::int64_t>(test_start) + cfg.shift_start;
  spec.shift_start = static_cast<std::size_t>(
      std::clamp<std::int64_t>(start, 0, static_cast<std::int64_t>(spec.length)));
  if (cfg.rate >= 0.0) spec.rate = cfg.rate;
  if (cfg.noise_std >= 0.0) spec.noise_std = cfg.noise_std;
  if (cfg.w_std >= 0.0) spec.w_std = cfg.w_std;
  if (cfg.phase_length >= 0) spec.phase_length = static_cast<std::size_t>(cfg.phase_length);
  spec.seed = derive_seed(Seed{cfg.seed}, rep);
  return spec;
}

PreparedData from_points(const ExperimentConfig& cfg, const std::vector<TripletPoint>& points) {
  const std::size_t pre = pre_test_length(cfg);
  if (points.size() < cfg.n_train + pre + 1) {
    throw Error(ErrorKind::InsufficientData,
                "need at least " + std::to_string(cfg.n_train + pre + 1) + " points, have " +
                    std::to_string(points.size()));
  }
  const std::span<const TripletPoint> all(points);
  const auto pipeline = fit_pipeline(all.first(cfg.n_train));
  const std::size_t n_rest = std::min(points.size() - cfg.n_train, pre + cfg.n_test);
  PreparedData data;
  data.outputs = evaluate_all(pipeline, all.subspan(cfg.n_train, n_rest));
  data.n_pre = pre;
  return data;
}

struct Stats {
  double mean = kNaN;
  double std = kNaN;
};

Stats stats_of(const std::vector<double>& values) {
  std::vector<double> v;
  for (double x : values) {
    if (!std::isnan(x)) v.push_back(x);
  }
  Stats s;
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
  return s;
}

double mean_of(std::span<const std::uint8_t> flags) {
  if (flags.empty()) return kNaN;
  double s = 0.0;
  for (auto f : flags) s += f;
  return s / static_cast<double>(flags.size());
}

ResultRecord make_record(std::int64_t t, const std::string& method, const PredictionInterval& iv,
                         bool covered, double a, double b, double c, double d, double alpha_t) {
  ResultRecord r;
  r.t = t;
  r.method = method;
  r.lo = iv.lo;
  r.hi = iv.hi;
  r.covered = covered;
  r.width = iv.width();
  r.a = a;
  r.b = b;
  r.c = c;
  r.d = d;
  r.alpha_t = alpha_t;
  r.abstained = iv.is_abstained();
  return r;
}

void push_step(MethodRun& run, const ExperimentConfig& cfg, std::int64_t t,
               const PredictionInterval& iv, double y, double a, double b, double c, double d,
               double alpha_t) {
  const bool alg = covers(iv, y, AbstentionPolicy::Algorithmic);
  const bool rep = covers(iv, y, AbstentionPolicy::Reporting);
  run.covered_algorithmic.push_back(alg ? 1 : 0);
  run.covered_reporting.push_back(rep ? 1 : 0);
  run.records.push_back(make_record(t, run.method, iv,
                                    cfg.policy == AbstentionPolicy::Algorithmic ? alg : rep, a, b,
                                    c, d, alpha_t));
}

// Signed-heuristic calibration: the FWER test over the grid with asymmetric
// intervals built from signed conformal quantiles.
struct SignedShifts {
  double lo = 0.0;
  double hi = 0.0;
  bool abstains() const { return !std::isfinite(lo) || !std::isfinite(hi); }
};

SignedShifts signed_shifts(std::span<const SignedResidualComponents> conf, double c, double d,
                           Lambda lambda) {
  // interval_signed on center 0 gives the shifts directly.
  const auto iv = interval_signed(conf, {lambda.a, lambda.b, c, d, 0.0}, 0.0);
  if (iv.is_abstained()) return {-kInf, kInf};
  return {iv.lo, iv.hi};
}

MethodRun run_split_signed(const ExperimentConfig& cfg, std::span<const StageOutputs> conf,
                           std::span<const StageOutputs> cal, std::span<const StageOutputs> test,
                           std::span<const Lambda> grid) {
  const auto conf_signed = decompose_signed_all(conf);
  const auto cal_signed = decompose_signed_all(cal);
  auto risk_on = [](std::span<const SignedResidualComponents> set, SignedShifts s) {
    if (s.abstains()) return 0.0;
    std::size_t misses = 0;
    for (const auto& p : set) {
      const double err = p.r2_signed - p.delta_r1_signed;
      misses += (err < s.lo || err > s.hi) ? 1 : 0;
    }
    return static_cast<double>(misses) / static_cast<double>(set.size());
  };

  const auto cdf = binomial_cdf_table(cal.size(), cfg.alpha + cfg.tau);
  std::vector<double> p_values;
  std::vector<SignedShifts> shifts;
  for (const Lambda& l : grid) {
    shifts.push_back(signed_shifts(conf_signed, cfg.c, cfg.d, l));
    const double risk = risk_on(cal_signed, shifts.back());
    const auto count = static_cast<std::size_t>(
        std::floor(static_cast<double>(cal.size()) * risk + 1e-9));
    p_values.push_back(cdf[std::min(count, cal.size())]);
  }
  const auto accepted = cfg.fwer == FwerMethod::Bonferroni ? bonferroni(p_values, cfg.delta)
                                                           : fixed_sequence_test(p_values, cfg.delta);
  std::optional<std::size_t> chosen;
  double best_gap = kInf;
  for (std::size_t i : accepted) {
    const double gap = std::fabs((1.0 - risk_on(conf_signed, shifts[i])) - (1.0 - cfg.alpha));
    if (gap < best_gap) {
      best_gap = gap;
      chosen = i;
    }
  }

  MethodRun run;
  run.method = "SR_SIGNED";
  for (std::size_t t = 0; t < test.size(); ++t) {
    const double center = test[t].mu2_xhat;
    PredictionInterval iv = PredictionInterval::abstained(center);
    double a = kNaN, b = kNaN;
    if (chosen && !shifts[*chosen].abstains()) {
      const auto& s = shifts[*chosen];
      iv = PredictionInterval::asymmetric(center, center + s.lo, center + s.hi);
    }
    if (chosen) {
      a = grid[*chosen].a;
      b = grid[*chosen].b;
    }
    push_step(run, cfg, static_cast<std::int64_t>(t), iv, test[t].y, a, b, cfg.c, cfg.d,
              cfg.alpha);
  }
  return run;
}

RepResult run_split(const ExperimentConfig& cfg, const PreparedData& data) {
  const std::span<const StageOutputs> all(data.outputs);
  if (all.size() <= cfg.n_conf + cfg.n_cal || cfg.n_conf == 0 || cfg.n_cal == 0) {
    throw Error(ErrorKind::InsufficientData, "split protocol needs conf, cal and test points");
  }
  const auto conf = all.first(cfg.n_conf);
  const auto cal = all.subspan(cfg.n_conf, cfg.n_cal);
  const auto test = all.subspan(cfg.n_conf + cfg.n_cal);
  const auto conf_scores = component_scores(conf);
  const auto cal_scores = component_scores(cal);
  const auto pooled = component_scores(all.first(cfg.n_conf + cfg.n_cal));
  const auto grid = default_lambda_grid(cfg.grid_steps);

  RepResult out;
  for (const auto& method : cfg.methods) {
    if (method == "SR_SIGNED") {
      out.runs.push_back(run_split_signed(cfg, conf, cal, test, grid));
      continue;
    }
    MethodRun run;
    run.method = method;
    // Every split method produces a half width that does not depend on the
    // test point, plus the (a, b) that produced it.
    double hw = 0.0, a = kNaN, b = kNaN, c = kNaN, d = kNaN;
    bool abstain = false;
    if (method == "SR") {
      const auto q = component_thresholds(conf_scores, cfg.c, cfg.d);
      const auto verdict = calibrate(cal_scores, q, grid, {cfg.alpha, cfg.delta, cfg.tau, cfg.fwer});
      const auto chosen = select_lambda_nonadaptive(verdict.lambda_val, conf_scores, q, cfg.alpha);
      c = cfg.c;
      d = cfg.d;
      if (chosen) {
        a = chosen->a;
        b = chosen->b;
        hw = scaled_half_width(a, q.delta_r1, b, q.r2);
      } else {
        abstain = true;
      }
    } else if (method == "SR_CD") {
      const auto q = component_thresholds(conf_scores, cfg.c, cfg.d);
      a = b = 1.0;
      c = cfg.c;
      d = cfg.d;
      hw = scaled_half_width(1.0, q.delta_r1, 1.0, q.r2);
    } else if (method == "SC") {
      hw = conformal_quantile(pooled.total, cfg.alpha);
    } else if (method == "WSC") {
      hw = weighted_quantile(pooled.total, age_weights(pooled.total.size(), cfg.wsc_decay),
                             cfg.alpha);
    } else {
      throw Error(ErrorKind::ConfigError, "method '" + method + "' needs protocol=online");
    }
    for (std::size_t t = 0; t < test.size(); ++t) {
      const double center = test[t].mu2_xhat;
      const auto iv = abstain ? PredictionInterval::abstained(center)
                              : interval_from_half_width(center, hw);
      push_step(run, cfg, static_cast<std::int64_t>(t), iv, test[t].y, a, b, c, d, cfg.alpha);
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

RepResult run_online(const ExperimentConfig& cfg, const PreparedData& data) {
  const std::span<const StageOutputs> all(data.outputs);
  const std::size_t k = cfg.k;
  if (all.size() <= k) throw Error(ErrorKind::InsufficientData, "online protocol needs test points");
  std::vector<double> totals;
  totals.reserve(all.size());
  for (const auto& o : all) totals.push_back(std::fabs(o.y - o.mu2_xhat));

  RepResult out;
  for (const auto& method : cfg.methods) {
    MethodRun run;
    run.method = method;
    if (method == "SR") {
      AdaptiveOptions opt;
      opt.alpha = cfg.alpha;
      opt.delta = cfg.delta;
      opt.tau = cfg.tau;
      opt.gamma = cfg.gamma;
      opt.eta = cfg.eta;
      opt.k = k;
      opt.conf_ratio = cfg.conf_ratio;
      opt.c0 = cfg.c;
      opt.d0 = cfg.d;
      opt.method = cfg.fwer;
      opt.selection = cfg.selection;
      opt.grid = default_lambda_grid(cfg.grid_steps);
      auto steps = run_adaptive(all, k, opt);
      for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto& s = steps[i];
        push_step(run, cfg, static_cast<std::int64_t>(i), s.interval, all[k + i].y, s.lambda.a,
                  s.lambda.b, s.c, s.d, s.alpha_t);
        out.diagnostics.push_back(s);
        out.diagnostics.back().t = static_cast<std::int64_t>(i);
      }
    } else {
      const auto which = parse_baseline(method);
      if (!which) throw Error(ErrorKind::ConfigError, "unknown method '" + method + "'");
      BaselineOptions opt;
      opt.alpha = cfg.alpha;
      opt.gamma = cfg.gamma;
      opt.wsc_decay = cfg.wsc_decay;
      opt.pid_ki = cfg.pid_ki;
      opt.ocid_gamma0 = cfg.ocid_gamma0;
      BaselineController controller(*which, opt);
      for (std::size_t t = k; t < all.size(); ++t) {
        const std::span<const double> window(totals.data() + (t - k), k);
        const auto rec = controller.step(window, all[t].mu2_xhat, all[t].y);
        push_step(run, cfg, static_cast<std::int64_t>(t - k), rec.interval, all[t].y, kNaN, kNaN,
                  kNaN, kNaN, rec.alpha_t);
      }
    }
    out.runs.push_back(std::move(run));
  }
  return out;
}

double finite_width_mean(const MethodRun& run) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : run.records) {
    if (!r.abstained) {
      sum += r.width;
      ++n;
    }
  }
  return n ? sum / static_cast<double>(n) : kNaN;
}

template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t rep) {
  if (!cfg.input.empty()) {
    const auto schema = parse_schema(cfg.schema);
    if (!schema) throw Error(ErrorKind::ConfigError, "unknown schema '" + cfg.schema + "'");
    auto ingested = ingest_csv(cfg.input, *schema);
    if (*schema == CsvSchema::RAW_TRIPLETS) return from_points(cfg, ingested.points);
    const std::size_t pre = pre_test_length(cfg);
    if (ingested.outputs.size() < pre + 1) {
      throw Error(ErrorKind::InsufficientData, "precomputed file is shorter than the warm-up");
    }
    PreparedData data;
    ingested.outputs.resize(std::min(ingested.outputs.size(), pre + cfg.n_test));
    data.outputs = std::move(ingested.outputs);
    data.n_pre = pre;
    return data;
  }
  return from_points(cfg, generate(scenario_for(cfg, rep)));
}

RepResult run_repetition(const ExperimentConfig& cfg, const PreparedData& data) {
  return cfg.protocol == Protocol::Split ? run_split(cfg, data) : run_online(cfg, data);
}

RepResult run_repetition(const ExperimentConfig& cfg, std::size_t rep) {
  return run_repetition(cfg, prepare_data(cfg, rep));
}

std::vector<double> sliding_coverage(std::span<const std::uint8_t> covered, std::size_t window) {
  std::vector<double> out;
  if (covered.empty()) return out;
  if (window == 0 || covered.size() < window) {
    out.push_back(mean_of(covered));
    return out;
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < covered.size(); ++i) {
    sum += covered[i];
    if (i >= window) sum -= covered[i - window];
    if (i + 1 >= window) out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  std::vector<RepResult> reps(cfg.repetitions);
  parallel_for(cfg.repetitions, cfg.threads,
               [&](std::size_t r) { reps[r] = run_repetition(cfg, r); });

  ExperimentResult result;
  result.config = cfg;
  const bool algorithmic = cfg.policy == AbstentionPolicy::Algorithmic;
  const std::size_t n_methods = cfg.methods.size();

  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodSummary s;
    s.method = cfg.methods[m];
    std::vector<double> cov_alg, cov_rep, width, min_sliding;
    for (const auto& rep : reps) {
      const auto& run = rep.runs[m];
      cov_alg.push_back(mean_of(run.covered_algorithmic));
      cov_rep.push_back(mean_of(run.covered_reporting));
      width.push_back(finite_width_mean(run));
      const auto abstained = static_cast<std::size_t>(std::count_if(
          run.records.begin(), run.records.end(), [](const auto& r) { return r.abstained; }));
      s.abstained_steps += abstained;
      if (abstained > 0) ++s.reps_with_abstention;
      if (abstained == run.records.size()) ++s.abstained_reps;
      const auto sliding = sliding_coverage(
          algorithmic ? run.covered_algorithmic : run.covered_reporting, cfg.sliding_window);
      min_sliding.push_back(*std::min_element(sliding.begin(), sliding.end()));
    }
    const auto alg = stats_of(cov_alg);
    const auto rep = stats_of(cov_rep);
    const auto wid = stats_of(width);
    s.coverage_algorithmic_mean = alg.mean;
    s.coverage_algorithmic_std = alg.std;
    s.coverage_reporting_mean = rep.mean;
    s.coverage_reporting_std = rep.std;
    s.coverage_mean = algorithmic ? alg.mean : rep.mean;
    s.coverage_std = algorithmic ? alg.std : rep.std;
    s.width_mean = wid.mean;
    s.width_std = wid.std;
    s.min_sliding_coverage = stats_of(min_sliding).mean;
    if (s.abstained_reps == cfg.repetitions) result.abstained_everywhere = true;
    result.summaries.push_back(std::move(s));
  }

  // Coverage gain of every SR-family method over every baseline.
  for (std::size_t m = 0; m < n_methods; ++m) {
    if (cfg.methods[m].rfind("SR", 0) != 0) continue;
    for (std::size_t bl = 0; bl < n_methods; ++bl) {
      if (cfg.methods[bl].rfind("SR", 0) == 0) continue;
      std::vector<double> gains, max_gains;
      for (const auto& rep : reps) {
        const auto& mine = algorithmic ? rep.runs[m].covered_algorithmic
                                       : rep.runs[m].covered_reporting;
        const auto& theirs = algorithmic ? rep.runs[bl].covered_algorithmic
                                         : rep.runs[bl].covered_reporting;
        gains.push_back(mean_of(mine) - mean_of(theirs));
        const auto a = sliding_coverage(mine, cfg.sliding_window);
        const auto b = sliding_coverage(theirs, cfg.sliding_window);
        double best = -kInf;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) best = std::max(best, a[i] - b[i]);
        max_gains.push_back(best);
      }
      result.improvements.push_back(
          {cfg.methods[m], cfg.methods[bl], stats_of(gains).mean, stats_of(max_gains).mean});
    }
  }

  result.recorded = std::move(reps[cfg.record_rep]);
  return result;
}

std::string summary_csv(const std::vector<MethodSummary>& summaries) {
  std::ostringstream out;
  out << "method,coverage_mean,coverage_std,coverage_algorithmic_mean,coverage_algorithmic_std,"
         "coverage_reporting_mean,coverage_reporting_std,width_mean,width_std,abstained_steps,"
         "abstained_reps,reps_with_abstention,min_sliding_coverage\n";
  for (const auto& s : summaries) {
    out << s.method << ',' << format_double(s.coverage_mean) << ','
        << format_double(s.coverage_std) << ',' << format_double(s.coverage_algorithmic_mean)
        << ',' << format_double(s.coverage_algorithmic_std) << ','
        << format_double(s.coverage_reporting_mean) << ','
        << format_double(s.coverage_reporting_std) << ',' << format_double(s.width_mean) << ','
        << format_double(s.width_std) << ',' << s.abstained_steps << ',' << s.abstained_reps
        << ',' << s.reps_with_abstention << ',' << format_double(s.min_sliding_coverage) << '\n';
  }
  return out.str();
}

std::string diagnostics_csv(const std::vector<AdaptiveStepRecord>& diagnostics) {
  std::ostringstream out;
  out << "t,mean_dr1,mean_r2,mean_total,threshold_dr1,threshold_r2,cov_dr1,cov_r2,n_accepted,"
         "a,b,c,d,alpha_t,delta_c,delta_d\n";
  for (const auto& s : diagnostics) {
    out << s.t << ',' << format_double(s.mean_dr1) << ',' << format_double(s.mean_r2) << ','
        << format_double(s.mean_total) << ',' << format_double(s.thresholds.delta_r1) << ','
        << format_double(s.thresholds.r2) << ',' << format_double(s.coverage.cov_dr1) << ','
        << format_double(s.coverage.cov_r2) << ',' << s.n_accepted << ','
        << format_double(s.lambda.a) << ',' << format_double(s.lambda.b) << ','
        << format_double(s.c) << ',' << format_double(s.d) << ',' << format_double(s.alpha_t)
        << ',' << s.delta_c << ',' << s.delta_d << '\n';
  }
  return out.str();
}

std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result,
                                                 const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    written.push_back(dir / name);
  };

  std::vector<ResultRecord> records;
  for (const auto& run : result.recorded.runs) {
    records.insert(records.end(), run.records.begin(), run.records.end());
  }
  std::ostringstream results;
  write_results_csv(results, records);
  emit("results.csv", results.str());
  emit("summary.csv", summary_csv(result.summaries));

  std::ostringstream improvements;
  improvements << "method,baseline,mean_coverage_gain,max_sliding_gain\n";
  for (const auto& row : result.improvements) {
    improvements << row.method << ',' << row.baseline << ','
                 << format_double(row.mean_coverage_gain) << ','
                 << format_double(row.max_sliding_gain) << '\n';
  }
  emit("improvements.csv", improvements.str());

  std::ostringstream sliding;
  sliding << "t,method,coverage\n";
  const bool algorithmic = result.config.policy == AbstentionPolicy::Algorithmic;
  const std::size_t w = result.config.sliding_window;
  for (const auto& run : result.recorded.runs) {
    const auto series =
        sliding_coverage(algorithmic ? run.covered_algorithmic : run.covered_reporting, w);
    const std::size_t offset = run.records.size() >= w ? w - 1 : run.records.size() - 1;
    for (std::size_t i = 0; i < series.size(); ++i) {
      sliding << (i + offset) << ',' << run.method << ',' << format_double(series[i]) << '\n';
    }
  }
  emit("sliding_coverage.csv", sliding.str());

  if (!result.recorded.diagnostics.empty()) {
    emit("diagnostics.csv", diagnostics_csv(result.recorded.diagnostics));
  }
  emit("config.txt", dump_config(result.config));
  return written;
}

std::vector<SweepPoint> sweep(const ExperimentConfig& cfg, const std::string& param,
                              std::span<const double> values) {
  if (values.empty()) throw Error(ErrorKind::ConfigError, "sweep grid is empty");
  static const char* kAllowed[] = {"tau", "delta", "gamma", "eta", "k"};
  if (std::find(std::begin(kAllowed), std::end(kAllowed), param) == std::end(kAllowed)) {
    throw Error(ErrorKind::ConfigError,
                "cannot sweep '" + param + "'; choose tau, delta, gamma, eta or k");
  }
  std::vector<SweepPoint> out;
  for (double v : values) {
    ExperimentConfig point = cfg;
    if (param == "k") {
      if (!(v >= 2.0) || v != std::floor(v)) throw Error(ErrorKind::ConfigError, "k must be an integer >= 2");
      point.k = static_cast<std::size_t>(v);
    } else {
      set_config_value(point, param, format_double(v));
    }
    out.push_back({v, run_experiment(point)});
  }
  return out;
}

std::string sweep_csv(const std::string& param, const std::vector<SweepPoint>& points) {
  std::ostringstream out;
  out << "param,value,method,coverage_mean,coverage_std,width_mean,width_std,abstained_steps,"
         "abstained_reps\n";
  for (const auto& p : points) {
    for (const auto& s : p.result.summaries) {
      out << param << ',' << format_double(p.value) << ',' << s.method << ','
          << format_double(s.coverage_mean) << ',' << format_double(s.coverage_std) << ','
          << format_double(s.width_mean) << ',' << format_double(s.width_std) << ','
          << s.abstained_steps << ',' << s.abstained_reps << '\n';
    }
  }
  return out.str();
}

}  // namespace stagecp
