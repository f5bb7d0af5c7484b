// stagecp command-line runner: generate | run | sweep | report.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>

#include "stagecp/config.hpp"
#include "stagecp/csv_io.hpp"
#include "stagecp/experiment.hpp"
#include "stagecp/report.hpp"
#include "stagecp/synth_data.hpp"

namespace {

using namespace stagecp;

constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitAbstained = 4;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IoError:
    case ErrorKind::ParseError:
    case ErrorKind::SchemaError: return kExitIo;
    default: return kExitConfig;
  }
}

// Registers --<key> for every config key plus --config on `app`.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::pair<CLI::Option*, std::string>> values;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "flat key = value config file");
    for (const auto& key : config_keys()) {
      auto& slot = values[key.name];
      slot.first = app->add_option("--" + key.name, slot.second, key.help);
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    for (const auto& key : config_keys()) {
      const auto& [opt, text] = values.at(key.name);
      if (opt->count() > 0) set_config_value(cfg, key.name, text);
    }
    validate_config(cfg);
    return cfg;
  }
};

void print_summary(const ExperimentResult& result) {
  std::printf("%-10s %9s %9s %9s %9s %10s %9s\n", "method", "coverage", "cov_std", "width",
              "wid_std", "abst_steps", "abst_reps");
  for (const auto& s : result.summaries) {
    std::printf("%-10s %9.4f %9.4f %9.4f %9.4f %10zu %9zu\n", s.method.c_str(), s.coverage_mean,
                s.coverage_std, s.width_mean, s.width_std, s.abstained_steps, s.abstained_reps);
  }
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (auto f : split_fields(text)) {
    if (f.empty()) continue;
    try {
      out.push_back(parse_double(f));
    } catch (const Error&) {
      throw Error(ErrorKind::ConfigError, "bad sweep value '" + std::string(f) + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stage-wise conformal prediction experiments"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic scenario to CSV");
  std::string gen_scenario = "IID_LINEAR", gen_out = "data.csv", gen_format = "RAW_TRIPLETS";
  std::size_t gen_length = 3000, gen_train = 1000;
  std::uint64_t gen_seed = 0;
  double gen_rate = -1, gen_noise = -1, gen_wstd = -1;
  std::int64_t gen_shift = -1, gen_phase = -1;
  gen->add_option("--scenario", gen_scenario, "scenario tag");
  gen->add_option("--length", gen_length, "number of points");
  gen->add_option("--seed", gen_seed, "seed");
  gen->add_option("--output,-o", gen_out, "output CSV path");
  gen->add_option("--format", gen_format, "RAW_TRIPLETS or PRECOMPUTED");
  gen->add_option("--n_train", gen_train, "training prefix for PRECOMPUTED output");
  gen->add_option("--rate", gen_rate, "noise growth per step");
  gen->add_option("--noise_std", gen_noise, "noise scale");
  gen->add_option("--w_std", gen_wstd, "input scale");
  gen->add_option("--shift_start", gen_shift, "absolute shift onset");
  gen->add_option("--phase_length", gen_phase, "phase length");

  // run
  auto* run = app.add_subcommand("run", "run an experiment");
  ConfigFlags run_flags;
  run_flags.attach(run);

  // sweep
  auto* sw = app.add_subcommand("sweep", "run an experiment over a parameter grid");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sw);
  std::string sweep_param, sweep_values;
  sw->add_option("--param", sweep_param, "tau, delta, gamma, eta or k")->required();
  sw->add_option("--values", sweep_values, "comma-separated grid")->required();

  // report
  auto* rep = app.add_subcommand("report", "render SVG plots from a results directory");
  std::string rep_dir = "out", rep_out;
  std::string rep_plots = "width,coverage,ab,components,ratio";
  std::size_t rep_window = 200;
  rep->add_option("--dir", rep_dir, "directory holding results.csv");
  rep->add_option("--out", rep_out, "output directory (default: --dir)");
  rep->add_option("--plots", rep_plots, "comma-separated plot kinds");
  rep->add_option("--sliding_window", rep_window, "window for sliding coverage");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (gen->parsed()) {
      const auto kind = parse_scenario(gen_scenario);
      if (!kind) throw Error(ErrorKind::ConfigError, "unknown scenario '" + gen_scenario + "'");
      auto spec = default_scenario(*kind);
      spec.length = gen_length;
      spec.seed = Seed{gen_seed};
      if (gen_rate >= 0) spec.rate = gen_rate;
      if (gen_noise >= 0) spec.noise_std = gen_noise;
      if (gen_wstd >= 0) spec.w_std = gen_wstd;
      if (gen_shift >= 0) spec.shift_start = static_cast<std::size_t>(gen_shift);
      if (gen_phase >= 0) spec.phase_length = static_cast<std::size_t>(gen_phase);
      if (spec.shift_start > spec.length) spec.shift_start = spec.length;
      const auto points = generate(spec);
      std::ostringstream out;
      const auto schema = parse_schema(gen_format);
      if (!schema) throw Error(ErrorKind::ConfigError, "unknown format '" + gen_format + "'");
      if (*schema == CsvSchema::RAW_TRIPLETS) {
        write_raw_csv(out, points);
      } else {
        if (gen_train >= points.size()) {
          throw Error(ErrorKind::ConfigError, "n_train must be below length");
        }
        const std::span<const TripletPoint> all(points);
        const auto pipeline = fit_pipeline(all.first(gen_train));
        write_precomputed_csv(out, evaluate_all(pipeline, all.subspan(gen_train)));
      }
      write_file(gen_out, out.str());
      std::printf("wrote %s\n", gen_out.c_str());
      return 0;
    }

    if (run->parsed()) {
      const auto cfg = run_flags.resolve();
      const auto result = run_experiment(cfg);
      write_outputs(result, cfg.output_dir);
      print_summary(result);
      return result.abstained_everywhere ? kExitAbstained : 0;
    }

    if (sw->parsed()) {
      const auto cfg = sweep_flags.resolve();
      const auto values = parse_values(sweep_values);
      const auto points = sweep(cfg, sweep_param, values);
      write_file(std::filesystem::path(cfg.output_dir) / "sweep.csv",
                 sweep_csv(sweep_param, points));
      std::fputs(sweep_csv(sweep_param, points).c_str(), stdout);
      return 0;
    }

    if (rep->parsed()) {
      std::vector<std::string> kinds;
      for (auto f : split_fields(rep_plots)) {
        if (!f.empty()) kinds.emplace_back(f);
      }
      const auto paths = emit_report(rep_dir, rep_out.empty() ? rep_dir : rep_out, kinds, rep_window);
      for (const auto& p : paths) std::printf("%s\n", p.string().c_str());
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return 0;
}
