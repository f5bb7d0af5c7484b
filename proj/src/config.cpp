#include "stagecp/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "stagecp/baselines.hpp"
#include "stagecp/csv_io.hpp"
#include "stagecp/synth_data.hpp"

namespace stagecp {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw Error(ErrorKind::ConfigError, "key '" + std::string(key) + "': '" + std::string(value) +
                                          "' is not " + std::string(want));
}

double to_double(std::string_view key, std::string_view v) {
  try {
    return parse_double(unquote(v));
  } catch (const Error&) {
    bad_value(key, v, "a number");
  }
}

template <class Int>
Int to_int(std::string_view key, std::string_view v) {
  v = unquote(v);
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || ptr != v.data() + v.size()) {
    bad_value(key, v, "an integer");
  }
  return out;
}

std::vector<std::string> to_list(std::string_view v) {
  v = trim(v);
  if (!v.empty() && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  for (auto item : split_fields(v)) {
    item = unquote(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ',';
    out += items[i];
  }
  return out;
}

template <class Field>
ConfigKey real_key(std::string name, std::string help, Field field) {
  return {name, std::move(help),
          [name, field](ExperimentConfig& c, std::string_view v) { c.*field = to_double(name, v); },
          [field](const ExperimentConfig& c) { return format_double(c.*field); }};
}

template <class Int, class Field>
ConfigKey int_key(std::string name, std::string help, Field field) {
  return {name, std::move(help),
          [name, field](ExperimentConfig& c, std::string_view v) { c.*field = to_int<Int>(name, v); },
          [field](const ExperimentConfig& c) { return std::to_string(c.*field); }};
}

ConfigKey string_key(std::string name, std::string help, std::string ExperimentConfig::*field) {
  return {name, std::move(help),
          [field](ExperimentConfig& c, std::string_view v) { c.*field = std::string(unquote(v)); },
          [field](const ExperimentConfig& c) { return c.*field; }};
}

std::vector<ConfigKey> build_keys() {
  using C = ExperimentConfig;
  std::vector<ConfigKey> keys;
  keys.push_back(string_key("scenario", "synthetic scenario tag", &C::scenario));
  keys.push_back(string_key("input", "CSV input path (overrides scenario)", &C::input));
  keys.push_back(string_key("schema", "RAW_TRIPLETS or PRECOMPUTED", &C::schema));
  keys.push_back({"protocol", "split or online",
                  [](C& c, std::string_view v) {
                    v = unquote(v);
                    if (v == "split") c.protocol = Protocol::Split;
                    else if (v == "online") c.protocol = Protocol::Online;
                    else bad_value("protocol", v, "split or online");
                  },
                  [](const C& c) { return std::string(to_string(c.protocol)); }});
  keys.push_back({"methods", "comma-separated method tags",
                  [](C& c, std::string_view v) { c.methods = to_list(v); },
                  [](const C& c) { return join(c.methods); }});
  keys.push_back(real_key("alpha", "target miscoverage", &C::alpha));
  keys.push_back(real_key("delta", "FWER level", &C::delta));
  keys.push_back(real_key("tau", "risk tolerance", &C::tau));
  keys.push_back(real_key("gamma", "miscoverage step size", &C::gamma));
  keys.push_back(real_key("eta", "quantile-level step size", &C::eta));
  keys.push_back(int_key<std::size_t>("k", "sliding window length", &C::k));
  keys.push_back(real_key("c", "upstream quantile level", &C::c));
  keys.push_back(real_key("d", "downstream quantile level", &C::d));
  keys.push_back(real_key("conf_ratio", "share of the window used as conformal set",
                          &C::conf_ratio));
  keys.push_back({"fwer", "fixed_sequence or bonferroni",
                  [](C& c, std::string_view v) {
                    v = unquote(v);
                    if (v == "fixed_sequence") c.fwer = FwerMethod::FixedSequence;
                    else if (v == "bonferroni") c.fwer = FwerMethod::Bonferroni;
                    else bad_value("fwer", v, "fixed_sequence or bonferroni");
                  },
                  [](const C& c) { return std::string(to_string(c.fwer)); }});
  keys.push_back({"selection", "pair choice after a cover in the online loop: coverage or sticky",
                  [](C& c, std::string_view v) {
                    v = unquote(v);
                    if (v == "coverage") c.selection = SelectionMode::Coverage;
                    else if (v == "sticky") c.selection = SelectionMode::Sticky;
                    else bad_value("selection", v, "coverage or sticky");
                  },
                  [](const C& c) {
                    return std::string(c.selection == SelectionMode::Coverage ? "coverage"
                                                                              : "sticky");
                  }});
  keys.push_back(int_key<int>("grid_steps", "lambda grid resolution per axis", &C::grid_steps));
  keys.push_back(int_key<std::size_t>("repetitions", "number of seeds", &C::repetitions));
  keys.push_back(int_key<std::uint64_t>("seed", "base seed", &C::seed));
  keys.push_back({"policy", "abstention scoring: reporting or algorithmic",
                  [](C& c, std::string_view v) {
                    v = unquote(v);
                    if (v == "reporting") c.policy = AbstentionPolicy::Reporting;
                    else if (v == "algorithmic") c.policy = AbstentionPolicy::Algorithmic;
                    else bad_value("policy", v, "reporting or algorithmic");
                  },
                  [](const C& c) { return std::string(to_string(c.policy)); }});
  keys.push_back(string_key("output_dir", "directory for result files", &C::output_dir));
  keys.push_back(int_key<std::size_t>("threads", "worker threads (0 = auto)", &C::threads));
  keys.push_back(int_key<std::size_t>("n_train", "training points", &C::n_train));
  keys.push_back(int_key<std::size_t>("n_conf", "conformal points (split)", &C::n_conf));
  keys.push_back(int_key<std::size_t>("n_cal", "calibration points (split)", &C::n_cal));
  keys.push_back(int_key<std::size_t>("n_test", "test points", &C::n_test));
  keys.push_back(int_key<std::int64_t>("shift_start", "shift onset relative to the first test point",
                                       &C::shift_start));
  keys.push_back(real_key("rate", "noise growth per step (negative: scenario default)", &C::rate));
  keys.push_back(real_key("noise_std", "noise scale (negative: scenario default)", &C::noise_std));
  keys.push_back(real_key("w_std", "input scale (negative: scenario default)", &C::w_std));
  keys.push_back(int_key<std::int64_t>("phase_length", "phase length (negative: default)",
                                       &C::phase_length));
  keys.push_back(real_key("wsc_decay", "WSC age decay", &C::wsc_decay));
  keys.push_back(real_key("pid_ki", "PID integral gain", &C::pid_ki));
  keys.push_back(real_key("ocid_gamma0", "OCID initial step", &C::ocid_gamma0));
  keys.push_back(int_key<std::size_t>("sliding_window", "window for sliding coverage",
                                      &C::sliding_window));
  keys.push_back(int_key<std::size_t>("record_rep", "repetition written to per-step files",
                                      &C::record_rep));
  return keys;
}

}  // namespace

std::string_view to_string(Protocol p) { return p == Protocol::Split ? "split" : "online"; }

std::string_view to_string(AbstentionPolicy p) {
  return p == AbstentionPolicy::Reporting ? "reporting" : "algorithmic";
}

std::string_view to_string(FwerMethod m) {
  return m == FwerMethod::FixedSequence ? "fixed_sequence" : "bonferroni";
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      return;
    }
  }
  throw Error(ErrorKind::ConfigError, "unknown key '" + std::string(key) + "'");
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    // Strip comments outside quotes.
    bool quoted = false;
    for (std::size_t i = 0; i < view.size(); ++i) {
      if (view[i] == '"') quoted = !quoted;
      if (view[i] == '#' && !quoted) {
        view = view.substr(0, i);
        break;
      }
    }
    view = trim(view);
    if (view.empty() || view.front() == '[') continue;  // blank or table header
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ConfigError,
                  "line " + std::to_string(line_no) + ": expected key = value");
    }
    set_config_value(base, trim(view.substr(0, eq)), trim(view.substr(eq + 1)));
  }
  return base;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

void validate_config(const ExperimentConfig& c) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) fail("alpha must lie in (0, 1)");
  if (!(c.delta > 0.0 && c.delta < 1.0)) fail("delta must lie in (0, 1)");
  if (!(c.tau >= 0.0 && c.alpha + c.tau < 1.0)) fail("tau must be >= 0 with alpha + tau < 1");
  if (!(c.gamma >= 0.0) || !(c.eta >= 0.0)) fail("step sizes must be non-negative");
  if (!(c.c >= 0.0 && c.c <= 1.0) || !(c.d >= 0.0 && c.d <= 1.0)) fail("c and d must lie in [0, 1]");
  if (!(c.conf_ratio > 0.0 && c.conf_ratio < 1.0)) fail("conf_ratio must lie in (0, 1)");
  if (c.repetitions < 1) fail("repetitions must be at least 1");
  if (c.grid_steps < 1) fail("grid_steps must be at least 1");
  if (c.k < 2) fail("k must be at least 2");
  if (c.n_test < 1) fail("n_test must be at least 1");
  if (c.sliding_window < 1) fail("sliding_window must be at least 1");
  if (c.methods.empty()) fail("no methods requested");
  if (c.record_rep >= c.repetitions) fail("record_rep must be below repetitions");
  if (!(c.wsc_decay > 0.0 && c.wsc_decay <= 1.0)) fail("wsc_decay must lie in (0, 1]");
  if (c.input.empty() && !parse_scenario(c.scenario)) fail("unknown scenario '" + c.scenario + "'");
  if (!c.input.empty() && !parse_schema(c.schema)) fail("unknown schema '" + c.schema + "'");
  for (const auto& m : c.methods) {
    const bool adaptive_family = m == "SR";
    const bool split_only = m == "SR_CD" || m == "SR_SIGNED";
    const bool baseline = parse_baseline(m).has_value();
    if (!adaptive_family && !split_only && !baseline) fail("unknown method '" + m + "'");
    if (c.protocol == Protocol::Online && split_only) {
      fail("method '" + m + "' is only available with protocol=split");
    }
    if (c.protocol == Protocol::Split && baseline && m != "SC" && m != "WSC") {
      fail("method '" + m + "' is only available with protocol=online");
    }
  }
}

std::string dump_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + k.get(cfg) + "\n";
  return out;
}

}  // namespace stagecp
