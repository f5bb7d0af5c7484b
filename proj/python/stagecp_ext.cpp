#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stagecp/adaptive.hpp"
#include "stagecp/baselines.hpp"
#include "stagecp/config.hpp"
#include "stagecp/experiment.hpp"
#include "stagecp/intervals.hpp"
#include "stagecp/quantiles.hpp"
#include "stagecp/residuals.hpp"
#include "stagecp/risk_control.hpp"
#include "stagecp/synth_data.hpp"

namespace py = pybind11;
using namespace stagecp;

namespace {

ScenarioKind scenario_or_throw(const std::string& name) {
  const auto kind = parse_scenario(name);
  if (!kind) throw Error(ErrorKind::ConfigError, "unknown scenario '" + name + "'");
  return *kind;
}

py::dict summary_dict(const MethodSummary& s) {
  py::dict d;
  d["method"] = s.method;
  d["coverage"] = s.coverage_mean;
  d["coverage_std"] = s.coverage_std;
  d["coverage_algorithmic"] = s.coverage_algorithmic_mean;
  d["coverage_reporting"] = s.coverage_reporting_mean;
  d["width"] = s.width_mean;
  d["width_std"] = s.width_std;
  d["abstained_steps"] = s.abstained_steps;
  d["abstained_reps"] = s.abstained_reps;
  return d;
}

}  // namespace

PYBIND11_MODULE(_stagecp, m) {
  m.doc() = "Stage-wise conformal prediction for two-stage pipelines";

  static py::exception<Error> py_error(m, "StagecpError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(py_error, e.what());
    }
  });

  py::class_<StageOutputs>(m, "StageOutputs")
      .def(py::init([](double y, double mu2_x, double mu2_xhat, std::int64_t t) {
             return StageOutputs{t, y, mu2_x, mu2_xhat};
           }),
           py::arg("y"), py::arg("mu2_x"), py::arg("mu2_xhat"), py::arg("t") = 0)
      .def_readwrite("t", &StageOutputs::t)
      .def_readwrite("y", &StageOutputs::y)
      .def_readwrite("mu2_x", &StageOutputs::mu2_x)
      .def_readwrite("mu2_xhat", &StageOutputs::mu2_xhat);

  py::class_<ResidualComponents>(m, "ResidualComponents")
      .def_readonly("r_total", &ResidualComponents::r_total)
      .def_readonly("delta_r1", &ResidualComponents::delta_r1)
      .def_readonly("r2", &ResidualComponents::r2);

  m.def("decompose", py::overload_cast<const StageOutputs&>(&decompose), py::arg("outputs"));

  m.def(
      "conformal_quantile",
      [](const std::vector<double>& scores, double level) {
        return conformal_quantile(scores, level);
      },
      py::arg("scores"), py::arg("level"));
  m.def(
      "weighted_quantile",
      [](const std::vector<double>& scores, const std::vector<double>& weights, double level) {
        return weighted_quantile(scores, weights, level);
      },
      py::arg("scores"), py::arg("weights"), py::arg("level"));

  py::enum_<IntervalKind>(m, "IntervalKind")
      .value("Finite", IntervalKind::Finite)
      .value("Abstained", IntervalKind::Abstained)
      .value("Empty", IntervalKind::Empty);

  py::class_<PredictionInterval>(m, "PredictionInterval")
      .def_readonly("kind", &PredictionInterval::kind)
      .def_readonly("center", &PredictionInterval::center)
      .def_readonly("lo", &PredictionInterval::lo)
      .def_readonly("hi", &PredictionInterval::hi)
      .def_property_readonly("width", &PredictionInterval::width)
      .def_property_readonly("abstained", &PredictionInterval::is_abstained)
      .def("covers", [](const PredictionInterval& iv, double y) { return covers(iv, y); });

  auto scores_from = [](const std::vector<StageOutputs>& conf) {
    return component_scores(std::span<const StageOutputs>(conf));
  };

  m.def(
      "interval_split_conformal",
      [scores_from](const std::vector<StageOutputs>& conf, double alpha, double center) {
        return interval_split_conformal(scores_from(conf).total, alpha, center);
      },
      py::arg("conf"), py::arg("alpha"), py::arg("center"));
  m.def(
      "interval_unified",
      [scores_from](const std::vector<StageOutputs>& conf, double a, double b, double c, double d,
                    double center) {
        return interval_unified(scores_from(conf), ScalingConfig{a, b, c, d, 0.1}, center);
      },
      py::arg("conf"), py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"),
      py::arg("center"));

  m.def("binomial_p_value", &binomial_p_value, py::arg("l"), py::arg("alpha"), py::arg("tau"),
        py::arg("risk_hat"));

  m.def(
      "calibrate",
      [scores_from](const std::vector<StageOutputs>& conf, const std::vector<StageOutputs>& cal,
                    double c, double d, double alpha, double delta, double tau) {
        const auto q = component_thresholds(scores_from(conf), c, d);
        const auto grid = default_lambda_grid();
        const auto verdict = calibrate(scores_from(cal), q, grid, {alpha, delta, tau});
        std::vector<std::pair<double, double>> out;
        for (const auto& l : verdict.lambda_val) out.emplace_back(l.a, l.b);
        return out;
      },
      py::arg("conf"), py::arg("cal"), py::arg("c") = 0.05, py::arg("d") = 0.05,
      py::arg("alpha") = 0.1, py::arg("delta") = 0.1, py::arg("tau") = 0.0,
      "Accepted (a, b) pairs in testing order; empty means abstain.");

  m.def(
      "generate",
      [](const std::string& scenario, std::size_t length, std::uint64_t seed) {
        auto spec = default_scenario(scenario_or_throw(scenario));
        spec.length = length;
        spec.shift_start = std::min(spec.shift_start, length);
        spec.seed = Seed{seed};
        py::list rows;
        for (const auto& p : generate(spec)) {
          rows.append(py::make_tuple(p.w.at(0), p.x.at(0), p.y));
        }
        return rows;
      },
      py::arg("scenario") = "IID_LINEAR", py::arg("length") = 3000, py::arg("seed") = 0,
      "List of (w, x, y) tuples for a scalar synthetic scenario.");

  m.def(
      "run_experiment",
      [](const std::map<std::string, std::string>& overrides) {
        ExperimentConfig cfg;
        for (const auto& [key, value] : overrides) set_config_value(cfg, key, value);
        validate_config(cfg);
        const auto result = run_experiment(cfg);
        py::list out;
        for (const auto& s : result.summaries) out.append(summary_dict(s));
        return out;
      },
      py::arg("overrides") = std::map<std::string, std::string>{},
      "Runs an experiment from string key/value overrides; returns per-method summaries.");
}
