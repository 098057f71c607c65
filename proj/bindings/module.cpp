#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <string>

#include "transport/analysis.hpp"
#include "transport/config.hpp"
#include "transport/design.hpp"
#include "transport/diagnostics.hpp"
#include "transport/errors.hpp"
#include "transport/glm.hpp"
#include "transport/ingest.hpp"
#include "transport/report.hpp"
#include "transport/simulation.hpp"
#include "transport/version.hpp"

namespace py = pybind11;
using namespace transport;

namespace {

Json parse_json(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

OutcomeKind outcome_from_name(const std::string& name) {
  if (name == "continuous") return OutcomeKind::continuous;
  if (name == "binary") return OutcomeKind::binary;
  throw ConfigError("outcome must be 'continuous' or 'binary'");
}

DesignKind design_from_name(const std::string& name) {
  if (name == "nested") return DesignKind::nested;
  if (name == "non_nested") return DesignKind::non_nested;
  throw ConfigError("design must be 'nested' or 'non_nested'");
}

StudyDataset make_dataset(const Eigen::ArrayXi& s, const Eigen::ArrayXi& arm,
                          const Eigen::ArrayXd& y, const Eigen::MatrixXd& x,
                          const std::vector<std::string>& covariate_names,
                          const std::vector<std::string>& treatment_labels,
                          const std::string& design,
                          const std::string& outcome) {
  StudyDataset data;
  data.s = s;
  data.arm = arm;
  data.y = y;
  data.x = x;
  data.covariate_names = covariate_names;
  data.treatment_labels = treatment_labels;
  data.design_kind = design_from_name(design);
  data.outcome_kind = outcome_from_name(outcome);
  data.validate();
  return data;
}

std::string analyze_json(const StudyDataset& data, const std::string& config) {
  const Json doc = parse_json(config, "config");
  const RunConfig run = parse_run_config(doc);
  const AnalysisConfig analysis = analysis_config(run, data);
  std::optional<BootstrapConfig> boot = run.bootstrap;
  if (boot && boot->threads == 0 && run.threads != 0)
    boot->threads = run.threads;
  const EstimateReport report = transport::analyze(data, analysis, boot);
  return report_to_json(report, doc).dump();
}

py::tuple read_dataset_json(const std::string& path,
                            const std::string& schema_json) {
  Json doc = parse_json(schema_json, "schema");
  doc = Json{{"dataset", doc}};
  doc["dataset"]["path"] = path;
  const RunConfig run = parse_run_config(doc);
  IngestResult result = read_dataset(path, run.schema);
  Json log;
  log["rows_read"] = static_cast<std::int64_t>(result.log.rows_read);
  log["rows_kept"] = static_cast<std::int64_t>(result.log.rows_kept);
  log["rows_dropped"] = static_cast<std::int64_t>(result.log.rows_dropped);
  Json missing = Json::object();
  for (const auto& [column, count] : result.log.missing_by_column)
    missing[column] = static_cast<std::int64_t>(count);
  log["missing_by_column"] = std::move(missing);
  return py::make_tuple(std::move(result.data), log.dump());
}

std::string run_grid_json(const std::string& grid_json, int threads) {
  Json doc = parse_json(grid_json, "grid");
  doc = Json{{"grid", doc}};
  const RunConfig run = parse_run_config(doc);
  RunOptions options;
  options.threads = threads;
  return summary_csv(run_factorial(*run.grid, options));
}

StudyDataset generate_cohort_py(const std::string& scenario_json,
                                std::uint64_t replicate) {
  const Json doc = parse_json(scenario_json, "scenario");
  ScenarioConfig scenario;
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const std::string& key = it.key();
    if (key == "n")
      scenario.n = it->get<int>();
    else if (key == "target_n_trial")
      scenario.target_n_trial = it->get<double>();
    else if (key == "beta") {
      const auto v = it->get<std::array<double, 3>>();
      scenario.beta = Eigen::Vector3d(v[0], v[1], v[2]);
    } else if (key == "theta1") {
      const auto v = it->get<std::array<double, 4>>();
      scenario.theta1 = Eigen::Vector4d(v[0], v[1], v[2], v[3]);
    } else if (key == "theta0") {
      const auto v = it->get<std::array<double, 4>>();
      scenario.theta0 = Eigen::Vector4d(v[0], v[1], v[2], v[3]);
    } else if (key == "replications")
      scenario.replications = it->get<int>();
    else if (key == "outcome")
      scenario.outcome_kind = outcome_from_name(it->get<std::string>());
    else if (key == "error_sd")
      scenario.error_sd = it->get<double>();
    else if (key == "seed")
      scenario.seed = it->get<std::uint64_t>();
    else
      throw ConfigError("unknown scenario key '" + key + "'");
  }
  return generate_cohort(scenario, replicate);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Estimators extending randomized-trial effects to trial "
            "non-participants";
  m.attr("__version__") = kVersion;

  py::register_exception<Error>(m, "TransportError", PyExc_RuntimeError);

  py::class_<StudyDataset>(m, "StudyDataset")
      .def_readonly("s", &StudyDataset::s)
      .def_readonly("arm", &StudyDataset::arm)
      .def_readonly("y", &StudyDataset::y)
      .def_readonly("x", &StudyDataset::x)
      .def_readonly("covariate_names", &StudyDataset::covariate_names)
      .def_readonly("treatment_labels", &StudyDataset::treatment_labels)
      .def_property_readonly("n", &StudyDataset::n)
      .def_property_readonly("n_trial", &StudyDataset::n_trial)
      .def_property_readonly("n_target", &StudyDataset::n_target);

  m.def("make_dataset", &make_dataset, py::arg("s"), py::arg("arm"),
        py::arg("y"), py::arg("x"), py::arg("covariate_names"),
        py::arg("treatment_labels"), py::arg("design") = "nested",
        py::arg("outcome") = "continuous",
        "Builds and validates a dataset from arrays; arm must be -1 and y NaN "
        "for non-participants");

  m.def("analyze_json", &analyze_json, py::arg("data"), py::arg("config"),
        "Runs the full pipeline; config and the returned report are JSON "
        "strings");

  m.def("read_dataset_json", &read_dataset_json, py::arg("path"),
        py::arg("schema"),
        "Reads a CSV; returns (dataset, ingestion log JSON string)");

  m.def("run_grid_json", &run_grid_json, py::arg("grid"),
        py::arg("threads") = 0,
        "Runs a factorial simulation grid; returns the summary CSV");

  m.def("generate_cohort", &generate_cohort_py, py::arg("scenario"),
        py::arg("replicate") = 0,
        "Draws one simulated cohort from a scenario JSON string");

  m.def(
      "choose_knots",
      [](const std::vector<double>& values, int k) {
        return choose_knots(values, k);
      },
      py::arg("values"), py::arg("k"),
      "Quantile-based knot placement for a restricted cubic spline");

  m.def(
      "rcs_basis",
      [](const Eigen::VectorXd& x, const std::vector<double>& knots) {
        return rcs_basis(x, knots);
      },
      py::arg("x"), py::arg("knots"),
      "Restricted cubic spline basis columns at fixed knots");
}
