#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "qppeval/errors.hpp"
#include "qppeval/eval_framework.hpp"
#include "qppeval/kendall.hpp"
#include "qppeval/predictors.hpp"
#include "qppeval/report.hpp"
#include "qppeval/significance.hpp"
#include "qppeval/version.hpp"

namespace py = pybind11;

namespace {

qpp::NormMode parse_norm(const std::string& norm) {
  if (norm == "none") return qpp::NormMode::None;
  if (norm == "mean_abs") return qpp::NormMode::MeanAbs;
  if (norm == "provided") return qpp::NormMode::Provided;
  throw qpp::ConfigError("unknown norm '" + norm + "'");
}

qpp::ScoreList make_scores(const std::vector<double>& scores) {
  return qpp::ScoreList{scores, scores};
}

py::object tau_to_py(const qpp::TauResult& tau) {
  if (!tau.defined) return py::none();
  return py::float_(tau.value);
}

py::list main_table_to_py(const qpp::ReportBundle& bundle) {
  py::list rows;
  for (const auto& row : bundle.main_table) {
    py::dict d;
    d["predictor"] = row.predictor;
    d["metric"] = row.metric;
    d["srmq"] = tau_to_py(row.srmq);
    d["mrsq"] = tau_to_py(row.mrsq);
    d["mrmq"] = tau_to_py(row.mrmq);
    d["f1"] = tau_to_py(row.f1);
    rows.append(d);
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_qppeval, m) {
  m.doc() = "Query performance prediction evaluation toolkit";
  m.attr("__version__") = qpp::kVersion;

  py::register_exception<qpp::ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<qpp::ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<qpp::ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def(
      "kendall_tau_b",
      [](const std::vector<double>& xs, const std::vector<double>& ys) {
        return tau_to_py(qpp::kendall_tau_b(xs, ys));
      },
      py::arg("xs"), py::arg("ys"),
      "Kendall tau-b over a paired sample; None when one side is fully tied.");

  m.def(
      "nqc",
      [](const std::vector<double>& scores, std::optional<int> k,
         const std::string& norm) {
        return qpp::nqc(make_scores(scores), k, parse_norm(norm));
      },
      py::arg("scores"), py::arg("k") = std::nullopt, py::arg("norm") = "none");

  m.def(
      "wig",
      [](const std::vector<double>& scores, std::optional<int> k,
         double collection_score, std::optional<int> query_len) {
        return qpp::wig(make_scores(scores), k, collection_score, query_len);
      },
      py::arg("scores"), py::arg("k") = std::nullopt,
      py::arg("collection_score") = 0.0, py::arg("query_len") = std::nullopt);

  m.def(
      "sigma_max",
      [](const std::vector<double>& scores) { return qpp::sigma_max(scores); },
      py::arg("scores"));

  m.def(
      "n_sigma_frac",
      [](const std::vector<double>& scores, double x) {
        return qpp::n_sigma_frac(scores, x);
      },
      py::arg("scores"), py::arg("x") = 0.5);

  m.def(
      "smv",
      [](const std::vector<double>& scores, std::optional<int> k,
         const std::string& norm, bool shift) {
        return qpp::smv(make_scores(scores), k, parse_norm(norm), std::nullopt,
                        shift);
      },
      py::arg("scores"), py::arg("k") = std::nullopt, py::arg("norm") = "none",
      py::arg("shift") = false);

  m.def(
      "scnqc",
      [](const std::vector<double>& scores, std::optional<int> k, double alpha,
         double beta, double gamma, const std::string& norm) {
        return qpp::scnqc(make_scores(scores), k, alpha, beta, gamma, {},
                          parse_norm(norm));
      },
      py::arg("scores"), py::arg("k") = std::nullopt, py::arg("alpha") = 1.0,
      py::arg("beta") = 2.0, py::arg("gamma") = 0.0, py::arg("norm") = "none");

  m.def(
      "rsd",
      [](const std::vector<double>& scores, std::optional<int> k,
         const std::string& norm, int samples, int sub, std::uint64_t seed,
         bool exhaustive) {
        return qpp::rsd(make_scores(scores), k, parse_norm(norm), samples, sub, seed,
                        exhaustive);
      },
      py::arg("scores"), py::arg("k") = std::nullopt, py::arg("norm") = "none",
      py::arg("samples") = 30, py::arg("sub") = 2, py::arg("seed") = 0,
      py::arg("exhaustive") = false);

  m.def("f1_combination", &qpp::f1_combination, py::arg("p_srmq"), py::arg("p_mrsq"));

  m.def("student_t_cdf", &qpp::student_t_cdf, py::arg("t"), py::arg("df"));

  py::class_<qpp::TTestResult>(m, "TTestResult")
      .def_readonly("t_stat", &qpp::TTestResult::t_stat)
      .def_readonly("df", &qpp::TTestResult::df)
      .def_readonly("p_value", &qpp::TTestResult::p_value)
      .def_readonly("mean_diff", &qpp::TTestResult::mean_diff)
      .def("__repr__", [](const qpp::TTestResult& r) {
        return "TTestResult(t_stat=" + std::to_string(r.t_stat) +
               ", df=" + std::to_string(r.df) +
               ", p_value=" + std::to_string(r.p_value) + ")";
      });

  m.def(
      "paired_t_test",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return qpp::paired_t_test(a, b);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "evaluate_files",
      [](const std::string& config_path) {
        return main_table_to_py(qpp::run_pipeline(qpp::load_config(config_path)));
      },
      py::arg("config_path"),
      "Run the full pipeline for a JSON config; returns the main table rows.");

  m.def(
      "render_main_table",
      [](const std::string& config_path, const std::string& format) {
        qpp::EvalConfig config = qpp::load_config(config_path);
        return qpp::render_table(qpp::run_pipeline(config),
                                 qpp::parse_format(format));
      },
      py::arg("config_path"), py::arg("format") = "csv");
}
