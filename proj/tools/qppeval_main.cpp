#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qppeval/errors.hpp"
#include "qppeval/report.hpp"
#include "qppeval/version.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::string format;
  std::string tau;
  std::string policy;
  double alpha = -1.0;
  bool bonferroni = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common_flags(CLI::App* cmd, CommonOptions* options, bool config_required) {
  auto* config =
      cmd->add_option("--config", options->config_path, "pipeline config (JSON)");
  if (config_required) config->required();
  cmd->add_option("--out", options->out_dir, "output directory override");
  cmd->add_option("--format", options->format, "report format: csv|markdown|latex");
  cmd->add_option("--seed", options->seed, "sampling seed override")
      ->each([options](const std::string&) { options->seed_set = true; });
  cmd->add_option("--alpha", options->alpha, "significance level override");
  cmd->add_option("--tau", options->tau, "correlation variant: a|b");
  cmd->add_option("--policy", options->policy, "missing-cell policy: strict|intersect");
  cmd->add_flag("--bonferroni", options->bonferroni,
                "apply Bonferroni correction to the significance level");
}

qpp::EvalConfig load_with_overrides(const CommonOptions& options) {
  qpp::EvalConfig config = qpp::load_config(options.config_path);
  if (!options.out_dir.empty()) config.out_dir = options.out_dir;
  if (!options.format.empty()) config.formats = {qpp::parse_format(options.format)};
  if (options.seed_set) config.seed = options.seed;
  if (options.alpha >= 0.0) {
    if (!(options.alpha > 0.0 && options.alpha < 1.0))
      throw qpp::ConfigError("alpha must be in (0, 1)");
    config.alpha = options.alpha;
  }
  if (!options.tau.empty()) {
    if (options.tau == "a")
      config.tau = qpp::TauVariant::A;
    else if (options.tau == "b")
      config.tau = qpp::TauVariant::B;
    else
      throw qpp::ConfigError("tau must be 'a' or 'b'");
  }
  if (!options.policy.empty()) {
    if (options.policy == "strict")
      config.policy = qpp::AssemblePolicy::Strict;
    else if (options.policy == "intersect")
      config.policy = qpp::AssemblePolicy::Intersect;
    else
      throw qpp::ConfigError("policy must be 'strict' or 'intersect'");
  }
  if (options.bonferroni) config.bonferroni = true;
  return config;
}

std::string matrix_csv(const std::vector<std::string>& queries,
                       const std::vector<std::string>& rankers,
                       const std::vector<std::vector<double>>& values) {
  std::string out = "query,ranker,value\n";
  char buffer[64];
  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    for (std::size_t ri = 0; ri < rankers.size(); ++ri) {
      std::snprintf(buffer, sizeof(buffer), "%.6f", values[qi][ri]);
      out += queries[qi] + "," + rankers[ri] + "," + buffer + "\n";
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qpp::ConfigError("cannot write '" + path + "'");
  out << content;
  std::cout << "wrote " << path << "\n";
}

int run_validate(const CommonOptions& options) {
  qpp::EvalConfig config = load_with_overrides(options);
  qpp::PipelineInputs inputs = qpp::load_inputs(config);
  std::cout << "config ok: " << inputs.runs.queries.size() << " queries x "
            << inputs.runs.rankers.size() << " rankers, "
            << config.metrics.size() << " metric(s), " << config.predictors.size()
            << " predictor(s)\n";
  return 0;
}

int run_metrics(const CommonOptions& options) {
  qpp::EvalConfig config = load_with_overrides(options);
  qpp::PipelineInputs inputs = qpp::load_inputs(config);
  auto matrices = qpp::build_all_effectiveness(config, inputs);
  std::filesystem::create_directories(config.out_dir);
  for (const auto& matrix : matrices) {
    std::string name = "effectiveness_" + matrix.metric.label() + ".csv";
    std::replace(name.begin(), name.end(), ':', '-');
    write_file((std::filesystem::path(config.out_dir) / name).string(),
               matrix_csv(matrix.queries, matrix.rankers, matrix.values));
  }
  return 0;
}

int run_predict(const CommonOptions& options) {
  qpp::EvalConfig config = load_with_overrides(options);
  qpp::PipelineInputs inputs = qpp::load_inputs(config);
  auto matrices = qpp::build_all_predictions(config, inputs);
  std::filesystem::create_directories(config.out_dir);
  for (const auto& matrix : matrices) {
    write_file((std::filesystem::path(config.out_dir) /
                ("predictions_" + matrix.predictor_id + ".csv"))
                   .string(),
               matrix_csv(matrix.queries, matrix.rankers, matrix.values));
  }
  return 0;
}

int run_evaluate(const CommonOptions& options) {
  qpp::EvalConfig config = load_with_overrides(options);
  qpp::ReportBundle bundle = qpp::run_pipeline(config);
  for (const auto& path : qpp::write_reports(bundle, config))
    std::cout << "wrote " << path << "\n";
  std::cout << qpp::render_table(bundle, config.formats.front());
  return 0;
}

int run_significance(const CommonOptions& options, const std::string& taus_path) {
  double alpha = options.alpha >= 0.0 ? options.alpha : 0.05;
  if (!(alpha > 0.0 && alpha < 1.0))
    throw qpp::ConfigError("alpha must be in (0, 1)");
  auto vectors = qpp::load_tau_dump(taus_path);
  qpp::SignificanceMatrix matrix =
      qpp::significance_matrix(vectors, alpha, options.bonferroni);
  qpp::Format format =
      options.format.empty() ? qpp::Format::Csv : qpp::parse_format(options.format);
  std::cout << qpp::render_significance(matrix, format);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QPP evaluation toolkit: correlates query performance predictions "
               "with retrieval effectiveness per ranker, per query, and globally"};
  app.set_version_flag("--version", qpp::kVersion);
  app.require_subcommand(1);

  CommonOptions options;
  std::string taus_path;

  auto* validate = app.add_subcommand("validate", "parse and validate all inputs");
  add_common_flags(validate, &options, true);
  auto* metrics = app.add_subcommand("metrics", "dump effectiveness matrices");
  add_common_flags(metrics, &options, true);
  auto* predict = app.add_subcommand("predict", "dump prediction matrices");
  add_common_flags(predict, &options, true);
  auto* evaluate = app.add_subcommand("evaluate", "run the full pipeline");
  add_common_flags(evaluate, &options, true);
  auto* significance =
      app.add_subcommand("significance", "re-run pairwise tests from a tau dump");
  add_common_flags(significance, &options, false);
  significance->add_option("--taus", taus_path, "per-unit tau dump (CSV)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return run_validate(options);
    if (metrics->parsed()) return run_metrics(options);
    if (predict->parsed()) return run_predict(options);
    if (evaluate->parsed()) return run_evaluate(options);
    if (significance->parsed()) return run_significance(options, taus_path);
  } catch (const qpp::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qpp::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const qpp::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
