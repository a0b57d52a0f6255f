#ifndef QPPEVAL_REPORT_HPP
#define QPPEVAL_REPORT_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qppeval/eval_framework.hpp"
#include "qppeval/ir_metrics.hpp"
#include "qppeval/predictors.hpp"
#include "qppeval/significance.hpp"
#include "qppeval/trec_io.hpp"

namespace qpp {

enum class Format { Csv, Markdown, Latex };

Format parse_format(const std::string& text);
std::string format_extension(Format format);

// Pipeline configuration, loaded from a single JSON document. Relative
// paths resolve against the config file's directory; unknown keys are
// rejected.
struct EvalConfig {
  std::map<std::string, std::string> runs;  // ranker_id -> run file path
  std::string qrels;
  std::vector<MetricSpec> metrics;
  std::vector<PredictorSpec> predictors;
  std::optional<std::string> embeddings;
  std::optional<std::string> query_meta;
  std::optional<std::string> collection_scores;
  AssemblePolicy policy = AssemblePolicy::Strict;
  TauVariant tau = TauVariant::B;
  double alpha = 0.05;
  bool bonferroni = false;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  std::vector<Format> formats = {Format::Csv};

  std::uint64_t config_hash = 0;  // FNV-1a over the raw config bytes
};

EvalConfig load_config(const std::string& path);

struct PipelineInputs {
  RunMatrix runs;
  JudgmentSet judgments;
  std::optional<EmbeddingTable> embeddings;
  std::optional<QueryMetaTable> query_meta;
  std::optional<CollectionScores> collection_scores;
  std::map<std::string, ExternalPredictions> external;  // keyed by predictor name
};

// Parses and validates every input named by the config.
PipelineInputs load_inputs(const EvalConfig& config);

std::vector<EffectivenessMatrix> build_all_effectiveness(
    const EvalConfig& config, const PipelineInputs& inputs,
    std::vector<std::size_t>* zero_relevant_counts = nullptr);

std::vector<PredictionMatrix> build_all_predictions(const EvalConfig& config,
                                                    const PipelineInputs& inputs);

// Everything the reports render, traceable back to EvalResult fields.
struct ReportBundle {
  struct MainRow {
    std::string predictor;
    std::string metric;
    TauResult srmq, mrsq, mrmq, f1;
  };
  struct CrossRow {
    std::string metric, measure_a, measure_b;
    TauResult tau;
  };
  struct DiscrimRow {
    std::string metric, measure;
    TauResult stddev;
  };
  struct TauRow {
    std::string metric, predictor, unit;
    TauResult tau;
  };
  struct MetricStats {
    std::string metric;
    std::size_t zero_relevant_queries = 0;
  };

  std::vector<MainRow> main_table;
  std::vector<std::pair<std::string, SignificanceMatrix>> srmq_significance;
  std::vector<std::pair<std::string, SignificanceMatrix>> mrsq_significance;
  std::vector<CrossRow> cross_measure;
  std::vector<DiscrimRow> discriminativeness;
  std::vector<TauRow> srmq_taus;  // per-ranker correlations, one row per unit
  std::vector<TauRow> mrsq_taus;  // per-query correlations
  std::vector<MetricStats> metric_stats;

  std::string tool_version;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

// parse -> validate -> effectiveness -> predictions -> evaluation ->
// significance, deterministic for a fixed config and seed.
ReportBundle run_pipeline(const EvalConfig& config);

// Main table: one row per (predictor, metric) with the three measures and
// their F1 combination, 4 decimal places, undefined cells as "n/a(reason)".
std::string render_table(const ReportBundle& bundle, Format format);

// Upper-triangular pairwise grid: ">" row better, "<" column better, "="
// tie, "*" suffix when significant. The CSV form is long:
// "a,b,direction,p,significant".
std::string render_significance(const SignificanceMatrix& matrix, Format format);

std::string render_cross_measure(const ReportBundle& bundle, Format format);
std::string render_discriminativeness(const ReportBundle& bundle, Format format);
std::string render_tau_dump(const std::vector<ReportBundle::TauRow>& rows,
                            const std::string& metric);
std::string render_provenance(const ReportBundle& bundle);

// Writes every report file into config.out_dir (created when missing) and
// returns the written paths.
std::vector<std::string> write_reports(const ReportBundle& bundle,
                                       const EvalConfig& config);

// Reads a per-unit correlation dump (as written next to the reports) back
// into predictor vectors sharing one unit axis.
std::vector<std::pair<std::string, std::vector<TauResult>>> load_tau_dump(
    const std::string& path);

// "%.4f" rendering used across reports; undefined values render as
// "n/a(reason)".
std::string format_value(const TauResult& value);

std::uint64_t fnv1a_hash(const std::string& bytes);

}  // namespace qpp

#endif  // QPPEVAL_REPORT_HPP
