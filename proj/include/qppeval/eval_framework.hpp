#ifndef QPPEVAL_EVAL_FRAMEWORK_HPP
#define QPPEVAL_EVAL_FRAMEWORK_HPP

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qppeval/ir_metrics.hpp"
#include "qppeval/kendall.hpp"
#include "qppeval/predictors.hpp"

namespace qpp {

// Evaluation of one predictor against one effectiveness matrix along the
// three axes: per-ranker correlation across queries (srmq), per-query
// correlation across rankers (mrsq), and one correlation over all
// query-ranker pairs (mrmq). Units whose correlation is undefined are
// excluded from the means and accounted for in the exclusion lists.
struct EvalResult {
  std::string predictor_id;
  std::vector<std::pair<std::string, TauResult>> srmq_per_ranker;
  TauResult srmq_mean;
  std::vector<std::pair<std::string, TauResult>> mrsq_per_query;
  TauResult mrsq_mean;
  TauResult mrmq_global;
  TauResult f1;
  std::vector<std::pair<std::string, std::string>> excluded_rankers;  // (id, reason)
  std::vector<std::pair<std::string, std::string>> excluded_queries;
};

// Correlation between one ranker's effectiveness column and prediction
// column, across queries.
TauResult srmq_per_ranker(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                          const std::string& ranker_id,
                          TauVariant variant = TauVariant::B);

// Mean of the defined per-ranker correlations; undefined when every column
// is degenerate.
TauResult srmq_mean(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                    TauVariant variant = TauVariant::B);

// Correlation between one query's effectiveness row and prediction row,
// across rankers.
TauResult mrsq_per_query(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                         const std::string& query_id,
                         TauVariant variant = TauVariant::B);

TauResult mrsq_mean(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                    TauVariant variant = TauVariant::B);

// Correlation over the row-major flattening of all n*m cells.
TauResult mrmq_global(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                      TauVariant variant = TauVariant::B);

// Harmonic mean of the two aggregate measures; negative inputs are clamped
// to 0, and 0 when both inputs vanish.
double f1_combination(double p_srmq, double p_mrsq);

// Correlation between two per-predictor measure vectors over a shared
// predictor set.
TauResult cross_measure_correlation(const std::map<std::string, double>& measure_a,
                                    const std::map<std::string, double>& measure_b,
                                    TauVariant variant = TauVariant::B);

// Sample standard deviation of a measure across predictors; a more
// discriminative measure spreads predictors further apart.
double discriminativeness(const std::map<std::string, double>& values);

EvalResult evaluate_predictor(const EffectivenessMatrix& mu,
                              const PredictionMatrix& phi,
                              TauVariant variant = TauVariant::B);

struct CrossMeasureRow {
  std::string measure_a;
  std::string measure_b;
  TauResult tau;
};

struct DiscriminativenessRow {
  std::string measure;
  TauResult stddev;  // undefined when fewer than 2 predictors have the measure
};

struct EvalReport {
  std::vector<EvalResult> results;
  std::vector<CrossMeasureRow> cross_measure;
  std::vector<DiscriminativenessRow> discriminativeness;
};

// Full evaluation of several predictors against one effectiveness matrix,
// plus the cross-measure and discriminativeness analyses over the
// per-predictor measure vectors.
EvalReport evaluate_all(const EffectivenessMatrix& mu,
                        const std::vector<PredictionMatrix>& phis,
                        TauVariant variant = TauVariant::B);

}  // namespace qpp

#endif  // QPPEVAL_EVAL_FRAMEWORK_HPP
