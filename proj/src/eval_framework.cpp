#include "qppeval/eval_framework.hpp"

#include <algorithm>
#include <cmath>

#include "qppeval/errors.hpp"

namespace qpp {

namespace {

void check_axes(const EffectivenessMatrix& mu, const PredictionMatrix& phi) {
  if (mu.queries != phi.queries || mu.rankers != phi.rankers)
    throw ValidationError(
        "effectiveness and prediction matrices do not share axes (predictor '" +
        phi.predictor_id + "')");
}

std::size_t index_of(const std::vector<std::string>& axis, const std::string& id,
                     const char* what) {
  auto it = std::find(axis.begin(), axis.end(), id);
  if (it == axis.end())
    throw ValidationError(std::string("unknown ") + what + " '" + id + "'");
  return static_cast<std::size_t>(it - axis.begin());
}

TauResult column_tau(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                     std::size_t ranker_index, TauVariant variant) {
  std::vector<double> xs, ys;
  xs.reserve(mu.queries.size());
  ys.reserve(mu.queries.size());
  for (std::size_t qi = 0; qi < mu.queries.size(); ++qi) {
    xs.push_back(mu.values[qi][ranker_index]);
    ys.push_back(phi.values[qi][ranker_index]);
  }
  return kendall_tau(xs, ys, variant);
}

TauResult row_tau(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                  std::size_t query_index, TauVariant variant) {
  return kendall_tau(mu.values[query_index], phi.values[query_index], variant);
}

TauResult mean_of_defined(const std::vector<std::pair<std::string, TauResult>>& taus,
                          std::vector<std::pair<std::string, std::string>>* excluded) {
  std::vector<double> values;
  for (const auto& [unit, tau] : taus) {
    if (tau.defined)
      values.push_back(tau.value);
    else if (excluded != nullptr)
      excluded->emplace_back(unit, tau.reason);
  }
  if (values.empty()) return TauResult::undefined("all-degenerate");
  // Value-sorted summation makes the mean independent of the unit order.
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return TauResult::ok(sum / static_cast<double>(values.size()));
}

}  // namespace

TauResult srmq_per_ranker(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                          const std::string& ranker_id, TauVariant variant) {
  check_axes(mu, phi);
  return column_tau(mu, phi, index_of(mu.rankers, ranker_id, "ranker"), variant);
}

TauResult srmq_mean(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                    TauVariant variant) {
  check_axes(mu, phi);
  std::vector<std::pair<std::string, TauResult>> taus;
  for (std::size_t ri = 0; ri < mu.rankers.size(); ++ri)
    taus.emplace_back(mu.rankers[ri], column_tau(mu, phi, ri, variant));
  return mean_of_defined(taus, nullptr);
}

TauResult mrsq_per_query(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                         const std::string& query_id, TauVariant variant) {
  check_axes(mu, phi);
  return row_tau(mu, phi, index_of(mu.queries, query_id, "query"), variant);
}

TauResult mrsq_mean(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                    TauVariant variant) {
  check_axes(mu, phi);
  std::vector<std::pair<std::string, TauResult>> taus;
  for (std::size_t qi = 0; qi < mu.queries.size(); ++qi)
    taus.emplace_back(mu.queries[qi], row_tau(mu, phi, qi, variant));
  return mean_of_defined(taus, nullptr);
}

TauResult mrmq_global(const EffectivenessMatrix& mu, const PredictionMatrix& phi,
                      TauVariant variant) {
  check_axes(mu, phi);
  std::vector<double> xs, ys;
  xs.reserve(mu.queries.size() * mu.rankers.size());
  ys.reserve(xs.capacity());
  for (std::size_t qi = 0; qi < mu.queries.size(); ++qi) {
    for (std::size_t ri = 0; ri < mu.rankers.size(); ++ri) {
      xs.push_back(mu.values[qi][ri]);
      ys.push_back(phi.values[qi][ri]);
    }
  }
  return kendall_tau(xs, ys, variant);
}

double f1_combination(double p_srmq, double p_mrsq) {
  const double a = std::max(0.0, p_srmq);
  const double b = std::max(0.0, p_mrsq);
  if (a + b == 0.0) return 0.0;
  return 2.0 * a * b / (a + b);
}

TauResult cross_measure_correlation(const std::map<std::string, double>& measure_a,
                                    const std::map<std::string, double>& measure_b,
                                    TauVariant variant) {
  if (measure_a.size() != measure_b.size())
    throw ValidationError("cross-measure correlation: key sets differ in size");
  std::vector<double> xs, ys;
  for (const auto& [predictor, value] : measure_a) {
    auto it = measure_b.find(predictor);
    if (it == measure_b.end())
      throw ValidationError("cross-measure correlation: predictor '" + predictor +
                            "' missing from the second measure");
    xs.push_back(value);
    ys.push_back(it->second);
  }
  return kendall_tau(xs, ys, variant);
}

double discriminativeness(const std::map<std::string, double>& values) {
  if (values.size() < 2)
    throw ValidationError("discriminativeness needs at least 2 predictors, got " +
                          std::to_string(values.size()));
  // Centered on the first value so equal measures give an exact zero.
  const double shift = values.begin()->second;
  double mean = 0.0;
  for (const auto& [predictor, value] : values) mean += value - shift;
  mean /= static_cast<double>(values.size());
  double sum_sq = 0.0;
  for (const auto& [predictor, value] : values) {
    const double d = (value - shift) - mean;
    sum_sq += d * d;
  }
  return std::sqrt(sum_sq / static_cast<double>(values.size() - 1));
}

EvalResult evaluate_predictor(const EffectivenessMatrix& mu,
                              const PredictionMatrix& phi, TauVariant variant) {
  check_axes(mu, phi);
  EvalResult result;
  result.predictor_id = phi.predictor_id;
  for (std::size_t ri = 0; ri < mu.rankers.size(); ++ri)
    result.srmq_per_ranker.emplace_back(mu.rankers[ri],
                                        column_tau(mu, phi, ri, variant));
  result.srmq_mean = mean_of_defined(result.srmq_per_ranker, &result.excluded_rankers);
  for (std::size_t qi = 0; qi < mu.queries.size(); ++qi)
    result.mrsq_per_query.emplace_back(mu.queries[qi],
                                       row_tau(mu, phi, qi, variant));
  result.mrsq_mean = mean_of_defined(result.mrsq_per_query, &result.excluded_queries);
  result.mrmq_global = mrmq_global(mu, phi, variant);
  if (result.srmq_mean.defined && result.mrsq_mean.defined)
    result.f1 = TauResult::ok(
        f1_combination(result.srmq_mean.value, result.mrsq_mean.value));
  else
    result.f1 = TauResult::undefined("all-degenerate");
  return result;
}

EvalReport evaluate_all(const EffectivenessMatrix& mu,
                        const std::vector<PredictionMatrix>& phis,
                        TauVariant variant) {
  if (phis.empty()) throw ValidationError("no predictors to evaluate");
  EvalReport report;
  for (const auto& phi : phis)
    report.results.push_back(evaluate_predictor(mu, phi, variant));

  // Measure vectors across predictors, defined entries only.
  std::map<std::string, std::map<std::string, double>> measures;
  for (const auto& result : report.results) {
    if (result.srmq_mean.defined)
      measures["srmq"][result.predictor_id] = result.srmq_mean.value;
    if (result.mrsq_mean.defined)
      measures["mrsq"][result.predictor_id] = result.mrsq_mean.value;
    if (result.mrmq_global.defined)
      measures["mrmq"][result.predictor_id] = result.mrmq_global.value;
    if (result.f1.defined) measures["f1"][result.predictor_id] = result.f1.value;
  }

  const std::vector<std::pair<std::string, std::string>> pairs = {
      {"srmq", "mrsq"}, {"srmq", "mrmq"}, {"mrsq", "mrmq"}, {"f1", "mrmq"}};
  for (const auto& [name_a, name_b] : pairs) {
    CrossMeasureRow row;
    row.measure_a = name_a;
    row.measure_b = name_b;
    // Restrict both sides to predictors defined in each.
    std::map<std::string, double> a, b;
    for (const auto& [predictor, value] : measures[name_a]) {
      auto it = measures[name_b].find(predictor);
      if (it != measures[name_b].end()) {
        a[predictor] = value;
        b[predictor] = it->second;
      }
    }
    if (a.size() < 2)
      row.tau = TauResult::undefined("fewer than 2 predictors defined");
    else
      row.tau = cross_measure_correlation(a, b, variant);
    report.cross_measure.push_back(std::move(row));
  }

  for (const auto& name : {"srmq", "mrsq", "mrmq", "f1"}) {
    DiscriminativenessRow row;
    row.measure = name;
    if (measures[name].size() < 2)
      row.stddev = TauResult::undefined("fewer than 2 predictors defined");
    else
      row.stddev = TauResult::ok(discriminativeness(measures[name]));
    report.discriminativeness.push_back(std::move(row));
  }
  return report;
}

}  // namespace qpp
