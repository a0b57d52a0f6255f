#include "qppeval/ir_metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "qppeval/errors.hpp"
#include "qppeval/log.hpp"

namespace qpp {

namespace {

int parse_positive_int(const std::string& token, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value < 1)
    throw ConfigError("metric spec: " + what + " must be a positive integer, got '" +
                      token + "'");
  return value;
}

}  // namespace

MetricSpec MetricSpec::parse(const std::string& text) {
  MetricSpec spec;
  std::string body = text;
  std::size_t colon = body.find(':');
  std::string suffix;
  if (colon != std::string::npos) {
    suffix = body.substr(colon + 1);
    body = body.substr(0, colon);
  }
  std::size_t at = body.find('@');
  if (at == std::string::npos)
    throw ConfigError("metric spec '" + text + "': expected '<kind>@<cutoff>'");
  std::string kind = body.substr(0, at);
  if (kind == "ap")
    spec.kind = MetricKind::AP;
  else if (kind == "ndcg")
    spec.kind = MetricKind::NDCG;
  else
    throw ConfigError("metric spec '" + text + "': unknown metric kind '" + kind +
                      "' (expected ap or ndcg)");
  spec.cutoff = parse_positive_int(body.substr(at + 1), "cutoff");
  if (!suffix.empty()) {
    if (suffix.rfind("rel=", 0) != 0)
      throw ConfigError("metric spec '" + text + "': unknown option '" + suffix + "'");
    if (spec.kind != MetricKind::AP)
      throw ConfigError("metric spec '" + text + "': rel= applies to ap only");
    spec.rel_threshold = parse_positive_int(suffix.substr(4), "rel threshold");
  }
  return spec;
}

std::string MetricSpec::label() const {
  std::string out = kind == MetricKind::AP ? "ap" : "ndcg";
  out += "@" + std::to_string(cutoff);
  if (kind == MetricKind::AP && rel_threshold != 2)
    out += ":rel=" + std::to_string(rel_threshold);
  return out;
}

double average_precision_at_k(const RankedList& list, const JudgmentSet& judgments,
                              int k, int rel_threshold) {
  const auto* judged = judgments.judged(list.query_id);
  std::size_t total_relevant = 0;
  if (judged != nullptr)
    for (const auto& [doc, grade] : *judged)
      if (grade >= rel_threshold) ++total_relevant;
  if (total_relevant == 0) return 0.0;

  const std::size_t depth =
      std::min<std::size_t>(list.entries.size(), static_cast<std::size_t>(k));
  std::size_t relevant_seen = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < depth; ++i) {
    if (judgments.grade(list.query_id, list.entries[i].doc_id) >= rel_threshold) {
      ++relevant_seen;
      sum += static_cast<double>(relevant_seen) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(total_relevant);
}

double ndcg_at_k(const RankedList& list, const JudgmentSet& judgments, int k) {
  const auto* judged = judgments.judged(list.query_id);
  if (judged == nullptr || judged->empty()) {
    log::debug("ndcg: query '" + list.query_id + "' has no judged documents");
    return 0.0;
  }
  std::vector<int> grades;
  grades.reserve(judged->size());
  for (const auto& [doc, grade] : *judged) grades.push_back(grade);
  std::sort(grades.begin(), grades.end(), std::greater<int>());

  double ideal = 0.0;
  const std::size_t ideal_depth =
      std::min<std::size_t>(grades.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < ideal_depth; ++i)
    ideal += static_cast<double>(grades[i]) / std::log2(static_cast<double>(i + 2));
  if (ideal == 0.0) return 0.0;

  double dcg = 0.0;
  const std::size_t depth =
      std::min<std::size_t>(list.entries.size(), static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < depth; ++i) {
    int grade = judgments.grade(list.query_id, list.entries[i].doc_id);
    dcg += static_cast<double>(grade) / std::log2(static_cast<double>(i + 2));
  }
  return dcg / ideal;
}

double evaluate_metric(const RankedList& list, const JudgmentSet& judgments,
                       const MetricSpec& metric) {
  if (metric.kind == MetricKind::AP)
    return average_precision_at_k(list, judgments, metric.cutoff,
                                  metric.rel_threshold);
  return ndcg_at_k(list, judgments, metric.cutoff);
}

EffectivenessMatrix effectiveness_matrix(const RunMatrix& runs,
                                         const JudgmentSet& judgments,
                                         const MetricSpec& metric,
                                         std::size_t* zero_relevant_queries) {
  EffectivenessMatrix matrix;
  matrix.queries = runs.queries;
  matrix.rankers = runs.rankers;
  matrix.metric = metric;
  matrix.values.assign(runs.queries.size(),
                       std::vector<double>(runs.rankers.size(), 0.0));

  std::size_t zero_relevant = 0;
  for (std::size_t qi = 0; qi < runs.queries.size(); ++qi) {
    const auto* judged = judgments.judged(runs.queries[qi]);
    bool has_signal = false;
    if (judged != nullptr) {
      for (const auto& [doc, grade] : *judged) {
        if (metric.kind == MetricKind::AP ? grade >= metric.rel_threshold
                                          : grade > 0) {
          has_signal = true;
          break;
        }
      }
    }
    if (!has_signal) {
      ++zero_relevant;
      log::debug("effectiveness: query '" + runs.queries[qi] +
                 "' has no relevant documents for " + metric.label());
    }
    for (std::size_t ri = 0; ri < runs.rankers.size(); ++ri)
      matrix.values[qi][ri] =
          evaluate_metric(runs.at(runs.queries[qi], runs.rankers[ri]), judgments,
                          metric);
  }
  if (zero_relevant_queries != nullptr) *zero_relevant_queries = zero_relevant;
  return matrix;
}

}  // namespace qpp
