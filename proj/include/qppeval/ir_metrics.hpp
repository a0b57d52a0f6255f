#ifndef QPPEVAL_IR_METRICS_HPP
#define QPPEVAL_IR_METRICS_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "qppeval/trec_io.hpp"

namespace qpp {

enum class MetricKind { AP, NDCG };

// Target effectiveness measure. Spec string grammar: "ap@50", "ndcg@10",
// with an optional ":rel=N" suffix setting the AP binary-relevance
// threshold (default 2).
struct MetricSpec {
  MetricKind kind = MetricKind::AP;
  int cutoff = 10;
  int rel_threshold = 2;

  static MetricSpec parse(const std::string& text);
  std::string label() const;
};

// Average precision at cutoff k, trec_eval map_cut convention: the
// denominator is the number of judged docs with grade >= rel_threshold,
// regardless of the cutoff. Returns 0 when the query has no relevant docs.
double average_precision_at_k(const RankedList& list, const JudgmentSet& judgments,
                              int k, int rel_threshold);

// nDCG at cutoff k with linear gain and log2(rank + 1) discount, trec_eval
// ndcg_cut convention: the ideal ranking is built from all judged docs of
// the query, truncated at k. Returns 0 when the ideal DCG is 0.
double ndcg_at_k(const RankedList& list, const JudgmentSet& judgments, int k);

double evaluate_metric(const RankedList& list, const JudgmentSet& judgments,
                       const MetricSpec& metric);

struct EffectivenessMatrix {
  std::vector<std::string> queries;
  std::vector<std::string> rankers;
  std::vector<std::vector<double>> values;  // queries x rankers, in [0, 1]
  MetricSpec metric;

  double at(std::size_t query_index, std::size_t ranker_index) const {
    return values[query_index][ranker_index];
  }
};

// Evaluates the metric on every (query, ranker) cell. Queries with no
// relevant (AP) or no judged (nDCG) documents score 0 and are tallied in
// *zero_relevant_queries when given.
EffectivenessMatrix effectiveness_matrix(const RunMatrix& runs,
                                         const JudgmentSet& judgments,
                                         const MetricSpec& metric,
                                         std::size_t* zero_relevant_queries = nullptr);

}  // namespace qpp

#endif  // QPPEVAL_IR_METRICS_HPP
