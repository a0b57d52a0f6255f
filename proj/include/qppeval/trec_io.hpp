#ifndef QPPEVAL_TREC_IO_HPP
#define QPPEVAL_TREC_IO_HPP

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace qpp {

// One line of a TREC run file after normalization. The rank column of the
// input is advisory; entries are re-sorted by descending score (doc_id
// ascending on ties) and ranks renumbered 1..len.
struct RunEntry {
  std::string query_id;
  std::string doc_id;
  int rank = 0;
  double score = 0.0;
  std::string tag;

  friend bool operator==(const RunEntry&, const RunEntry&) = default;
};

struct RankedList {
  std::string query_id;
  std::string ranker_id;
  std::vector<RunEntry> entries;

  std::vector<double> scores() const;

  friend bool operator==(const RankedList&, const RankedList&) = default;
};

enum class AssemblePolicy { Strict, Intersect };

// The (query x ranker) grid of ranked lists. Axes are sorted
// lexicographically. `lists` may also hold lists for queries outside the
// declared axis (query variants resolve against it).
struct RunMatrix {
  std::vector<std::string> queries;
  std::vector<std::string> rankers;
  std::map<std::pair<std::string, std::string>, RankedList> lists;

  const RankedList* find(const std::string& query_id,
                         const std::string& ranker_id) const;
  // Throws ValidationError when the cell is absent.
  const RankedList& at(const std::string& query_id,
                       const std::string& ranker_id) const;
};

// Graded relevance judgments. Unjudged (query, doc) pairs have grade 0.
struct JudgmentSet {
  std::map<std::string, std::map<std::string, int>> by_query;

  int grade(const std::string& query_id, const std::string& doc_id) const;
  const std::map<std::string, int>* judged(const std::string& query_id) const;
};

struct ExternalPredictions {
  std::string predictor_id;
  std::map<std::pair<std::string, std::string>, double> values;
};

struct EmbeddingTable {
  std::size_t dim = 0;  // 0 until the first vector is seen
  std::map<std::string, std::vector<double>> vectors;
};

struct QueryMeta {
  std::string query_id;
  std::optional<std::string> text;
  std::optional<int> term_count;
  std::vector<std::string> variants;
};

using QueryMetaTable = std::map<std::string, QueryMeta>;
using CollectionScores = std::map<std::string, double>;

// TREC run format: 6 whitespace-separated fields per line
// (qid, Q0, docid, rank, score, tag). Field 2 accepts any token.
std::map<std::string, RankedList> parse_run_file(std::istream& source,
                                                 const std::string& ranker_id);

// Qrels format: qid, iteration token, docid, integer grade. Repeated
// (qid, docid) keeps the last occurrence and logs a warning.
JudgmentSet parse_qrels(std::istream& source);

// Prediction TSV: "qid<TAB>ranker_id<TAB>score", optional header line
// whose first field is "qid".
ExternalPredictions parse_prediction_file(std::istream& source,
                                          const std::string& predictor_id);

// Embedding TSV: "doc_id<TAB>v1,v2,...,vd" with constant d.
EmbeddingTable parse_embeddings(std::istream& source);

// Query metadata TSV: "qid<TAB>term_count<TAB>variant_ids(comma-sep, optional)".
QueryMetaTable parse_query_meta(std::istream& source);

// Per-query collection scores TSV: "qid<TAB>value".
CollectionScores parse_collection_scores(std::istream& source);

// Builds the run matrix from per-ranker parse results. The declared query
// axis is the union of parsed query ids; Strict requires every (q, theta)
// cell, Intersect restricts the axis to queries present in every ranker's
// run (the restriction is logged).
RunMatrix assemble_run_matrix(
    std::map<std::string, std::map<std::string, RankedList>> per_ranker,
    AssemblePolicy policy);

// Same with an explicit declared query axis.
RunMatrix assemble_run_matrix(
    std::map<std::string, std::map<std::string, RankedList>> per_ranker,
    const std::vector<std::string>& declared_queries, AssemblePolicy policy);

// Serializes a normalized list back to run format. Scores are written with
// enough digits that re-parsing yields an identical RankedList.
std::string to_run_format(const RankedList& list);

}  // namespace qpp

#endif  // QPPEVAL_TREC_IO_HPP
