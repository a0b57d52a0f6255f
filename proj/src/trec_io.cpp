#include "qppeval/trec_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "qppeval/errors.hpp"
#include "qppeval/log.hpp"

namespace qpp {

namespace {

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r'))
      ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r')
      ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

std::vector<std::string> split_tabs(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

bool blank(const std::string& line) {
  return split_whitespace(line).empty();
}

double parse_double(const std::string& token, const char* what, std::size_t line_no) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string("line ") + std::to_string(line_no) +
                     ": non-numeric " + what + " '" + token + "'");
  if (!std::isfinite(value))
    throw ParseError(std::string("line ") + std::to_string(line_no) +
                     ": non-finite " + what + " '" + token + "'");
  return value;
}

int parse_int(const std::string& token, const char* what, std::size_t line_no) {
  int value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last)
    throw ParseError(std::string("line ") + std::to_string(line_no) +
                     ": non-numeric " + what + " '" + token + "'");
  return value;
}

void normalize(RankedList& list) {
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RunEntry& a, const RunEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.doc_id < b.doc_id;
            });
  int rank = 1;
  for (auto& entry : list.entries) entry.rank = rank++;
}

}  // namespace

std::vector<double> RankedList::scores() const {
  std::vector<double> out;
  out.reserve(entries.size());
  for (const auto& entry : entries) out.push_back(entry.score);
  return out;
}

const RankedList* RunMatrix::find(const std::string& query_id,
                                  const std::string& ranker_id) const {
  auto it = lists.find({query_id, ranker_id});
  return it == lists.end() ? nullptr : &it->second;
}

const RankedList& RunMatrix::at(const std::string& query_id,
                                const std::string& ranker_id) const {
  const RankedList* list = find(query_id, ranker_id);
  if (list == nullptr)
    throw ValidationError("run matrix has no list for (" + query_id + ", " +
                          ranker_id + ")");
  return *list;
}

int JudgmentSet::grade(const std::string& query_id,
                       const std::string& doc_id) const {
  auto q = by_query.find(query_id);
  if (q == by_query.end()) return 0;
  auto d = q->second.find(doc_id);
  return d == q->second.end() ? 0 : d->second;
}

const std::map<std::string, int>* JudgmentSet::judged(
    const std::string& query_id) const {
  auto q = by_query.find(query_id);
  return q == by_query.end() ? nullptr : &q->second;
}

std::map<std::string, RankedList> parse_run_file(std::istream& source,
                                                 const std::string& ranker_id) {
  std::map<std::string, RankedList> lists;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != 6)
      throw ParseError("line " + std::to_string(line_no) + ": expected 6 fields, got " +
                       std::to_string(fields.size()));
    RunEntry entry;
    entry.query_id = fields[0];
    entry.doc_id = fields[2];
    entry.rank = parse_int(fields[3], "rank", line_no);
    entry.score = parse_double(fields[4], "score", line_no);
    entry.tag = fields[5];
    if (!seen.insert({entry.query_id, entry.doc_id}).second)
      throw ValidationError("duplicate (query, doc) pair (" + entry.query_id +
                            ", " + entry.doc_id + ") in run file");
    auto& list = lists[entry.query_id];
    if (list.entries.empty()) {
      list.query_id = entry.query_id;
      list.ranker_id = ranker_id;
    }
    list.entries.push_back(std::move(entry));
  }
  for (auto& [query_id, list] : lists) normalize(list);
  return lists;
}

JudgmentSet parse_qrels(std::istream& source) {
  JudgmentSet judgments;
  std::string line;
  std::size_t line_no = 0;
  std::size_t replaced = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_whitespace(line);
    if (fields.size() != 4)
      throw ParseError("line " + std::to_string(line_no) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    int grade = parse_int(fields[3], "grade", line_no);
    if (grade < 0)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": negative grade for (" + fields[0] + ", " +
                            fields[2] + ")");
    auto& per_query = judgments.by_query[fields[0]];
    auto [it, inserted] = per_query.insert_or_assign(fields[2], grade);
    (void)it;
    if (!inserted) {
      ++replaced;
      log::debug("qrels: repeated judgment for (" + fields[0] + ", " + fields[2] +
                 "), keeping last");
    }
  }
  if (replaced > 0)
    log::warn("qrels: " + std::to_string(replaced) +
              " repeated judgment(s) replaced by their last occurrence");
  return judgments;
}

ExternalPredictions parse_prediction_file(std::istream& source,
                                          const std::string& predictor_id) {
  ExternalPredictions predictions;
  predictions.predictor_id = predictor_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_tabs(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "qid") continue;
    if (fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 3 tab-separated fields, got " +
                       std::to_string(fields.size()));
    double value = parse_double(fields[2], "score", line_no);
    auto key = std::make_pair(fields[0], fields[1]);
    if (!predictions.values.emplace(key, value).second)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate prediction for (" + fields[0] + ", " +
                            fields[1] + ")");
  }
  return predictions;
}

EmbeddingTable parse_embeddings(std::istream& source) {
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 2 tab-separated fields, got " +
                       std::to_string(fields.size()));
    std::vector<double> vec;
    std::size_t start = 0;
    const std::string& body = fields[1];
    while (true) {
      std::size_t comma = body.find(',', start);
      std::string token = body.substr(
          start, comma == std::string::npos ? std::string::npos : comma - start);
      vec.push_back(parse_double(token, "vector component", line_no));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (table.dim == 0 && table.vectors.empty()) {
      table.dim = vec.size();
    } else if (vec.size() != table.dim) {
      throw ValidationError("line " + std::to_string(line_no) + ": vector for '" +
                            fields[0] + "' has dimension " +
                            std::to_string(vec.size()) + ", expected " +
                            std::to_string(table.dim));
    }
    if (!table.vectors.emplace(fields[0], std::move(vec)).second)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate embedding for '" + fields[0] + "'");
  }
  return table;
}

QueryMetaTable parse_query_meta(std::istream& source) {
  QueryMetaTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_tabs(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "qid") continue;
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 2 or 3 tab-separated fields, got " +
                       std::to_string(fields.size()));
    QueryMeta meta;
    meta.query_id = fields[0];
    int term_count = parse_int(fields[1], "term count", line_no);
    if (term_count < 1)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": term count must be >= 1 for '" + fields[0] + "'");
    meta.term_count = term_count;
    if (fields.size() == 3) {
      std::size_t start = 0;
      const std::string& body = fields[2];
      while (start <= body.size()) {
        std::size_t comma = body.find(',', start);
        std::string token = body.substr(
            start, comma == std::string::npos ? std::string::npos : comma - start);
        if (!token.empty()) meta.variants.push_back(token);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (!table.emplace(meta.query_id, std::move(meta)).second)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate metadata row for '" + fields[0] + "'");
  }
  return table;
}

CollectionScores parse_collection_scores(std::istream& source) {
  CollectionScores scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto fields = split_tabs(line);
    if (line_no == 1 && !fields.empty() && fields[0] == "qid") continue;
    if (fields.size() != 2)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 2 tab-separated fields, got " +
                       std::to_string(fields.size()));
    double value = parse_double(fields[1], "collection score", line_no);
    if (!scores.emplace(fields[0], value).second)
      throw ValidationError("line " + std::to_string(line_no) +
                            ": duplicate collection score for '" + fields[0] + "'");
  }
  return scores;
}

RunMatrix assemble_run_matrix(
    std::map<std::string, std::map<std::string, RankedList>> per_ranker,
    AssemblePolicy policy) {
  std::set<std::string> union_queries;
  for (const auto& [ranker, lists] : per_ranker)
    for (const auto& [query, list] : lists) union_queries.insert(query);
  return assemble_run_matrix(
      std::move(per_ranker),
      std::vector<std::string>(union_queries.begin(), union_queries.end()),
      policy);
}

RunMatrix assemble_run_matrix(
    std::map<std::string, std::map<std::string, RankedList>> per_ranker,
    const std::vector<std::string>& declared_queries, AssemblePolicy policy) {
  RunMatrix matrix;
  for (const auto& [ranker, lists] : per_ranker) matrix.rankers.push_back(ranker);
  std::sort(matrix.rankers.begin(), matrix.rankers.end());
  if (matrix.rankers.empty())
    throw ConfigError("run matrix has no rankers");

  std::vector<std::string> queries(declared_queries);
  std::sort(queries.begin(), queries.end());
  queries.erase(std::unique(queries.begin(), queries.end()), queries.end());
  if (queries.empty()) throw ConfigError("run matrix has no queries");

  if (policy == AssemblePolicy::Strict) {
    for (const auto& query : queries)
      for (const auto& ranker : matrix.rankers) {
        const auto& lists = per_ranker.at(ranker);
        if (lists.find(query) == lists.end())
          throw ValidationError("strict policy: missing run for (" + query + ", " +
                                ranker + ")");
      }
    matrix.queries = queries;
  } else {
    std::vector<std::string> kept;
    std::vector<std::string> dropped;
    for (const auto& query : queries) {
      bool everywhere = true;
      for (const auto& ranker : matrix.rankers) {
        const auto& lists = per_ranker.at(ranker);
        if (lists.find(query) == lists.end()) {
          everywhere = false;
          break;
        }
      }
      (everywhere ? kept : dropped).push_back(query);
    }
    if (!dropped.empty()) {
      std::string msg = "intersect policy dropped " + std::to_string(dropped.size()) +
                        " query(ies):";
      for (const auto& q : dropped) msg += " " + q;
      log::info(msg);
    }
    if (kept.empty())
      throw ConfigError("intersect policy left no queries common to all rankers");
    matrix.queries = std::move(kept);
  }

  for (auto& [ranker, lists] : per_ranker)
    for (auto& [query, list] : lists)
      matrix.lists.emplace(std::make_pair(query, ranker), std::move(list));
  return matrix;
}

std::string to_run_format(const RankedList& list) {
  std::ostringstream out;
  char buffer[64];
  for (const auto& entry : list.entries) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", entry.score);
    out << entry.query_id << " Q0 " << entry.doc_id << " " << entry.rank << " "
        << buffer << " " << entry.tag << "\n";
  }
  return out.str();
}

}  // namespace qpp
