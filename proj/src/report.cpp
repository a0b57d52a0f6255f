#include "qppeval/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "qppeval/errors.hpp"
#include "qppeval/log.hpp"
#include "qppeval/version.hpp"

namespace qpp {

namespace fs = std::filesystem;
using nlohmann::json;

Format parse_format(const std::string& text) {
  if (text == "csv") return Format::Csv;
  if (text == "markdown") return Format::Markdown;
  if (text == "latex") return Format::Latex;
  throw ConfigError("unknown format '" + text + "' (expected csv, markdown or latex)");
}

std::string format_extension(Format format) {
  switch (format) {
    case Format::Csv: return "csv";
    case Format::Markdown: return "md";
    case Format::Latex: return "tex";
  }
  return "txt";
}

std::uint64_t fnv1a_hash(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string resolve_path(const fs::path& base_dir, const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p.string();
  return (base_dir / p).lexically_normal().string();
}

void require_exists(const std::string& path, const std::string& what) {
  if (!fs::exists(path))
    throw ConfigError(what + " path does not exist: '" + path + "'");
}

std::string sanitize_label(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), ':', '-');
  std::replace(out.begin(), out.end(), '/', '-');
  return out;
}

std::string latex_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '_' || c == '%' || c == '&' || c == '#') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string fixed4(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4f", value);
  return buffer;
}

const char* direction_token(Direction direction) {
  switch (direction) {
    case Direction::ABetter: return ">";
    case Direction::BBetter: return "<";
    case Direction::Tie: return "=";
  }
  return "?";
}

}  // namespace

std::string format_value(const TauResult& value) {
  if (!value.defined) return "n/a(" + value.reason + ")";
  return fixed4(value.value);
}

EvalConfig load_config(const std::string& path) {
  const std::string raw = read_file(path);
  json doc;
  try {
    doc = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config '" + path + "' must be a JSON object");

  static const std::set<std::string> known_keys = {
      "runs",        "qrels",      "metrics",           "predictors",
      "embeddings",  "query_meta", "collection_scores", "policy",
      "tau",         "alpha",      "bonferroni",        "seed",
      "out_dir",     "formats"};
  for (const auto& [key, value] : doc.items())
    if (known_keys.find(key) == known_keys.end())
      throw ConfigError("config: unknown key '" + key + "'");

  std::vector<std::string> missing;
  for (const char* key : {"runs", "qrels", "metrics", "predictors"})
    if (!doc.contains(key)) missing.push_back(key);
  if (!missing.empty()) {
    std::string msg = "config: missing required key(s):";
    for (const auto& key : missing) msg += " " + key;
    throw ConfigError(msg);
  }

  EvalConfig config;
  config.config_hash = fnv1a_hash(raw);
  const fs::path base_dir = fs::path(path).parent_path();

  if (!doc["runs"].is_object() || doc["runs"].empty())
    throw ConfigError("config: 'runs' must map at least one ranker id to a path");
  for (const auto& [ranker, run_path] : doc["runs"].items()) {
    if (!run_path.is_string())
      throw ConfigError("config: run path for '" + ranker + "' must be a string");
    config.runs[ranker] = resolve_path(base_dir, run_path.get<std::string>());
  }

  if (!doc["qrels"].is_string())
    throw ConfigError("config: 'qrels' must be a path string");
  config.qrels = resolve_path(base_dir, doc["qrels"].get<std::string>());

  if (!doc["metrics"].is_array() || doc["metrics"].empty())
    throw ConfigError("config: 'metrics' must be a non-empty array");
  std::set<std::string> metric_labels;
  for (const auto& item : doc["metrics"]) {
    if (!item.is_string()) throw ConfigError("config: metric specs must be strings");
    MetricSpec spec = MetricSpec::parse(item.get<std::string>());
    if (!metric_labels.insert(spec.label()).second)
      throw ConfigError("config: duplicate metric '" + spec.label() + "'");
    config.metrics.push_back(spec);
  }

  if (!doc["predictors"].is_array() || doc["predictors"].empty())
    throw ConfigError("config: 'predictors' must be a non-empty array");
  std::set<std::string> predictor_names;
  for (const auto& item : doc["predictors"]) {
    if (!item.is_string())
      throw ConfigError("config: predictor specs must be strings");
    PredictorSpec spec = PredictorSpec::parse(item.get<std::string>());
    if (spec.name.find(',') != std::string::npos)
      throw ConfigError("config: predictor id '" + spec.name +
                        "' must not contain a comma");
    if (!predictor_names.insert(spec.name).second)
      throw ConfigError("config: duplicate predictor id '" + spec.name +
                        "' (disambiguate with id=)");
    if (spec.id == PredictorId::External)
      spec.external_file = resolve_path(base_dir, spec.external_file);
    config.predictors.push_back(std::move(spec));
  }

  auto optional_path = [&](const char* key) -> std::optional<std::string> {
    if (!doc.contains(key)) return std::nullopt;
    if (!doc[key].is_string())
      throw ConfigError(std::string("config: '") + key + "' must be a path string");
    return resolve_path(base_dir, doc[key].get<std::string>());
  };
  config.embeddings = optional_path("embeddings");
  config.query_meta = optional_path("query_meta");
  config.collection_scores = optional_path("collection_scores");

  if (doc.contains("policy")) {
    const std::string policy = doc["policy"].get<std::string>();
    if (policy == "strict")
      config.policy = AssemblePolicy::Strict;
    else if (policy == "intersect")
      config.policy = AssemblePolicy::Intersect;
    else
      throw ConfigError("config: unknown policy '" + policy + "'");
  }
  if (doc.contains("tau")) {
    const std::string tau = doc["tau"].get<std::string>();
    if (tau == "a")
      config.tau = TauVariant::A;
    else if (tau == "b")
      config.tau = TauVariant::B;
    else
      throw ConfigError("config: tau must be 'a' or 'b', got '" + tau + "'");
  }
  if (doc.contains("alpha")) {
    if (!doc["alpha"].is_number())
      throw ConfigError("config: 'alpha' must be a number");
    config.alpha = doc["alpha"].get<double>();
    if (!(config.alpha > 0.0 && config.alpha < 1.0))
      throw ConfigError("config: alpha must be in (0, 1), got " +
                        std::to_string(config.alpha));
  }
  if (doc.contains("bonferroni")) {
    if (!doc["bonferroni"].is_boolean())
      throw ConfigError("config: 'bonferroni' must be a boolean");
    config.bonferroni = doc["bonferroni"].get<bool>();
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned())
      throw ConfigError("config: 'seed' must be an unsigned integer");
    config.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("out_dir")) {
    if (!doc["out_dir"].is_string())
      throw ConfigError("config: 'out_dir' must be a string");
    config.out_dir = resolve_path(base_dir, doc["out_dir"].get<std::string>());
  } else {
    config.out_dir = resolve_path(base_dir, "out");
  }
  if (doc.contains("formats")) {
    if (!doc["formats"].is_array() || doc["formats"].empty())
      throw ConfigError("config: 'formats' must be a non-empty array");
    config.formats.clear();
    for (const auto& item : doc["formats"])
      config.formats.push_back(parse_format(item.get<std::string>()));
  }

  for (const auto& [ranker, run_path] : config.runs)
    require_exists(run_path, "run file for '" + ranker + "'");
  require_exists(config.qrels, "qrels");
  if (config.embeddings) require_exists(*config.embeddings, "embeddings");
  if (config.query_meta) require_exists(*config.query_meta, "query metadata");
  if (config.collection_scores)
    require_exists(*config.collection_scores, "collection scores");
  for (const auto& spec : config.predictors)
    if (spec.id == PredictorId::External)
      require_exists(spec.external_file, "prediction file for '" + spec.name + "'");
  return config;
}

namespace {

template <typename Parse>
auto parse_file(const std::string& path, Parse parse) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file '" + path + "'");
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace

PipelineInputs load_inputs(const EvalConfig& config) {
  PipelineInputs inputs;
  std::map<std::string, std::map<std::string, RankedList>> per_ranker;
  for (const auto& [ranker, path] : config.runs)
    per_ranker[ranker] = parse_file(
        path, [&](std::istream& in) { return parse_run_file(in, ranker); });
  inputs.runs = assemble_run_matrix(std::move(per_ranker), config.policy);

  inputs.judgments =
      parse_file(config.qrels, [](std::istream& in) { return parse_qrels(in); });

  if (config.embeddings)
    inputs.embeddings = parse_file(
        *config.embeddings, [](std::istream& in) { return parse_embeddings(in); });
  if (config.query_meta)
    inputs.query_meta = parse_file(
        *config.query_meta, [](std::istream& in) { return parse_query_meta(in); });
  if (config.collection_scores)
    inputs.collection_scores =
        parse_file(*config.collection_scores,
                   [](std::istream& in) { return parse_collection_scores(in); });

  for (const auto& spec : config.predictors)
    if (spec.id == PredictorId::External)
      inputs.external.emplace(
          spec.name, parse_file(spec.external_file, [&](std::istream& in) {
            return parse_prediction_file(in, spec.name);
          }));
  return inputs;
}

std::vector<EffectivenessMatrix> build_all_effectiveness(
    const EvalConfig& config, const PipelineInputs& inputs,
    std::vector<std::size_t>* zero_relevant_counts) {
  std::vector<EffectivenessMatrix> matrices;
  if (zero_relevant_counts != nullptr) zero_relevant_counts->clear();
  for (const auto& metric : config.metrics) {
    std::size_t zero_relevant = 0;
    matrices.push_back(
        effectiveness_matrix(inputs.runs, inputs.judgments, metric, &zero_relevant));
    if (zero_relevant_counts != nullptr)
      zero_relevant_counts->push_back(zero_relevant);
    if (zero_relevant > 0)
      log::info("metric " + metric.label() + ": " + std::to_string(zero_relevant) +
                " query(ies) without relevant documents score 0");
  }
  return matrices;
}

std::vector<PredictionMatrix> build_all_predictions(const EvalConfig& config,
                                                    const PipelineInputs& inputs) {
  std::vector<PredictionMatrix> matrices;
  for (const auto& spec : config.predictors) {
    SideInputs side;
    if (inputs.embeddings) side.embeddings = &*inputs.embeddings;
    if (inputs.query_meta) side.query_meta = &*inputs.query_meta;
    if (inputs.collection_scores) side.collection_scores = &*inputs.collection_scores;
    if (spec.id == PredictorId::External) {
      auto it = inputs.external.find(spec.name);
      if (it == inputs.external.end())
        throw ValidationError("no prediction file loaded for '" + spec.name + "'");
      side.external = &it->second;
    }
    matrices.push_back(
        build_prediction_matrix(inputs.runs, spec, side, config.seed));
  }
  return matrices;
}

ReportBundle run_pipeline(const EvalConfig& config) {
  const PipelineInputs inputs = load_inputs(config);
  std::vector<std::size_t> zero_relevant;
  const auto effectiveness = build_all_effectiveness(config, inputs, &zero_relevant);
  const auto predictions = build_all_predictions(config, inputs);

  ReportBundle bundle;
  bundle.tool_version = kVersion;
  bundle.config_hash = config.config_hash;
  bundle.seed = config.seed;

  for (std::size_t mi = 0; mi < effectiveness.size(); ++mi) {
    const auto& mu = effectiveness[mi];
    const std::string metric_label = mu.metric.label();
    bundle.metric_stats.push_back({metric_label, zero_relevant[mi]});

    EvalReport report;
    try {
      report = evaluate_all(mu, predictions, config.tau);
    } catch (const ValidationError& e) {
      throw ValidationError("evaluation stage (" + metric_label + "): " + e.what());
    }

    std::vector<std::pair<std::string, std::vector<TauResult>>> srmq_vectors;
    std::vector<std::pair<std::string, std::vector<TauResult>>> mrsq_vectors;
    for (const auto& result : report.results) {
      bundle.main_table.push_back({result.predictor_id, metric_label,
                                   result.srmq_mean, result.mrsq_mean,
                                   result.mrmq_global, result.f1});
      std::vector<TauResult> srmq_taus, mrsq_taus;
      for (const auto& [ranker, tau] : result.srmq_per_ranker) {
        bundle.srmq_taus.push_back({metric_label, result.predictor_id, ranker, tau});
        srmq_taus.push_back(tau);
      }
      for (const auto& [query, tau] : result.mrsq_per_query) {
        bundle.mrsq_taus.push_back({metric_label, result.predictor_id, query, tau});
        mrsq_taus.push_back(tau);
      }
      srmq_vectors.emplace_back(result.predictor_id, std::move(srmq_taus));
      mrsq_vectors.emplace_back(result.predictor_id, std::move(mrsq_taus));
    }

    for (const auto& row : report.cross_measure)
      bundle.cross_measure.push_back(
          {metric_label, row.measure_a, row.measure_b, row.tau});
    for (const auto& row : report.discriminativeness)
      bundle.discriminativeness.push_back({metric_label, row.measure, row.stddev});

    if (report.results.size() >= 2) {
      try {
        bundle.srmq_significance.emplace_back(
            metric_label,
            significance_matrix(srmq_vectors, config.alpha, config.bonferroni));
        bundle.mrsq_significance.emplace_back(
            metric_label,
            significance_matrix(mrsq_vectors, config.alpha, config.bonferroni));
      } catch (const ValidationError& e) {
        throw ValidationError("significance stage (" + metric_label + "): " +
                              e.what());
      }
    } else {
      log::info("significance matrices need at least 2 predictors, skipping");
    }
  }
  return bundle;
}

std::string render_table(const ReportBundle& bundle, Format format) {
  std::ostringstream out;
  const char* columns[] = {"predictor", "metric", "srmq", "mrsq", "mrmq", "f1"};
  switch (format) {
    case Format::Csv: {
      out << "predictor,metric,srmq,mrsq,mrmq,f1\n";
      for (const auto& row : bundle.main_table)
        out << row.predictor << "," << row.metric << "," << format_value(row.srmq)
            << "," << format_value(row.mrsq) << "," << format_value(row.mrmq) << ","
            << format_value(row.f1) << "\n";
      break;
    }
    case Format::Markdown: {
      out << "|";
      for (const char* c : columns) out << " " << c << " |";
      out << "\n|";
      for (std::size_t i = 0; i < 6; ++i) out << " --- |";
      out << "\n";
      for (const auto& row : bundle.main_table)
        out << "| " << row.predictor << " | " << row.metric << " | "
            << format_value(row.srmq) << " | " << format_value(row.mrsq) << " | "
            << format_value(row.mrmq) << " | " << format_value(row.f1) << " |\n";
      break;
    }
    case Format::Latex: {
      out << "\\begin{tabular}{llrrrr}\n\\hline\n";
      out << "predictor & metric & srmq & mrsq & mrmq & f1 \\\\\n\\hline\n";
      for (const auto& row : bundle.main_table)
        out << latex_escape(row.predictor) << " & " << latex_escape(row.metric)
            << " & " << format_value(row.srmq) << " & " << format_value(row.mrsq)
            << " & " << format_value(row.mrmq) << " & " << format_value(row.f1)
            << " \\\\\n";
      out << "\\hline\n\\end{tabular}\n";
      break;
    }
  }
  return out.str();
}

namespace {

std::string significance_token(const SignificanceCell& cell) {
  std::string token = direction_token(cell.direction);
  if (cell.significant) token += "*";
  return token;
}

}  // namespace

std::string render_significance(const SignificanceMatrix& matrix, Format format) {
  std::ostringstream out;
  if (format == Format::Csv) {
    out << "a,b,direction,p,significant\n";
    for (const auto& cell : matrix.cells)
      out << cell.a << "," << cell.b << "," << direction_token(cell.direction) << ","
          << fixed4(cell.p_value) << "," << (cell.significant ? "true" : "false")
          << "\n";
    return out.str();
  }

  const auto& names = matrix.predictors;
  auto cell_token = [&](std::size_t i, std::size_t j) -> std::string {
    const SignificanceCell* cell = matrix.find(names[i], names[j]);
    return cell == nullptr ? "" : significance_token(*cell);
  };
  if (format == Format::Markdown) {
    out << "| phi |";
    for (const auto& name : names) out << " " << name << " |";
    out << "\n|";
    for (std::size_t i = 0; i <= names.size(); ++i) out << " --- |";
    out << "\n";
    for (std::size_t i = 0; i < names.size(); ++i) {
      out << "| " << names[i] << " |";
      for (std::size_t j = 0; j < names.size(); ++j)
        out << " " << (j > i ? cell_token(i, j) : std::string()) << " |";
      out << "\n";
    }
    return out.str();
  }

  out << "\\begin{tabular}{l";
  for (std::size_t i = 0; i < names.size(); ++i) out << "c";
  out << "}\n\\hline\nphi";
  for (const auto& name : names) out << " & " << latex_escape(name);
  out << " \\\\\n\\hline\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << latex_escape(names[i]);
    for (std::size_t j = 0; j < names.size(); ++j) {
      out << " & ";
      if (j > i) {
        std::string token = cell_token(i, j);
        // '<' and '>' need math mode in LaTeX text.
        std::string escaped;
        for (char c : token)
          if (c == '<' || c == '>')
            escaped += std::string("$") + c + "$";
          else
            escaped += c;
        out << escaped;
      }
    }
    out << " \\\\\n";
  }
  out << "\\hline\n\\end{tabular}\n";
  return out.str();
}

std::string render_cross_measure(const ReportBundle& bundle, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Csv:
      out << "metric,measure_a,measure_b,tau\n";
      for (const auto& row : bundle.cross_measure)
        out << row.metric << "," << row.measure_a << "," << row.measure_b << ","
            << format_value(row.tau) << "\n";
      break;
    case Format::Markdown:
      out << "| metric | measure_a | measure_b | tau |\n| --- | --- | --- | --- |\n";
      for (const auto& row : bundle.cross_measure)
        out << "| " << row.metric << " | " << row.measure_a << " | " << row.measure_b
            << " | " << format_value(row.tau) << " |\n";
      break;
    case Format::Latex:
      out << "\\begin{tabular}{lllr}\n\\hline\nmetric & measure\\_a & measure\\_b & "
             "tau \\\\\n\\hline\n";
      for (const auto& row : bundle.cross_measure)
        out << latex_escape(row.metric) << " & " << latex_escape(row.measure_a)
            << " & " << latex_escape(row.measure_b) << " & " << format_value(row.tau)
            << " \\\\\n";
      out << "\\hline\n\\end{tabular}\n";
      break;
  }
  return out.str();
}

std::string render_discriminativeness(const ReportBundle& bundle, Format format) {
  std::ostringstream out;
  switch (format) {
    case Format::Csv:
      out << "metric,measure,stddev\n";
      for (const auto& row : bundle.discriminativeness)
        out << row.metric << "," << row.measure << "," << format_value(row.stddev)
            << "\n";
      break;
    case Format::Markdown:
      out << "| metric | measure | stddev |\n| --- | --- | --- |\n";
      for (const auto& row : bundle.discriminativeness)
        out << "| " << row.metric << " | " << row.measure << " | "
            << format_value(row.stddev) << " |\n";
      break;
    case Format::Latex:
      out << "\\begin{tabular}{llr}\n\\hline\nmetric & measure & stddev "
             "\\\\\n\\hline\n";
      for (const auto& row : bundle.discriminativeness)
        out << latex_escape(row.metric) << " & " << latex_escape(row.measure) << " & "
            << format_value(row.stddev) << " \\\\\n";
      out << "\\hline\n\\end{tabular}\n";
      break;
  }
  return out.str();
}

std::string render_tau_dump(const std::vector<ReportBundle::TauRow>& rows,
                            const std::string& metric) {
  std::ostringstream out;
  out << "predictor,unit,tau\n";
  for (const auto& row : rows)
    if (row.metric == metric)
      out << row.predictor << "," << row.unit << "," << format_value(row.tau) << "\n";
  return out.str();
}

std::string render_provenance(const ReportBundle& bundle) {
  json doc;
  doc["tool_version"] = bundle.tool_version;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(bundle.config_hash));
  doc["config_hash"] = hash_hex;
  doc["seed"] = bundle.seed;
  json stats = json::object();
  for (const auto& ms : bundle.metric_stats)
    stats[ms.metric] = ms.zero_relevant_queries;
  doc["zero_relevant_queries"] = stats;
  return doc.dump(2) + "\n";
}

std::vector<std::string> write_reports(const ReportBundle& bundle,
                                       const EvalConfig& config) {
  fs::create_directories(config.out_dir);
  std::vector<std::string> written;
  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = (fs::path(config.out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report file '" + path + "'");
    out << content;
    written.push_back(path);
  };

  std::set<std::string> metrics;
  for (const auto& row : bundle.main_table) metrics.insert(row.metric);

  for (Format format : config.formats) {
    const std::string ext = format_extension(format);
    write("main_table." + ext, render_table(bundle, format));
    write("cross_measure." + ext, render_cross_measure(bundle, format));
    write("discriminativeness." + ext, render_discriminativeness(bundle, format));
    for (const auto& [metric, matrix] : bundle.srmq_significance)
      write("significance_srmq_" + sanitize_label(metric) + "." + ext,
            render_significance(matrix, format));
    for (const auto& [metric, matrix] : bundle.mrsq_significance)
      write("significance_mrsq_" + sanitize_label(metric) + "." + ext,
            render_significance(matrix, format));
  }
  for (const auto& metric : metrics) {
    write("tau_srmq_" + sanitize_label(metric) + ".csv",
          render_tau_dump(bundle.srmq_taus, metric));
    write("tau_mrsq_" + sanitize_label(metric) + ".csv",
          render_tau_dump(bundle.mrsq_taus, metric));
  }
  write("provenance.json", render_provenance(bundle));
  return written;
}

std::vector<std::pair<std::string, std::vector<TauResult>>> load_tau_dump(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tau dump '" + path + "'");
  std::vector<std::pair<std::string, std::vector<TauResult>>> vectors;
  std::vector<std::pair<std::string, std::vector<std::string>>> units;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1 && line == "predictor,unit,tau") continue;
    std::size_t c1 = line.find(',');
    std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw ParseError(path + " line " + std::to_string(line_no) +
                       ": expected 'predictor,unit,tau'");
    const std::string predictor = line.substr(0, c1);
    const std::string unit = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string value_text = line.substr(c2 + 1);

    TauResult tau;
    if (value_text.rfind("n/a(", 0) == 0 && value_text.back() == ')') {
      tau = TauResult::undefined(value_text.substr(4, value_text.size() - 5));
    } else {
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(value_text.data(),
                                       value_text.data() + value_text.size(), value);
      if (ec != std::errc() || ptr != value_text.data() + value_text.size())
        throw ParseError(path + " line " + std::to_string(line_no) +
                         ": bad tau value '" + value_text + "'");
      tau = TauResult::ok(value);
    }
    if (vectors.empty() || vectors.back().first != predictor) {
      vectors.emplace_back(predictor, std::vector<TauResult>{});
      units.emplace_back(predictor, std::vector<std::string>{});
    }
    vectors.back().second.push_back(tau);
    units.back().first = predictor;
    units.back().second.push_back(unit);
  }
  if (vectors.size() < 2)
    throw ValidationError(path + ": tau dump needs at least 2 predictors");
  for (std::size_t i = 1; i < units.size(); ++i)
    if (units[i].second != units[0].second)
      throw ValidationError(path + ": predictor '" + units[i].first +
                            "' does not share the unit axis of '" + units[0].first +
                            "'");
  return vectors;
}

}  // namespace qpp
