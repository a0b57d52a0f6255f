#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

#include "qppeval/errors.hpp"
#include "qppeval/report.hpp"

using namespace qpp;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = QPPEVAL_TEST_DATA_DIR;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qppeval_test_" + std::to_string(
                                  std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name, const std::string& content) const {
    const std::string full = (path / name).string();
    std::ofstream out(full, std::ios::binary);
    out << content;
    return full;
  }
};

std::string fixture(const std::string& name) {
  return kDataDir + "/metric_fixture/" + name;
}

std::string minimal_config_json(const std::string& extra = "") {
  return std::string("{\n") +
         "  \"runs\": {\"sysA\": \"" + fixture("sysA.run") + "\"},\n" +
         "  \"qrels\": \"" + fixture("qrels.txt") + "\",\n" +
         "  \"metrics\": [\"ap@50\"],\n" +
         "  \"predictors\": [\"nqc\"]" + (extra.empty() ? "\n" : ",\n" + extra) +
         "}\n";
}

}  // namespace

TEST_CASE("load_config applies defaults") {
  TempDir dir;
  auto config = load_config(dir.file("config.json", minimal_config_json()));
  REQUIRE(config.predictors.size() == 1);
  CHECK(config.predictors[0].k == 100);
  CHECK(config.predictors[0].norm == NormMode::MeanAbs);
  CHECK(config.metrics[0].label() == "ap@50");
  CHECK(config.alpha == 0.05);
  CHECK(config.policy == AssemblePolicy::Strict);
  CHECK(config.tau == TauVariant::B);
  CHECK(config.seed == 0);
  CHECK(config.formats.size() == 1);
}

TEST_CASE("load_config rejects unknown keys, bad ranges, missing keys") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(
      load_config(dir.file("a.json", minimal_config_json("  \"metrix\": []\n"))),
      doctest::Contains("metrix"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config(dir.file("b.json", minimal_config_json("  \"alpha\": 1.5\n"))),
      doctest::Contains("alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(load_config(dir.file("c.json", "{\"runs\": {\"a\": \"x\"}}")),
                       doctest::Contains("qrels"), ConfigError);
  CHECK_THROWS_AS(load_config(dir.file("d.json", "not json")), ConfigError);
  // Paths must exist at load time.
  CHECK_THROWS_WITH_AS(
      load_config(dir.file("e.json",
                           "{\"runs\": {\"a\": \"missing.run\"}, \"qrels\": \"" +
                               fixture("qrels.txt") +
                               "\", \"metrics\": [\"ap@50\"], "
                               "\"predictors\": [\"nqc\"]}")),
      doctest::Contains("missing.run"), ConfigError);
}

TEST_CASE("duplicate predictor ids are rejected") {
  TempDir dir;
  const std::string body =
      std::string("{\n") + "  \"runs\": {\"sysA\": \"" + fixture("sysA.run") +
      "\"},\n" + "  \"qrels\": \"" + fixture("qrels.txt") + "\",\n" +
      "  \"metrics\": [\"ap@50\"],\n" +
      "  \"predictors\": [\"nqc:k=10\", \"nqc:k=100\"]\n}\n";
  CHECK_THROWS_WITH_AS(load_config(dir.file("dup.json", body)),
                       doctest::Contains("duplicate predictor"), ConfigError);
}

TEST_CASE("render_table formatting contract") {
  ReportBundle bundle;
  bundle.main_table.push_back({"ident", "ap@50", TauResult::ok(1.0),
                               TauResult::ok(1.0), TauResult::ok(1.0),
                               TauResult::ok(1.0)});
  const std::string csv = render_table(bundle, Format::Csv);
  CHECK(csv ==
        "predictor,metric,srmq,mrsq,mrmq,f1\n"
        "ident,ap@50,1.0000,1.0000,1.0000,1.0000\n");

  ReportBundle undefined_bundle;
  undefined_bundle.main_table.push_back(
      {"ident", "ap@50", TauResult::ok(0.5), TauResult::undefined("all-degenerate"),
       TauResult::ok(0.25), TauResult::undefined("all-degenerate")});
  const std::string with_na = render_table(undefined_bundle, Format::Csv);
  CHECK(with_na.find("n/a(all-degenerate)") != std::string::npos);

  const std::string markdown = render_table(bundle, Format::Markdown);
  CHECK(markdown.find("| ident | ap@50 | 1.0000 |") != std::string::npos);

  const std::string latex = render_table(bundle, Format::Latex);
  CHECK(latex.find("\\begin{tabular}{llrrrr}") != std::string::npos);
  CHECK(latex.find("ident & ap@50 & 1.0000 & 1.0000 & 1.0000 & 1.0000 \\\\") !=
        std::string::npos);
  CHECK(latex.find("\\end{tabular}") != std::string::npos);
}

TEST_CASE("render_significance encodings") {
  std::vector<TauResult> a{TauResult::ok(0.2), TauResult::ok(0.4),
                           TauResult::ok(0.6)};
  std::vector<TauResult> b{TauResult::ok(0.1), TauResult::ok(0.2),
                           TauResult::ok(0.3)};
  auto matrix = significance_matrix({{"A", a}, {"B", b}}, 0.05);
  const std::string csv = render_significance(matrix, Format::Csv);
  CHECK(csv.find("a,b,direction,p,significant") == 0);
  CHECK(csv.find("A,B,>,0.0742,false") != std::string::npos);

  const std::string markdown = render_significance(matrix, Format::Markdown);
  CHECK(markdown.find(" > |") != std::string::npos);

  auto significant = significance_matrix({{"A", a}, {"B", b}}, 0.10);
  const std::string starred = render_significance(significant, Format::Markdown);
  CHECK(starred.find(">*") != std::string::npos);

  auto tie = significance_matrix({{"A", a}, {"B", a}}, 0.05);
  const std::string tied = render_significance(tie, Format::Markdown);
  CHECK(tied.find("=") != std::string::npos);
}

TEST_CASE("pipeline: golden fixture structure and determinism") {
  TempDir dir;
  auto config = load_config(fixture("config_golden.json"));
  config.out_dir = (dir.path / "out").string();

  auto bundle = run_pipeline(config);
  // 3 predictors x 2 metrics.
  CHECK(bundle.main_table.size() == 6);
  bool found_external = false;
  for (const auto& row : bundle.main_table)
    if (row.predictor == "extp") found_external = true;
  CHECK(found_external);

  auto bundle_again = run_pipeline(config);
  CHECK(render_table(bundle, Format::Csv) == render_table(bundle_again, Format::Csv));
  CHECK(render_provenance(bundle) == render_provenance(bundle_again));

  auto written = write_reports(bundle, config);
  CHECK(written.size() >= 7);
  for (const auto& path : written) CHECK(fs::exists(path));
}

TEST_CASE("csv output re-parses losslessly at 4 decimals") {
  TempDir dir;
  auto config = load_config(fixture("config_golden.json"));
  config.out_dir = (dir.path / "out").string();
  auto bundle = run_pipeline(config);

  std::istringstream csv(render_table(bundle, Format::Csv));
  std::string line;
  std::getline(csv, line);
  REQUIRE(line == "predictor,metric,srmq,mrsq,mrmq,f1");
  std::size_t row_index = 0;
  while (std::getline(csv, line)) {
    REQUIRE(row_index < bundle.main_table.size());
    const auto& row = bundle.main_table[row_index++];
    std::vector<std::string> cells;
    std::istringstream fields(line);
    std::string cell;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0] == row.predictor);
    CHECK(cells[1] == row.metric);
    const TauResult* values[] = {&row.srmq, &row.mrsq, &row.mrmq, &row.f1};
    for (std::size_t i = 0; i < 4; ++i) {
      if (!values[i]->defined) {
        CHECK(cells[2 + i].rfind("n/a(", 0) == 0);
      } else {
        CHECK(std::fabs(std::stod(cells[2 + i]) - values[i]->value) <= 5e-5);
      }
    }
  }
  CHECK(row_index == bundle.main_table.size());
}

TEST_CASE("tau dumps round-trip into the significance command") {
  TempDir dir;
  auto config = load_config(fixture("config_golden.json"));
  config.out_dir = (dir.path / "out").string();
  auto bundle = run_pipeline(config);
  write_reports(bundle, config);

  auto vectors = load_tau_dump((fs::path(config.out_dir) / "tau_srmq_ap@50.csv").string());
  CHECK(vectors.size() == 3);  // three predictors
  for (const auto& [name, taus] : vectors) CHECK(taus.size() == 3);  // three rankers
  auto matrix = significance_matrix(vectors, 0.05);
  CHECK(matrix.cells.size() == 3);
}

TEST_CASE("intersect policy flows through the pipeline") {
  TempDir dir;
  // sysA has 5 queries; a second ranker with only 3 of them.
  std::string partial;
  {
    std::ifstream in(fixture("sysB.run"));
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("201", 0) == 0 || line.rfind("202", 0) == 0 ||
          line.rfind("203", 0) == 0)
        partial += line + "\n";
  }
  const std::string partial_path = dir.file("partial.run", partial);
  const std::string config_json = std::string("{\n") +
      "  \"runs\": {\"sysA\": \"" + fixture("sysA.run") + "\", \"partial\": \"" +
      partial_path + "\"},\n" +
      "  \"qrels\": \"" + fixture("qrels.txt") + "\",\n" +
      "  \"metrics\": [\"ap@50\"],\n" +
      "  \"predictors\": [\"nqc:k=10,norm=none\"],\n" +
      "  \"policy\": \"intersect\",\n" +
      "  \"out_dir\": \"" + (dir.path / "out").string() + "\"\n}\n";
  auto config = load_config(dir.file("config.json", config_json));
  auto inputs = load_inputs(config);
  CHECK(inputs.runs.queries == std::vector<std::string>{"201", "202", "203"});

  config.policy = AssemblePolicy::Strict;
  CHECK_THROWS_AS(load_inputs(config), ValidationError);
}
