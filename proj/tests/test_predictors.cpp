#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "qppeval/errors.hpp"
#include "qppeval/predictors.hpp"
#include "qppeval/trec_io.hpp"

using namespace qpp;

namespace {

ScoreList scores_of(std::vector<double> values) {
  return ScoreList{values, values};
}

RankedList list_from_scores(const std::string& query,
                            const std::vector<double>& scores) {
  RankedList list;
  list.query_id = query;
  list.ranker_id = "r";
  int rank = 1;
  for (double s : scores)
    list.entries.push_back({query, "d" + std::to_string(rank), rank, s, "t"}),
        ++rank;
  return list;
}

}  // namespace

TEST_CASE("nqc: population std over top-k with optional normalization") {
  CHECK(nqc(scores_of({5, 4, 3}), 3, NormMode::None) ==
        doctest::Approx(0.816497).epsilon(1e-6));
  CHECK(nqc(scores_of({5, 4, 3}), 3, NormMode::MeanAbs) ==
        doctest::Approx(0.816497 / 4.0).epsilon(1e-6));
  CHECK(nqc(scores_of({5, 4, 3}), 3, NormMode::MeanAbs) ==
        doctest::Approx(0.204124).epsilon(1e-6));
  CHECK(nqc(scores_of({7, 7, 7, 7}), 4, NormMode::None) == 0.0);
  CHECK_THROWS_AS(nqc(scores_of({}), 3, NormMode::None), ValidationError);
  // k truncates: only the top two scores enter.
  CHECK(nqc(scores_of({6, 4, 0, 0}), 2, NormMode::None) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(nqc(scores_of({1, 2}), 2, NormMode::Provided), ValidationError);
}

TEST_CASE("wig: mean gain over the collection score") {
  CHECK(wig(scores_of({10, 9, 8, 7, 6}), 5, 4.0, 4) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(wig(scores_of({4, 4, 4}), 3, 4.0, 1) == 0.0);
  CHECK(wig(scores_of({10, 9, 8, 7, 6}), 5, 4.0) ==
        doctest::Approx(4.0).epsilon(1e-12));
  CHECK(wig_collection_score(scores_of({10, 9, 8, 7, 6}), NormMode::MeanAbs) ==
        doctest::Approx(8.0).epsilon(1e-12));
  CHECK(wig_collection_score(scores_of({1, 2}), NormMode::None) == 0.0);
}

TEST_CASE("sigma_max: max prefix std") {
  // Prefix stds: 0, 2, 1.8856, 1.7321 -> max at i=2.
  CHECK(sigma_max(std::vector<double>{5, 1, 1, 1}) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(sigma_max(std::vector<double>{3.5}) == 0.0);
  CHECK(sigma_max(std::vector<double>{2, 2, 2, 2}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(sigma_max(std::vector<double>{}), ValidationError);
}

TEST_CASE("n_sigma_frac: std of the high-score prefix") {
  CHECK(n_sigma_frac(std::vector<double>{10, 6, 4, 2}, 0.5) ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(n_sigma_frac(std::vector<double>{10, 6, 4, 2}, 1.0) == 0.0);
  CHECK(n_sigma_frac(std::vector<double>{3, 3, 3}, 0.5) == 0.0);
  CHECK_THROWS_AS(n_sigma_frac(std::vector<double>{1, 2}, 0.0), ValidationError);
  CHECK_THROWS_AS(n_sigma_frac(std::vector<double>{1, 2}, 1.5), ValidationError);
  // The top score is always in the prefix, even when negative.
  CHECK(n_sigma_frac(std::vector<double>{-2, -8}, 0.5) == 0.0);
}

TEST_CASE("smv: weighted log-ratio deviation") {
  const double expected =
      (4.0 * std::fabs(std::log(4.0 / 3.0)) + 2.0 * std::fabs(std::log(2.0 / 3.0))) /
      2.0;
  CHECK(smv(scores_of({4, 2}), 2, NormMode::None) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(smv(scores_of({4, 2}), 2, NormMode::None) ==
        doctest::Approx(0.980829).epsilon(1e-6));
  CHECK(smv(scores_of({3, 3, 3}), 3, NormMode::None) == 0.0);
  CHECK(smv(scores_of({4, 2}), 2, NormMode::Provided, 2.0) ==
        doctest::Approx(0.490414).epsilon(1e-6));
  CHECK_THROWS_AS(smv(scores_of({1.0, -0.5}), 2, NormMode::None), ValidationError);
  // Shift policy moves the minimum to +epsilon and keeps the op defined.
  CHECK_NOTHROW(smv(scores_of({1.0, -0.5}), 2, NormMode::None, std::nullopt, true));
}

TEST_CASE("scnqc: generalized deviation reduces to nqc at defaults") {
  CHECK(scnqc(scores_of({5, 4, 3}), 3, 1.0, 2.0, 0.0) ==
        doctest::Approx(0.816497).epsilon(1e-6));
  CHECK(scnqc(scores_of({5, 4, 3}), 3, 1.0, 2.0, 0.0) ==
        nqc(scores_of({5, 4, 3}), 3, NormMode::None));
  CHECK(scnqc(scores_of({5, 4, 3}), 3, 1.0, 1.0, 0.0) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  std::vector<double> zero_weights{0.0, 0.0, 0.0};
  CHECK(scnqc(scores_of({5, 4, 3}), 3, 1.0, 2.0, 1.0, zero_weights) == 0.0);
  CHECK_THROWS_AS(scnqc(scores_of({5, 4, 3}), 3, 1.0, 0.0, 0.0), ValidationError);
}

TEST_CASE("scnqc equals nqc at defaults on random inputs") {
  DeterministicRng rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> values(2 + rng.bounded(30));
    for (auto& v : values)
      v = static_cast<double>(rng.bounded(1000)) / 10.0 + 1.0;
    std::sort(values.rbegin(), values.rend());
    auto s = scores_of(values);
    for (auto norm : {NormMode::None, NormMode::MeanAbs}) {
      const double a = scnqc(s, 100, 1.0, 2.0, 0.0, {}, norm);
      const double b = nqc(s, 100, norm);
      REQUIRE(std::fabs(a - b) <= 1e-12);
    }
  }
}

TEST_CASE("rsd: exhaustive enumeration and degenerate sampling") {
  // Sublists of size 2 from [3,2,1]: sigma = 0.5, 1.0, 0.5.
  CHECK(rsd(scores_of({3, 2, 1}), 3, NormMode::None, 1, 2, 0, true) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  // One sample of the full list is exactly nqc.
  CHECK(rsd(scores_of({9, 5, 2}), 3, NormMode::None, 1, 3, 123, false) ==
        nqc(scores_of({9, 5, 2}), 3, NormMode::None));
  CHECK(rsd(scores_of({4, 4, 4, 4}), 4, NormMode::None, 10, 2, 5, false) == 0.0);
  CHECK_THROWS_AS(rsd(scores_of({1, 2}), 2, NormMode::None, 1, 3, 0, false),
                  ValidationError);
}

TEST_CASE("rsd: exhaustive guard rejects blow-ups") {
  std::vector<double> big(60);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = 100.0 - static_cast<double>(i);
  CHECK_THROWS_AS(rsd(scores_of(big), 60, NormMode::None, 1, 30, 0, true),
                  ValidationError);
}

TEST_CASE("rsd sampling is deterministic in the seed") {
  auto s = scores_of({9, 7, 6, 4, 3, 2, 1, 0.5});
  const double a = rsd(s, 8, NormMode::None, 25, 4, 777, false);
  const double b = rsd(s, 8, NormMode::None, 25, 4, 777, false);
  const double c = rsd(s, 8, NormMode::None, 25, 4, 778, false);
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("uef: degrades to nqc without embeddings") {
  auto list = list_from_scores("q1", {9, 7, 5, 3});
  CHECK(uef(list, nullptr, 4, NormMode::None, 10, 2, 42) ==
        nqc(scores_of({9, 7, 5, 3}), 4, NormMode::None));
}

TEST_CASE("uef: centroid re-ranking weights the base estimate") {
  // Two docs, sublist size 2: there is exactly one sample, so the weight
  // is determined by geometry alone.
  auto list = list_from_scores("q1", {9.0, 1.0});
  const double base = nqc(scores_of({9.0, 1.0}), 2, NormMode::None);

  // Collinear vectors: every cosine ties, doc id keeps the original order,
  // tau = 1 and the sample contributes the full base estimate.
  EmbeddingTable collinear;
  collinear.dim = 2;
  collinear.vectors["d1"] = {1.0, 0.0};
  collinear.vectors["d2"] = {10.0, 0.0};
  CHECK(uef(list, &collinear, 2, NormMode::None, 3, 2, 7) ==
        doctest::Approx(base).epsilon(1e-12));

  // The centroid of (1,0) and (0,10) points almost along d2, so the
  // re-ranking reverses the pair: tau = -1, weight 0.
  EmbeddingTable reversing;
  reversing.dim = 2;
  reversing.vectors["d1"] = {1.0, 0.0};
  reversing.vectors["d2"] = {0.0, 10.0};
  CHECK(uef(list, &reversing, 2, NormMode::None, 3, 2, 7) == 0.0);

  EmbeddingTable missing;
  missing.dim = 2;
  missing.vectors["d1"] = {1.0, 0.0};
  CHECK_THROWS_WITH_AS(uef(list, &missing, 2, NormMode::None, 3, 2, 7),
                       doctest::Contains("d2"), ValidationError);
}

TEST_CASE("qv_nqc: convex mix of base estimates") {
  // nqc of [1.4, 0.6] is 0.4; [1.2, 0.8] gives 0.2.
  auto original = scores_of({1.4, 0.6});
  std::vector<ScoreList> variants{scores_of({1.2, 0.8}), scores_of({1.4, 0.6})};
  CHECK(nqc(original, 2, NormMode::None) == doctest::Approx(0.4).epsilon(1e-12));
  CHECK(qv_nqc(original, variants, 0.5, 2, NormMode::None) ==
        doctest::Approx(0.35).epsilon(1e-12));
  CHECK(qv_nqc(original, {}, 0.5, 2, NormMode::None) ==
        nqc(original, 2, NormMode::None));
  std::vector<ScoreList> same{original, original};
  for (double lambda : {0.0, 0.3, 1.0})
    CHECK(qv_nqc(original, same, lambda, 2, NormMode::None) ==
          doctest::Approx(nqc(original, 2, NormMode::None)).epsilon(1e-12));
}

TEST_CASE("dm: negated embedding diameter") {
  EmbeddingTable embeddings;
  embeddings.dim = 2;
  embeddings.vectors["d1"] = {0.0, 0.0};
  embeddings.vectors["d2"] = {3.0, 4.0};
  auto list = list_from_scores("q1", {2.0, 1.0});
  CHECK(dm(list, embeddings, 2) == -5.0);
  CHECK(dm(list, embeddings, 1) == 0.0);

  EmbeddingTable identical;
  identical.dim = 2;
  identical.vectors["d1"] = {1.0, 1.0};
  identical.vectors["d2"] = {1.0, 1.0};
  CHECK(dm(list, identical, 2) == 0.0);

  EmbeddingTable missing;
  missing.dim = 2;
  missing.vectors["d1"] = {0.0, 0.0};
  CHECK_THROWS_WITH_AS(dm(list, missing, 2), doctest::Contains("d2"),
                       ValidationError);
  CHECK_THROWS_AS(dm(list, embeddings, 0), ValidationError);
}

TEST_CASE("dm is translation and rotation invariant") {
  EmbeddingTable base;
  base.dim = 2;
  base.vectors["d1"] = {0.3, -1.2};
  base.vectors["d2"] = {2.0, 0.7};
  base.vectors["d3"] = {-0.5, 0.1};
  auto list = list_from_scores("q1", {3, 2, 1});
  const double reference = dm(list, base, 3);

  const double angle = 0.77;
  EmbeddingTable moved;
  moved.dim = 2;
  for (const auto& [doc, v] : base.vectors)
    moved.vectors[doc] = {std::cos(angle) * v[0] - std::sin(angle) * v[1] + 10.0,
                          std::sin(angle) * v[0] + std::cos(angle) * v[1] - 3.0};
  CHECK(dm(list, moved, 3) == doctest::Approx(reference).epsilon(1e-12));
}

TEST_CASE("scale covariance and invariance") {
  DeterministicRng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> values(3 + rng.bounded(20));
    for (auto& v : values) v = static_cast<double>(rng.bounded(500)) / 10.0 + 1.0;
    std::sort(values.rbegin(), values.rend());
    const double c = 0.5 + static_cast<double>(rng.bounded(50)) / 10.0;
    std::vector<double> scaled(values);
    for (auto& v : scaled) v *= c;

    // Positively homogeneous of degree 1 under norm=none.
    CHECK(nqc(scores_of(scaled), 10, NormMode::None) ==
          doctest::Approx(c * nqc(scores_of(values), 10, NormMode::None))
              .epsilon(1e-12));
    CHECK(sigma_max(scaled) == doctest::Approx(c * sigma_max(values)).epsilon(1e-12));
    CHECK(n_sigma_frac(scaled, 0.5) ==
          doctest::Approx(c * n_sigma_frac(values, 0.5)).epsilon(1e-12));
    // Scale-invariant under mean_abs with positive scores.
    CHECK(nqc(scores_of(scaled), 10, NormMode::MeanAbs) ==
          doctest::Approx(nqc(scores_of(values), 10, NormMode::MeanAbs))
              .epsilon(1e-12));
  }
}

TEST_CASE("predictor spec grammar and defaults") {
  auto nqc_spec = PredictorSpec::parse("nqc");
  CHECK(nqc_spec.id == PredictorId::Nqc);
  CHECK(nqc_spec.k == 100);
  CHECK(nqc_spec.norm == NormMode::MeanAbs);
  CHECK(nqc_spec.name == "nqc");

  auto custom = PredictorSpec::parse("nqc:k=10,norm=none,id=nqc10");
  CHECK(custom.k == 10);
  CHECK(custom.norm == NormMode::None);
  CHECK(custom.name == "nqc10");

  auto wig_spec = PredictorSpec::parse("wig");
  CHECK(wig_spec.k == 5);

  auto frac = PredictorSpec::parse("sigma_frac:x=0.5");
  CHECK(frac.x == 0.5);
  CHECK_FALSE(frac.k.has_value());

  auto uef_spec = PredictorSpec::parse("uef:k=100,samples=30,sub=50,seed=13");
  CHECK(uef_spec.k == 100);
  CHECK(uef_spec.samples == 30);
  CHECK(uef_spec.sublist == 50);
  CHECK(uef_spec.seed == 13);
  CHECK(uef_spec.sublist_size(100) == 50);
  CHECK(PredictorSpec::parse("rsd").sublist_size(100) == 50);
  CHECK(PredictorSpec::parse("rsd").sublist_size(3) == 2);

  auto external = PredictorSpec::parse("external:file=bertqpp.tsv");
  CHECK(external.id == PredictorId::External);
  CHECK(external.external_file == "bertqpp.tsv");
  CHECK(external.name == "bertqpp");

  auto dm_spec = PredictorSpec::parse("dm");
  CHECK(dm_spec.k == 5);

  CHECK_THROWS_AS(PredictorSpec::parse("nqc:k=0"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("nqc:bogus=1"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("unknown"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("external"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("sigma_frac:x=1.5"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("qv_nqc:lambda=1.5"), ConfigError);
  CHECK_THROWS_AS(PredictorSpec::parse("nqc:file=x.tsv"), ConfigError);
}

TEST_CASE("build_prediction_matrix: native, external, determinism") {
  std::istringstream run("q1 Q0 d1 1 5.0 t\nq1 Q0 d2 2 4.0 t\nq1 Q0 d3 3 3.0 t\n");
  auto matrix = assemble_run_matrix({{"bm25", parse_run_file(run, "bm25")}},
                                    AssemblePolicy::Strict);

  auto spec = PredictorSpec::parse("nqc:k=100,norm=none");
  auto predictions = build_prediction_matrix(matrix, spec, {});
  CHECK(predictions.values[0][0] == doctest::Approx(0.816497).epsilon(1e-6));

  std::istringstream ext("q1\tbm25\t0.42\n");
  auto external = parse_prediction_file(ext, "ext");
  SideInputs side;
  side.external = &external;
  auto ext_matrix = build_prediction_matrix(
      matrix, PredictorSpec::parse("external:file=ext.tsv"), side);
  CHECK(ext_matrix.values[0][0] == 0.42);

  std::istringstream short_ext("q9\tbm25\t0.42\n");
  auto incomplete = parse_prediction_file(short_ext, "ext");
  side.external = &incomplete;
  CHECK_THROWS_WITH_AS(
      build_prediction_matrix(matrix, PredictorSpec::parse("external:file=e.tsv"),
                              side),
      doctest::Contains("(q1, bm25)"), ValidationError);
}

TEST_CASE("per-cell seeding makes sampling schedule-independent") {
  std::istringstream run_a(
      "q1 Q0 d1 1 9.0 t\nq1 Q0 d2 2 7.0 t\nq1 Q0 d3 3 4.0 t\nq1 Q0 d4 4 2.0 t\n"
      "q2 Q0 d1 1 8.0 t\nq2 Q0 d2 2 5.0 t\nq2 Q0 d3 3 3.0 t\nq2 Q0 d4 4 1.0 t\n");
  auto both = assemble_run_matrix({{"r1", parse_run_file(run_a, "r1")}},
                                  AssemblePolicy::Strict);
  std::istringstream run_b("q2 Q0 d1 1 8.0 t\nq2 Q0 d2 2 5.0 t\nq2 Q0 d3 3 3.0 t\nq2 Q0 d4 4 1.0 t\n");
  auto only_q2 = assemble_run_matrix({{"r1", parse_run_file(run_b, "r1")}},
                                     AssemblePolicy::Strict);

  auto spec = PredictorSpec::parse("rsd:k=4,samples=5,sub=2");
  auto wide = build_prediction_matrix(both, spec, {}, 99);
  auto narrow = build_prediction_matrix(only_q2, spec, {}, 99);
  // q2's draw stream depends only on (seed, query, ranker).
  CHECK(wide.values[1][0] == narrow.values[0][0]);

  auto again = build_prediction_matrix(both, spec, {}, 99);
  CHECK(wide.values == again.values);
}
