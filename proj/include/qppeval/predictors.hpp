#ifndef QPPEVAL_PREDICTORS_HPP
#define QPPEVAL_PREDICTORS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qppeval/trec_io.hpp"

namespace qpp {

enum class PredictorId {
  Nqc,
  Wig,
  SigmaMax,
  SigmaFrac,
  Smv,
  Uef,
  Rsd,
  Scnqc,
  QvNqc,
  Dm,
  External,
};

// Divisor applied to score-based estimates. MeanAbs uses |mean of the full
// retrieved list's scores|, floored at 1e-9, as a collection-score
// surrogate; Provided takes a per-query value from a side input.
enum class NormMode { None, MeanAbs, Provided };

// One predictor configuration. Spec string grammar:
//   "nqc:k=100,norm=mean_abs", "sigma_frac:x=0.5",
//   "uef:k=100,samples=30,sub=50,seed=13", "external:file=preds.tsv"
// Recognized keys: id, k, x, norm, samples, sub, exhaustive, lambda, alpha,
// beta, gamma, seed, shift, file. Defaults follow the usual per-predictor
// settings (k=100 for nqc/smv, k=5 for wig and dm, x=0.5).
struct PredictorSpec {
  PredictorId id = PredictorId::Nqc;
  std::string name;               // row label in reports; unique per config
  std::optional<int> k;           // top-k cutoff; empty = full list
  double x = 0.5;                 // sigma_frac fraction, in (0, 1]
  NormMode norm = NormMode::MeanAbs;
  int samples = 30;               // m_s for uef/rsd
  std::optional<int> sublist;     // k' for uef/rsd; default max(2, k/2)
  bool exhaustive = false;
  double lambda = 0.5;            // qv_nqc mix weight
  double alpha = 1.0;             // scnqc normalization exponent
  double beta_p = 2.0;            // scnqc deviation exponent, > 0
  double gamma = 0.0;             // scnqc weight exponent
  std::optional<std::uint64_t> seed;  // overrides the global seed when set
  bool shift_scores = false;      // smv non-positive-score shift policy
  std::string external_file;      // external only

  static PredictorSpec parse(const std::string& text);
  std::string kind_name() const;
  int sublist_size(int top_len) const;
};

struct PredictionMatrix {
  std::string predictor_id;
  std::vector<std::string> queries;
  std::vector<std::string> rankers;
  std::vector<std::vector<double>> values;  // queries x rankers, finite

  double at(std::size_t query_index, std::size_t ranker_index) const {
    return values[query_index][ranker_index];
  }
};

// Scores of one retrieved list, descending. full_list_scores is the
// complete list; scores is the slice a predictor operates on (they are the
// same object for whole-list evaluation).
struct ScoreList {
  std::vector<double> scores;
  std::vector<double> full_list_scores;
};

// Deterministic 64-bit generator (splitmix64). Identical across platforms,
// one independent stream per (seed, query, ranker) cell.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform draw from [0, n), n >= 1, by rejection.
  std::uint64_t bounded(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t mix_seed(std::uint64_t seed, std::string_view query_id,
                       std::string_view ranker_id);

// Population standard deviation, sqrt(mean((s - mean)^2)).
double population_std(std::span<const double> values);

// Resolves the norm divisor D for a score list.
double norm_divisor(const ScoreList& scores, NormMode norm,
                    std::optional<double> provided_score = std::nullopt);

// sigma(top-k scores) / D.
double nqc(const ScoreList& scores, std::optional<int> k, NormMode norm,
           std::optional<double> provided_score = std::nullopt);

// (1/min(k,len)) * sum(s_i - c) / sqrt(query_len). The collection score c
// comes from the norm mode (0 for None, the MeanAbs surrogate, or the
// provided per-query value); absent query_len counts as 1.
double wig(const ScoreList& scores, std::optional<int> k, double collection_score,
           std::optional<int> query_len = std::nullopt);
double wig_collection_score(const ScoreList& scores, NormMode norm,
                            std::optional<double> provided_score = std::nullopt);

// Max over i of sigma(top-i scores).
double sigma_max(std::span<const double> scores);

// sigma over the prefix of scores >= x * scores[0]; the prefix always
// contains the top score. 0 < x <= 1.
double n_sigma_frac(std::span<const double> scores, double x);

// ((1/k') * sum s_i * |ln(s_i / mean)|) / D over the top-k prefix. Scores
// must be positive; with shift_scores the full-list minimum minus 1e-6 is
// subtracted first (off by default).
double smv(const ScoreList& scores, std::optional<int> k, NormMode norm,
           std::optional<double> provided_score = std::nullopt,
           bool shift_scores = false);

// ((1/k') * sum w_i^gamma * |s_i - mean|^beta)^(1/beta) / D^alpha over the
// top-k prefix. doc_weights defaults to all ones. Reduces to nqc at
// alpha=1, beta=2, gamma=0.
double scnqc(const ScoreList& scores, std::optional<int> k, double alpha,
             double beta_p, double gamma,
             std::span<const double> doc_weights = {}, NormMode norm = NormMode::None,
             std::optional<double> provided_score = std::nullopt);

// Mean of nqc over sublists of size sublist_len drawn from the top-k
// prefix: every C(len, k') sublist when exhaustive (guarded at 1e5),
// otherwise `samples` independent uniform draws without replacement.
double rsd(const ScoreList& scores, std::optional<int> k, NormMode norm,
           int samples, int sublist_len, std::uint64_t seed, bool exhaustive,
           std::optional<double> provided_score = std::nullopt);

// Mean over sampled sublists of w * nqc(top-k), where w = (1 + tau)/2 and
// tau compares the original top-k order against the re-ranking of the
// top-k by cosine similarity to the sublist centroid. Without embeddings
// every weight is 1 and the result equals nqc on the top-k.
double uef(const RankedList& list, const EmbeddingTable* embeddings,
           std::optional<int> k, NormMode norm, int samples, int sublist_len,
           std::uint64_t seed, std::optional<double> provided_score = std::nullopt);

// lambda * nqc(original) + (1 - lambda) * mean over variants of nqc(variant).
double qv_nqc(const ScoreList& original, const std::vector<ScoreList>& variants,
              double lambda, std::optional<int> k, NormMode norm,
              std::optional<double> provided_score = std::nullopt);

// Negated diameter (max pairwise Euclidean distance) of the top-k document
// embeddings, so that larger values predict better retrieval.
double dm(const RankedList& list, const EmbeddingTable& embeddings, int k);

struct SideInputs {
  const EmbeddingTable* embeddings = nullptr;
  const QueryMetaTable* query_meta = nullptr;
  const CollectionScores* collection_scores = nullptr;
  const ExternalPredictions* external = nullptr;
};

// Evaluates the predictor on every cell of the run matrix. Sampling
// predictors draw from a per-cell stream seeded by
// mix_seed(spec seed or global_seed, query, ranker), so results do not
// depend on evaluation order.
PredictionMatrix build_prediction_matrix(const RunMatrix& runs,
                                         const PredictorSpec& spec,
                                         const SideInputs& side_inputs,
                                         std::uint64_t global_seed = 0);

}  // namespace qpp

#endif  // QPPEVAL_PREDICTORS_HPP
