#include "qppeval/predictors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "qppeval/errors.hpp"
#include "qppeval/kendall.hpp"
#include "qppeval/log.hpp"

namespace qpp {

namespace {

constexpr double kDivisorFloor = 1e-9;
constexpr double kShiftEpsilon = 1e-6;
constexpr double kExhaustiveLimit = 1e5;

std::span<const double> top_k(std::span<const double> scores, std::optional<int> k) {
  if (scores.empty()) throw ValidationError("empty score list");
  if (!k.has_value()) return scores;
  return scores.subspan(0, std::min<std::size_t>(scores.size(),
                                                 static_cast<std::size_t>(*k)));
}

double mean_of(std::span<const double> values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

// C(n, r) capped at the exhaustive-enumeration limit; returns limit+1 on
// overflow of the cap.
double combinations_capped(std::size_t n, std::size_t r) {
  if (r > n) return 0.0;
  r = std::min(r, n - r);
  double c = 1.0;
  for (std::size_t i = 1; i <= r; ++i) {
    c *= static_cast<double>(n - r + i) / static_cast<double>(i);
    if (c > kExhaustiveLimit) return kExhaustiveLimit + 1.0;
  }
  return c;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<std::size_t> sample_without_replacement(DeterministicRng& rng,
                                                    std::size_t n, std::size_t r) {
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  for (std::size_t i = 0; i < r; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(r);
  std::sort(indices.begin(), indices.end());
  return indices;
}

const std::vector<double>& embedding_for(const EmbeddingTable& embeddings,
                                         const std::string& doc_id) {
  auto it = embeddings.vectors.find(doc_id);
  if (it == embeddings.vectors.end())
    throw ValidationError("no embedding vector for document '" + doc_id + "'");
  return it->second;
}

}  // namespace

std::uint64_t DeterministicRng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t DeterministicRng::bounded(std::uint64_t n) {
  // Rejection below 2^64 mod n keeps the draw unbiased.
  std::uint64_t threshold = (~n + 1) % n;
  while (true) {
    std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

std::uint64_t mix_seed(std::uint64_t seed, std::string_view query_id,
                       std::string_view ranker_id) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  auto absorb = [&h](std::uint64_t byte) {
    h ^= byte;
    h *= 1099511628211ULL;
  };
  for (int i = 0; i < 8; ++i) absorb((seed >> (8 * i)) & 0xFF);
  for (unsigned char c : query_id) absorb(c);
  absorb(0xFF);
  for (unsigned char c : ranker_id) absorb(c);
  return h;
}

namespace {

// Deviations from the mean, computed relative to the first value so that
// constant inputs yield exact zeros.
std::vector<double> centered_deviations(std::span<const double> values) {
  const double shift = values[0];
  double mean = 0.0;
  for (double v : values) mean += v - shift;
  mean /= static_cast<double>(values.size());
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - shift) - mean;
  return out;
}

}  // namespace

double population_std(std::span<const double> values) {
  if (values.empty()) throw ValidationError("empty score list");
  const auto deviations = centered_deviations(values);
  double sum_sq = 0.0;
  for (double d : deviations) sum_sq += d * d;
  return std::sqrt(sum_sq / static_cast<double>(values.size()));
}

double norm_divisor(const ScoreList& scores, NormMode norm,
                    std::optional<double> provided_score) {
  switch (norm) {
    case NormMode::None:
      return 1.0;
    case NormMode::MeanAbs: {
      if (scores.full_list_scores.empty())
        throw ValidationError("mean_abs normalization needs a non-empty list");
      return std::max(std::fabs(mean_of(scores.full_list_scores)), kDivisorFloor);
    }
    case NormMode::Provided:
      if (!provided_score.has_value())
        throw ValidationError("norm=provided requires a collection score");
      return *provided_score;
  }
  return 1.0;
}

double nqc(const ScoreList& scores, std::optional<int> k, NormMode norm,
           std::optional<double> provided_score) {
  auto prefix = top_k(scores.scores, k);
  return population_std(prefix) / norm_divisor(scores, norm, provided_score);
}

double wig_collection_score(const ScoreList& scores, NormMode norm,
                            std::optional<double> provided_score) {
  if (norm == NormMode::None) return 0.0;
  return norm_divisor(scores, norm, provided_score);
}

double wig(const ScoreList& scores, std::optional<int> k, double collection_score,
           std::optional<int> query_len) {
  auto prefix = top_k(scores.scores, k);
  double sum = 0.0;
  for (double s : prefix) sum += s - collection_score;
  const double len_divisor =
      std::sqrt(static_cast<double>(std::max(1, query_len.value_or(1))));
  return sum / static_cast<double>(prefix.size()) / len_divisor;
}

double sigma_max(std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("empty score list");
  // Running population variance over growing prefixes (Welford).
  double mean = 0.0, m2 = 0.0, best = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double delta = scores[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (scores[i] - mean);
    best = std::max(best, std::sqrt(m2 / static_cast<double>(i + 1)));
  }
  return best;
}

double n_sigma_frac(std::span<const double> scores, double x) {
  if (scores.empty()) throw ValidationError("empty score list");
  if (!(x > 0.0 && x <= 1.0))
    throw ValidationError("sigma_frac fraction must be in (0, 1]");
  const double threshold = x * scores[0];
  std::size_t len = 1;
  while (len < scores.size() && scores[len] >= threshold) ++len;
  return population_std(scores.subspan(0, len));
}

double smv(const ScoreList& scores, std::optional<int> k, NormMode norm,
           std::optional<double> provided_score, bool shift_scores) {
  auto prefix = top_k(scores.scores, k);
  double shift = 0.0;
  if (shift_scores) {
    const auto& full = scores.full_list_scores.empty() ? scores.scores
                                                       : scores.full_list_scores;
    shift = *std::min_element(full.begin(), full.end()) - kShiftEpsilon;
  }
  double mean = 0.0;
  for (double s : prefix) {
    const double shifted = s - shift;
    if (shifted <= 0.0)
      throw ValidationError("smv requires positive scores (got " +
                            std::to_string(s) + "); enable the shift policy");
    mean += shifted;
  }
  mean /= static_cast<double>(prefix.size());
  double sum = 0.0;
  for (double s : prefix) {
    const double shifted = s - shift;
    sum += shifted * std::fabs(std::log(shifted / mean));
  }
  return sum / static_cast<double>(prefix.size()) /
         norm_divisor(scores, norm, provided_score);
}

double scnqc(const ScoreList& scores, std::optional<int> k, double alpha,
             double beta_p, double gamma, std::span<const double> doc_weights,
             NormMode norm, std::optional<double> provided_score) {
  auto prefix = top_k(scores.scores, k);
  if (!(beta_p > 0.0)) throw ValidationError("scnqc deviation exponent must be > 0");
  if (!doc_weights.empty() && doc_weights.size() != prefix.size())
    throw ValidationError("scnqc doc weights must match the top-k length");
  // Same deviation path as nqc, so the default hyperparameters reproduce
  // nqc bit for bit.
  const auto deviations = centered_deviations(prefix);
  double core = 0.0;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    const double w = doc_weights.empty() ? 1.0 : doc_weights[i];
    const double weight_term = gamma == 0.0 ? 1.0 : std::pow(w, gamma);
    const double dev = std::fabs(deviations[i]);
    const double dev_term = beta_p == 2.0 ? dev * dev : std::pow(dev, beta_p);
    core += weight_term * dev_term;
  }
  core /= static_cast<double>(prefix.size());
  const double root = beta_p == 2.0 ? std::sqrt(core) : std::pow(core, 1.0 / beta_p);
  const double divisor = norm_divisor(scores, norm, provided_score);
  return root / (alpha == 1.0 ? divisor : std::pow(divisor, alpha));
}

namespace {

// Applies `visit` to every r-combination of [0, n) in lexicographic order.
template <typename Visit>
void for_each_combination(std::size_t n, std::size_t r, Visit visit) {
  std::vector<std::size_t> comb(r);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    visit(comb);
    std::size_t i = r;
    while (i > 0 && comb[i - 1] == n - r + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < r; ++j) comb[j] = comb[j - 1] + 1;
  }
}

double base_on_sublist(const ScoreList& scores, std::span<const double> prefix,
                       const std::vector<std::size_t>& indices, NormMode norm,
                       std::optional<double> provided_score) {
  ScoreList sub;
  sub.scores.reserve(indices.size());
  for (std::size_t idx : indices) sub.scores.push_back(prefix[idx]);
  sub.full_list_scores = scores.full_list_scores;
  return nqc(sub, std::nullopt, norm, provided_score);
}

}  // namespace

double rsd(const ScoreList& scores, std::optional<int> k, NormMode norm,
           int samples, int sublist_len, std::uint64_t seed, bool exhaustive,
           std::optional<double> provided_score) {
  auto prefix = top_k(scores.scores, k);
  const std::size_t len = prefix.size();
  const std::size_t sub = static_cast<std::size_t>(sublist_len);
  if (sub > len)
    throw ValidationError("sublist size " + std::to_string(sub) +
                          " exceeds list length " + std::to_string(len));
  if (exhaustive) {
    if (combinations_capped(len, sub) > kExhaustiveLimit)
      throw ValidationError("exhaustive sublist enumeration exceeds " +
                            std::to_string(static_cast<long>(kExhaustiveLimit)) +
                            " combinations");
    double sum = 0.0;
    std::size_t count = 0;
    for_each_combination(len, sub, [&](const std::vector<std::size_t>& comb) {
      sum += base_on_sublist(scores, prefix, comb, norm, provided_score);
      ++count;
    });
    return sum / static_cast<double>(count);
  }
  if (samples < 1) throw ValidationError("sample count must be >= 1");
  DeterministicRng rng(seed);
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto indices = sample_without_replacement(rng, len, sub);
    sum += base_on_sublist(scores, prefix, indices, norm, provided_score);
  }
  return sum / static_cast<double>(samples);
}

double uef(const RankedList& list, const EmbeddingTable* embeddings,
           std::optional<int> k, NormMode norm, int samples, int sublist_len,
           std::uint64_t seed, std::optional<double> provided_score) {
  ScoreList scores{list.scores(), list.scores()};
  const double base = nqc(scores, k, norm, provided_score);
  if (embeddings == nullptr) return base;

  auto prefix = top_k(std::span<const double>(scores.scores), k);
  const std::size_t len = prefix.size();
  const std::size_t sub = static_cast<std::size_t>(sublist_len);
  if (sub > len)
    throw ValidationError("sublist size " + std::to_string(sub) +
                          " exceeds list length " + std::to_string(len));
  if (samples < 1) throw ValidationError("sample count must be >= 1");

  std::vector<const std::vector<double>*> vectors(len);
  for (std::size_t i = 0; i < len; ++i)
    vectors[i] = &embedding_for(*embeddings, list.entries[i].doc_id);
  const std::size_t dim = embeddings->dim;

  DeterministicRng rng(seed);
  double weight_sum = 0.0;
  std::vector<double> centroid(dim);
  for (int s = 0; s < samples; ++s) {
    auto indices = sample_without_replacement(rng, len, sub);
    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t idx : indices)
      for (std::size_t d = 0; d < dim; ++d) centroid[d] += (*vectors[idx])[d];
    for (std::size_t d = 0; d < dim; ++d) centroid[d] /= static_cast<double>(sub);

    // Re-rank the whole top-k by similarity to the sublist centroid,
    // doc_id breaking ties, then compare against the original order.
    std::vector<std::size_t> reranked(len);
    std::iota(reranked.begin(), reranked.end(), 0);
    std::vector<double> similarity(len);
    for (std::size_t i = 0; i < len; ++i)
      similarity[i] = cosine_similarity(centroid, *vectors[i]);
    std::sort(reranked.begin(), reranked.end(), [&](std::size_t a, std::size_t b) {
      if (similarity[a] != similarity[b]) return similarity[a] > similarity[b];
      return list.entries[a].doc_id < list.entries[b].doc_id;
    });
    std::vector<double> original_pos(len), reranked_pos(len);
    for (std::size_t pos = 0; pos < len; ++pos) {
      original_pos[pos] = static_cast<double>(pos + 1);
      reranked_pos[reranked[pos]] = static_cast<double>(pos + 1);
    }
    const TauResult tau = kendall_tau_b(original_pos, reranked_pos);
    weight_sum += (1.0 + tau.value) / 2.0;
  }
  return base * weight_sum / static_cast<double>(samples);
}

double qv_nqc(const ScoreList& original, const std::vector<ScoreList>& variants,
              double lambda, std::optional<int> k, NormMode norm,
              std::optional<double> provided_score) {
  const double base = nqc(original, k, norm, provided_score);
  if (variants.empty()) return base;
  double variant_sum = 0.0;
  for (const auto& variant : variants)
    variant_sum += nqc(variant, k, norm, provided_score);
  const double variant_mean = variant_sum / static_cast<double>(variants.size());
  return lambda * base + (1.0 - lambda) * variant_mean;
}

double dm(const RankedList& list, const EmbeddingTable& embeddings, int k) {
  if (k < 1) throw ValidationError("dm cutoff must be >= 1");
  if (list.entries.empty()) throw ValidationError("empty score list");
  const std::size_t depth =
      std::min<std::size_t>(list.entries.size(), static_cast<std::size_t>(k));
  std::vector<const std::vector<double>*> vectors(depth);
  for (std::size_t i = 0; i < depth; ++i)
    vectors[i] = &embedding_for(embeddings, list.entries[i].doc_id);
  double diameter = 0.0;
  for (std::size_t i = 0; i + 1 < depth; ++i) {
    for (std::size_t j = i + 1; j < depth; ++j) {
      double sum_sq = 0.0;
      for (std::size_t d = 0; d < vectors[i]->size(); ++d) {
        const double diff = (*vectors[i])[d] - (*vectors[j])[d];
        sum_sq += diff * diff;
      }
      diameter = std::max(diameter, std::sqrt(sum_sq));
    }
  }
  return -diameter;
}

namespace {

struct SpecKeyValue {
  std::string key;
  std::string value;
};

std::vector<SpecKeyValue> split_spec_options(const std::string& body,
                                             const std::string& text) {
  std::vector<SpecKeyValue> options;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t comma = body.find(',', start);
    std::string token = body.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    if (!token.empty()) {
      std::size_t eq = token.find('=');
      if (eq == std::string::npos || eq == 0)
        throw ConfigError("predictor spec '" + text + "': expected key=value, got '" +
                          token + "'");
      options.push_back({token.substr(0, eq), token.substr(eq + 1)});
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return options;
}

int spec_int(const SpecKeyValue& kv, const std::string& text) {
  int value = 0;
  auto [ptr, ec] =
      std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), value);
  if (ec != std::errc() || ptr != kv.value.data() + kv.value.size())
    throw ConfigError("predictor spec '" + text + "': " + kv.key +
                      " must be an integer, got '" + kv.value + "'");
  return value;
}

double spec_double(const SpecKeyValue& kv, const std::string& text) {
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), value);
  if (ec != std::errc() || ptr != kv.value.data() + kv.value.size())
    throw ConfigError("predictor spec '" + text + "': " + kv.key +
                      " must be a number, got '" + kv.value + "'");
  return value;
}

bool spec_bool(const SpecKeyValue& kv, const std::string& text) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw ConfigError("predictor spec '" + text + "': " + kv.key +
                    " must be true or false, got '" + kv.value + "'");
}

std::string file_stem(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name = name.substr(0, dot);
  return name;
}

}  // namespace

PredictorSpec PredictorSpec::parse(const std::string& text) {
  PredictorSpec spec;
  std::string kind = text;
  std::string options_body;
  std::size_t colon = text.find(':');
  if (colon != std::string::npos) {
    kind = text.substr(0, colon);
    options_body = text.substr(colon + 1);
  }

  if (kind == "nqc") {
    spec.id = PredictorId::Nqc;
    spec.k = 100;
  } else if (kind == "wig") {
    spec.id = PredictorId::Wig;
    spec.k = 5;
  } else if (kind == "sigma_max") {
    spec.id = PredictorId::SigmaMax;
    spec.norm = NormMode::None;
  } else if (kind == "sigma_frac") {
    spec.id = PredictorId::SigmaFrac;
    spec.norm = NormMode::None;
  } else if (kind == "smv") {
    spec.id = PredictorId::Smv;
    spec.k = 100;
  } else if (kind == "uef") {
    spec.id = PredictorId::Uef;
    spec.k = 100;
  } else if (kind == "rsd") {
    spec.id = PredictorId::Rsd;
    spec.k = 100;
  } else if (kind == "scnqc") {
    spec.id = PredictorId::Scnqc;
    spec.k = 100;
  } else if (kind == "qv_nqc") {
    spec.id = PredictorId::QvNqc;
    spec.k = 100;
  } else if (kind == "dm") {
    spec.id = PredictorId::Dm;
    spec.k = 5;
  } else if (kind == "external") {
    spec.id = PredictorId::External;
  } else {
    throw ConfigError("predictor spec '" + text + "': unknown predictor '" + kind +
                      "'");
  }

  for (const auto& kv : split_spec_options(options_body, text)) {
    if (kv.key == "id") {
      spec.name = kv.value;
    } else if (kv.key == "k") {
      int k = spec_int(kv, text);
      if (k < 1) throw ConfigError("predictor spec '" + text + "': k must be >= 1");
      spec.k = k;
    } else if (kv.key == "x") {
      spec.x = spec_double(kv, text);
      if (!(spec.x > 0.0 && spec.x <= 1.0))
        throw ConfigError("predictor spec '" + text + "': x must be in (0, 1]");
    } else if (kv.key == "norm") {
      if (kv.value == "none")
        spec.norm = NormMode::None;
      else if (kv.value == "mean_abs")
        spec.norm = NormMode::MeanAbs;
      else if (kv.value == "provided")
        spec.norm = NormMode::Provided;
      else
        throw ConfigError("predictor spec '" + text + "': unknown norm '" + kv.value +
                          "'");
    } else if (kv.key == "samples") {
      spec.samples = spec_int(kv, text);
      if (spec.samples < 1)
        throw ConfigError("predictor spec '" + text + "': samples must be >= 1");
    } else if (kv.key == "sub") {
      int sub = spec_int(kv, text);
      if (sub < 2)
        throw ConfigError("predictor spec '" + text + "': sub must be >= 2");
      spec.sublist = sub;
    } else if (kv.key == "exhaustive") {
      spec.exhaustive = spec_bool(kv, text);
    } else if (kv.key == "lambda") {
      spec.lambda = spec_double(kv, text);
      if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0))
        throw ConfigError("predictor spec '" + text + "': lambda must be in [0, 1]");
    } else if (kv.key == "alpha") {
      spec.alpha = spec_double(kv, text);
    } else if (kv.key == "beta") {
      spec.beta_p = spec_double(kv, text);
      if (!(spec.beta_p > 0.0))
        throw ConfigError("predictor spec '" + text + "': beta must be > 0");
    } else if (kv.key == "gamma") {
      spec.gamma = spec_double(kv, text);
    } else if (kv.key == "seed") {
      std::uint64_t seed = 0;
      auto [ptr, ec] =
          std::from_chars(kv.value.data(), kv.value.data() + kv.value.size(), seed);
      if (ec != std::errc() || ptr != kv.value.data() + kv.value.size())
        throw ConfigError("predictor spec '" + text +
                          "': seed must be an unsigned integer");
      spec.seed = seed;
    } else if (kv.key == "shift") {
      spec.shift_scores = spec_bool(kv, text);
    } else if (kv.key == "file") {
      if (spec.id != PredictorId::External)
        throw ConfigError("predictor spec '" + text +
                          "': file= applies to external only");
      spec.external_file = kv.value;
    } else {
      throw ConfigError("predictor spec '" + text + "': unknown key '" + kv.key +
                        "'");
    }
  }

  if (spec.id == PredictorId::External && spec.external_file.empty())
    throw ConfigError("predictor spec '" + text + "': external requires file=");
  if (spec.name.empty())
    spec.name = spec.id == PredictorId::External ? file_stem(spec.external_file)
                                                 : spec.kind_name();
  return spec;
}

std::string PredictorSpec::kind_name() const {
  switch (id) {
    case PredictorId::Nqc: return "nqc";
    case PredictorId::Wig: return "wig";
    case PredictorId::SigmaMax: return "sigma_max";
    case PredictorId::SigmaFrac: return "sigma_frac";
    case PredictorId::Smv: return "smv";
    case PredictorId::Uef: return "uef";
    case PredictorId::Rsd: return "rsd";
    case PredictorId::Scnqc: return "scnqc";
    case PredictorId::QvNqc: return "qv_nqc";
    case PredictorId::Dm: return "dm";
    case PredictorId::External: return "external";
  }
  return "?";
}

int PredictorSpec::sublist_size(int top_len) const {
  if (sublist.has_value()) return *sublist;
  return std::max(2, top_len / 2);
}

namespace {

double provided_for(const PredictorSpec& spec, const SideInputs& side,
                    const std::string& query_id, bool* has_value) {
  *has_value = false;
  if (spec.norm != NormMode::Provided) return 0.0;
  if (side.collection_scores == nullptr)
    throw ValidationError("norm=provided requires a collection scores side input");
  auto it = side.collection_scores->find(query_id);
  if (it == side.collection_scores->end())
    throw ValidationError("no collection score for query '" + query_id + "'");
  *has_value = true;
  return it->second;
}

double evaluate_cell(const PredictorSpec& spec, const RunMatrix& runs,
                     const SideInputs& side, const std::string& query_id,
                     const std::string& ranker_id, std::uint64_t global_seed) {
  const RankedList& list = runs.at(query_id, ranker_id);
  ScoreList scores{list.scores(), list.scores()};

  bool has_provided = false;
  const double provided_value = provided_for(spec, side, query_id, &has_provided);
  const std::optional<double> provided =
      has_provided ? std::optional<double>(provided_value) : std::nullopt;

  switch (spec.id) {
    case PredictorId::Nqc:
      return nqc(scores, spec.k, spec.norm, provided);
    case PredictorId::Wig: {
      std::optional<int> query_len;
      if (side.query_meta != nullptr) {
        auto it = side.query_meta->find(query_id);
        if (it != side.query_meta->end()) query_len = it->second.term_count;
      }
      return wig(scores, spec.k, wig_collection_score(scores, spec.norm, provided),
                 query_len);
    }
    case PredictorId::SigmaMax:
      return sigma_max(top_k(scores.scores, spec.k)) /
             norm_divisor(scores, spec.norm, provided);
    case PredictorId::SigmaFrac:
      return n_sigma_frac(top_k(scores.scores, spec.k), spec.x) /
             norm_divisor(scores, spec.norm, provided);
    case PredictorId::Smv:
      return smv(scores, spec.k, spec.norm, provided, spec.shift_scores);
    case PredictorId::Scnqc:
      return scnqc(scores, spec.k, spec.alpha, spec.beta_p, spec.gamma, {},
                   spec.norm, provided);
    case PredictorId::Rsd: {
      const int top_len = static_cast<int>(
          std::min<std::size_t>(scores.scores.size(),
                                static_cast<std::size_t>(
                                    spec.k.value_or(scores.scores.size()))));
      return rsd(scores, spec.k, spec.norm, spec.samples, spec.sublist_size(top_len),
                 mix_seed(spec.seed.value_or(global_seed), query_id, ranker_id),
                 spec.exhaustive, provided);
    }
    case PredictorId::Uef: {
      const int top_len = static_cast<int>(
          std::min<std::size_t>(scores.scores.size(),
                                static_cast<std::size_t>(
                                    spec.k.value_or(scores.scores.size()))));
      return uef(list, side.embeddings, spec.k, spec.norm, spec.samples,
                 spec.sublist_size(top_len),
                 mix_seed(spec.seed.value_or(global_seed), query_id, ranker_id),
                 provided);
    }
    case PredictorId::QvNqc: {
      std::vector<ScoreList> variants;
      if (side.query_meta != nullptr) {
        auto it = side.query_meta->find(query_id);
        if (it != side.query_meta->end()) {
          for (const auto& variant_id : it->second.variants) {
            const RankedList* variant_list = runs.find(variant_id, ranker_id);
            if (variant_list == nullptr || variant_list->entries.empty()) {
              log::debug("qv_nqc: no run for variant '" + variant_id + "' under '" +
                         ranker_id + "', skipping");
              continue;
            }
            variants.push_back({variant_list->scores(), variant_list->scores()});
          }
        }
      }
      return qv_nqc(scores, variants, spec.lambda, spec.k, spec.norm, provided);
    }
    case PredictorId::Dm:
      if (side.embeddings == nullptr)
        throw ValidationError("dm requires an embeddings side input");
      return dm(list, *side.embeddings, spec.k.value_or(5));
    case PredictorId::External:
      break;  // handled by the caller
  }
  throw ValidationError("unhandled predictor kind");
}

}  // namespace

PredictionMatrix build_prediction_matrix(const RunMatrix& runs,
                                         const PredictorSpec& spec,
                                         const SideInputs& side_inputs,
                                         std::uint64_t global_seed) {
  PredictionMatrix matrix;
  matrix.predictor_id = spec.name;
  matrix.queries = runs.queries;
  matrix.rankers = runs.rankers;
  matrix.values.assign(runs.queries.size(),
                       std::vector<double>(runs.rankers.size(), 0.0));

  if (spec.id == PredictorId::External) {
    if (side_inputs.external == nullptr)
      throw ValidationError("external predictor '" + spec.name +
                            "' has no prediction file loaded");
    std::vector<std::string> missing;
    for (std::size_t qi = 0; qi < runs.queries.size(); ++qi) {
      for (std::size_t ri = 0; ri < runs.rankers.size(); ++ri) {
        auto it = side_inputs.external->values.find(
            {runs.queries[qi], runs.rankers[ri]});
        if (it == side_inputs.external->values.end()) {
          missing.push_back("(" + runs.queries[qi] + ", " + runs.rankers[ri] + ")");
          continue;
        }
        matrix.values[qi][ri] = it->second;
      }
    }
    if (!missing.empty()) {
      std::string msg = "external predictor '" + spec.name + "' misses " +
                        std::to_string(missing.size()) + " cell(s):";
      for (std::size_t i = 0; i < missing.size() && i < 8; ++i) msg += " " + missing[i];
      if (missing.size() > 8) msg += " ...";
      throw ValidationError(msg);
    }
    return matrix;
  }

  for (std::size_t qi = 0; qi < runs.queries.size(); ++qi) {
    for (std::size_t ri = 0; ri < runs.rankers.size(); ++ri) {
      double value;
      try {
        value = evaluate_cell(spec, runs, side_inputs, runs.queries[qi],
                              runs.rankers[ri], global_seed);
      } catch (const ValidationError& e) {
        throw ValidationError("predictor '" + spec.name + "' at cell (" +
                              runs.queries[qi] + ", " + runs.rankers[ri] +
                              "): " + e.what());
      }
      if (!std::isfinite(value))
        throw ValidationError("predictor '" + spec.name +
                              "' produced a non-finite value at cell (" +
                              runs.queries[qi] + ", " + runs.rankers[ri] + ")");
      matrix.values[qi][ri] = value;
    }
  }
  return matrix;
}

}  // namespace qpp
