#include "qppeval/significance.hpp"

#include <cmath>

#include "qppeval/errors.hpp"

namespace qpp {

namespace {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

// Continued fraction for the incomplete beta function (modified Lentz).
double incomplete_beta_cf(double x, double a, double b) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-14;
  constexpr int kMaxIterations = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const int m2 = 2 * m;
    double numer = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + numer * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    numer = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + numer * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + numer / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw ValidationError("incomplete beta continued fraction did not converge");
}

double regularized_incomplete_beta(double x, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front =
      std::exp(a * std::log(x) + b * std::log(1.0 - x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0))
    return front * incomplete_beta_cf(x, a, b) / a;
  return 1.0 - front * incomplete_beta_cf(1.0 - x, b, a) / b;
}

}  // namespace

double student_t_cdf(double t, int df) {
  if (!std::isfinite(t)) throw ValidationError("t statistic must be finite");
  if (df < 1) throw ValidationError("degrees of freedom must be >= 1");
  const double v = static_cast<double>(df);
  const double x = v / (v + t * t);
  const double tail = regularized_incomplete_beta(x, v / 2.0, 0.5) / 2.0;
  return t >= 0.0 ? 1.0 - tail : tail;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw ValidationError("paired t-test: samples differ in length");
  const std::size_t n = a.size();
  if (n < 2)
    throw ValidationError("paired t-test needs at least 2 pairs, got " +
                          std::to_string(n));

  double mean_diff = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean_diff += a[i] - b[i];
  mean_diff /= static_cast<double>(n);

  double sum_sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (a[i] - b[i]) - mean_diff;
    sum_sq += d * d;
  }
  const double sd = std::sqrt(sum_sq / static_cast<double>(n - 1));

  TTestResult result;
  result.df = static_cast<int>(n) - 1;
  result.mean_diff = mean_diff;
  if (sd == 0.0) {
    result.t_stat = 0.0;
    result.p_value = 1.0;
    return result;
  }
  result.t_stat = mean_diff / (sd / std::sqrt(static_cast<double>(n)));
  result.p_value = 2.0 * (1.0 - student_t_cdf(std::fabs(result.t_stat), result.df));
  return result;
}

const SignificanceCell* SignificanceMatrix::find(const std::string& a,
                                                 const std::string& b) const {
  for (const auto& cell : cells)
    if ((cell.a == a && cell.b == b) || (cell.a == b && cell.b == a)) return &cell;
  return nullptr;
}

SignificanceMatrix significance_matrix(
    const std::vector<std::pair<std::string, std::vector<TauResult>>>& per_unit_taus,
    double alpha, bool bonferroni) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ConfigError("significance level must be in (0, 1)");
  if (per_unit_taus.size() < 2)
    throw ValidationError("significance matrix needs at least 2 predictors");
  const std::size_t axis = per_unit_taus.front().second.size();
  for (const auto& [name, taus] : per_unit_taus)
    if (taus.size() != axis)
      throw ValidationError("per-unit vectors do not share a unit axis ('" + name +
                            "' has " + std::to_string(taus.size()) + " of " +
                            std::to_string(axis) + " units)");

  SignificanceMatrix matrix;
  matrix.alpha = alpha;
  matrix.bonferroni = bonferroni;
  for (const auto& [name, taus] : per_unit_taus) matrix.predictors.push_back(name);

  const std::size_t pair_count =
      per_unit_taus.size() * (per_unit_taus.size() - 1) / 2;
  const double level = bonferroni ? alpha / static_cast<double>(pair_count) : alpha;

  for (std::size_t i = 0; i + 1 < per_unit_taus.size(); ++i) {
    for (std::size_t j = i + 1; j < per_unit_taus.size(); ++j) {
      const auto& [name_a, taus_a] = per_unit_taus[i];
      const auto& [name_b, taus_b] = per_unit_taus[j];
      std::vector<double> a, b;
      for (std::size_t u = 0; u < axis; ++u) {
        if (taus_a[u].defined && taus_b[u].defined) {
          a.push_back(taus_a[u].value);
          b.push_back(taus_b[u].value);
        }
      }
      TTestResult test;
      try {
        test = paired_t_test(a, b);
      } catch (const ValidationError& e) {
        throw ValidationError("pair (" + name_a + ", " + name_b + "): " + e.what());
      }
      SignificanceCell cell;
      cell.a = name_a;
      cell.b = name_b;
      cell.mean_diff = test.mean_diff;
      cell.p_value = test.p_value;
      cell.df = test.df;
      cell.direction = test.mean_diff > 0.0   ? Direction::ABetter
                       : test.mean_diff < 0.0 ? Direction::BBetter
                                              : Direction::Tie;
      cell.significant = test.p_value < level;
      matrix.cells.push_back(std::move(cell));
    }
  }
  return matrix;
}

}  // namespace qpp
