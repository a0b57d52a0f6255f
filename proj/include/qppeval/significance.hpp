#ifndef QPPEVAL_SIGNIFICANCE_HPP
#define QPPEVAL_SIGNIFICANCE_HPP

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qppeval/kendall.hpp"

namespace qpp {

// P(T <= t) for Student's t with df degrees of freedom, evaluated through
// the regularized incomplete beta function I_x(df/2, 1/2) at
// x = df / (df + t^2), continued-fraction expansion (relative accuracy
// around 1e-12, well inside the 1e-10 contract).
double student_t_cdf(double t, int df);

struct TTestResult {
  double t_stat = 0.0;
  int df = 0;
  double p_value = 1.0;
  double mean_diff = 0.0;
};

// Two-tailed paired t-test. Callers drop units that are undefined on
// either side before calling; needs at least two pairs. A zero-variance
// difference yields t = 0, p = 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

enum class Direction { ABetter, BBetter, Tie };

struct SignificanceCell {
  std::string a;
  std::string b;
  Direction direction = Direction::Tie;
  bool significant = false;
  double p_value = 1.0;
  double mean_diff = 0.0;
  int df = 0;
};

struct SignificanceMatrix {
  std::vector<std::string> predictors;
  std::vector<SignificanceCell> cells;  // one per unordered pair, a before b
  double alpha = 0.05;
  bool bonferroni = false;

  const SignificanceCell* find(const std::string& a, const std::string& b) const;
};

// Pairwise tests over per-unit correlation vectors sharing one unit axis.
// Units undefined in either vector of a pair are dropped pairwise. With
// bonferroni the significance level becomes alpha / number-of-pairs.
SignificanceMatrix significance_matrix(
    const std::vector<std::pair<std::string, std::vector<TauResult>>>& per_unit_taus,
    double alpha = 0.05, bool bonferroni = false);

}  // namespace qpp

#endif  // QPPEVAL_SIGNIFICANCE_HPP
