#include "qppeval/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "qppeval/errors.hpp"

namespace qpp {

namespace {

void check_sample(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size())
    throw ValidationError("kendall tau: paired sample sides differ in length (" +
                          std::to_string(xs.size()) + " vs " +
                          std::to_string(ys.size()) + ")");
  if (xs.size() < 2)
    throw ValidationError(
        "kendall tau: correlation is undefined for singleton sets of paired "
        "values (need length >= 2, got " +
        std::to_string(xs.size()) + ")");
  for (double v : xs)
    if (!std::isfinite(v)) throw ValidationError("kendall tau: non-finite value in x");
  for (double v : ys)
    if (!std::isfinite(v)) throw ValidationError("kendall tau: non-finite value in y");
}

TauResult finish(double numer, std::uint64_t n0, std::uint64_t tied_x_pairs,
                 std::uint64_t tied_y_pairs, TauVariant variant) {
  // tied_x_pairs / tied_y_pairs include pairs tied on both sides.
  if (n0 == tied_x_pairs) return TauResult::undefined("x degenerate");
  if (n0 == tied_y_pairs) return TauResult::undefined("y degenerate");
  if (variant == TauVariant::A)
    return TauResult::ok(numer / static_cast<double>(n0));
  const std::uint64_t x_untied = n0 - tied_x_pairs;
  const std::uint64_t y_untied = n0 - tied_y_pairs;
  // Equal factors need no square root; this keeps identity and reversal
  // samples at exactly +/-1.
  const double denom = x_untied == y_untied
                           ? static_cast<double>(x_untied)
                           : std::sqrt(static_cast<double>(x_untied)) *
                                 std::sqrt(static_cast<double>(y_untied));
  return TauResult::ok(numer / denom);
}

// Number of inversions by y (strict), counted with a merge sort over the
// index range [lo, hi). Equal y values are not inversions.
std::uint64_t merge_count(std::vector<double>& y, std::vector<double>& tmp,
                          std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t count = merge_count(y, tmp, lo, mid) + merge_count(y, tmp, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (y[i] <= y[j]) {
      tmp[k++] = y[i++];
    } else {
      count += mid - i;
      tmp[k++] = y[j++];
    }
  }
  while (i < mid) tmp[k++] = y[i++];
  while (j < hi) tmp[k++] = y[j++];
  std::copy(tmp.begin() + static_cast<std::ptrdiff_t>(lo),
            tmp.begin() + static_cast<std::ptrdiff_t>(hi),
            y.begin() + static_cast<std::ptrdiff_t>(lo));
  return count;
}

}  // namespace

TauResult kendall_tau(std::span<const double> xs, std::span<const double> ys,
                      TauVariant variant) {
  check_sample(xs, ys);
  const std::size_t n = xs.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (xs[a] != xs[b]) return xs[a] < xs[b];
    return ys[a] < ys[b];
  });

  // Tie pair counts over runs of equal x and of equal (x, y).
  std::uint64_t tied_x = 0, tied_xy = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && xs[order[j]] == xs[order[i]]) {
      std::size_t k = j;
      while (k < n && xs[order[k]] == xs[order[i]] && ys[order[k]] == ys[order[j]]) ++k;
      std::uint64_t run = k - j;
      tied_xy += run * (run - 1) / 2;
      j = k;
    }
    std::uint64_t run = j - i;
    tied_x += run * (run - 1) / 2;
    i = j;
  }

  std::vector<double> y_sorted(n), tmp(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted[i] = ys[order[i]];
  const std::uint64_t discordant = merge_count(y_sorted, tmp, 0, n);

  // y tie pairs, counted on the now y-sorted sequence.
  std::uint64_t tied_y = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && y_sorted[j] == y_sorted[i]) ++j;
    std::uint64_t run = j - i;
    tied_y += run * (run - 1) / 2;
    i = j;
  }

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  // Pairs distinct on both sides split into concordant + discordant.
  const std::uint64_t both_distinct = n0 - tied_x - tied_y + tied_xy;
  const double numer =
      static_cast<double>(both_distinct) - 2.0 * static_cast<double>(discordant);
  return finish(numer, n0, tied_x, tied_y, variant);
}

TauResult kendall_tau_bruteforce(std::span<const double> xs,
                                 std::span<const double> ys,
                                 TauVariant variant) {
  check_sample(xs, ys);
  const std::size_t n = xs.size();
  std::uint64_t concordant = 0, discordant = 0, tied_x = 0, tied_y = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j];
      const double dy = ys[i] - ys[j];
      if (dx == 0.0 && dy == 0.0) {
        ++tied_x;
        ++tied_y;
      } else if (dx == 0.0) {
        ++tied_x;
      } else if (dy == 0.0) {
        ++tied_y;
      } else if ((dx > 0.0) == (dy > 0.0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const double numer =
      static_cast<double>(concordant) - static_cast<double>(discordant);
  return finish(numer, n0, tied_x, tied_y, variant);
}

}  // namespace qpp
