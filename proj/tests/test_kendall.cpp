#include <doctest.h>

#include <cmath>
#include <vector>

#include "qppeval/errors.hpp"
#include "qppeval/kendall.hpp"
#include "qppeval/predictors.hpp"

using qpp::kendall_tau;
using qpp::kendall_tau_b;
using qpp::kendall_tau_b_bruteforce;
using qpp::kendall_tau_bruteforce;
using qpp::TauVariant;

namespace {

std::vector<double> random_vector(qpp::DeterministicRng& rng, std::size_t len,
                                  int distinct_values) {
  std::vector<double> out(len);
  for (auto& v : out)
    v = static_cast<double>(rng.bounded(static_cast<std::uint64_t>(distinct_values)));
  return out;
}

}  // namespace

TEST_CASE("identical and reversed orders") {
  std::vector<double> xs{1, 2, 3};
  CHECK(kendall_tau_b(xs, xs).value == 1.0);
  std::vector<double> ys{3, 2, 1};
  CHECK(kendall_tau_b(xs, ys).value == -1.0);
}

TEST_CASE("tie-corrected value with a tie in x") {
  // C=2, D=0, T_x=1, T_y=0 by pair enumeration.
  std::vector<double> xs{1, 1, 2};
  std::vector<double> ys{1, 2, 3};
  CHECK(kendall_tau_b(xs, ys).value ==
        doctest::Approx(2.0 / std::sqrt(6.0)).epsilon(1e-12));
  CHECK(kendall_tau_b(xs, ys).value == doctest::Approx(0.816497).epsilon(1e-6));
}

TEST_CASE("brute force pair enumeration") {
  std::vector<double> xs{1, 2, 3, 4};
  std::vector<double> ys{1, 3, 2, 4};
  auto tau = kendall_tau_b_bruteforce(xs, ys);
  CHECK(tau.value == doctest::Approx(4.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("degenerate sides carry a reason") {
  std::vector<double> tied{2, 2, 2};
  std::vector<double> ys{1, 2, 3};
  auto tau = kendall_tau_b(tied, ys);
  CHECK_FALSE(tau.defined);
  CHECK(tau.reason == "x degenerate");
  auto flipped = kendall_tau_b(ys, tied);
  CHECK_FALSE(flipped.defined);
  CHECK(flipped.reason == "y degenerate");
  auto brute = kendall_tau_b_bruteforce(tied, ys);
  CHECK_FALSE(brute.defined);
  CHECK(brute.reason == "x degenerate");
}

TEST_CASE("singleton and malformed samples are rejected") {
  std::vector<double> one{1.0};
  CHECK_THROWS_AS(kendall_tau_b(one, one), qpp::ValidationError);
  std::vector<double> two{1.0, 2.0};
  std::vector<double> three{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(kendall_tau_b(two, three), qpp::ValidationError);
  std::vector<double> with_nan{1.0, std::nan("")};
  CHECK_THROWS_AS(kendall_tau_b(two, with_nan), qpp::ValidationError);
}

TEST_CASE("tau-a variant") {
  std::vector<double> xs{1, 2, 3};
  std::vector<double> ys{1, 3, 2};
  CHECK(kendall_tau(xs, ys, TauVariant::A).value ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  // Without ties, tau-a and tau-b coincide.
  CHECK(kendall_tau(xs, ys, TauVariant::A).value ==
        doctest::Approx(kendall_tau(xs, ys, TauVariant::B).value).epsilon(1e-15));
}

TEST_CASE("fast path agrees with the brute-force oracle on tie-heavy samples") {
  qpp::DeterministicRng rng(20250810);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t len = 2 + rng.bounded(49);
    // Few distinct values force heavy ties.
    const int distinct = 1 + static_cast<int>(rng.bounded(6));
    auto xs = random_vector(rng, len, distinct);
    auto ys = random_vector(rng, len, distinct);
    for (auto variant : {TauVariant::A, TauVariant::B}) {
      auto fast = kendall_tau(xs, ys, variant);
      auto brute = kendall_tau_bruteforce(xs, ys, variant);
      REQUIRE(fast.defined == brute.defined);
      if (fast.defined)
        REQUIRE(fast.value == doctest::Approx(brute.value).epsilon(1e-12));
      else
        REQUIRE(fast.reason == brute.reason);
    }
  }
}

TEST_CASE("symmetry, bounds, monotone invariance") {
  qpp::DeterministicRng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t len = 2 + rng.bounded(30);
    auto xs = random_vector(rng, len, 8);
    auto ys = random_vector(rng, len, 8);
    auto tau = kendall_tau_b(xs, ys);
    auto mirrored = kendall_tau_b(ys, xs);
    CHECK(tau.defined == mirrored.defined);
    if (!tau.defined) continue;
    CHECK(tau.value == doctest::Approx(mirrored.value).epsilon(1e-15));
    CHECK(tau.value >= -1.0 - 1e-12);
    CHECK(tau.value <= 1.0 + 1e-12);

    // Strictly increasing transform leaves tau unchanged; strictly
    // decreasing negates it.
    auto increasing = xs;
    for (auto& v : increasing) v = 3.0 * v + 7.0;
    CHECK(kendall_tau_b(increasing, ys).value == tau.value);
    auto decreasing = xs;
    for (auto& v : decreasing) v = -2.0 * v + 1.0;
    CHECK(kendall_tau_b(decreasing, ys).value ==
          doctest::Approx(-tau.value).epsilon(1e-15));
  }
}
