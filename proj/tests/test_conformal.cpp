// Conformal machinery: composite scores, the calibration quantile with its
// finite-sample index rule and +infinity sentinel, weighted aggregation with
// the domination invariant, interval construction, and the exchangeability
// coverage smoke test.

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "swconformal/conformal.hpp"
#include "swconformal/rng.hpp"

using namespace swc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("composite score hand values") {
  CHECK(composite_score(0.5, -1.0, 1.0) == doctest::Approx(-0.5));
  CHECK(composite_score(2.0, -1.0, 1.0) == doctest::Approx(1.0));
  CHECK(composite_score(3.0, 3.0, 3.0) == 0.0);
  // Per-strategy form is the same function.
  CHECK(graph_score(0.5, -1.0, 1.0) == composite_score(0.5, -1.0, 1.0));
}

TEST_CASE("composite score is negative strictly inside the band") {
  Rng rng(11);
  for (int i = 0; i < 1000; ++i) {
    const double lo = rng.normal();
    const double hi = lo + 0.1 + std::abs(rng.normal());
    const double inside = lo + (hi - lo) * (0.25 + 0.5 * rng.uniform());
    CHECK(composite_score(inside, lo, hi) < 0.0);
    CHECK(composite_score(hi + 1.0, lo, hi) > 0.0);
    CHECK(composite_score(lo - 1.0, lo, hi) > 0.0);
  }
}

TEST_CASE("calibration quantile index rule") {
  SUBCASE("nine scores at alpha 0.1 force the top order statistic") {
    std::vector<double> scores{9, 1, 8, 2, 7, 3, 6, 4, 5};  // unsorted on purpose
    const ConformalQuantile q = conformal_quantile(scores, 0.10);
    CHECK(q.m == 9);
    CHECK(q.n_cal == 9);
    CHECK_FALSE(q.infinite);
    CHECK(q.value == 9.0);
  }
  SUBCASE("three scores at alpha 0.5") {
    const ConformalQuantile q = conformal_quantile({3, 1, 2}, 0.50);
    CHECK(q.m == 2);
    CHECK(q.value == 2.0);
  }
  SUBCASE("index past the sample yields the sentinel") {
    const ConformalQuantile q = conformal_quantile({5, 1, 3}, 0.10);
    CHECK(q.m == 4);
    CHECK(q.infinite);
  }
  SUBCASE("capped rule returns the maximum instead") {
    const ConformalQuantile q = conformal_quantile({5, 1, 3}, 0.10, QuantileRule::capped);
    CHECK_FALSE(q.infinite);
    CHECK(q.value == 5.0);
  }
  SUBCASE("the index product is guarded against representation error") {
    // (1 - 0.1) * (9 + 1) evaluates slightly above 9 in doubles; the index
    // must still be 9, not 10.
    std::vector<double> scores(9);
    for (int i = 0; i < 9; ++i) scores[static_cast<std::size_t>(i)] = i + 1;
    CHECK(conformal_quantile(scores, 0.10).m == 9);
  }
}

TEST_CASE("quantile is monotone in alpha on fixed scores") {
  Rng rng(5);
  std::vector<double> scores(57);
  for (auto& s : scores) s = rng.normal();
  double prev = kInf;
  for (double alpha : {0.01, 0.05, 0.10, 0.20, 0.30, 0.50, 0.80}) {
    const ConformalQuantile q = conformal_quantile(scores, alpha);
    const double v = q.infinite ? kInf : q.value;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("aggregation hand example and domination") {
  // Two strategies at equal weight with opposite exceedances: both
  // per-strategy scores are 2, the aggregate sits strictly inside its band.
  const std::vector<double> w{0.5, 0.5};
  const std::vector<double> gamma{-2.0, 2.0};
  const std::vector<double> qlo{0.0, -1.0};
  const std::vector<double> qhi{1.0, 0.0};
  const std::vector<double> tau{0.5, -0.5};
  const AggregatedRow row = aggregate_row(w, gamma, qlo, qhi, tau);
  CHECK(row.gamma == doctest::Approx(0.0));
  CHECK(row.q_low == doctest::Approx(-0.5));
  CHECK(row.q_high == doctest::Approx(0.5));
  CHECK(row.score == doctest::Approx(-0.5));
  CHECK(row.jensen_upper == doctest::Approx(2.0));
  CHECK(row.score <= row.jensen_upper);
  CHECK(row.tau_bar == doctest::Approx(0.0));
}

TEST_CASE("single strategy aggregation collapses to the plain score") {
  Rng rng(17);
  for (int i = 0; i < 500; ++i) {
    const double g = rng.normal() * 3.0;
    const double lo = rng.normal();
    const double hi = lo + std::abs(rng.normal());
    const AggregatedRow row = aggregate_row({1.0}, {g}, {lo}, {hi}, {0.0});
    CHECK(row.score == composite_score(g, lo, hi));
    CHECK(row.jensen_upper == row.score);
  }
}

TEST_CASE("domination holds exactly over random instances") {
  Rng rng(23);
  int violations = 0;
  for (int i = 0; i < 200000; ++i) {
    const int k = 1 + static_cast<int>(rng.below(5));
    std::vector<double> w(static_cast<std::size_t>(k)), g(w.size()), lo(w.size()), hi(w.size()),
        tau(w.size());
    double wsum = 0.0;
    for (auto& x : w) {
      x = rng.uniform() + 1e-3;
      wsum += x;
    }
    for (auto& x : w) x /= wsum;
    const double scale = (i % 3 == 0) ? 1e3 : (i % 3 == 1 ? 1.0 : 1e-3);
    for (std::size_t j = 0; j < w.size(); ++j) {
      lo[j] = rng.normal() * scale;
      hi[j] = lo[j] + std::abs(rng.normal()) * scale;
      g[j] = rng.normal() * 2.0 * scale;
      tau[j] = rng.normal() * scale;
    }
    const AggregatedRow row = aggregate_row(w, g, lo, hi, tau);
    if (row.score > row.jensen_upper) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("interval construction") {
  SUBCASE("positive quantile pads the band") {
    const Interval c = predict_interval(0.0, 1.0, ConformalQuantile{0.5, false, 1, 1});
    CHECK(c.lo == doctest::Approx(-0.5));
    CHECK(c.hi == doctest::Approx(1.5));
  }
  SUBCASE("negative quantile shrinks the band") {
    const Interval c = predict_interval(0.0, 1.0, ConformalQuantile{-0.2, false, 1, 1});
    CHECK(c.lo == doctest::Approx(0.2));
    CHECK(c.hi == doctest::Approx(0.8));
  }
  SUBCASE("sentinel quantile is the whole line") {
    const Interval c = predict_interval(0.0, 1.0, ConformalQuantile{0.0, true, 4, 3});
    CHECK(c.lo == -kInf);
    CHECK(c.hi == kInf);
    CHECK(c.contains(1e308));
    CHECK(c.contains(-1e308));
  }
}

TEST_CASE("interval membership matches the score test exactly") {
  Rng rng(31);
  int disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    const double lo = rng.normal();
    const double hi = lo + std::abs(rng.normal());
    const double qhat = rng.normal();
    const double gamma = rng.normal() * 2.0;
    const Interval c = predict_interval(lo, hi, ConformalQuantile{qhat, false, 1, 1});
    const bool in_interval = c.contains(gamma);
    const bool score_ok = composite_score(gamma, lo, hi) <= qhat;
    if (in_interval != score_ok) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("structural uncertainty hand values") {
  CHECK(structural_uncertainty({1.0}, {3.7}) == 0.0);
  CHECK(structural_uncertainty({0.5, 0.5}, {0.0, 2.0}) == doctest::Approx(1.0));
  CHECK(structural_uncertainty({0.2, 0.3, 0.5}, {4.0, 4.0, 4.0}) == doctest::Approx(0.0));
}

TEST_CASE("exchangeable scores are covered at the calibrated rate") {
  // 99 calibration scores at alpha 0.1 put the quantile at the 90th order
  // statistic, so a fresh exchangeable score lands at or below it with
  // probability exactly 90/100. Seed pinned; the band is +/- 4 binomial
  // standard deviations (sqrt(0.9*0.1/10000) = 0.003) around that mean.
  Rng rng(2024);
  int covered = 0;
  const int trials = 10000;
  std::vector<double> scores(99);
  for (int t = 0; t < trials; ++t) {
    for (auto& s : scores) s = rng.normal();
    const ConformalQuantile q = conformal_quantile(scores, 0.10);
    REQUIRE_FALSE(q.infinite);
    if (rng.normal() <= q.value) ++covered;
  }
  const double freq = static_cast<double>(covered) / trials;
  CHECK(freq >= 0.888);
  CHECK(freq <= 0.912);
}
