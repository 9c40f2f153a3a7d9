// Nuisance fitting and per-strategy effect bounds: the doubly robust
// pseudo-outcome identity, propensity clipping, arm-stratified cross-fitting,
// the sandwich-based bound geometry, and the tag discipline that keeps
// calibration rows out of model fits.

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <vector>

#include "swconformal/dataset.hpp"
#include "swconformal/estimation.hpp"
#include "swconformal/rng.hpp"

using namespace swc;

namespace {

Dataset linear_dataset(int n, std::uint64_t seed, double noise_sd) {
  // y = 1 + 2*x + 3*t (+ optional noise); a single covariate, randomized t.
  Rng rng(seed);
  Dataset d;
  d.x.resize(n, 1);
  d.t.resize(n);
  d.y.resize(n);
  d.meta = {{"X1", TemporalStatus::pre_treatment},
            {"T", TemporalStatus::treatment},
            {"Y", TemporalStatus::outcome}};
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = rng.normal();
    d.t(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  }
  // keep both arms populated for tiny n
  d.t(0) = 1.0;
  d.t(1) = 0.0;
  for (int i = 0; i < n; ++i) {
    d.y(i) = 1.0 + 2.0 * d.x(i, 0) + 3.0 * d.t(i) + noise_sd * rng.normal();
  }
  return d;
}

std::vector<int> all_rows(const Dataset& d) {
  std::vector<int> rows(static_cast<std::size_t>(d.n()));
  std::iota(rows.begin(), rows.end(), 0);
  return rows;
}

}  // namespace

TEST_CASE("pseudo-outcome hand values") {
  // mu1=2, mu0=1, ehat=0.5: a treated row with y=3 contributes 1 + (3-2)/0.5.
  CHECK(aipw_pseudo_outcome(2.0, 1.0, 0.5, 1.0, 3.0) == doctest::Approx(3.0).epsilon(1e-12));
  // an untreated row with y=1 sits exactly on mu0, leaving the plug-in part.
  CHECK(aipw_pseudo_outcome(2.0, 1.0, 0.5, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // asymmetric propensity: t=0, y=2, mu0=1, ehat=0.2 -> 1 - 1/0.8 == -0.25.
  CHECK(aipw_pseudo_outcome(2.0, 1.0, 0.2, 0.0, 2.0) == doctest::Approx(-0.25).epsilon(1e-12));
}

TEST_CASE("intercept-only propensity recovers the treated share") {
  const Dataset d = linear_dataset(400, 5, 1.0);
  const RowsView train{&d, all_rows(d), SplitTag::train};
  const NuisanceFit fit = fit_nuisances(train, {}, 0.05, false, 5, 1);
  const double tbar = d.t.mean();
  const NuisancePrediction pred = predict_nuisances(fit, d, 0);
  CHECK(std::abs(pred.ehat - tbar) < 1e-6);
}

TEST_CASE("propensity predictions are clipped") {
  // A perfectly separating covariate drives the logistic fit to the boundary;
  // predictions must stay inside [clip, 1-clip].
  Rng rng(7);
  Dataset d;
  const int n = 200;
  d.x.resize(n, 1);
  d.t.resize(n);
  d.y.resize(n);
  d.meta = {{"X1", TemporalStatus::pre_treatment},
            {"T", TemporalStatus::treatment},
            {"Y", TemporalStatus::outcome}};
  for (int i = 0; i < n; ++i) {
    d.x(i, 0) = rng.normal();
    d.t(i) = d.x(i, 0) > 0.0 ? 1.0 : 0.0;
    d.y(i) = rng.normal();
  }
  const RowsView train{&d, all_rows(d), SplitTag::train};
  const NuisanceFit fit = fit_nuisances(train, {0}, 0.05, false, 5, 1);
  for (int i = 0; i < n; ++i) {
    const NuisancePrediction pred = predict_nuisances(fit, d, i);
    CHECK(pred.ehat >= 0.05);
    CHECK(pred.ehat <= 0.95);
  }
}

TEST_CASE("cross-fitting stratifies folds by arm") {
  Dataset d = linear_dataset(20, 11, 1.0);
  // exactly 3 treated rows
  d.t.setZero();
  d.t(2) = d.t(9) = d.t(15) = 1.0;
  for (int i = 0; i < d.n(); ++i) d.y(i) = 1.0 + 2.0 * d.x(i, 0) + 3.0 * d.t(i);
  const RowsView train{&d, all_rows(d), SplitTag::train};

  SUBCASE("the fold count shrinks to the smaller arm") {
    const NuisanceFit fit = fit_nuisances(train, {0}, 0.05, true, 5, 3);
    CHECK(fit.crossfit);
    CHECK(fit.folds == 3);
    REQUIRE(fit.fold_of_row.size() == static_cast<std::size_t>(d.n()));
    REQUIRE(fit.fold_propensity.size() == 3);
    REQUIRE(fit.fold_mu1.size() == 3);
    REQUIRE(fit.fold_mu0.size() == 3);
    // every complement keeps both arms
    for (int f = 0; f < 3; ++f) {
      bool has_t = false, has_c = false;
      for (int r = 0; r < d.n(); ++r) {
        if (fit.fold_of_row[static_cast<std::size_t>(r)] == f) continue;
        (d.t(r) == 1.0 ? has_t : has_c) = true;
      }
      CHECK(has_t);
      CHECK(has_c);
    }
    // each treated row landed in a distinct fold
    std::vector<int> treated_folds;
    for (int r : {2, 9, 15}) treated_folds.push_back(fit.fold_of_row[static_cast<std::size_t>(r)]);
    std::sort(treated_folds.begin(), treated_folds.end());
    CHECK(treated_folds == std::vector<int>{0, 1, 2});
  }
  SUBCASE("a single effective fold disables cross-fitting with a warning") {
    Dataset one = d;
    one.t.setZero();
    one.t(2) = 1.0;
    const RowsView tr{&one, all_rows(one), SplitTag::train};
    const NuisanceFit fit = fit_nuisances(tr, {0}, 0.05, true, 5, 3);
    CHECK_FALSE(fit.crossfit);
    CHECK(fit.folds == 1);
    REQUIRE_FALSE(fit.warnings.empty());
    CHECK(fit.warnings.back().find("crossfit disabled") != std::string::npos);
  }
}

TEST_CASE("tag discipline") {
  const Dataset d = linear_dataset(50, 13, 1.0);
  SUBCASE("fitting refuses non-train rows") {
    const RowsView cal{&d, all_rows(d), SplitTag::calibration};
    CHECK_THROWS_AS((void)fit_nuisances(cal, {0}, 0.05, false, 5, 1), std::invalid_argument);
  }
  SUBCASE("evaluation refuses train rows") {
    const RowsView train{&d, all_rows(d), SplitTag::train};
    const NuisanceFit fit = fit_nuisances(train, {0}, 0.05, false, 5, 1);
    const EffectBoundModel bounds = fit_effect_bounds(train, fit, 0.10);
    CHECK_THROWS_AS((void)evaluate_strategy(fit, bounds, train), std::invalid_argument);
  }
  SUBCASE("a single-arm training set is an error") {
    Dataset sole = d;
    sole.t.setOnes();
    const RowsView train{&sole, all_rows(sole), SplitTag::train};
    CHECK_THROWS_WITH_AS((void)fit_nuisances(train, {0}, 0.05, false, 5, 1),
                         doctest::Contains("arm"), std::runtime_error);
  }
}

TEST_CASE("bound model critical value and geometry") {
  const Dataset d = linear_dataset(300, 17, 1.0);
  const RowsView train{&d, all_rows(d), SplitTag::train};
  const NuisanceFit fit = fit_nuisances(train, {0}, 0.05, false, 5, 1);
  const EffectBoundModel bounds = fit_effect_bounds(train, fit, 0.10);
  CHECK(std::abs(bounds.z_crit - 1.6449) < 1e-4);

  std::vector<int> eval_rows;
  for (int i = 0; i < d.n(); i += 3) eval_rows.push_back(i);
  const RowsView rows{&d, eval_rows, SplitTag::test};
  const StrategyEvaluation ev = evaluate_strategy(fit, bounds, rows);
  REQUIRE(ev.gamma.size() == static_cast<Eigen::Index>(eval_rows.size()));
  for (Eigen::Index i = 0; i < ev.gamma.size(); ++i) {
    CHECK(ev.q_low(i) <= ev.tau_hat(i));
    CHECK(ev.tau_hat(i) <= ev.q_high(i));
    // the band is symmetric around the centerline
    CHECK(std::abs((ev.tau_hat(i) - ev.q_low(i)) - (ev.q_high(i) - ev.tau_hat(i))) < 1e-9);
  }

  SUBCASE("re-evaluation is bit-identical") {
    const StrategyEvaluation again = evaluate_strategy(fit, bounds, rows);
    CHECK((ev.gamma - again.gamma).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ev.q_low - again.q_low).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ev.q_high - again.q_high).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("noise-free data collapses the bounds") {
  // With y exactly linear in (x, t), the outcome heads are exact, every
  // pseudo-outcome equals the constant effect, and the sandwich variance
  // vanishes: the band degenerates to the true effect.
  const Dataset d = linear_dataset(120, 19, 0.0);
  const RowsView train{&d, all_rows(d), SplitTag::train};
  const NuisanceFit fit = fit_nuisances(train, {0}, 0.05, false, 5, 1);
  const EffectBoundModel bounds = fit_effect_bounds(train, fit, 0.10);
  std::vector<int> eval_rows{0, 5, 10, 50};
  const RowsView rows{&d, eval_rows, SplitTag::calibration};
  const StrategyEvaluation ev = evaluate_strategy(fit, bounds, rows);
  for (Eigen::Index i = 0; i < ev.gamma.size(); ++i) {
    CHECK(ev.gamma(i) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(ev.tau_hat(i) == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(std::abs(ev.q_high(i) - ev.q_low(i)) < 1e-5);
  }
}

TEST_CASE("pseudo-outcomes align with the synthetic effect") {
  // On the synthetic model with the correct confounder adjustment, the mean
  // pseudo-outcome tracks the mean true effect across seeds.
  const std::vector<int> confounders{0, 1, 2, 3, 4};
  double diff_sum = 0.0;
  const int n_seeds = 20;
  for (int s = 1; s <= n_seeds; ++s) {
    const Dataset d = gen_synthetic_scm(5000, static_cast<std::uint64_t>(s));
    const RowsView train{&d, all_rows(d), SplitTag::train};
    const NuisanceFit fit = fit_nuisances(train, confounders, 0.05, false, 5, 1);
    const EffectBoundModel bounds = fit_effect_bounds(train, fit, 0.10);
    std::vector<int> eval_rows = all_rows(d);
    const RowsView rows{&d, eval_rows, SplitTag::test};
    const StrategyEvaluation ev = evaluate_strategy(fit, bounds, rows);
    diff_sum += ev.gamma.mean() - d.true_cate->mean();
  }
  CHECK(std::abs(diff_sum / n_seeds) < 0.05);
}
