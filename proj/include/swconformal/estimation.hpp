#pragma once

// Per-strategy nuisance models and doubly robust machinery: IRLS logistic
// propensity and per-arm ridge outcome regressions on the strategy's
// covariates, AIPW pseudo-outcomes, and a linear effect-bound model fitted
// to pseudo-outcomes on the full covariate vector with HC0 standard errors.

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "swconformal/dataset.hpp"

namespace swc {

struct NuisanceFit {
  std::vector<int> strategy;          // covariate node indices adjusted for
  double clip_eps = 0.05;
  Eigen::VectorXd propensity_coef;    // [intercept, strategy covariates...]
  Eigen::VectorXd mu1_coef, mu0_coef;
  bool crossfit = false;
  int folds = 0;
  std::vector<int> fold_of_row;       // dataset row id -> fold (crossfit only)
  std::vector<Eigen::VectorXd> fold_propensity, fold_mu1, fold_mu0;
  std::vector<std::string> warnings;
};

// Requires the train tag and both treatment arms. IRLS: at most 100
// iterations, 1e-8 coefficient tolerance, 1e-8 L2 jitter; divergence falls
// back to the intercept-only propensity with a warning. Outcome heads are
// ridge (lambda = 1e-6) per arm. With crossfit, folds are reduced to
// min(folds, n0, n1) and per-fold complements are stored for out-of-fold
// train predictions; a single effective fold disables crossfitting.
NuisanceFit fit_nuisances(const RowsView& train, const std::vector<int>& strategy, double clip_eps,
                          bool crossfit, int folds, std::uint64_t seed);

// mu1 - mu0 + t*(y - mu1)/e - (1-t)*(y - mu0)/(1-e), with e already clipped.
double aipw_pseudo_outcome(double mu1, double mu0, double ehat, double t, double y);

// Nuisance predictions for one dataset row; fold < 0 uses the full-train fit,
// otherwise the model trained on that fold's complement.
struct NuisancePrediction {
  double ehat, mu1, mu0;
};
NuisancePrediction predict_nuisances(const NuisanceFit& fit, const Dataset& data, int row, int fold = -1);

struct EffectBoundModel {
  Eigen::VectorXd beta;       // [intercept, all covariates...]
  Eigen::MatrixXd cov;        // HC0 sandwich covariance of beta
  double alpha = 0.10;
  double z_crit = 0.0;        // normal quantile at 1 - alpha/2
  std::vector<std::string> warnings;
};

// Fits the linear model of train pseudo-outcomes (out-of-fold when the fit
// is crossfitted) on the full covariate vector. Requires the train tag.
EffectBoundModel fit_effect_bounds(const RowsView& train, const NuisanceFit& fit, double alpha);

struct StrategyEvaluation {
  Eigen::VectorXd gamma;    // AIPW pseudo-outcomes
  Eigen::VectorXd q_low, q_high;
  Eigen::VectorXd tau_hat;  // bound-model centers
};

// Per-row pseudo-outcomes and bound evaluations. Refuses train-tagged rows:
// scoring and metrics must only ever see held-out data.
StrategyEvaluation evaluate_strategy(const NuisanceFit& fit, const EffectBoundModel& bounds,
                                     const RowsView& rows);

}  // namespace swc
