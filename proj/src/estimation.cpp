#include "swconformal/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "swconformal/linalg.hpp"
#include "swconformal/rng.hpp"
#include "swconformal/stats.hpp"

namespace swc {

namespace {

Eigen::MatrixXd strategy_design(const Dataset& data, const std::vector<int>& rows,
                                const std::vector<int>& strategy) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(rows.size()),
                         static_cast<Eigen::Index>(strategy.size()) + 1);
  design.col(0).setOnes();
  for (std::size_t j = 0; j < strategy.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j) + 1) = data.x(rows[i], strategy[j]);
    }
  }
  return design;
}

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// IRLS for the logistic propensity; returns false on divergence.
bool irls_logistic(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, Eigen::VectorXd& beta) {
  const Eigen::Index p = design.cols();
  beta = Eigen::VectorXd::Zero(p);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd mu(eta.size()), w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
      mu(i) = sigmoid(eta(i));
      w(i) = std::max(mu(i) * (1.0 - mu(i)), 1e-12);
    }
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal().array() += 1e-8;
    const Eigen::VectorXd step = hessian.ldlt().solve(design.transpose() * (target - mu));
    if (!step.allFinite()) return false;
    beta += step;
    if (!beta.allFinite()) return false;
    if (step.lpNorm<Eigen::Infinity>() < 1e-8) break;
  }
  return true;
}

}  // namespace

NuisanceFit fit_nuisances(const RowsView& train, const std::vector<int>& strategy, double clip_eps,
                          bool crossfit, int folds, std::uint64_t seed) {
  if (train.tag != SplitTag::train) {
    throw std::invalid_argument("fit_nuisances requires train-tagged rows");
  }
  const Dataset& data = *train.data;
  std::vector<int> treated, control;
  for (int r : train.rows) (data.t(r) == 1.0 ? treated : control).push_back(r);
  if (treated.empty() || control.empty()) {
    throw std::runtime_error("treatment arm absent from train rows; cannot fit nuisances");
  }

  NuisanceFit fit;
  fit.strategy = strategy;
  fit.clip_eps = clip_eps;

  auto fit_heads = [&](const std::vector<int>& rows, const std::vector<int>& rows1,
                       const std::vector<int>& rows0, Eigen::VectorXd& prop, Eigen::VectorXd& m1,
                       Eigen::VectorXd& m0) {
    const Eigen::MatrixXd design = strategy_design(data, rows, strategy);
    Eigen::VectorXd target(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) target(static_cast<Eigen::Index>(i)) = data.t(rows[i]);
    if (!irls_logistic(design, target, prop)) {
      // Divergence: retreat to the marginal treated share.
      double tbar = target.mean();
      tbar = std::min(std::max(tbar, clip_eps), 1.0 - clip_eps);
      prop = Eigen::VectorXd::Zero(design.cols());
      prop(0) = std::log(tbar / (1.0 - tbar));
      fit.warnings.push_back("IRLS diverged; intercept-only propensity");
    }
    const Eigen::MatrixXd d1 = strategy_design(data, rows1, strategy);
    const Eigen::MatrixXd d0 = strategy_design(data, rows0, strategy);
    Eigen::VectorXd y1(static_cast<Eigen::Index>(rows1.size())), y0(static_cast<Eigen::Index>(rows0.size()));
    for (std::size_t i = 0; i < rows1.size(); ++i) y1(static_cast<Eigen::Index>(i)) = data.y(rows1[i]);
    for (std::size_t i = 0; i < rows0.size(); ++i) y0(static_cast<Eigen::Index>(i)) = data.y(rows0[i]);
    m1 = ridge_solve(d1, y1, 1e-6);
    m0 = ridge_solve(d0, y0, 1e-6);
  };

  fit_heads(train.rows, treated, control, fit.propensity_coef, fit.mu1_coef, fit.mu0_coef);

  if (crossfit) {
    const int n1 = static_cast<int>(treated.size());
    const int n0 = static_cast<int>(control.size());
    int folds_eff = std::min(folds, std::min(n0, n1));
    folds_eff = std::max(folds_eff, 1);
    fit.folds = folds_eff;
    if (folds_eff < 2) {
      fit.warnings.push_back("crossfit disabled: a single effective fold leaves no complement");
    } else {
      fit.crossfit = true;
      fit.fold_of_row.assign(static_cast<std::size_t>(data.n()), -1);
      // Arm-stratified round-robin over shuffled rows keeps both arms in
      // every complement.
      Rng rng(derive_seed(seed, SeedStream::crossfit));
      std::vector<int> t_rows = treated, c_rows = control;
      rng.shuffle(t_rows);
      rng.shuffle(c_rows);
      for (std::size_t i = 0; i < t_rows.size(); ++i) {
        fit.fold_of_row[static_cast<std::size_t>(t_rows[i])] = static_cast<int>(i) % folds_eff;
      }
      for (std::size_t i = 0; i < c_rows.size(); ++i) {
        fit.fold_of_row[static_cast<std::size_t>(c_rows[i])] = static_cast<int>(i) % folds_eff;
      }
      for (int f = 0; f < folds_eff; ++f) {
        std::vector<int> rows, rows1, rows0;
        for (int r : train.rows) {
          if (fit.fold_of_row[static_cast<std::size_t>(r)] == f) continue;
          rows.push_back(r);
          (data.t(r) == 1.0 ? rows1 : rows0).push_back(r);
        }
        Eigen::VectorXd prop, m1, m0;
        fit_heads(rows, rows1, rows0, prop, m1, m0);
        fit.fold_propensity.push_back(prop);
        fit.fold_mu1.push_back(m1);
        fit.fold_mu0.push_back(m0);
      }
    }
  }
  return fit;
}

double aipw_pseudo_outcome(double mu1, double mu0, double ehat, double t, double y) {
  return mu1 - mu0 + t * (y - mu1) / ehat - (1.0 - t) * (y - mu0) / (1.0 - ehat);
}

NuisancePrediction predict_nuisances(const NuisanceFit& fit, const Dataset& data, int row, int fold) {
  Eigen::VectorXd z(static_cast<Eigen::Index>(fit.strategy.size()) + 1);
  z(0) = 1.0;
  for (std::size_t j = 0; j < fit.strategy.size(); ++j) {
    z(static_cast<Eigen::Index>(j) + 1) = data.x(row, fit.strategy[j]);
  }
  const bool use_fold = fold >= 0 && fit.crossfit;
  const Eigen::VectorXd& prop = use_fold ? fit.fold_propensity[static_cast<std::size_t>(fold)]
                                         : fit.propensity_coef;
  const Eigen::VectorXd& m1 = use_fold ? fit.fold_mu1[static_cast<std::size_t>(fold)] : fit.mu1_coef;
  const Eigen::VectorXd& m0 = use_fold ? fit.fold_mu0[static_cast<std::size_t>(fold)] : fit.mu0_coef;
  NuisancePrediction out;
  out.ehat = std::min(std::max(sigmoid(z.dot(prop)), fit.clip_eps), 1.0 - fit.clip_eps);
  out.mu1 = z.dot(m1);
  out.mu0 = z.dot(m0);
  return out;
}

EffectBoundModel fit_effect_bounds(const RowsView& train, const NuisanceFit& fit, double alpha) {
  if (train.tag != SplitTag::train) {
    throw std::invalid_argument("fit_effect_bounds requires train-tagged rows");
  }
  const Dataset& data = *train.data;
  const Eigen::Index n = static_cast<Eigen::Index>(train.rows.size());
  const Eigen::Index p = static_cast<Eigen::Index>(data.d()) + 1;

  Eigen::VectorXd gamma(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int r = train.rows[static_cast<std::size_t>(i)];
    const int fold = fit.crossfit ? fit.fold_of_row[static_cast<std::size_t>(r)] : -1;
    const NuisancePrediction pred = predict_nuisances(fit, data, r, fold);
    gamma(i) = aipw_pseudo_outcome(pred.mu1, pred.mu0, pred.ehat, data.t(r), data.y(r));
  }

  Eigen::MatrixXd design(n, p);
  design.col(0).setOnes();
  for (Eigen::Index i = 0; i < n; ++i) {
    design.row(i).tail(data.d()) = data.x.row(train.rows[static_cast<std::size_t>(i)]);
  }

  EffectBoundModel model;
  model.alpha = alpha;
  model.z_crit = normal_quantile(1.0 - alpha / 2.0);
  const LstsqResult fit_ls = lstsq(design, gamma);
  if (fit_ls.rank_deficient) {
    model.warnings.push_back("singular bound-model design; ridge-stabilized");
  }
  model.beta = fit_ls.coef;

  const Eigen::VectorXd resid = gamma - design * model.beta;
  Eigen::MatrixXd gram = design.transpose() * design;
  if (fit_ls.rank_deficient) gram.diagonal().array() += 1e-8;
  const Eigen::MatrixXd gram_inv = gram.ldlt().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd meat = design.transpose() * resid.array().square().matrix().asDiagonal() * design;
  model.cov = gram_inv * meat * gram_inv;
  return model;
}

StrategyEvaluation evaluate_strategy(const NuisanceFit& fit, const EffectBoundModel& bounds,
                                     const RowsView& rows) {
  if (rows.tag == SplitTag::train) {
    throw std::invalid_argument("evaluate_strategy refuses train-tagged rows");
  }
  const Dataset& data = *rows.data;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.rows.size());
  StrategyEvaluation out;
  out.gamma.resize(n);
  out.q_low.resize(n);
  out.q_high.resize(n);
  out.tau_hat.resize(n);

  Eigen::VectorXd xe(static_cast<Eigen::Index>(data.d()) + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int r = rows.rows[static_cast<std::size_t>(i)];
    const NuisancePrediction pred = predict_nuisances(fit, data, r);
    out.gamma(i) = aipw_pseudo_outcome(pred.mu1, pred.mu0, pred.ehat, data.t(r), data.y(r));
    xe(0) = 1.0;
    xe.tail(data.d()) = data.x.row(r);
    const double center = xe.dot(bounds.beta);
    const double var = std::max(xe.dot(bounds.cov * xe), 0.0);
    const double half = bounds.z_crit * std::sqrt(var);
    out.tau_hat(i) = center;
    out.q_low(i) = center - half;
    out.q_high(i) = center + half;
  }
  return out;
}

}  // namespace swc
