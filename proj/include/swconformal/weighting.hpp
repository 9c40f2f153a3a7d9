#pragma once

// Posterior-style graph scores and their collapse onto adjustment
// strategies: node-decomposed BIC (Gaussian working score or multinomial
// over discretized levels), the Bernoulli structural log-prior with its
// absent-edge terms, and the stabilized softmax.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "swconformal/graph.hpp"
#include "swconformal/prior.hpp"

namespace swc {

enum class BicVariant { gaussian, discrete };

// Heuristic: discrete scoring when the outcome column is binary or more than
// half of the node columns have at most five unique values.
BicVariant select_bic_variant(const Eigen::MatrixXd& train_nodes, int y_node);

struct BicResult {
  double value = 0.0;    // loglik - (d/2) log n  (higher is better)
  double loglik = 0.0;
  int dim = 0;
  std::vector<std::string> warnings;
};

// Per-node OLS with intercept at the MLE variance; d = sum(|parents| + 2).
BicResult bic_gaussian(const Dag& g, const Eigen::MatrixXd& train_nodes);

// Columns with more than 10 unique values are quantile-binned to 5 levels
// (duplicate edges dropped); per-node multinomial likelihood over parent
// configurations, additive smoothing (pseudo-count 1) only for
// configurations with empty cells; d = sum((levels-1) * prod parent levels).
BicResult bic_discrete(const Dag& g, const Eigen::MatrixXd& train_nodes);

// sum over present edges of ln p_e plus sum over absent admissible pairs of
// ln(1 - p_e), probabilities clipped to [clip, 1-clip].
double structural_log_prior(const Dag& g, const EdgePrior& prior,
                            const std::vector<std::pair<int, int>>& admissible,
                            const std::vector<VariableMeta>& meta, double clip = 1e-6);

// Stabilized softmax with per-strategy pooling: shift by the max log-weight,
// floor shifted values at -500, exponentiate, sum within strategies,
// normalize. graph_strategy[i] gives the strategy of graph i.
std::vector<double> collapse_weights(const std::vector<double>& graph_log_weights,
                                     const std::vector<int>& graph_strategy, int n_strategies);

}  // namespace swc
