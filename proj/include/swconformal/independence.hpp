#pragma once

// Conditional-independence pruning of sampled graphs: partial correlation via
// OLS residualization, the Fisher z transform with its normal reference, and
// a greedy single-pass edge sweep.

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "swconformal/graph.hpp"

namespace swc {

// Pearson correlation of the residuals of x and y after regressing each on
// [1, z]. Returns nullopt when the test is degenerate: rank-deficient
// conditioning design, a zero-variance residual, or too few rows for the
// z reference (requires n >= |z| + 4).
std::optional<double> partial_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                          const Eigen::MatrixXd& z);

struct CITestResult {
  double r = 0.0;
  double z = 0.0;
  double p = 1.0;
  int n = 0;
  int s = 0;
  bool saturated = false;  // |r| reached 1; p pinned to 0
};

// z = atanh(r) * sqrt(n - s - 3), two-sided normal p-value.
CITestResult fisher_z_test(double r, int n, int s);

struct PruneResult {
  Dag graph;
  int removed = 0;
  int kept_degenerate = 0;
  std::vector<std::string> warnings;
};

// Visits every edge except T->Y once, in ascending (position(u), position(v))
// order, testing u against v given the *current* remaining parents of v
// excluding u. Edges whose test is degenerate are kept with a warning; edges
// with p > alpha_ci are removed immediately, which shrinks later
// conditioning sets.
PruneResult prune_graph(const Dag& g, const Eigen::MatrixXd& train_nodes, double alpha_ci);

}  // namespace swc
