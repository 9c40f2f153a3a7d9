#pragma once

// Weighted split-conformal calibration for interval targets: the composite
// two-sided nonconformity score, the finite-sample calibration quantile with
// its +infinity sentinel, weighted aggregation across strategies, and the
// structural-uncertainty summary.

#include <limits>
#include <vector>

namespace swc {

// max(q_low - gamma, gamma - q_high); real-valued, negative strictly inside
// the band. No positive-part truncation.
inline double composite_score(double gamma, double q_low, double q_high) {
  const double a = q_low - gamma;
  const double b = gamma - q_high;
  return a > b ? a : b;
}

// Identical form for a single strategy, named for the per-graph decomposition.
inline double graph_score(double gamma_k, double q_low_k, double q_high_k) {
  return composite_score(gamma_k, q_low_k, q_high_k);
}

enum class QuantileRule {
  sentinel,  // index past the sample -> +infinity (finite-sample exact)
  capped,    // index capped at the largest score
};

struct ConformalQuantile {
  double value = 0.0;
  bool infinite = false;
  int m = 0;      // order-statistic index, 1-based
  int n_cal = 0;
};

// m = ceil((1-alpha)(n+1))-th smallest score; a 1e-9 guard absorbs FP
// representation error in the product before the ceiling.
ConformalQuantile conformal_quantile(std::vector<double> scores, double alpha,
                                     QuantileRule rule = QuantileRule::sentinel);

// Weighted aggregation of one row's per-strategy evaluations. The score is
// accumulated in the weighted-residual form (sum of w_k * per-strategy
// residuals), and jensen_upper = sum of w_k * max-residuals is accumulated in
// the same loop: round-to-nearest monotonicity then guarantees
// score <= jensen_upper exactly in floating point, so the domination
// invariant can be asserted with zero tolerance.
struct AggregatedRow {
  double gamma = 0.0;        // weighted pseudo-outcome
  double q_low = 0.0, q_high = 0.0;
  double tau_bar = 0.0;      // weighted bound-model center
  double score = 0.0;        // composite nonconformity score
  double jensen_upper = 0.0; // weighted sum of per-strategy scores
  double sigma_struct = 0.0;
};

AggregatedRow aggregate_row(const std::vector<double>& weights, const std::vector<double>& gamma_k,
                            const std::vector<double>& q_low_k, const std::vector<double>& q_high_k,
                            const std::vector<double>& tau_k);

struct Interval {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double v) const { return v >= lo && v <= hi; }
  double width() const { return hi - lo; }
};

// [q_low - quantile, q_high + quantile]; the whole line when the quantile is
// the +infinity sentinel.
Interval predict_interval(double q_low, double q_high, const ConformalQuantile& quantile);

// sqrt(sum w_k (tau_k - tau_bar)^2)
double structural_uncertainty(const std::vector<double>& weights, const std::vector<double>& tau_k);

}  // namespace swc
