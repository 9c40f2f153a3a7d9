#include "swconformal/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swc {

ConformalQuantile conformal_quantile(std::vector<double> scores, double alpha, QuantileRule rule) {
  if (scores.empty()) throw std::invalid_argument("conformal_quantile requires at least one score");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  const int n = static_cast<int>(scores.size());
  ConformalQuantile out;
  out.n_cal = n;
  const double raw = (1.0 - alpha) * static_cast<double>(n + 1);
  int m = static_cast<int>(std::ceil(raw - 1e-9));
  if (m < 1) m = 1;
  out.m = m;
  std::sort(scores.begin(), scores.end());
  if (m > n) {
    if (rule == QuantileRule::sentinel) {
      out.infinite = true;
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    out.m = n;
    out.value = scores.back();
    return out;
  }
  out.value = scores[static_cast<std::size_t>(m - 1)];
  return out;
}

AggregatedRow aggregate_row(const std::vector<double>& weights, const std::vector<double>& gamma_k,
                            const std::vector<double>& q_low_k, const std::vector<double>& q_high_k,
                            const std::vector<double>& tau_k) {
  const std::size_t k = weights.size();
  if (gamma_k.size() != k || q_low_k.size() != k || q_high_k.size() != k || tau_k.size() != k || k == 0) {
    throw std::invalid_argument("aggregate_row: inconsistent inputs");
  }
  AggregatedRow out;
  double low_resid = 0.0, high_resid = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double a = q_low_k[i] - gamma_k[i];
    const double b = gamma_k[i] - q_high_k[i];
    const double m = a > b ? a : b;
    low_resid += weights[i] * a;
    high_resid += weights[i] * b;
    out.jensen_upper += weights[i] * m;
    out.gamma += weights[i] * gamma_k[i];
    out.q_low += weights[i] * q_low_k[i];
    out.q_high += weights[i] * q_high_k[i];
    out.tau_bar += weights[i] * tau_k[i];
  }
  out.score = low_resid > high_resid ? low_resid : high_resid;
  double var = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double dev = tau_k[i] - out.tau_bar;
    var += weights[i] * dev * dev;
  }
  out.sigma_struct = std::sqrt(var);
  return out;
}

Interval predict_interval(double q_low, double q_high, const ConformalQuantile& quantile) {
  Interval out;
  if (quantile.infinite) return out;  // the whole line
  out.lo = q_low - quantile.value;
  out.hi = q_high + quantile.value;
  return out;
}

double structural_uncertainty(const std::vector<double>& weights, const std::vector<double>& tau_k) {
  if (weights.size() != tau_k.size() || weights.empty()) {
    throw std::invalid_argument("structural_uncertainty: inconsistent inputs");
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) mean += weights[i] * tau_k[i];
  double var = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double dev = tau_k[i] - mean;
    var += weights[i] * dev * dev;
  }
  return std::sqrt(var);
}

}  // namespace swc
