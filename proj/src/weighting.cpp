#include "swconformal/weighting.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "swconformal/linalg.hpp"

namespace swc {

namespace {

int unique_count(const Eigen::VectorXd& col) {
  std::set<double> vals;
  for (Eigen::Index i = 0; i < col.size(); ++i) vals.insert(col(i));
  return static_cast<int>(vals.size());
}

// Quantile binning to at most five levels (linear-interpolation quantiles,
// duplicate edges dropped, right-closed bins); columns at or below ten
// unique values are label-encoded as-is.
std::vector<int> discretize_column(const Eigen::VectorXd& col, int& levels) {
  const Eigen::Index n = col.size();
  std::vector<double> sorted(col.data(), col.data() + n);
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> uniq = sorted;
  uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

  std::vector<int> out(static_cast<std::size_t>(n));
  if (static_cast<int>(uniq.size()) <= 10) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto it = std::lower_bound(uniq.begin(), uniq.end(), col(i));
      out[static_cast<std::size_t>(i)] = static_cast<int>(it - uniq.begin());
    }
    levels = static_cast<int>(uniq.size());
    return out;
  }

  auto quantile = [&](double q) {
    const double h = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, static_cast<std::size_t>(n - 1));
    return sorted[lo] + (h - std::floor(h)) * (sorted[hi] - sorted[lo]);
  };
  std::vector<double> edges;
  for (double q : {0.2, 0.4, 0.6, 0.8}) {
    const double e = quantile(q);
    if (edges.empty() || e > edges.back()) edges.push_back(e);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    int b = 0;
    while (b < static_cast<int>(edges.size()) && col(i) > edges[static_cast<std::size_t>(b)]) ++b;
    out[static_cast<std::size_t>(i)] = b;
  }
  levels = static_cast<int>(edges.size()) + 1;
  return out;
}

}  // namespace

BicVariant select_bic_variant(const Eigen::MatrixXd& train_nodes, int y_node) {
  if (unique_count(train_nodes.col(y_node)) <= 2) return BicVariant::discrete;
  int small = 0;
  for (Eigen::Index c = 0; c < train_nodes.cols(); ++c) {
    if (unique_count(train_nodes.col(c)) <= 5) ++small;
  }
  if (2 * small > train_nodes.cols()) return BicVariant::discrete;
  return BicVariant::gaussian;
}

BicResult bic_gaussian(const Dag& g, const Eigen::MatrixXd& train_nodes) {
  const Eigen::Index n = train_nodes.rows();
  if (n < 2) throw std::invalid_argument("bic_gaussian requires at least 2 rows");
  BicResult out;
  const double log2pi = 1.8378770664093453;

  for (int v = 0; v < g.n; ++v) {
    std::vector<int> pa = g.parents(v);
    std::sort(pa.begin(), pa.end());
    Eigen::MatrixXd design(n, static_cast<Eigen::Index>(pa.size()) + 1);
    design.col(0).setOnes();
    for (std::size_t j = 0; j < pa.size(); ++j) {
      design.col(static_cast<Eigen::Index>(j) + 1) = train_nodes.col(pa[j]);
    }
    const LstsqResult fit = lstsq(design, train_nodes.col(v));
    if (fit.rank_deficient) {
      out.warnings.push_back("singular parent design for node " + std::to_string(v) +
                             "; ridge-stabilized");
    }
    const Eigen::VectorXd resid = train_nodes.col(v) - design * fit.coef;
    double sigma2 = resid.squaredNorm() / static_cast<double>(n);
    if (sigma2 < 1e-12) {
      sigma2 = 1e-12;  // deterministic node: keep the likelihood finite
      out.warnings.push_back("near-zero residual variance for node " + std::to_string(v) +
                             "; variance floored");
    }
    out.loglik += -0.5 * static_cast<double>(n) * (log2pi + std::log(sigma2) + 1.0);
    out.dim += static_cast<int>(pa.size()) + 2;
  }
  out.value = out.loglik - 0.5 * static_cast<double>(out.dim) * std::log(static_cast<double>(n));
  return out;
}

BicResult bic_discrete(const Dag& g, const Eigen::MatrixXd& train_nodes) {
  const Eigen::Index n = train_nodes.rows();
  if (n < 2) throw std::invalid_argument("bic_discrete requires at least 2 rows");
  BicResult out;

  std::vector<std::vector<int>> codes(static_cast<std::size_t>(g.n));
  std::vector<int> levels(static_cast<std::size_t>(g.n), 1);
  for (int v = 0; v < g.n; ++v) {
    codes[static_cast<std::size_t>(v)] =
        discretize_column(train_nodes.col(v), levels[static_cast<std::size_t>(v)]);
  }

  for (int v = 0; v < g.n; ++v) {
    const int lv = levels[static_cast<std::size_t>(v)];
    std::vector<int> pa = g.parents(v);
    std::sort(pa.begin(), pa.end());
    long long config_count = 1;
    for (int p : pa) config_count *= levels[static_cast<std::size_t>(p)];

    // counts[config][level]
    std::map<long long, std::vector<long long>> counts;
    for (Eigen::Index i = 0; i < n; ++i) {
      long long cfg = 0;
      for (int p : pa) {
        cfg = cfg * levels[static_cast<std::size_t>(p)] +
              codes[static_cast<std::size_t>(p)][static_cast<std::size_t>(i)];
      }
      auto& row = counts[cfg];
      if (row.empty()) row.assign(static_cast<std::size_t>(lv), 0);
      ++row[static_cast<std::size_t>(codes[static_cast<std::size_t>(v)][static_cast<std::size_t>(i)])];
    }

    for (const auto& [cfg, row] : counts) {
      long long total = 0;
      bool empty_cell = false;
      for (long long c : row) {
        total += c;
        if (c == 0) empty_cell = true;
      }
      for (std::size_t l = 0; l < row.size(); ++l) {
        if (row[l] == 0) continue;
        const double p = empty_cell
                             ? (static_cast<double>(row[l]) + 1.0) / (static_cast<double>(total) + lv)
                             : static_cast<double>(row[l]) / static_cast<double>(total);
        out.loglik += static_cast<double>(row[l]) * std::log(p);
      }
    }
    out.dim += static_cast<int>((lv - 1) * config_count);
  }
  out.value = out.loglik - 0.5 * static_cast<double>(out.dim) * std::log(static_cast<double>(n));
  return out;
}

double structural_log_prior(const Dag& g, const EdgePrior& prior,
                            const std::vector<std::pair<int, int>>& admissible,
                            const std::vector<VariableMeta>& meta, double clip) {
  double total = 0.0;
  for (const auto& [u, v] : admissible) {
    const double p = clip_probability(
        prior.get(meta[static_cast<std::size_t>(u)].name, meta[static_cast<std::size_t>(v)].name), clip);
    total += g.has_edge(u, v) ? std::log(p) : std::log(1.0 - p);
  }
  return total;
}

std::vector<double> collapse_weights(const std::vector<double>& graph_log_weights,
                                     const std::vector<int>& graph_strategy, int n_strategies) {
  if (graph_log_weights.empty() || graph_log_weights.size() != graph_strategy.size()) {
    throw std::invalid_argument("collapse_weights: inconsistent inputs");
  }
  const double shift = *std::max_element(graph_log_weights.begin(), graph_log_weights.end());
  std::vector<double> mass(static_cast<std::size_t>(n_strategies), 0.0);
  for (std::size_t i = 0; i < graph_log_weights.size(); ++i) {
    const double shifted = std::max(graph_log_weights[i] - shift, -500.0);
    mass[static_cast<std::size_t>(graph_strategy[i])] += std::exp(shifted);
  }
  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw std::logic_error("collapse_weights: zero total mass");
  for (double& m : mass) m /= total;
  return mass;
}

}  // namespace swc
