#include "swconformal/independence.hpp"

#include <algorithm>
#include <cmath>

#include "swconformal/linalg.hpp"
#include "swconformal/stats.hpp"

namespace swc {

std::optional<double> partial_correlation(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                          const Eigen::MatrixXd& z) {
  const Eigen::Index n = x.size();
  const Eigen::Index s = z.cols();
  if (n != y.size() || (s > 0 && z.rows() != n)) return std::nullopt;
  if (n < s + 4) return std::nullopt;  // Fisher reference needs n - s - 3 >= 1

  Eigen::MatrixXd design(n, s + 1);
  design.col(0).setOnes();
  if (s > 0) design.rightCols(s) = z;

  const LstsqResult bx = lstsq(design, x);
  const LstsqResult by = lstsq(design, y);
  if (bx.rank_deficient || by.rank_deficient) return std::nullopt;

  const Eigen::VectorXd rx = x - design * bx.coef;
  const Eigen::VectorXd ry = y - design * by.coef;
  const double sx = rx.squaredNorm();
  const double sy = ry.squaredNorm();
  if (sx <= 1e-24 || sy <= 1e-24) return std::nullopt;
  double r = rx.dot(ry) / std::sqrt(sx * sy);
  r = std::min(std::max(r, -1.0), 1.0);
  return r;
}

CITestResult fisher_z_test(double r, int n, int s) {
  CITestResult out;
  out.r = r;
  out.n = n;
  out.s = s;
  if (n - s - 3 < 1) {
    out.z = 0.0;
    out.p = 1.0;
    return out;
  }
  if (std::abs(r) >= 1.0) {
    out.saturated = true;
    out.z = std::numeric_limits<double>::infinity() * (r >= 1.0 ? 1.0 : -1.0);
    out.p = 0.0;
    return out;
  }
  out.z = std::atanh(r) * std::sqrt(static_cast<double>(n - s - 3));
  out.p = 2.0 * (1.0 - normal_cdf(std::abs(out.z)));
  return out;
}

PruneResult prune_graph(const Dag& g, const Eigen::MatrixXd& train_nodes, double alpha_ci) {
  PruneResult result;
  result.graph = g;
  Dag& cur = result.graph;
  const int n = static_cast<int>(train_nodes.rows());

  std::vector<std::pair<int, int>> visit = g.edges;
  std::sort(visit.begin(), visit.end(), [&](const auto& a, const auto& b) {
    return std::make_pair(g.pos[static_cast<std::size_t>(a.first)], g.pos[static_cast<std::size_t>(a.second)]) <
           std::make_pair(g.pos[static_cast<std::size_t>(b.first)], g.pos[static_cast<std::size_t>(b.second)]);
  });

  for (const auto& [u, v] : visit) {
    if (u == g.t_node && v == g.y_node) continue;  // the effect edge is never tested away
    std::vector<int> cond = cur.parents(v);
    cond.erase(std::remove(cond.begin(), cond.end(), u), cond.end());
    std::sort(cond.begin(), cond.end());
    Eigen::MatrixXd z(n, static_cast<Eigen::Index>(cond.size()));
    for (std::size_t c = 0; c < cond.size(); ++c) z.col(static_cast<Eigen::Index>(c)) = train_nodes.col(cond[c]);

    const auto r = partial_correlation(train_nodes.col(u), train_nodes.col(v), z);
    if (!r) {
      ++result.kept_degenerate;
      result.warnings.push_back("degenerate independence test for edge " + std::to_string(u) + "->" +
                                std::to_string(v) + "; edge kept");
      continue;
    }
    const CITestResult test = fisher_z_test(*r, n, static_cast<int>(cond.size()));
    if (test.p > alpha_ci) {
      cur.remove_edge(u, v);
      ++result.removed;
    }
  }
  return result;
}

}  // namespace swc
