// Graph scoring and weight collapse: closed-form BIC hand values for both
// variants, the variant selection heuristic, structural log-prior sums, and
// the stabilized softmax identities.

#include <doctest.h>

#include <cmath>
#include <vector>

#include "swconformal/graph.hpp"
#include "swconformal/prior.hpp"
#include "swconformal/rng.hpp"
#include "swconformal/weighting.hpp"

using namespace swc;

namespace {

Dag make_dag(int n, int t_node, int y_node, std::vector<std::pair<int, int>> edges) {
  Dag g;
  g.n = n;
  g.t_node = t_node;
  g.y_node = y_node;
  g.order.resize(static_cast<std::size_t>(n));
  g.pos.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    g.order[static_cast<std::size_t>(i)] = i;
    g.pos[static_cast<std::size_t>(i)] = i;
  }
  std::sort(edges.begin(), edges.end());
  g.edges = std::move(edges);
  return g;
}

}  // namespace

TEST_CASE("gaussian score hand value for a parentless node") {
  const Dag g = make_dag(1, -1, -1, {});
  Eigen::MatrixXd data(2, 1);
  data << -1.0, 1.0;
  const BicResult b = bic_gaussian(g, data);
  // MLE variance 1, log-likelihood -(log 2pi + 1), two parameters.
  CHECK(std::abs(b.loglik - (-2.8379)) < 1e-4);
  CHECK(b.dim == 2);
  CHECK(std::abs(b.value - (-3.5311)) < 1e-4);
}

TEST_CASE("gaussian score: spurious edge loses at large n") {
  Rng rng(71);
  const int n = 5000;
  int edge_wins = 0;
  for (int s = 0; s < 100; ++s) {
    Eigen::MatrixXd data(n, 2);
    for (int i = 0; i < n; ++i) {
      data(i, 0) = rng.normal();
      data(i, 1) = rng.normal();  // independent of column 0
    }
    const Dag plain = make_dag(2, -1, -1, {});
    const Dag extra = make_dag(2, -1, -1, {{0, 1}});
    if (bic_gaussian(extra, data).value > bic_gaussian(plain, data).value) ++edge_wins;
  }
  CHECK(edge_wins == 0);
}

TEST_CASE("gaussian score: duplicating rows doubles the likelihood") {
  Rng rng(73);
  Eigen::MatrixXd data(40, 2);
  for (int i = 0; i < 40; ++i) {
    data(i, 0) = rng.normal();
    data(i, 1) = 0.7 * data(i, 0) + rng.normal();
  }
  Eigen::MatrixXd doubled(80, 2);
  doubled << data, data;
  const Dag g = make_dag(2, -1, -1, {{0, 1}});
  const BicResult one = bic_gaussian(g, data);
  const BicResult two = bic_gaussian(g, doubled);
  CHECK(two.loglik == doctest::Approx(2.0 * one.loglik).epsilon(1e-9));
  CHECK(two.value ==
        doctest::Approx(2.0 * one.loglik - 0.5 * one.dim * std::log(80.0)).epsilon(1e-9));
}

TEST_CASE("discrete score hand value for a parentless binary node") {
  const Dag g = make_dag(1, -1, -1, {});
  Eigen::MatrixXd data(10, 1);
  data << 0, 0, 0, 0, 0, 0, 0, 1, 1, 1;
  const BicResult b = bic_discrete(g, data);
  CHECK(std::abs(b.loglik - (-6.1086)) < 1e-4);
  CHECK(b.dim == 1);
  CHECK(std::abs(b.value - (-7.2599)) < 1e-4);
}

TEST_CASE("discrete score: independent parent loses at large n") {
  Rng rng(79);
  const int n = 2000;
  Eigen::MatrixXd data(n, 2);
  for (int i = 0; i < n; ++i) {
    data(i, 0) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    data(i, 1) = rng.bernoulli(0.3) ? 1.0 : 0.0;
  }
  const Dag plain = make_dag(2, -1, -1, {});
  const Dag extra = make_dag(2, -1, -1, {{0, 1}});
  CHECK(bic_discrete(plain, data).value > bic_discrete(extra, data).value);
}

TEST_CASE("discrete score: constant column contributes nothing") {
  const Dag g = make_dag(1, -1, -1, {});
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(12, 1, 3.0);
  const BicResult b = bic_discrete(g, data);
  CHECK(b.loglik == 0.0);
  CHECK(b.dim == 0);
  CHECK(b.value == 0.0);
}

TEST_CASE("variant selection heuristic") {
  Rng rng(83);
  SUBCASE("binary outcome forces the discrete score") {
    Eigen::MatrixXd data(50, 3);
    for (int i = 0; i < 50; ++i) {
      data(i, 0) = rng.normal();
      data(i, 1) = rng.normal();
      data(i, 2) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    }
    CHECK(select_bic_variant(data, 2) == BicVariant::discrete);
  }
  SUBCASE("continuous columns keep the gaussian score") {
    Eigen::MatrixXd data(50, 3);
    for (int i = 0; i < 50; ++i)
      for (int j = 0; j < 3; ++j) data(i, j) = rng.normal();
    CHECK(select_bic_variant(data, 2) == BicVariant::gaussian);
  }
  SUBCASE("a majority of low-cardinality columns forces discrete") {
    Eigen::MatrixXd data(60, 3);
    for (int i = 0; i < 60; ++i) {
      data(i, 0) = static_cast<double>(i % 3);
      data(i, 1) = static_cast<double>(i % 2);
      data(i, 2) = rng.normal();
    }
    CHECK(select_bic_variant(data, 2) == BicVariant::discrete);
  }
}

TEST_CASE("structural log prior sums") {
  const std::vector<VariableMeta> meta{{"A", TemporalStatus::pre_treatment},
                                       {"T", TemporalStatus::treatment},
                                       {"Y", TemporalStatus::outcome}};
  const std::vector<std::pair<int, int>> admissible{{0, 1}, {0, 2}, {1, 2}};

  SUBCASE("uniform prior is independent of the edge set") {
    const EdgePrior uniform;
    const double expected = 3.0 * std::log(0.5);
    const Dag sparse = make_dag(3, 1, 2, {{1, 2}});
    const Dag dense = make_dag(3, 1, 2, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(structural_log_prior(sparse, uniform, admissible, meta) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(structural_log_prior(dense, uniform, admissible, meta) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("single confident pair") {
    EdgePrior prior;
    prior.set("T", "Y", 0.9999);
    const std::vector<std::pair<int, int>> just_ty{{1, 2}};
    const Dag g = make_dag(3, 1, 2, {{1, 2}});
    CHECK(structural_log_prior(g, prior, just_ty, meta) ==
          doctest::Approx(std::log(0.9999)).epsilon(1e-12));
  }
  SUBCASE("absent-edge term ranks sparse graphs above dense ones when p < 0.5") {
    EdgePrior prior;
    for (const auto& [u, v] : admissible)
      prior.set(meta[static_cast<std::size_t>(u)].name, meta[static_cast<std::size_t>(v)].name, 0.2);
    const Dag sparse = make_dag(3, 1, 2, {{1, 2}});
    const Dag dense = make_dag(3, 1, 2, {{0, 1}, {0, 2}, {1, 2}});
    CHECK(structural_log_prior(sparse, prior, admissible, meta) >
          structural_log_prior(dense, prior, admissible, meta));
  }
  SUBCASE("probabilities are clipped so every term is finite") {
    EdgePrior prior;
    prior.clip_sample = 1e-12;  // store nearly-degenerate values
    prior.set("A", "T", 0.0);
    prior.set("A", "Y", 1.0);
    const Dag g = make_dag(3, 1, 2, {{0, 1}, {1, 2}});
    const double lp = structural_log_prior(g, prior, admissible, meta);
    CHECK(std::isfinite(lp));
  }
}

TEST_CASE("softmax collapse identities") {
  SUBCASE("two strategies, hand softmax") {
    const std::vector<double> w = collapse_weights({0.0, std::log(3.0)}, {0, 1}, 2);
    CHECK(std::abs(w[0] - 0.25) < 1e-12);
    CHECK(std::abs(w[1] - 0.75) < 1e-12);
  }
  SUBCASE("equal log-weights give the uniform distribution") {
    const std::vector<double> w = collapse_weights({3.3, 3.3, 3.3, 3.3}, {0, 1, 2, 3}, 4);
    for (double x : w) CHECK(x == doctest::Approx(0.25).epsilon(1e-12));
  }
  SUBCASE("graphs sharing a strategy pool their mass") {
    const std::vector<double> w =
        collapse_weights({std::log(1.0), std::log(2.0), std::log(1.0)}, {0, 0, 1}, 2);
    CHECK(std::abs(w[0] - 0.75) < 1e-12);
    CHECK(std::abs(w[1] - 0.25) < 1e-12);
  }
  SUBCASE("shift invariance at plus and minus 1e3") {
    Rng rng(89);
    for (int rep = 0; rep < 200; ++rep) {
      std::vector<double> lw(5);
      for (auto& x : lw) x = rng.normal() * 10.0;
      const std::vector<int> strat{0, 1, 2, 1, 0};
      const std::vector<double> base = collapse_weights(lw, strat, 3);
      for (double shift : {1e3, -1e3}) {
        std::vector<double> shifted = lw;
        for (auto& x : shifted) x += shift;
        const std::vector<double> w = collapse_weights(shifted, strat, 3);
        for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] - base[i]) <= 1e-12);
      }
    }
  }
  SUBCASE("weights always sum to one") {
    Rng rng(97);
    for (int rep = 0; rep < 500; ++rep) {
      const int n = 1 + static_cast<int>(rng.below(6));
      std::vector<double> lw(static_cast<std::size_t>(n));
      std::vector<int> strat(lw.size());
      const int n_strat = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      for (std::size_t i = 0; i < lw.size(); ++i) {
        lw[i] = rng.normal() * 50.0;
        strat[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_strat)));
      }
      // Every strategy index that happens to receive no graph keeps weight 0.
      const std::vector<double> w = collapse_weights(lw, strat, n_strat);
      double sum = 0.0;
      for (double x : w) sum += x;
      CHECK(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  SUBCASE("extreme spreads are floored, not NaN") {
    const std::vector<double> w = collapse_weights({0.0, -1e9}, {0, 1}, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] >= 0.0);
    CHECK(std::isfinite(w[1]));
    CHECK(std::abs(w[0] + w[1] - 1.0) <= 1e-12);
  }
}
