#pragma once

// Candidate causal graphs: temporally stratified topological orders, the
// admissible directed pairs under a given order, Bernoulli edge sampling from
// an edge prior, and deduplicated ensemble construction.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "swconformal/dataset.hpp"
#include "swconformal/prior.hpp"
#include "swconformal/rng.hpp"

namespace swc {

struct Dag {
  int n = 0;                                // node count (d covariates + T + Y)
  int t_node = -1, y_node = -1;
  std::vector<int> order;                   // order[i] = node at position i
  std::vector<int> pos;                     // pos[node] = position in order
  std::vector<std::pair<int, int>> edges;   // sorted by (u, v) node index

  bool has_edge(int u, int v) const;
  std::vector<int> parents(int v) const;
  std::vector<int> children(int u) const;
  void remove_edge(int u, int v);
  // Canonical identity of the edge set, independent of the order it was
  // sampled under; ensembles deduplicate on this.
  std::string edge_key() const;
};

enum class OrderRule {
  strict,     // strata: pre-treatment..., T, Y, post-treatment...
  appendix,   // uniform permutation, T/Y swapped into place if needed
};

std::vector<int> sample_topological_order(const std::vector<VariableMeta>& meta, OrderRule rule, Rng& rng);

// Forward pairs of the order minus self-loops and temporally incoherent
// pairs: nothing points into a pre-treatment node from T or Y, and a
// post-treatment node never points at T or a pre-treatment node. Under the
// strict order rule the stratification already rules these out, so the list
// is exactly the (d+2)(d+1)/2 forward pairs.
std::vector<std::pair<int, int>> admissible_pairs(const std::vector<int>& order,
                                                  const std::vector<VariableMeta>& meta);

// Independent Bernoulli draw per admissible pair (probability clipped to
// [clip_sample, 1-clip_sample]), visited in order position; the T->Y edge is
// always present.
Dag sample_dag(const EdgePrior& prior, const std::vector<int>& order,
               const std::vector<VariableMeta>& meta, Rng& rng);

struct EnsembleResult {
  std::vector<Dag> graphs;   // unique by edge_key, in first-seen order
  int attempts = 0;
  bool hit_attempt_cap = false;
  std::vector<std::string> warnings;
};

// Draws orders and DAGs until k unique edge sets are collected or
// max_attempts (default 100*k when <= 0) draws have been spent.
EnsembleResult sample_ensemble(const EdgePrior& prior, const std::vector<VariableMeta>& meta, int k,
                               std::uint64_t seed, OrderRule rule, int max_attempts = 0);

// Keeps only the first max_edges edges in order-position ranking (T->Y is
// always retained). No-op when max_edges <= 0.
void truncate_edges(Dag& g, int max_edges);

nlohmann::ordered_json ensemble_to_json(const std::vector<Dag>& graphs,
                                        const std::vector<VariableMeta>& meta);

}  // namespace swc
