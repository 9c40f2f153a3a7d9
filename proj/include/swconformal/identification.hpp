#pragma once

// Graph-conditioned adjustment strategies: backdoor validity, minimum-
// cardinality set search with a deterministic tie-break, and collapsing an
// ensemble of graphs into its unique strategies.

#include <optional>
#include <string>
#include <vector>

#include "swconformal/dataset.hpp"
#include "swconformal/graph.hpp"

namespace swc {

// Nodes reachable from `node` along directed edges (node itself excluded).
std::vector<int> descendants(const Dag& g, int node);

// Moralized-ancestral-graph reachability test of a _||_ b | z.
bool is_dseparated(const Dag& g, int a, int b, const std::vector<int>& z);

// Backdoor validity of z for the effect of T on Y: no member of z descends
// from T, and z d-separates T from Y once the direct T->Y edge is removed.
bool is_valid_backdoor(const Dag& g, const std::vector<int>& z);

// Smallest valid set over the candidate pool, candidates being covariate
// nodes that do not descend from T and (when temporal_filter is set) carry
// pre-treatment status. Within a cardinality, subsets are tried in ascending
// sorted-index order and the first valid one wins. Errors when the pool
// exceeds pool_cap ("adjustment search intractable"). Returns nullopt when
// no valid set exists.
std::optional<std::vector<int>> minimum_backdoor_set(const Dag& g, const std::vector<VariableMeta>& meta,
                                                     bool temporal_filter = true, int pool_cap = 20);

struct AdjustmentStrategy {
  std::vector<int> variables;  // sorted covariate node indices
  int source_graph_count = 0;
  std::string key;             // "0,3,7" or the empty-set marker
};

std::string strategy_key(const std::vector<int>& variables);

struct StrategyExtraction {
  std::vector<AdjustmentStrategy> strategies;  // sorted by (cardinality, indices)
  std::vector<int> graph_strategy;             // surviving graph -> strategy index
  std::vector<int> surviving_graphs;           // indices into the input ensemble
  int excluded_no_valid_set = 0;
  // Share of graphs whose unrestricted (descendant-exclusion only) minimum
  // set would have contained a post-treatment variable; negative when no
  // post-treatment covariates exist so there is nothing to report.
  double pre_filter_collider_fraction = -1.0;
  std::vector<std::string> warnings;
};

// Maps every graph to its minimum admissible adjustment strategy, dropping
// graphs with none (or assigning the empty set with a warning when
// fallback_empty is set), and collapses duplicates.
StrategyExtraction strategies_from_ensemble(const std::vector<Dag>& graphs,
                                            const std::vector<VariableMeta>& meta, bool fallback_empty);

}  // namespace swc
