#include "swconformal/identification.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace swc {

namespace {

// Ancestor closure of `roots` (roots included).
std::vector<bool> ancestor_closure(const Dag& g, const std::vector<int>& roots) {
  std::vector<bool> in(static_cast<std::size_t>(g.n), false);
  std::vector<int> stack = roots;
  for (int r : roots) in[static_cast<std::size_t>(r)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : g.edges) {
      if (b == v && !in[static_cast<std::size_t>(a)]) {
        in[static_cast<std::size_t>(a)] = true;
        stack.push_back(a);
      }
    }
  }
  return in;
}

// Next combination of indices into a pool, lexicographic over sorted tuples.
bool next_combination(std::vector<int>& comb, int pool_size) {
  const int k = static_cast<int>(comb.size());
  for (int i = k - 1; i >= 0; --i) {
    if (comb[static_cast<std::size_t>(i)] < pool_size - (k - i)) {
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<int> descendants(const Dag& g, int node) {
  std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
  std::vector<int> stack{node};
  std::vector<int> out;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : g.edges) {
      if (a == v && !seen[static_cast<std::size_t>(b)]) {
        seen[static_cast<std::size_t>(b)] = true;
        out.push_back(b);
        stack.push_back(b);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool is_dseparated(const Dag& g, int a, int b, const std::vector<int>& z) {
  // Lauritzen's reduction: restrict to the ancestor closure of {a, b} union z,
  // moralize, delete z, and test plain connectivity.
  std::vector<int> roots{a, b};
  roots.insert(roots.end(), z.begin(), z.end());
  const std::vector<bool> in_anc = ancestor_closure(g, roots);

  std::vector<std::set<int>> adj(static_cast<std::size_t>(g.n));
  auto connect = [&](int u, int v) {
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
  };
  std::vector<std::vector<int>> parents_of(static_cast<std::size_t>(g.n));
  for (const auto& [u, v] : g.edges) {
    if (!in_anc[static_cast<std::size_t>(u)] || !in_anc[static_cast<std::size_t>(v)]) continue;
    connect(u, v);
    parents_of[static_cast<std::size_t>(v)].push_back(u);
  }
  for (int v = 0; v < g.n; ++v) {
    const auto& pa = parents_of[static_cast<std::size_t>(v)];
    for (std::size_t i = 0; i < pa.size(); ++i) {
      for (std::size_t j = i + 1; j < pa.size(); ++j) connect(pa[i], pa[j]);
    }
  }

  std::vector<bool> blocked(static_cast<std::size_t>(g.n), false);
  for (int v : z) blocked[static_cast<std::size_t>(v)] = true;
  if (blocked[static_cast<std::size_t>(a)] || blocked[static_cast<std::size_t>(b)]) {
    throw std::invalid_argument("conditioning set must exclude the tested pair");
  }

  std::vector<bool> seen(static_cast<std::size_t>(g.n), false);
  std::vector<int> stack{a};
  seen[static_cast<std::size_t>(a)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    if (v == b) return false;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)] || blocked[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      stack.push_back(w);
    }
  }
  return true;
}

bool is_valid_backdoor(const Dag& g, const std::vector<int>& z) {
  const std::vector<int> desc = descendants(g, g.t_node);
  for (int v : z) {
    if (std::binary_search(desc.begin(), desc.end(), v)) return false;
  }
  Dag reduced = g;
  reduced.remove_edge(g.t_node, g.y_node);
  return is_dseparated(reduced, g.t_node, g.y_node, z);
}

std::string strategy_key(const std::vector<int>& variables) {
  if (variables.empty()) return "empty";
  std::string key;
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (i > 0) key += ",";
    key += std::to_string(variables[i]);
  }
  return key;
}

std::optional<std::vector<int>> minimum_backdoor_set(const Dag& g, const std::vector<VariableMeta>& meta,
                                                     bool temporal_filter, int pool_cap) {
  const std::vector<int> desc = descendants(g, g.t_node);
  std::vector<int> pool;
  for (int v = 0; v < g.n; ++v) {
    if (v == g.t_node || v == g.y_node) continue;
    if (std::binary_search(desc.begin(), desc.end(), v)) continue;
    if (temporal_filter && meta[static_cast<std::size_t>(v)].status != TemporalStatus::pre_treatment) continue;
    pool.push_back(v);
  }
  std::sort(pool.begin(), pool.end());
  if (static_cast<int>(pool.size()) > pool_cap) {
    throw std::runtime_error("adjustment search intractable: candidate pool of " +
                             std::to_string(pool.size()) + " exceeds " + std::to_string(pool_cap));
  }

  Dag reduced = g;
  reduced.remove_edge(g.t_node, g.y_node);

  const int m = static_cast<int>(pool.size());
  for (int k = 0; k <= m; ++k) {
    std::vector<int> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i;
    bool more = true;
    while (more) {
      std::vector<int> z;
      z.reserve(static_cast<std::size_t>(k));
      for (int i : comb) z.push_back(pool[static_cast<std::size_t>(i)]);
      if (is_dseparated(reduced, g.t_node, g.y_node, z)) return z;
      more = k > 0 && next_combination(comb, m);
    }
  }
  return std::nullopt;
}

StrategyExtraction strategies_from_ensemble(const std::vector<Dag>& graphs,
                                            const std::vector<VariableMeta>& meta, bool fallback_empty) {
  StrategyExtraction out;
  bool any_post = false;
  for (const auto& m : meta) any_post = any_post || m.status == TemporalStatus::post_treatment;

  int collider_selections = 0;
  int diagnostics_run = 0;
  std::map<std::string, std::pair<std::vector<int>, std::vector<int>>> groups;  // key -> (vars, graph ids)

  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    const Dag& g = graphs[gi];
    if (any_post) {
      // Diagnostic only: what would have been picked without the temporal
      // admissibility filter?
      try {
        const auto unfiltered = minimum_backdoor_set(g, meta, /*temporal_filter=*/false);
        ++diagnostics_run;
        if (unfiltered) {
          for (int v : *unfiltered) {
            if (meta[static_cast<std::size_t>(v)].status == TemporalStatus::post_treatment) {
              ++collider_selections;
              break;
            }
          }
        }
      } catch (const std::runtime_error&) {
        // pool over the cap: skip the diagnostic for this graph
      }
    }

    auto selected = minimum_backdoor_set(g, meta, /*temporal_filter=*/true);
    if (!selected) {
      if (fallback_empty) {
        selected = std::vector<int>{};
        out.warnings.push_back("graph " + std::to_string(gi) +
                               ": no admissible adjustment set; falling back to the empty set");
      } else {
        ++out.excluded_no_valid_set;
        continue;
      }
    }
    const std::string key = strategy_key(*selected);
    groups[key].first = *selected;
    groups[key].second.push_back(static_cast<int>(gi));
  }

  if (any_post && diagnostics_run > 0) {
    out.pre_filter_collider_fraction = static_cast<double>(collider_selections) / diagnostics_run;
  }

  std::vector<std::pair<std::vector<int>, std::string>> ordered;
  for (const auto& [key, group] : groups) ordered.push_back({group.first, key});
  std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
    if (a.first.size() != b.first.size()) return a.first.size() < b.first.size();
    return a.first < b.first;
  });

  std::map<std::string, int> strategy_index;
  for (const auto& [vars, key] : ordered) {
    AdjustmentStrategy s;
    s.variables = vars;
    s.key = key;
    s.source_graph_count = static_cast<int>(groups[key].second.size());
    strategy_index[key] = static_cast<int>(out.strategies.size());
    out.strategies.push_back(std::move(s));
  }
  // surviving graphs in ensemble order, each tagged with its strategy
  std::map<int, int> graph_to_strategy;
  for (const auto& [key, group] : groups) {
    for (int gi : group.second) graph_to_strategy[gi] = strategy_index[key];
  }
  for (const auto& [gi, si] : graph_to_strategy) {
    out.surviving_graphs.push_back(gi);
    out.graph_strategy.push_back(si);
  }
  return out;
}

}  // namespace swc
