#include "swconformal/graph.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace swc {

namespace {

int find_status_node(const std::vector<VariableMeta>& meta, TemporalStatus status) {
  for (std::size_t i = 0; i < meta.size(); ++i) {
    if (meta[i].status == status) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace

bool Dag::has_edge(int u, int v) const {
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(u, v));
}

std::vector<int> Dag::parents(int v) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges) {
    if (b == v) out.push_back(a);
  }
  return out;
}

std::vector<int> Dag::children(int u) const {
  std::vector<int> out;
  for (const auto& [a, b] : edges) {
    if (a == u) out.push_back(b);
  }
  return out;
}

void Dag::remove_edge(int u, int v) {
  auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(u, v));
  if (it != edges.end() && *it == std::make_pair(u, v)) edges.erase(it);
}

std::string Dag::edge_key() const {
  std::string key;
  for (const auto& [u, v] : edges) {
    key += std::to_string(u) + ">" + std::to_string(v) + ";";
  }
  return key;
}

std::vector<int> sample_topological_order(const std::vector<VariableMeta>& meta, OrderRule rule, Rng& rng) {
  const int n = static_cast<int>(meta.size());
  const int t_node = find_status_node(meta, TemporalStatus::treatment);
  const int y_node = find_status_node(meta, TemporalStatus::outcome);
  if (t_node < 0 || y_node < 0) throw std::runtime_error("metadata lacks a treatment or outcome variable");

  std::vector<int> perm(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
  rng.shuffle(perm);

  if (rule == OrderRule::appendix) {
    // Only correction: treatment must precede outcome.
    int pt = -1, py = -1;
    for (int i = 0; i < n; ++i) {
      if (perm[static_cast<std::size_t>(i)] == t_node) pt = i;
      if (perm[static_cast<std::size_t>(i)] == y_node) py = i;
    }
    if (pt > py) std::swap(perm[static_cast<std::size_t>(pt)], perm[static_cast<std::size_t>(py)]);
    return perm;
  }

  // Strict rule: stable-stratify the uniform draw into
  // [pre-treatment..., T, Y, post-treatment...].
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int node : perm) {
    if (meta[static_cast<std::size_t>(node)].status == TemporalStatus::pre_treatment) out.push_back(node);
  }
  out.push_back(t_node);
  out.push_back(y_node);
  for (int node : perm) {
    if (meta[static_cast<std::size_t>(node)].status == TemporalStatus::post_treatment) out.push_back(node);
  }
  return out;
}

std::vector<std::pair<int, int>> admissible_pairs(const std::vector<int>& order,
                                                  const std::vector<VariableMeta>& meta) {
  std::vector<std::pair<int, int>> pairs;
  const int n = static_cast<int>(order.size());
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const int u = order[static_cast<std::size_t>(i)];
      const int v = order[static_cast<std::size_t>(j)];
      const TemporalStatus su = meta[static_cast<std::size_t>(u)].status;
      const TemporalStatus sv = meta[static_cast<std::size_t>(v)].status;
      if (sv == TemporalStatus::pre_treatment &&
          (su == TemporalStatus::treatment || su == TemporalStatus::outcome)) {
        continue;  // nothing causes a pre-treatment measurement after the fact
      }
      if (su == TemporalStatus::post_treatment &&
          (sv == TemporalStatus::treatment || sv == TemporalStatus::pre_treatment)) {
        continue;  // a post-treatment variable cannot cause T or anything before it
      }
      pairs.emplace_back(u, v);
    }
  }
  return pairs;
}

Dag sample_dag(const EdgePrior& prior, const std::vector<int>& order,
               const std::vector<VariableMeta>& meta, Rng& rng) {
  Dag g;
  g.n = static_cast<int>(order.size());
  g.t_node = find_status_node(meta, TemporalStatus::treatment);
  g.y_node = find_status_node(meta, TemporalStatus::outcome);
  g.order = order;
  g.pos.assign(static_cast<std::size_t>(g.n), -1);
  for (int i = 0; i < g.n; ++i) g.pos[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] = i;

  for (const auto& [u, v] : admissible_pairs(order, meta)) {
    const double p = clip_probability(
        prior.get(meta[static_cast<std::size_t>(u)].name, meta[static_cast<std::size_t>(v)].name),
        prior.clip_sample);
    if (rng.bernoulli(p)) g.edges.emplace_back(u, v);
  }
  // The edge list is not sorted yet, so probe it linearly here.
  const std::pair<int, int> effect_edge{g.t_node, g.y_node};
  if (std::find(g.edges.begin(), g.edges.end(), effect_edge) == g.edges.end()) {
    g.edges.push_back(effect_edge);
  }
  std::sort(g.edges.begin(), g.edges.end());
  return g;
}

EnsembleResult sample_ensemble(const EdgePrior& prior, const std::vector<VariableMeta>& meta, int k,
                               std::uint64_t seed, OrderRule rule, int max_attempts) {
  if (k < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (max_attempts <= 0) max_attempts = 100 * k;
  Rng rng(derive_seed(seed, SeedStream::ensemble));
  EnsembleResult result;
  std::set<std::string> seen;
  while (static_cast<int>(result.graphs.size()) < k && result.attempts < max_attempts) {
    ++result.attempts;
    const auto order = sample_topological_order(meta, rule, rng);
    Dag g = sample_dag(prior, order, meta, rng);
    if (seen.insert(g.edge_key()).second) result.graphs.push_back(std::move(g));
  }
  if (result.graphs.empty()) {
    // The forced T->Y edge makes the very first draw a valid graph.
    throw std::logic_error("ensemble sampling produced no graphs");
  }
  if (static_cast<int>(result.graphs.size()) < k) {
    result.hit_attempt_cap = true;
    result.warnings.push_back("prior too concentrated: only " + std::to_string(result.graphs.size()) +
                              " unique graphs after " + std::to_string(result.attempts) + " attempts");
  }
  return result;
}

void truncate_edges(Dag& g, int max_edges) {
  if (max_edges <= 0 || static_cast<int>(g.edges.size()) <= max_edges) return;
  std::vector<std::pair<int, int>> ranked = g.edges;
  std::sort(ranked.begin(), ranked.end(), [&](const auto& a, const auto& b) {
    return std::make_pair(g.pos[static_cast<std::size_t>(a.first)], g.pos[static_cast<std::size_t>(a.second)]) <
           std::make_pair(g.pos[static_cast<std::size_t>(b.first)], g.pos[static_cast<std::size_t>(b.second)]);
  });
  ranked.resize(static_cast<std::size_t>(max_edges));
  const std::pair<int, int> ty{g.t_node, g.y_node};
  if (std::find(ranked.begin(), ranked.end(), ty) == ranked.end()) {
    ranked.back() = ty;
  }
  std::sort(ranked.begin(), ranked.end());
  g.edges = std::move(ranked);
}

nlohmann::ordered_json ensemble_to_json(const std::vector<Dag>& graphs,
                                        const std::vector<VariableMeta>& meta) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& g : graphs) {
    nlohmann::ordered_json jg;
    nlohmann::ordered_json order = nlohmann::ordered_json::array();
    for (int node : g.order) order.push_back(meta[static_cast<std::size_t>(node)].name);
    nlohmann::ordered_json edges = nlohmann::ordered_json::array();
    for (const auto& [u, v] : g.edges) {
      edges.push_back(nlohmann::ordered_json::array(
          {meta[static_cast<std::size_t>(u)].name, meta[static_cast<std::size_t>(v)].name}));
    }
    jg["order"] = order;
    jg["edges"] = edges;
    out.push_back(jg);
  }
  return out;
}

}  // namespace swc
