#pragma once

// Edge-probability priors over directed variable pairs. Stored values are
// clipped away from {0, 1} at insertion; lookups of unlisted pairs return
// exactly 0.5.

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace swc {

inline double clip_probability(double p, double eps) {
  if (p < eps) return eps;
  if (p > 1.0 - eps) return 1.0 - eps;
  return p;
}

struct EdgePrior {
  double clip_sample = 1e-4;
  std::map<std::pair<std::string, std::string>, double> probs;

  double get(const std::string& u, const std::string& v) const {
    auto it = probs.find({u, v});
    return it == probs.end() ? 0.5 : it->second;
  }

  void set(const std::string& u, const std::string& v, double p) {
    probs[{u, v}] = clip_probability(p, clip_sample);
  }
};

// File format: a flat JSON object {"u->v": p, ...}. Keys must reference known
// variables, p must lie in [0, 1], and self-loops are rejected.
EdgePrior load_edge_prior(const std::string& path, const std::vector<std::string>& variables);
void save_edge_prior(const EdgePrior& prior, const std::string& path);

}  // namespace swc
