#include "swconformal/prior.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace swc {

EdgePrior load_edge_prior(const std::string& path, const std::vector<std::string>& variables) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open prior file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid prior JSON in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("prior file must be a flat JSON object of \"u->v\" keys");

  const std::set<std::string> known(variables.begin(), variables.end());
  EdgePrior prior;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    const std::size_t arrow = key.find("->");
    if (arrow == std::string::npos || arrow == 0 || arrow + 2 >= key.size()) {
      throw std::runtime_error("malformed prior key '" + key + "'; expected \"u->v\"");
    }
    const std::string u = key.substr(0, arrow);
    const std::string v = key.substr(arrow + 2);
    if (!known.count(u)) throw std::runtime_error("prior references unknown variable '" + u + "'");
    if (!known.count(v)) throw std::runtime_error("prior references unknown variable '" + v + "'");
    if (u == v) throw std::runtime_error("prior contains self-loop '" + key + "'");
    if (!it.value().is_number()) throw std::runtime_error("prior value for '" + key + "' is not a number");
    const double p = it.value().get<double>();
    if (p < 0.0 || p > 1.0) {
      throw std::runtime_error("prior value for '" + key + "' must lie in [0, 1]");
    }
    prior.set(u, v, p);
  }
  return prior;
}

void save_edge_prior(const EdgePrior& prior, const std::string& path) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [pair, p] : prior.probs) j[pair.first + "->" + pair.second] = p;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write prior file '" + path + "'");
  out << j.dump(2) << '\n';
}

}  // namespace swc
