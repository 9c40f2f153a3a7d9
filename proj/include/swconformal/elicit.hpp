#pragma once

// Optional HTTP elicitation of edge priors from a chat-completion endpoint.
// The cached-file path (load_edge_prior) is the supported default; this is a
// convenience for bootstrapping a prior file. On any persistent failure the
// result falls back to the uniform 0.5 prior with a warning.

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "swconformal/dataset.hpp"
#include "swconformal/prior.hpp"

namespace swc {

struct ElicitConfig {
  std::string endpoint;  // e.g. http://host:port/v1/chat/completions
  std::string model = "default";
  int retries = 5;
  int timeout_sec = 30;
};

struct ElicitResult {
  EdgePrior prior;
  bool fallback_used = false;
  int attempts = 0;
  std::vector<std::string> warnings;
};

// Ordered directed pairs to ask about: pairs touching treatment or outcome
// first, then the rest, truncated to 120 pairs when there are at most 15
// variables and to 60 pairs otherwise.
std::vector<std::pair<std::string, std::string>> elicitation_pairs(const std::vector<VariableMeta>& meta);

std::string build_elicitation_prompt(const std::string& description,
                                     const std::vector<std::pair<std::string, std::string>>& pairs);

// Extracts {"u->v": p} from raw model text: strips markdown fences, then
// takes the largest balanced {...} substring that parses as a JSON object of
// numeric values. Returns nullopt when nothing parseable is found.
std::optional<std::map<std::string, double>> parse_elicitation_response(const std::string& text);

ElicitResult elicit_prior_http(const ElicitConfig& config, const std::vector<VariableMeta>& meta,
                               const std::string& description);

}  // namespace swc
