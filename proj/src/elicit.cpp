#include "swconformal/elicit.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace swc {

namespace {

bool touches_treatment_or_outcome(const std::pair<std::string, std::string>& pair,
                                  const std::string& t_name, const std::string& y_name) {
  return pair.first == t_name || pair.second == t_name || pair.first == y_name || pair.second == y_name;
}

// endpoint -> (host[:port], path)
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
  std::string rest = endpoint;
  const std::string scheme = "http://";
  if (rest.rfind(scheme, 0) == 0) rest = rest.substr(scheme.size());
  const std::size_t slash = rest.find('/');
  if (slash == std::string::npos) return {"http://" + rest, "/v1/chat/completions"};
  return {"http://" + rest.substr(0, slash), rest.substr(slash)};
}

}  // namespace

std::vector<std::pair<std::string, std::string>> elicitation_pairs(const std::vector<VariableMeta>& meta) {
  std::string t_name, y_name;
  std::vector<std::string> names;
  for (const auto& m : meta) {
    names.push_back(m.name);
    if (m.status == TemporalStatus::treatment) t_name = m.name;
    if (m.status == TemporalStatus::outcome) y_name = m.name;
  }
  std::vector<std::pair<std::string, std::string>> ty_pairs, other_pairs;
  for (const auto& u : names) {
    for (const auto& v : names) {
      if (u == v) continue;
      const std::pair<std::string, std::string> p{u, v};
      if (touches_treatment_or_outcome(p, t_name, y_name)) {
        ty_pairs.push_back(p);
      } else {
        other_pairs.push_back(p);
      }
    }
  }
  std::vector<std::pair<std::string, std::string>> out = ty_pairs;
  out.insert(out.end(), other_pairs.begin(), other_pairs.end());
  const std::size_t cap = names.size() <= 15 ? 120 : 60;
  if (out.size() > cap) out.resize(cap);
  return out;
}

std::string build_elicitation_prompt(const std::string& description,
                                     const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::ostringstream prompt;
  prompt << description << "\n\n"
         << "For each directed edge below, give the probability in [0,1] that the causal relationship "
            "exists in the true causal graph for this domain.\n\n"
         << "IMPORTANT: Output ONLY a JSON object mapping edge strings to probabilities. No reasoning, "
            "no explanations.\n"
         << "Example format: {\"A->B\": 0.8, \"B->C\": 0.1}\n\n"
         << "Edges:\n";
  for (const auto& [u, v] : pairs) prompt << u << "->" << v << "\n";
  return prompt.str();
}

std::optional<std::map<std::string, double>> parse_elicitation_response(const std::string& text) {
  std::string cleaned;
  cleaned.reserve(text.size());
  // Drop markdown fence lines wholesale; their payload lines survive.
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    std::string stripped = line;
    stripped.erase(0, stripped.find_first_not_of(" \t"));
    if (stripped.rfind("```", 0) == 0) continue;
    cleaned += line;
    cleaned += '\n';
  }

  // Largest balanced {...} substring that parses as an object of numbers.
  std::optional<std::map<std::string, double>> best;
  std::size_t best_len = 0;
  for (std::size_t start = 0; start < cleaned.size(); ++start) {
    if (cleaned[start] != '{') continue;
    int depth = 0;
    for (std::size_t pos = start; pos < cleaned.size(); ++pos) {
      if (cleaned[pos] == '{') ++depth;
      if (cleaned[pos] == '}') {
        --depth;
        if (depth == 0) {
          const std::size_t len = pos - start + 1;
          if (len > best_len) {
            nlohmann::json j = nlohmann::json::parse(cleaned.substr(start, len), nullptr, false);
            if (j.is_object()) {
              std::map<std::string, double> parsed;
              for (auto it = j.begin(); it != j.end(); ++it) {
                if (it.value().is_number()) parsed[it.key()] = it.value().get<double>();
              }
              if (!parsed.empty()) {
                best = std::move(parsed);
                best_len = len;
              }
            }
          }
          break;
        }
      }
    }
  }
  return best;
}

ElicitResult elicit_prior_http(const ElicitConfig& config, const std::vector<VariableMeta>& meta,
                               const std::string& description) {
  const auto pairs = elicitation_pairs(meta);
  const std::size_t needed = std::max(meta.size(), static_cast<std::size_t>(5));
  const auto [host, path] = split_endpoint(config.endpoint);

  nlohmann::ordered_json body;
  body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array();
  body["messages"].push_back({{"role", "system"}, {"content", "Return ONLY valid JSON."}});
  body["messages"].push_back({{"role", "user"}, {"content", build_elicitation_prompt(description, pairs)}});
  body["temperature"] = 0;

  ElicitResult result;
  for (int attempt = 1; attempt <= std::max(config.retries, 1); ++attempt) {
    result.attempts = attempt;
    httplib::Client client(host);
    client.set_connection_timeout(config.timeout_sec, 0);
    client.set_read_timeout(config.timeout_sec, 0);
    auto res = client.Post(path, body.dump(), "application/json");
    if (!res) {
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": endpoint unreachable");
      continue;
    }
    if (res->status != 200) {
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": HTTP status " +
                                std::to_string(res->status));
      continue;
    }
    std::string content = res->body;
    nlohmann::json envelope = nlohmann::json::parse(res->body, nullptr, false);
    if (envelope.is_object() && envelope.contains("choices") && envelope["choices"].is_array() &&
        !envelope["choices"].empty()) {
      const auto& choice = envelope["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content")) {
        content = choice["message"]["content"].get<std::string>();
      }
    }
    const auto parsed = parse_elicitation_response(content);
    if (!parsed) {
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": no JSON object in response");
      continue;
    }
    EdgePrior prior;
    std::size_t covered = 0;
    for (const auto& [u, v] : pairs) {
      auto it = parsed->find(u + "->" + v);
      if (it == parsed->end()) continue;
      const double p = std::min(std::max(it->second, 0.0), 1.0);
      prior.set(u, v, p);
      ++covered;
    }
    if (covered < needed) {
      result.warnings.push_back("attempt " + std::to_string(attempt) + ": only " + std::to_string(covered) +
                                " of " + std::to_string(needed) + " required pairs covered");
      continue;
    }
    result.prior = prior;
    result.fallback_used = false;
    return result;
  }

  result.prior = EdgePrior{};  // uniform 0.5 on every pair
  result.fallback_used = true;
  result.warnings.push_back("elicitation failed after " + std::to_string(result.attempts) +
                            " attempt(s); falling back to the uniform 0.5 prior");
  return result;
}

}  // namespace swc
