#include "swconformal/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

namespace swc {

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

nlohmann::ordered_json num_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

nlohmann::ordered_json num_or_null(std::optional<double> v) {
  if (!v) return nullptr;
  return num_or_null(*v);
}

// Confounder names in a synthetic-generator metadata block: the pre-treatment
// variables the generator wires into both T and Y (C1..C5 by construction).
std::vector<std::string> scm_confounder_names(const std::vector<VariableMeta>& meta) {
  std::vector<std::string> out;
  for (const auto& m : meta) {
    if (m.status == TemporalStatus::pre_treatment && !m.name.empty() && m.name[0] == 'C') {
      out.push_back(m.name);
    }
  }
  return out;
}

bool strategy_contains_all(const StrategyReportRow& row, const std::vector<std::string>& required) {
  for (const auto& name : required) {
    if (std::find(row.variables.begin(), row.variables.end(), name) == row.variables.end()) return false;
  }
  return true;
}

// Posterior mass on strategies containing every confounder.
double valid_strategy_mass(const RunReport& report, const std::vector<std::string>& required) {
  double mass = 0.0;
  for (const auto& row : report.strategies) {
    if (strategy_contains_all(row, required)) mass += row.weight;
  }
  return mass;
}

// Truth-labelled BIC separation: min BIC among graphs whose strategy is
// valid minus max BIC among the rest; null when either side is empty.
std::optional<double> delta_n_valid(const RunReport& report, const std::vector<std::string>& required) {
  std::set<std::string> valid_keys;
  for (const auto& row : report.strategies) {
    if (strategy_contains_all(row, required)) valid_keys.insert(row.key);
  }
  double min_valid = std::numeric_limits<double>::infinity();
  double max_other = -std::numeric_limits<double>::infinity();
  bool any_valid = false, any_other = false;
  for (const auto& g : report.graphs) {
    if (valid_keys.count(g.strategy) > 0) {
      min_valid = std::min(min_valid, g.bic);
      any_valid = true;
    } else {
      max_other = std::max(max_other, g.bic);
      any_other = true;
    }
  }
  if (!any_valid || !any_other) return std::nullopt;
  return min_valid - max_other;
}

bool any_strategy_uses(const RunReport& report, const std::string& name) {
  for (const auto& row : report.strategies) {
    if (std::find(row.variables.begin(), row.variables.end(), name) != row.variables.end()) return true;
  }
  return false;
}

nlohmann::ordered_json metrics_block(const RunReport& r) {
  nlohmann::ordered_json j;
  j["coverage_pseudo"] = r.metrics.coverage_pseudo;
  j["coverage_cate"] = num_or_null(r.metrics.coverage_cate);
  j["mean_width"] = num_or_null(r.metrics.mean_width);
  j["rmse_midpoint"] = num_or_null(r.metrics.rmse_midpoint);
  j["rmse_weighted_tau"] = num_or_null(r.metrics.rmse_weighted_tau);
  j["pre_filter_collider_pct"] = num_or_null(r.pre_filter_collider_pct);
  return j;
}

}  // namespace

const std::vector<std::uint64_t>& default_seed_set() {
  static const std::vector<std::uint64_t> seeds = {42,   123,  456,  789,  1024,
                                                   2048, 3333, 7777, 9999, 31415};
  return seeds;
}

EdgePrior scm_oracle_prior(const std::vector<VariableMeta>& meta, bool inverted, double p_true,
                           double p_false) {
  std::string t_name, y_name;
  std::vector<std::string> names, post;
  for (const auto& m : meta) {
    names.push_back(m.name);
    if (m.status == TemporalStatus::treatment) t_name = m.name;
    if (m.status == TemporalStatus::outcome) y_name = m.name;
    if (m.status == TemporalStatus::post_treatment) post.push_back(m.name);
  }
  if (t_name.empty() || y_name.empty()) {
    throw std::invalid_argument("scm_oracle_prior: metadata lacks treatment or outcome");
  }
  std::set<std::pair<std::string, std::string>> true_edges;
  for (const auto& c : scm_confounder_names(meta)) {
    true_edges.insert({c, t_name});
    true_edges.insert({c, y_name});
  }
  true_edges.insert({t_name, y_name});
  for (const auto& k : post) {
    true_edges.insert({t_name, k});
    true_edges.insert({y_name, k});
  }
  EdgePrior prior;
  for (const auto& u : names) {
    for (const auto& v : names) {
      if (u == v) continue;
      const bool generating = true_edges.count({u, v}) > 0;
      prior.set(u, v, generating != inverted ? p_true : p_false);
    }
  }
  return prior;
}

nlohmann::ordered_json run_collider_stress(const RunConfig& config, int n,
                                           const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("run_collider_stress requires at least one seed");
  nlohmann::ordered_json out;
  out["experiment"] = "collider_stress";
  out["n"] = n;
  out["seeds"] = seeds;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();

  std::vector<double> m_cov_pseudo, m_cov_cate, m_width, m_rmse, m_prefilter;
  std::vector<double> b_cov_pseudo, b_cov_cate, b_width, b_rmse, b_prefilter;
  int excluded = 0;

  for (std::uint64_t seed : seeds) {
    const Dataset data = inject_collider(gen_synthetic_scm(n, seed), seed);
    const EdgePrior prior = scm_oracle_prior(data.meta);

    RunConfig method_cfg = config;
    method_cfg.seed = seed;
    method_cfg.forced_strategy.reset();
    const RunReport method = run_pipeline(method_cfg, data, prior);

    RunConfig naive_cfg = config;
    naive_cfg.seed = seed;
    std::vector<int> forced;
    for (int j = 0; j < data.d(); ++j) {
      const auto& m = data.meta[static_cast<std::size_t>(j)];
      if (m.status == TemporalStatus::pre_treatment || m.name == "X_col") forced.push_back(j);
    }
    naive_cfg.forced_strategy = forced;
    const RunReport naive = run_pipeline(naive_cfg, data, prior);

    const bool xcol_excluded = !any_strategy_uses(method, "X_col");
    excluded += xcol_excluded ? 1 : 0;

    nlohmann::ordered_json row;
    row["seed"] = seed;
    row["method"] = metrics_block(method);
    row["method"]["xcol_excluded"] = xcol_excluded;
    row["naive"] = metrics_block(naive);
    rows.push_back(row);

    m_cov_pseudo.push_back(method.metrics.coverage_pseudo);
    if (method.metrics.coverage_cate) m_cov_cate.push_back(*method.metrics.coverage_cate);
    m_width.push_back(method.metrics.mean_width);
    if (method.metrics.rmse_midpoint) m_rmse.push_back(*method.metrics.rmse_midpoint);
    if (method.pre_filter_collider_pct) m_prefilter.push_back(*method.pre_filter_collider_pct);
    b_cov_pseudo.push_back(naive.metrics.coverage_pseudo);
    if (naive.metrics.coverage_cate) b_cov_cate.push_back(*naive.metrics.coverage_cate);
    b_width.push_back(naive.metrics.mean_width);
    if (naive.metrics.rmse_midpoint) b_rmse.push_back(*naive.metrics.rmse_midpoint);
    if (naive.pre_filter_collider_pct) b_prefilter.push_back(*naive.pre_filter_collider_pct);
  }

  out["per_seed"] = rows;
  nlohmann::ordered_json summary;
  summary["xcol_exclusion_rate"] = static_cast<double>(excluded) / static_cast<double>(seeds.size());
  nlohmann::ordered_json method_mean;
  method_mean["coverage_pseudo"] = num_or_null(mean_of(m_cov_pseudo));
  method_mean["coverage_cate"] = num_or_null(mean_of(m_cov_cate));
  method_mean["mean_width"] = num_or_null(mean_of(m_width));
  method_mean["rmse_midpoint"] = num_or_null(mean_of(m_rmse));
  method_mean["pre_filter_collider_pct"] = num_or_null(mean_of(m_prefilter));
  nlohmann::ordered_json naive_mean;
  naive_mean["coverage_pseudo"] = num_or_null(mean_of(b_cov_pseudo));
  naive_mean["coverage_cate"] = num_or_null(mean_of(b_cov_cate));
  naive_mean["mean_width"] = num_or_null(mean_of(b_width));
  naive_mean["rmse_midpoint"] = num_or_null(mean_of(b_rmse));
  naive_mean["pre_filter_collider_pct"] = num_or_null(mean_of(b_prefilter));
  summary["method"] = method_mean;
  summary["naive"] = naive_mean;
  out["summary"] = summary;
  return out;
}

nlohmann::ordered_json run_washout(const RunConfig& config, const std::vector<int>& n_list,
                                   const std::vector<std::uint64_t>& seeds) {
  if (n_list.empty() || seeds.empty()) {
    throw std::invalid_argument("run_washout requires sample sizes and seeds");
  }
  nlohmann::ordered_json out;
  out["experiment"] = "washout";
  out["n_list"] = n_list;
  out["seeds"] = seeds;
  nlohmann::ordered_json cells = nlohmann::ordered_json::array();

  const std::vector<std::string> kinds = {"informative", "uniform", "inverted"};
  for (const auto& kind : kinds) {
    for (int n : n_list) {
      std::vector<double> mass, sigma, width, cov_pseudo, cov_cate, dn, dn_valid;
      nlohmann::ordered_json runs = nlohmann::ordered_json::array();
      for (std::uint64_t seed : seeds) {
        const Dataset data = gen_synthetic_scm(n, seed);
        EdgePrior prior;
        if (kind == "informative") prior = scm_oracle_prior(data.meta, false);
        if (kind == "inverted") prior = scm_oracle_prior(data.meta, true);
        RunConfig cfg = config;
        cfg.seed = seed;
        const RunReport report = run_pipeline(cfg, data, prior);
        const std::vector<std::string> required = scm_confounder_names(data.meta);
        const double vm = valid_strategy_mass(report, required);
        const std::optional<double> dnv = delta_n_valid(report, required);

        nlohmann::ordered_json row;
        row["seed"] = seed;
        row["valid_mass"] = vm;
        row["sigma_struct_mean"] = report.sigma_struct_mean;
        row["delta_n"] = num_or_null(report.delta_n);
        row["delta_n_valid"] = num_or_null(dnv);
        row["mean_width"] = num_or_null(report.metrics.mean_width);
        row["coverage_pseudo"] = report.metrics.coverage_pseudo;
        row["coverage_cate"] = num_or_null(report.metrics.coverage_cate);
        runs.push_back(row);

        mass.push_back(vm);
        sigma.push_back(report.sigma_struct_mean);
        if (std::isfinite(report.metrics.mean_width)) width.push_back(report.metrics.mean_width);
        cov_pseudo.push_back(report.metrics.coverage_pseudo);
        if (report.metrics.coverage_cate) cov_cate.push_back(*report.metrics.coverage_cate);
        if (report.delta_n) dn.push_back(*report.delta_n);
        if (dnv) dn_valid.push_back(*dnv);
      }
      nlohmann::ordered_json cell;
      cell["prior"] = kind;
      cell["n"] = n;
      cell["valid_mass_mean"] = num_or_null(mean_of(mass));
      cell["sigma_struct_mean"] = num_or_null(mean_of(sigma));
      cell["delta_n_mean"] = num_or_null(mean_of(dn));
      cell["delta_n_valid_mean"] = num_or_null(mean_of(dn_valid));
      cell["mean_width"] = num_or_null(mean_of(width));
      cell["coverage_pseudo_mean"] = num_or_null(mean_of(cov_pseudo));
      cell["coverage_cate_mean"] = num_or_null(mean_of(cov_cate));
      cell["runs"] = runs;
      cells.push_back(cell);
    }
  }
  out["cells"] = cells;
  return out;
}

nlohmann::ordered_json run_calibration_sweep(const RunConfig& config, int n,
                                             const std::vector<double>& alphas) {
  if (alphas.empty()) throw std::invalid_argument("run_calibration_sweep requires miscoverage levels");
  if (!std::is_sorted(alphas.begin(), alphas.end())) {
    throw std::invalid_argument("run_calibration_sweep requires ascending miscoverage levels");
  }
  const Dataset data = gen_synthetic_scm(n, config.seed);
  const EdgePrior prior = scm_oracle_prior(data.meta);
  const PipelineFit fit = fit_pipeline(config, data, prior);

  nlohmann::ordered_json out;
  out["experiment"] = "calibration_sweep";
  out["n"] = n;
  out["seed"] = config.seed;
  out["alphas"] = alphas;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (double alpha : alphas) {
    const RunReport report = finalize_run(fit, alpha);
    nlohmann::ordered_json row;
    row["alpha"] = alpha;
    row["m"] = report.quantile.m;
    row["quantile"] = report.quantile.infinite ? nlohmann::ordered_json(nullptr)
                                               : nlohmann::ordered_json(report.quantile.value);
    row["quantile_infinite"] = report.quantile.infinite;
    row["coverage_pseudo"] = report.metrics.coverage_pseudo;
    row["coverage_cate"] = num_or_null(report.metrics.coverage_cate);
    row["mean_width"] = num_or_null(report.metrics.mean_width);
    row["median_width"] = num_or_null(report.metrics.median_width);
    rows.push_back(row);
  }
  out["rows"] = rows;
  return out;
}

nlohmann::ordered_json run_k_sweep(const RunConfig& config, int n, const std::vector<int>& k_list,
                                   const std::vector<std::uint64_t>& seeds) {
  if (k_list.empty() || seeds.empty()) throw std::invalid_argument("run_k_sweep requires sizes and seeds");
  for (int k : k_list) {
    if (k < 1) throw std::invalid_argument("run_k_sweep: ensemble sizes must be >= 1");
  }
  nlohmann::ordered_json out;
  out["experiment"] = "k_sweep";
  out["n"] = n;
  out["seeds"] = seeds;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int k : k_list) {
    std::vector<double> cov_pseudo, cov_cate, width;
    double runtime_ms = 0.0;
    for (std::uint64_t seed : seeds) {
      const Dataset data = gen_synthetic_scm(n, seed);
      const EdgePrior prior = scm_oracle_prior(data.meta);
      RunConfig cfg = config;
      cfg.k = k;
      cfg.seed = seed;
      const auto start = std::chrono::steady_clock::now();
      const RunReport report = run_pipeline(cfg, data, prior);
      const auto stop = std::chrono::steady_clock::now();
      runtime_ms += std::chrono::duration<double, std::milli>(stop - start).count();
      cov_pseudo.push_back(report.metrics.coverage_pseudo);
      if (report.metrics.coverage_cate) cov_cate.push_back(*report.metrics.coverage_cate);
      if (std::isfinite(report.metrics.mean_width)) width.push_back(report.metrics.mean_width);
    }
    nlohmann::ordered_json row;
    row["k"] = k;
    row["coverage_pseudo_mean"] = num_or_null(mean_of(cov_pseudo));
    row["coverage_cate_mean"] = num_or_null(mean_of(cov_cate));
    row["mean_width"] = num_or_null(mean_of(width));
    row["runtime_ms_total"] = runtime_ms;
    row["runtime_ms_per_run"] = runtime_ms / static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  out["rows"] = rows;

  // A size-one ensemble must reproduce the top1 variant bit-for-bit (modulo
  // the config echo and the extra reduction stage in the log).
  {
    const Dataset data = gen_synthetic_scm(n, seeds.front());
    const EdgePrior prior = scm_oracle_prior(data.meta);
    RunConfig full_cfg = config;
    full_cfg.k = 1;
    full_cfg.seed = seeds.front();
    full_cfg.variant = Variant::full;
    RunConfig top_cfg = full_cfg;
    top_cfg.variant = Variant::top1;
    nlohmann::ordered_json a = run_pipeline(full_cfg, data, prior).to_json();
    nlohmann::ordered_json b = run_pipeline(top_cfg, data, prior).to_json();
    a.erase("config");
    a.erase("stages");
    b.erase("config");
    b.erase("stages");
    out["k1_matches_top1"] = a == b;
  }
  return out;
}

}  // namespace swc
