// Command-line front end: synthetic data generation, single and multi-seed
// pipeline runs, the scripted experiment drivers, and HTTP prior elicitation.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "swconformal/dataset.hpp"
#include "swconformal/elicit.hpp"
#include "swconformal/experiments.hpp"
#include "swconformal/pipeline.hpp"
#include "swconformal/prior.hpp"

namespace {

void write_json(const nlohmann::ordered_json& j, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file '" + out_path + "'");
  out << j.dump(2) << "\n";
}

std::pair<std::string, std::string> dataset_paths(const std::string& out) {
  std::string csv = out;
  if (csv.size() < 4 || csv.substr(csv.size() - 4) != ".csv") csv += ".csv";
  const std::string meta = csv.substr(0, csv.size() - 4) + ".meta.json";
  return {csv, meta};
}

std::vector<std::string> variable_names(const swc::Dataset& data) {
  std::vector<std::string> names;
  for (const auto& m : data.meta) names.push_back(m.name);
  return names;
}

swc::RunConfig config_from_flags(int k, double alpha, double alpha_ci, double clip_eps,
                                 const std::vector<double>& splits, std::uint64_t seed, bool crossfit,
                                 int crossfit_folds, const std::string& order_rule,
                                 bool fallback_empty, const std::string& quantile_rule,
                                 const std::string& variant, const std::string& bic, int max_edges,
                                 int max_attempts) {
  swc::RunConfig cfg;
  cfg.k = k;
  cfg.alpha = alpha;
  cfg.alpha_ci = alpha_ci;
  cfg.clip_eps = clip_eps;
  if (!splits.empty()) {
    if (splits.size() != 3) throw CLI::ValidationError("--splits", "expected three fractions a,b,c");
    cfg.f_train = splits[0];
    cfg.f_cal = splits[1];
    cfg.f_test = splits[2];
  }
  cfg.seed = seed;
  cfg.crossfit = crossfit;
  cfg.crossfit_folds = crossfit_folds;
  if (order_rule == "strict") {
    cfg.order_rule = swc::OrderRule::strict;
  } else if (order_rule == "appendix") {
    cfg.order_rule = swc::OrderRule::appendix;
  } else {
    throw CLI::ValidationError("--order-rule", "must be strict or appendix");
  }
  cfg.fallback_empty_adjustment = fallback_empty;
  if (quantile_rule == "sentinel") {
    cfg.quantile_rule = swc::QuantileRule::sentinel;
  } else if (quantile_rule == "capped") {
    cfg.quantile_rule = swc::QuantileRule::capped;
  } else {
    throw CLI::ValidationError("--quantile-rule", "must be sentinel or capped");
  }
  cfg.variant = swc::variant_from_name(variant);
  cfg.bic = bic;
  cfg.max_edges = max_edges;
  cfg.max_attempts = max_attempts;
  return cfg;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  nlohmann::json j;
  in >> j;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure-weighted conformal treatment-effect intervals"};
  app.require_subcommand(1);

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset (CSV + metadata JSON)");
  std::string synth_kind = "scm";
  int synth_n = 1000;
  std::uint64_t synth_seed = 42;
  std::string synth_out = "synthetic";
  synth->add_option("--kind", synth_kind, "scm | collider")->check(CLI::IsMember({"scm", "collider"}));
  synth->add_option("--n", synth_n, "number of rows")->check(CLI::PositiveNumber);
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--out", synth_out, "output path or prefix (.csv appended if missing)");

  // ---- run ----
  auto* run = app.add_subcommand("run", "Run the pipeline on a dataset and write a JSON report");
  std::string run_data, run_meta, run_prior, run_out, run_dump;
  int run_k = 5, run_folds = 5, run_max_edges = 0, run_max_attempts = 0;
  double run_alpha = 0.10, run_alpha_ci = 0.05, run_clip = 0.05;
  std::vector<double> run_splits;
  std::uint64_t run_seed = 42;
  std::vector<std::uint64_t> run_seeds;
  bool run_crossfit = false, run_fallback = false;
  std::string run_order = "strict", run_qrule = "sentinel", run_variant = "full", run_bic = "auto";
  run->add_option("--data", run_data, "dataset CSV")->required();
  run->add_option("--meta", run_meta, "dataset metadata JSON")->required();
  run->add_option("--prior", run_prior, "edge-prior JSON (uniform 0.5 when omitted)");
  run->add_option("--k", run_k, "ensemble size");
  run->add_option("--alpha", run_alpha, "target miscoverage");
  run->add_option("--alpha-ci", run_alpha_ci, "independence-test level for pruning");
  run->add_option("--clip-eps", run_clip, "propensity clipping bound");
  run->add_option("--splits", run_splits, "train,cal,test fractions")->delimiter(',')->expected(3);
  run->add_option("--seed", run_seed, "pipeline seed");
  run->add_option("--seeds", run_seeds, "multi-seed run (comma separated)")->delimiter(',');
  run->add_flag("--crossfit", run_crossfit, "cross-fitted nuisances");
  run->add_option("--crossfit-folds", run_folds, "cross-fitting folds");
  run->add_option("--order-rule", run_order, "strict | appendix");
  run->add_flag("--fallback-empty-adjustment", run_fallback,
                "graphs without a valid adjustment set fall back to the empty set instead of exclusion");
  run->add_option("--quantile-rule", run_qrule, "sentinel | capped");
  run->add_option("--variant", run_variant, "full | uniform_prior | no_pruning | top1");
  run->add_option("--bic", run_bic, "auto | gaussian | discrete");
  run->add_option("--max-edges", run_max_edges, "edge cap per sampled graph (0 = unlimited)");
  run->add_option("--max-attempts", run_max_attempts, "ensemble sampling attempt cap (0 = 100*k)");
  run->add_option("--out", run_out, "report path ('-' or empty = stdout)");
  run->add_option("--dump-ensemble", run_dump, "also write the sampled ensemble to this path");

  // ---- experiment ----
  auto* experiment = app.add_subcommand("experiment", "Run a scripted experiment driver");
  std::string exp_name, exp_config, exp_out;
  experiment->add_option("--name", exp_name, "collider | washout | calibration | ksweep")
      ->required()
      ->check(CLI::IsMember({"collider", "washout", "calibration", "ksweep"}));
  experiment->add_option("--config", exp_config, "JSON overrides for the driver");
  experiment->add_option("--out", exp_out, "output path ('-' or empty = stdout)");

  // ---- elicit ----
  auto* elicit = app.add_subcommand("elicit", "Elicit an edge prior over a dataset's variables via HTTP");
  std::string el_data, el_meta, el_endpoint, el_model = "default", el_out = "prior.json", el_desc;
  int el_retries = 5, el_timeout = 30;
  elicit->add_option("--data", el_data, "dataset CSV")->required();
  elicit->add_option("--meta", el_meta, "dataset metadata JSON")->required();
  elicit->add_option("--endpoint", el_endpoint, "chat-completion URL")->required();
  elicit->add_option("--model", el_model, "model name sent in the request");
  elicit->add_option("--retries", el_retries, "attempts before uniform fallback");
  elicit->add_option("--timeout", el_timeout, "per-request timeout (seconds)");
  elicit->add_option("--description", el_desc, "study description override");
  elicit->add_option("--out", el_out, "prior output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      swc::Dataset data = swc::gen_synthetic_scm(synth_n, synth_seed);
      if (synth_kind == "collider") data = swc::inject_collider(data, synth_seed);
      const auto [csv, meta] = dataset_paths(synth_out);
      swc::save_dataset(data, csv, meta);
      std::cout << "wrote " << csv << " and " << meta << "\n";
      return 0;
    }

    if (*run) {
      const swc::Dataset data = swc::load_dataset(run_data, run_meta);
      swc::EdgePrior prior;
      if (!run_prior.empty()) prior = swc::load_edge_prior(run_prior, variable_names(data));
      const swc::RunConfig cfg = config_from_flags(
          run_k, run_alpha, run_alpha_ci, run_clip, run_splits, run_seed, run_crossfit, run_folds,
          run_order, run_fallback, run_qrule, run_variant, run_bic, run_max_edges, run_max_attempts);
      if (!run_dump.empty()) write_json(swc::dump_ensemble(cfg, data, prior), run_dump);
      if (!run_seeds.empty()) {
        write_json(swc::multi_seed_report(cfg, data, prior, run_seeds), run_out);
      } else {
        write_json(swc::run_pipeline(cfg, data, prior).to_json(), run_out);
      }
      return 0;
    }

    if (*experiment) {
      nlohmann::json overrides = nlohmann::json::object();
      if (!exp_config.empty()) overrides = load_json_file(exp_config);
      swc::RunConfig cfg;
      if (overrides.contains("config")) cfg = swc::RunConfig::from_json(overrides.at("config"));
      std::vector<std::uint64_t> seeds = swc::default_seed_set();
      if (overrides.contains("seeds")) seeds = overrides.at("seeds").get<std::vector<std::uint64_t>>();

      nlohmann::ordered_json result;
      if (exp_name == "collider") {
        const int n = overrides.value("n", 1000);
        result = swc::run_collider_stress(cfg, n, seeds);
      } else if (exp_name == "washout") {
        std::vector<int> n_list = {100, 500, 2000};
        if (overrides.contains("n_list")) n_list = overrides.at("n_list").get<std::vector<int>>();
        if (!overrides.contains("seeds")) {
          seeds.clear();
          for (std::uint64_t s = 1; s <= 20; ++s) seeds.push_back(s);
        }
        result = swc::run_washout(cfg, n_list, seeds);
      } else if (exp_name == "calibration") {
        const int n = overrides.value("n", 1000);
        std::vector<double> alphas = {0.01, 0.05, 0.10, 0.20, 0.30, 0.50};
        if (overrides.contains("alphas")) alphas = overrides.at("alphas").get<std::vector<double>>();
        result = swc::run_calibration_sweep(cfg, n, alphas);
      } else {
        const int n = overrides.value("n", 500);
        std::vector<int> k_list = {1, 3, 5, 10};
        if (overrides.contains("k_list")) k_list = overrides.at("k_list").get<std::vector<int>>();
        result = swc::run_k_sweep(cfg, n, k_list, seeds);
      }
      write_json(result, exp_out);
      return 0;
    }

    if (*elicit) {
      const swc::Dataset data = swc::load_dataset(el_data, el_meta);
      swc::ElicitConfig cfg;
      cfg.endpoint = el_endpoint;
      cfg.model = el_model;
      cfg.retries = el_retries;
      cfg.timeout_sec = el_timeout;
      const std::string description = el_desc.empty() ? data.description : el_desc;
      const swc::ElicitResult result = swc::elicit_prior_http(cfg, data.meta, description);
      swc::save_edge_prior(result.prior, el_out);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "wrote " << el_out << (result.fallback_used ? " (uniform fallback)" : "") << "\n";
      return result.fallback_used ? 2 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
