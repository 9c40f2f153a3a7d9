#pragma once

// End-to-end pipeline: split, ensemble sampling, pruning, identification,
// weighting, per-strategy estimation, conformal calibration, and evaluation,
// emitting a deterministic JSON-serializable report.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swconformal/conformal.hpp"
#include "swconformal/dataset.hpp"
#include "swconformal/graph.hpp"
#include "swconformal/prior.hpp"

namespace swc {

enum class Variant { full, uniform_prior, no_pruning, top1 };

std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct RunConfig {
  int k = 5;
  double alpha = 0.10;
  double alpha_ci = 0.05;
  double clip_eps = 0.05;
  double f_train = 0.6, f_cal = 0.2, f_test = 0.2;
  std::uint64_t seed = 42;
  bool crossfit = false;
  int crossfit_folds = 5;
  OrderRule order_rule = OrderRule::strict;
  bool fallback_empty_adjustment = false;
  QuantileRule quantile_rule = QuantileRule::sentinel;
  Variant variant = Variant::full;
  std::string bic = "auto";  // auto | gaussian | discrete
  int max_edges = 0;         // 0 = unlimited
  int max_attempts = 0;      // 0 = 100 * k
  // Experiment hook: bypass graph machinery entirely and adjust for exactly
  // these covariate node indices with weight 1.
  std::optional<std::vector<int>> forced_strategy;

  nlohmann::ordered_json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
};

struct StrategyReportRow {
  std::string key;
  std::vector<std::string> variables;
  double weight = 0.0;
  int source_graphs = 0;
};

struct GraphReportRow {
  std::string strategy;
  double bic = 0.0;
  double log_prior = 0.0;
  double log_weight = 0.0;
  int edges = 0;
};

struct Metrics {
  double coverage_pseudo = 0.0;
  std::optional<double> coverage_cate;
  double mean_width = 0.0;    // +inf when the quantile is the sentinel
  double median_width = 0.0;
  std::optional<double> rmse_midpoint;
  std::optional<double> rmse_weighted_tau;
};

Metrics evaluate_metrics(const std::vector<Interval>& intervals, const std::vector<double>& gamma_bar,
                         const std::optional<std::vector<double>>& true_cate,
                         const std::optional<std::vector<double>>& tau_bar);

struct RunReport {
  nlohmann::ordered_json config;
  int n = 0, n_train = 0, n_cal = 0, n_test = 0;
  std::vector<std::string> stages;
  int k_requested = 0, k_unique = 0, ensemble_attempts = 0;
  int excluded_no_valid_set = 0, surviving_graphs = 0;
  std::optional<double> pre_filter_collider_pct;
  std::string bic_variant;
  std::vector<GraphReportRow> graphs;
  std::vector<StrategyReportRow> strategies;
  std::optional<double> delta_n;
  ConformalQuantile quantile;
  Metrics metrics;
  double sigma_struct_mean = 0.0, sigma_struct_max = 0.0;
  double jensen_gap_mean = 0.0;
  std::vector<std::string> warnings;

  nlohmann::ordered_json to_json() const;
};

// Everything up through calibration scores and per-test-row aggregates,
// reusable across miscoverage levels: the effect-bound bands are fitted at
// config.alpha, while finalize_run picks the conformal level. Splitting the
// two keeps level sweeps exactly nested (only the quantile moves).
struct PipelineFit {
  RunConfig config;
  RunReport report;  // populated through the calibrate stage
  std::vector<double> cal_scores;
  std::vector<double> test_gamma, test_q_low, test_q_high, test_tau;
  std::optional<std::vector<double>> test_cate;
};

PipelineFit fit_pipeline(const RunConfig& config, const Dataset& data, const EdgePrior& prior);

// Conformal quantile at `alpha` from the fitted state, test intervals, and
// metrics; completes the report.
RunReport finalize_run(const PipelineFit& fit, double alpha);

RunReport run_pipeline(const RunConfig& config, const Dataset& data, const EdgePrior& prior);

// Runs the pipeline once per seed and appends a mean/std/min/max summary of
// the headline metrics.
nlohmann::ordered_json multi_seed_report(const RunConfig& config, const Dataset& data,
                                         const EdgePrior& prior, const std::vector<std::uint64_t>& seeds);

// Optional side artifact: the sampled (pre-pruning) ensemble for a config.
nlohmann::ordered_json dump_ensemble(const RunConfig& config, const Dataset& data, const EdgePrior& prior);

}  // namespace swc
