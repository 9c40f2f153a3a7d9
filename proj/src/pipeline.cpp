#include "swconformal/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "swconformal/estimation.hpp"
#include "swconformal/identification.hpp"
#include "swconformal/independence.hpp"
#include "swconformal/weighting.hpp"

namespace swc {

namespace {

// JSON-friendly number: null for missing or non-finite values.
nlohmann::ordered_json num_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

nlohmann::ordered_json num_or_null(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

void validate_config(const RunConfig& c) {
  if (c.k < 1) throw std::invalid_argument("config: ensemble size k must be >= 1");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("config: alpha must lie in (0, 1)");
  if (!(c.alpha_ci > 0.0 && c.alpha_ci < 1.0)) {
    throw std::invalid_argument("config: alpha_ci must lie in (0, 1)");
  }
  if (!(c.clip_eps > 0.0 && c.clip_eps < 0.5)) {
    throw std::invalid_argument("config: clip_eps must lie in (0, 0.5)");
  }
  if (std::abs(c.f_train + c.f_cal + c.f_test - 1.0) > 1e-9) {
    throw std::invalid_argument("config: split fractions must sum to 1");
  }
  if (c.crossfit && c.crossfit_folds < 2) {
    throw std::invalid_argument("config: crossfit requires at least 2 folds");
  }
}

struct StrategyEstimator {
  StrategyReportRow row;
  std::vector<int> variables;
  double weight = 0.0;
  NuisanceFit fit;
  EffectBoundModel bounds;
  StrategyEvaluation cal_eval, test_eval;
};

}  // namespace

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::full: return "full";
    case Variant::uniform_prior: return "uniform_prior";
    case Variant::no_pruning: return "no_pruning";
    case Variant::top1: return "top1";
  }
  return "full";
}

Variant variant_from_name(const std::string& name) {
  if (name == "full") return Variant::full;
  if (name == "uniform_prior") return Variant::uniform_prior;
  if (name == "no_pruning") return Variant::no_pruning;
  if (name == "top1") return Variant::top1;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["alpha"] = alpha;
  j["alpha_ci"] = alpha_ci;
  j["clip_eps"] = clip_eps;
  j["splits"] = {f_train, f_cal, f_test};
  j["seed"] = seed;
  j["crossfit"] = crossfit;
  j["crossfit_folds"] = crossfit_folds;
  j["order_rule"] = order_rule == OrderRule::strict ? "strict" : "appendix";
  j["fallback_empty_adjustment"] = fallback_empty_adjustment;
  j["quantile_rule"] = quantile_rule == QuantileRule::sentinel ? "sentinel" : "capped";
  j["variant"] = variant_name(variant);
  j["bic"] = bic;
  j["max_edges"] = max_edges;
  j["max_attempts"] = max_attempts;
  if (forced_strategy) {
    j["forced_strategy"] = *forced_strategy;
  } else {
    j["forced_strategy"] = nullptr;
  }
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig c;
  c.k = j.value("k", c.k);
  c.alpha = j.value("alpha", c.alpha);
  c.alpha_ci = j.value("alpha_ci", c.alpha_ci);
  c.clip_eps = j.value("clip_eps", c.clip_eps);
  if (j.contains("splits")) {
    const auto& s = j.at("splits");
    if (!s.is_array() || s.size() != 3) throw std::invalid_argument("config: splits must be [train, cal, test]");
    c.f_train = s[0].get<double>();
    c.f_cal = s[1].get<double>();
    c.f_test = s[2].get<double>();
  }
  c.seed = j.value("seed", c.seed);
  c.crossfit = j.value("crossfit", c.crossfit);
  c.crossfit_folds = j.value("crossfit_folds", c.crossfit_folds);
  if (j.contains("order_rule")) {
    const std::string r = j.at("order_rule").get<std::string>();
    if (r == "strict") {
      c.order_rule = OrderRule::strict;
    } else if (r == "appendix") {
      c.order_rule = OrderRule::appendix;
    } else {
      throw std::invalid_argument("config: unknown order_rule '" + r + "'");
    }
  }
  c.fallback_empty_adjustment = j.value("fallback_empty_adjustment", c.fallback_empty_adjustment);
  if (j.contains("quantile_rule")) {
    const std::string r = j.at("quantile_rule").get<std::string>();
    if (r == "sentinel") {
      c.quantile_rule = QuantileRule::sentinel;
    } else if (r == "capped") {
      c.quantile_rule = QuantileRule::capped;
    } else {
      throw std::invalid_argument("config: unknown quantile_rule '" + r + "'");
    }
  }
  if (j.contains("variant")) c.variant = variant_from_name(j.at("variant").get<std::string>());
  c.bic = j.value("bic", c.bic);
  if (c.bic != "auto" && c.bic != "gaussian" && c.bic != "discrete") {
    throw std::invalid_argument("config: bic must be auto, gaussian, or discrete");
  }
  c.max_edges = j.value("max_edges", c.max_edges);
  c.max_attempts = j.value("max_attempts", c.max_attempts);
  if (j.contains("forced_strategy") && !j.at("forced_strategy").is_null()) {
    c.forced_strategy = j.at("forced_strategy").get<std::vector<int>>();
  }
  return c;
}

Metrics evaluate_metrics(const std::vector<Interval>& intervals, const std::vector<double>& gamma_bar,
                         const std::optional<std::vector<double>>& true_cate,
                         const std::optional<std::vector<double>>& tau_bar) {
  const std::size_t n = intervals.size();
  if (n == 0 || gamma_bar.size() != n) throw std::invalid_argument("evaluate_metrics: inconsistent inputs");
  if (true_cate && true_cate->size() != n) throw std::invalid_argument("evaluate_metrics: bad true_cate");
  if (tau_bar && tau_bar->size() != n) throw std::invalid_argument("evaluate_metrics: bad tau_bar");

  Metrics m;
  int covered = 0, covered_cate = 0;
  std::vector<double> widths(n);
  double width_sum = 0.0;
  bool any_infinite = false;
  double sq_mid = 0.0, sq_tau = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    covered += intervals[i].contains(gamma_bar[i]) ? 1 : 0;
    widths[i] = intervals[i].width();
    width_sum += widths[i];
    any_infinite = any_infinite || !std::isfinite(widths[i]);
    if (true_cate) {
      covered_cate += intervals[i].contains((*true_cate)[i]) ? 1 : 0;
      if (!any_infinite) {
        const double mid = 0.5 * (intervals[i].lo + intervals[i].hi);
        const double dev = mid - (*true_cate)[i];
        sq_mid += dev * dev;
      }
      if (tau_bar) {
        const double dev = (*tau_bar)[i] - (*true_cate)[i];
        sq_tau += dev * dev;
      }
    }
  }
  m.coverage_pseudo = static_cast<double>(covered) / static_cast<double>(n);
  if (true_cate) {
    m.coverage_cate = static_cast<double>(covered_cate) / static_cast<double>(n);
    if (!any_infinite) m.rmse_midpoint = std::sqrt(sq_mid / static_cast<double>(n));
    if (tau_bar) m.rmse_weighted_tau = std::sqrt(sq_tau / static_cast<double>(n));
  }
  m.mean_width = width_sum / static_cast<double>(n);
  std::sort(widths.begin(), widths.end());
  m.median_width = n % 2 == 1 ? widths[n / 2] : 0.5 * (widths[n / 2 - 1] + widths[n / 2]);
  return m;
}

PipelineFit fit_pipeline(const RunConfig& config, const Dataset& data, const EdgePrior& prior) {
  validate_config(config);
  PipelineFit fit;
  fit.config = config;
  RunReport& report = fit.report;
  report.config = config.to_json();
  report.n = data.n();

  report.stages.push_back("split");
  const SplitIndices split = split_dataset(data, config.f_train, config.f_cal, config.f_test, config.seed);
  report.n_train = static_cast<int>(split.train.size());
  report.n_cal = static_cast<int>(split.calibration.size());
  report.n_test = static_cast<int>(split.test.size());
  const RowsView train{&data, split.train, SplitTag::train};
  const RowsView cal{&data, split.calibration, SplitTag::calibration};
  const RowsView test{&data, split.test, SplitTag::test};

  report.stages.push_back("prior");
  EdgePrior effective_prior = prior;
  if (config.variant == Variant::uniform_prior) effective_prior = EdgePrior{};

  std::vector<StrategyEstimator> estimators;
  report.k_requested = config.k;

  if (config.forced_strategy) {
    report.stages.push_back("force-strategy");
    std::vector<int> vars = *config.forced_strategy;
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    for (int v : vars) {
      if (v < 0 || v >= data.d()) throw std::invalid_argument("forced strategy index out of range");
    }
    StrategyEstimator est;
    est.variables = vars;
    est.weight = 1.0;
    est.row.key = strategy_key(vars);
    for (int v : vars) est.row.variables.push_back(data.meta[static_cast<std::size_t>(v)].name);
    est.row.weight = 1.0;
    est.row.source_graphs = 0;
    estimators.push_back(std::move(est));

    bool any_post = false, post_in_strategy = false;
    for (int j = 0; j < data.d(); ++j) {
      if (data.meta[static_cast<std::size_t>(j)].status == TemporalStatus::post_treatment) {
        any_post = true;
        if (std::binary_search(vars.begin(), vars.end(), j)) post_in_strategy = true;
      }
    }
    if (any_post) report.pre_filter_collider_pct = post_in_strategy ? 100.0 : 0.0;
  } else {
    report.stages.push_back("ensemble");
    EnsembleResult ensemble = sample_ensemble(effective_prior, data.meta, config.k, config.seed,
                                              config.order_rule, config.max_attempts);
    report.k_unique = static_cast<int>(ensemble.graphs.size());
    report.ensemble_attempts = ensemble.attempts;
    for (const auto& w : ensemble.warnings) report.warnings.push_back(w);
    if (config.max_edges > 0) {
      for (auto& g : ensemble.graphs) truncate_edges(g, config.max_edges);
    }

    const Eigen::MatrixXd train_nodes = data.node_matrix(split.train);
    if (config.variant != Variant::no_pruning) {
      report.stages.push_back("prune");
      for (auto& g : ensemble.graphs) {
        PruneResult pruned = prune_graph(g, train_nodes, config.alpha_ci);
        if (pruned.kept_degenerate > 0) {
          report.warnings.push_back("graph kept " + std::to_string(pruned.kept_degenerate) +
                                    " edge(s) with degenerate independence tests");
        }
        g = std::move(pruned.graph);
      }
    }

    report.stages.push_back("identify");
    const StrategyExtraction extraction =
        strategies_from_ensemble(ensemble.graphs, data.meta, config.fallback_empty_adjustment);
    for (const auto& w : extraction.warnings) report.warnings.push_back(w);
    report.excluded_no_valid_set = extraction.excluded_no_valid_set;
    report.surviving_graphs = static_cast<int>(extraction.surviving_graphs.size());
    if (extraction.pre_filter_collider_fraction >= 0.0) {
      report.pre_filter_collider_pct = 100.0 * extraction.pre_filter_collider_fraction;
    }
    if (extraction.strategies.empty()) {
      throw std::runtime_error("empty ensemble after identification: no graph admits an adjustment set");
    }

    report.stages.push_back("weight");
    const int y_node = data.outcome_node();
    BicVariant bic_variant;
    if (config.bic == "gaussian") {
      bic_variant = BicVariant::gaussian;
    } else if (config.bic == "discrete") {
      bic_variant = BicVariant::discrete;
    } else {
      bic_variant = select_bic_variant(train_nodes, y_node);
    }
    report.bic_variant = bic_variant == BicVariant::gaussian ? "gaussian" : "discrete";
    if (bic_variant == BicVariant::gaussian) {
      report.warnings.push_back(
          "gaussian working score applied to the binary treatment column when scoring graphs");
    }

    std::vector<double> log_weights;
    std::vector<double> bics;
    std::set<std::string> bic_warnings;
    for (std::size_t i = 0; i < extraction.surviving_graphs.size(); ++i) {
      const Dag& g = ensemble.graphs[static_cast<std::size_t>(extraction.surviving_graphs[i])];
      const BicResult bic = bic_variant == BicVariant::gaussian ? bic_gaussian(g, train_nodes)
                                                                : bic_discrete(g, train_nodes);
      for (const auto& w : bic.warnings) bic_warnings.insert(w);
      const double log_prior = structural_log_prior(g, effective_prior,
                                                    admissible_pairs(g.order, data.meta), data.meta);
      log_weights.push_back(bic.value + log_prior);
      bics.push_back(bic.value);
      GraphReportRow row;
      row.strategy = extraction.strategies[static_cast<std::size_t>(extraction.graph_strategy[i])].key;
      row.bic = bic.value;
      row.log_prior = log_prior;
      row.log_weight = bic.value + log_prior;
      row.edges = static_cast<int>(g.edges.size());
      report.graphs.push_back(row);
    }
    for (const auto& w : bic_warnings) report.warnings.push_back(w);

    std::vector<double> weights = collapse_weights(log_weights, extraction.graph_strategy,
                                                   static_cast<int>(extraction.strategies.size()));

    // BIC separation diagnostic: graphs of the max-weight strategy versus the
    // rest (the target class is unknowable at runtime, so this is a proxy).
    int argmax = 0;
    for (std::size_t s = 1; s < weights.size(); ++s) {
      if (weights[s] > weights[static_cast<std::size_t>(argmax)]) argmax = static_cast<int>(s);
    }
    double min_in = std::numeric_limits<double>::infinity();
    double max_out = -std::numeric_limits<double>::infinity();
    bool any_out = false;
    for (std::size_t i = 0; i < bics.size(); ++i) {
      if (extraction.graph_strategy[i] == argmax) {
        min_in = std::min(min_in, bics[i]);
      } else {
        max_out = std::max(max_out, bics[i]);
        any_out = true;
      }
    }
    if (any_out) report.delta_n = min_in - max_out;

    if (config.variant == Variant::top1) {
      report.stages.push_back("top1");
      StrategyEstimator est;
      const AdjustmentStrategy& s = extraction.strategies[static_cast<std::size_t>(argmax)];
      est.variables = s.variables;
      est.weight = 1.0;
      est.row.key = s.key;
      for (int v : s.variables) est.row.variables.push_back(data.meta[static_cast<std::size_t>(v)].name);
      est.row.weight = 1.0;
      est.row.source_graphs = s.source_graph_count;
      estimators.push_back(std::move(est));
    } else {
      for (std::size_t s = 0; s < extraction.strategies.size(); ++s) {
        StrategyEstimator est;
        est.variables = extraction.strategies[s].variables;
        est.weight = weights[s];
        est.row.key = extraction.strategies[s].key;
        for (int v : est.variables) est.row.variables.push_back(data.meta[static_cast<std::size_t>(v)].name);
        est.row.weight = weights[s];
        est.row.source_graphs = extraction.strategies[s].source_graph_count;
        estimators.push_back(std::move(est));
      }
    }
  }

  report.stages.push_back("fit");
  for (auto& est : estimators) {
    est.fit = fit_nuisances(train, est.variables, config.clip_eps, config.crossfit, config.crossfit_folds,
                            config.seed);
    for (const auto& w : est.fit.warnings) report.warnings.push_back(w);
    est.bounds = fit_effect_bounds(train, est.fit, config.alpha);
    for (const auto& w : est.bounds.warnings) report.warnings.push_back(w);
  }
  for (const auto& est : estimators) report.strategies.push_back(est.row);

  report.stages.push_back("calibrate");
  const std::size_t n_strategies = estimators.size();
  std::vector<double> weights_vec(n_strategies);
  for (std::size_t s = 0; s < n_strategies; ++s) weights_vec[s] = estimators[s].weight;

  for (auto& est : estimators) est.cal_eval = evaluate_strategy(est.fit, est.bounds, cal);
  fit.cal_scores.resize(split.calibration.size());
  double jensen_gap_sum = 0.0;
  std::vector<double> g_k(n_strategies), ql_k(n_strategies), qh_k(n_strategies), tau_k(n_strategies);
  for (std::size_t i = 0; i < split.calibration.size(); ++i) {
    for (std::size_t s = 0; s < n_strategies; ++s) {
      g_k[s] = estimators[s].cal_eval.gamma(static_cast<Eigen::Index>(i));
      ql_k[s] = estimators[s].cal_eval.q_low(static_cast<Eigen::Index>(i));
      qh_k[s] = estimators[s].cal_eval.q_high(static_cast<Eigen::Index>(i));
      tau_k[s] = estimators[s].cal_eval.tau_hat(static_cast<Eigen::Index>(i));
    }
    const AggregatedRow row = aggregate_row(weights_vec, g_k, ql_k, qh_k, tau_k);
    if (row.score > row.jensen_upper) {
      throw std::logic_error("aggregation invariant violated: composite score exceeds its per-strategy bound");
    }
    fit.cal_scores[i] = row.score;
    jensen_gap_sum += row.jensen_upper - row.score;
  }
  report.jensen_gap_mean = jensen_gap_sum / static_cast<double>(split.calibration.size());

  for (auto& est : estimators) est.test_eval = evaluate_strategy(est.fit, est.bounds, test);
  fit.test_gamma.resize(split.test.size());
  fit.test_q_low.resize(split.test.size());
  fit.test_q_high.resize(split.test.size());
  fit.test_tau.resize(split.test.size());
  double sig_sum = 0.0, sig_max = 0.0;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    for (std::size_t s = 0; s < n_strategies; ++s) {
      g_k[s] = estimators[s].test_eval.gamma(static_cast<Eigen::Index>(i));
      ql_k[s] = estimators[s].test_eval.q_low(static_cast<Eigen::Index>(i));
      qh_k[s] = estimators[s].test_eval.q_high(static_cast<Eigen::Index>(i));
      tau_k[s] = estimators[s].test_eval.tau_hat(static_cast<Eigen::Index>(i));
    }
    const AggregatedRow row = aggregate_row(weights_vec, g_k, ql_k, qh_k, tau_k);
    if (row.score > row.jensen_upper) {
      throw std::logic_error("aggregation invariant violated: composite score exceeds its per-strategy bound");
    }
    fit.test_gamma[i] = row.gamma;
    fit.test_q_low[i] = row.q_low;
    fit.test_q_high[i] = row.q_high;
    fit.test_tau[i] = row.tau_bar;
    sig_sum += row.sigma_struct;
    sig_max = std::max(sig_max, row.sigma_struct);
  }
  report.sigma_struct_mean = sig_sum / static_cast<double>(split.test.size());
  report.sigma_struct_max = sig_max;

  if (data.true_cate) {
    std::vector<double> tc(split.test.size());
    for (std::size_t i = 0; i < split.test.size(); ++i) tc[i] = (*data.true_cate)(split.test[i]);
    fit.test_cate = std::move(tc);
  }
  return fit;
}

RunReport finalize_run(const PipelineFit& fit, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("finalize_run: alpha must lie in (0, 1)");
  RunReport report = fit.report;
  report.config["alpha"] = alpha;
  report.quantile = conformal_quantile(fit.cal_scores, alpha, fit.config.quantile_rule);

  report.stages.push_back("evaluate");
  const std::size_t n_test = fit.test_gamma.size();
  std::vector<Interval> intervals(n_test);
  for (std::size_t i = 0; i < n_test; ++i) {
    intervals[i] = predict_interval(fit.test_q_low[i], fit.test_q_high[i], report.quantile);
  }
  report.metrics = evaluate_metrics(intervals, fit.test_gamma, fit.test_cate,
                                    std::optional<std::vector<double>>(fit.test_tau));

  report.stages.push_back("report");
  return report;
}

RunReport run_pipeline(const RunConfig& config, const Dataset& data, const EdgePrior& prior) {
  return finalize_run(fit_pipeline(config, data, prior), config.alpha);
}

nlohmann::ordered_json RunReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["n"] = n;
  j["n_train"] = n_train;
  j["n_cal"] = n_cal;
  j["n_test"] = n_test;
  j["stages"] = stages;
  nlohmann::ordered_json ens;
  ens["k_requested"] = k_requested;
  ens["k_unique"] = k_unique;
  ens["attempts"] = ensemble_attempts;
  ens["excluded_no_valid_set"] = excluded_no_valid_set;
  ens["surviving_graphs"] = surviving_graphs;
  ens["pre_filter_collider_pct"] = num_or_null(pre_filter_collider_pct);
  j["ensemble"] = ens;
  j["bic_variant"] = bic_variant;
  nlohmann::ordered_json graphs_json = nlohmann::ordered_json::array();
  for (const auto& g : graphs) {
    nlohmann::ordered_json row;
    row["strategy"] = g.strategy;
    row["bic"] = g.bic;
    row["log_prior"] = g.log_prior;
    row["log_weight"] = g.log_weight;
    row["edges"] = g.edges;
    graphs_json.push_back(row);
  }
  j["graphs"] = graphs_json;
  nlohmann::ordered_json strat_json = nlohmann::ordered_json::array();
  for (const auto& s : strategies) {
    nlohmann::ordered_json row;
    row["key"] = s.key;
    row["variables"] = s.variables;
    row["weight"] = s.weight;
    row["source_graphs"] = s.source_graphs;
    strat_json.push_back(row);
  }
  j["strategies"] = strat_json;
  j["delta_n"] = num_or_null(delta_n);
  nlohmann::ordered_json q;
  q["value"] = quantile.infinite ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(quantile.value);
  q["infinite"] = quantile.infinite;
  q["m"] = quantile.m;
  q["n_cal"] = quantile.n_cal;
  j["quantile"] = q;
  nlohmann::ordered_json m;
  m["coverage_pseudo"] = metrics.coverage_pseudo;
  m["coverage_cate"] = num_or_null(metrics.coverage_cate);
  m["mean_width"] = num_or_null(metrics.mean_width);
  m["median_width"] = num_or_null(metrics.median_width);
  m["rmse_midpoint"] = num_or_null(metrics.rmse_midpoint);
  m["rmse_weighted_tau"] = num_or_null(metrics.rmse_weighted_tau);
  j["metrics"] = m;
  nlohmann::ordered_json sig;
  sig["mean"] = sigma_struct_mean;
  sig["max"] = sigma_struct_max;
  j["sigma_struct"] = sig;
  j["jensen_gap_mean"] = jensen_gap_mean;
  j["warnings"] = warnings;
  return j;
}

nlohmann::ordered_json multi_seed_report(const RunConfig& config, const Dataset& data,
                                         const EdgePrior& prior, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw std::invalid_argument("multi_seed_report requires at least one seed");
  nlohmann::ordered_json out;
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::vector<double> coverage, coverage_cate, width, sigma;
  for (std::uint64_t seed : seeds) {
    RunConfig c = config;
    c.seed = seed;
    const RunReport report = run_pipeline(c, data, prior);
    runs.push_back(report.to_json());
    coverage.push_back(report.metrics.coverage_pseudo);
    if (report.metrics.coverage_cate) coverage_cate.push_back(*report.metrics.coverage_cate);
    if (std::isfinite(report.metrics.mean_width)) width.push_back(report.metrics.mean_width);
    sigma.push_back(report.sigma_struct_mean);
  }
  auto summarize = [](const std::vector<double>& v) -> nlohmann::ordered_json {
    if (v.empty()) return nullptr;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / static_cast<double>(v.size() - 1) : 0.0;
    nlohmann::ordered_json s;
    s["mean"] = mean;
    s["std"] = std::sqrt(var);
    s["min"] = *std::min_element(v.begin(), v.end());
    s["max"] = *std::max_element(v.begin(), v.end());
    return s;
  };
  out["runs"] = runs;
  nlohmann::ordered_json summary;
  summary["seeds"] = seeds;
  summary["coverage_pseudo"] = summarize(coverage);
  summary["coverage_cate"] = summarize(coverage_cate);
  summary["mean_width"] = summarize(width);
  summary["sigma_struct_mean"] = summarize(sigma);
  out["summary"] = summary;
  return out;
}

nlohmann::ordered_json dump_ensemble(const RunConfig& config, const Dataset& data, const EdgePrior& prior) {
  validate_config(config);
  EdgePrior effective_prior = prior;
  if (config.variant == Variant::uniform_prior) effective_prior = EdgePrior{};
  EnsembleResult ensemble = sample_ensemble(effective_prior, data.meta, config.k, config.seed,
                                            config.order_rule, config.max_attempts);
  if (config.max_edges > 0) {
    for (auto& g : ensemble.graphs) truncate_edges(g, config.max_edges);
  }
  return ensemble_to_json(ensemble.graphs, data.meta);
}

}  // namespace swc
