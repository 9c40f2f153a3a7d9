#pragma once

// Scripted experiment drivers over the synthetic generators: the
// collider-injection stress test against a naive forced-adjustment baseline,
// prior washout across sample sizes and prior qualities, the miscoverage-
// level sweep on a fixed fitted model, and ensemble-size dependence.

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "swconformal/dataset.hpp"
#include "swconformal/pipeline.hpp"
#include "swconformal/prior.hpp"

namespace swc {

// Ten-seed default set shared by the experiment drivers.
const std::vector<std::uint64_t>& default_seed_set();

// Bernoulli edge prior encoding the synthetic generator's true structure:
// p_true on generating edges (each confounder C* -> T and -> Y, T -> Y, and
// T/Y -> every post-treatment variable), p_false on every other ordered
// pair. `inverted` swaps the two probabilities, giving the adversarial
// prior. Works for both the plain generator and the collider-injected copy.
EdgePrior scm_oracle_prior(const std::vector<VariableMeta>& meta, bool inverted = false,
                           double p_true = 0.98, double p_false = 0.02);

// Full method versus a baseline that forces X_col (plus all pre-treatment
// covariates) into a single fixed adjustment set, on collider-injected
// synthetic data. Per-seed rows plus mean summaries of coverage, width,
// RMSE, the pre-filter adjustment percentage, and the X_col exclusion rate.
nlohmann::ordered_json run_collider_stress(const RunConfig& config, int n,
                                           const std::vector<std::uint64_t>& seeds);

// Valid-strategy weight mass, structural uncertainty, BIC separation, width,
// and coverage for informative / uniform / inverted priors across sample
// sizes. A strategy counts as valid when it contains every confounder.
nlohmann::ordered_json run_washout(const RunConfig& config, const std::vector<int>& n_list,
                                   const std::vector<std::uint64_t>& seeds);

// One fitted model on a fixed synthetic dataset, recalibrated at each
// requested miscoverage level (ascending); reports coverage and width per
// level. Only the conformal quantile moves between rows, so the intervals
// are exactly nested.
nlohmann::ordered_json run_calibration_sweep(const RunConfig& config, int n,
                                             const std::vector<double>& alphas);

// Coverage, width, and wall-clock runtime as the ensemble size varies, plus
// a check that a size-one ensemble reproduces the top1 variant exactly.
nlohmann::ordered_json run_k_sweep(const RunConfig& config, int n, const std::vector<int>& k_list,
                                   const std::vector<std::uint64_t>& seeds);

}  // namespace swc
