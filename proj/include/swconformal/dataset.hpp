#pragma once

// Observational dataset handling: typed columns with temporal roles, CSV and
// metadata IO, seeded train/calibration/test splitting, and the synthetic
// structural-causal-model generators used by the experiment drivers.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace swc {

enum class TemporalStatus { pre_treatment, treatment, outcome, post_treatment };

struct VariableMeta {
  std::string name;
  TemporalStatus status = TemporalStatus::pre_treatment;
};

// Columns are stored in a canonical internal order: the d covariates first
// (file order, minus treatment/outcome), then treatment, then outcome. Graph
// node indices follow the same convention: 0..d-1 covariates, d treatment,
// d+1 outcome.
struct Dataset {
  Eigen::MatrixXd x;           // n x d covariates
  Eigen::VectorXd t;           // n, strictly 0/1
  Eigen::VectorXd y;           // n
  std::vector<VariableMeta> meta;  // size d + 2: covariates..., treatment, outcome
  std::optional<Eigen::VectorXd> true_cate;
  std::string description;

  int n() const { return static_cast<int>(x.rows()); }
  int d() const { return static_cast<int>(x.cols()); }
  int node_count() const { return d() + 2; }
  int treatment_node() const { return d(); }
  int outcome_node() const { return d() + 1; }

  const VariableMeta& node_meta(int node) const { return meta.at(static_cast<std::size_t>(node)); }
  std::vector<std::string> node_names() const;
  int covariate_index(const std::string& name) const;  // -1 when absent

  // Rows x (d+2) matrix with columns aligned to graph node indices.
  Eigen::MatrixXd node_matrix(const std::vector<int>& rows) const;
  Eigen::MatrixXd covariate_rows(const std::vector<int>& rows) const;
};

struct SplitIndices {
  std::vector<int> train, calibration, test;
};

enum class SplitTag { train, calibration, test };

// A tagged slice of a dataset. Fitting routines insist on the train tag and
// evaluation routines refuse it, which is what keeps calibration and test
// rows out of every model fit.
struct RowsView {
  const Dataset* data = nullptr;
  std::vector<int> rows;
  SplitTag tag = SplitTag::train;
};

Dataset load_dataset(const std::string& csv_path, const std::string& meta_path);
void save_dataset(const Dataset& data, const std::string& csv_path, const std::string& meta_path);

// Floor rule: n_cal = floor(f_cal*n), n_test = floor(f_test*n), remainder to
// train. Errors on an empty split or a train split missing a treatment arm
// (caller must re-draw explicitly; nothing is resampled behind its back).
SplitIndices split_dataset(const Dataset& data, double f_train, double f_cal, double f_test,
                           std::uint64_t seed);

// Synthetic SCM: five standard-normal confounders C1..C5 driving both the
// logistic treatment (coefficients 0.4, overlap clipped to [0.05, 0.95]) and
// the outcome y = 0.5*sum(C) + tau(C)*t + sd(C)*N(0,1) with tau(C) = 1 +
// 0.5*C1 and a scale-mixture noise level sd(C) = 4.0 when C2 > 1.5 and 0.5
// otherwise (a covariate-keyed high-variance stratum, as in semi-synthetic
// benchmark generators); four post-treatment colliders K_j = 0.3*t + 0.4*y +
// N(0, 0.25); four inert pre-treatment noise covariates N1..N4. true_cate is
// populated.
Dataset gen_synthetic_scm(int n, std::uint64_t seed);

// Appends the collider covariate X_col = 0.3*t + 0.4*y + N(0, 0.25), marked
// post_treatment. Errors if a variable of that name already exists.
Dataset inject_collider(const Dataset& data, std::uint64_t seed);

}  // namespace swc
