#include "swconformal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "swconformal/rng.hpp"

namespace swc {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
  if (cell.empty()) {
    throw std::runtime_error("empty cell in column '" + col + "' at data row " + std::to_string(row));
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw std::runtime_error("non-numeric value '" + cell + "' in column '" + col + "' at data row " +
                             std::to_string(row));
  }
  if (used != cell.size()) {
    throw std::runtime_error("non-numeric value '" + cell + "' in column '" + col + "' at data row " +
                             std::to_string(row));
  }
  if (!std::isfinite(v)) {
    throw std::runtime_error("non-finite value in column '" + col + "' at data row " + std::to_string(row));
  }
  return v;
}

void validate_dataset(const Dataset& data) {
  if (data.n() < 10) throw std::runtime_error("dataset requires n >= 10, got " + std::to_string(data.n()));
  if (data.d() < 1) throw std::runtime_error("dataset requires at least one covariate");
  if (static_cast<int>(data.meta.size()) != data.d() + 2) {
    throw std::runtime_error("metadata entries do not match column count");
  }
  for (int i = 0; i < data.n(); ++i) {
    if (data.t(i) != 0.0 && data.t(i) != 1.0) {
      throw std::runtime_error("treatment column must be binary 0/1; offending row " + std::to_string(i));
    }
  }
  std::set<std::string> names;
  for (const auto& m : data.meta) {
    if (m.name.empty()) throw std::runtime_error("empty variable name");
    if (!names.insert(m.name).second) throw std::runtime_error("duplicate variable name '" + m.name + "'");
  }
  if (data.meta[static_cast<std::size_t>(data.treatment_node())].status != TemporalStatus::treatment ||
      data.meta[static_cast<std::size_t>(data.outcome_node())].status != TemporalStatus::outcome) {
    throw std::runtime_error("internal metadata ordering violated");
  }
}

}  // namespace

std::vector<std::string> Dataset::node_names() const {
  std::vector<std::string> out;
  out.reserve(meta.size());
  for (const auto& m : meta) out.push_back(m.name);
  return out;
}

int Dataset::covariate_index(const std::string& name) const {
  for (int j = 0; j < d(); ++j) {
    if (meta[static_cast<std::size_t>(j)].name == name) return j;
  }
  return -1;
}

Eigen::MatrixXd Dataset::node_matrix(const std::vector<int>& rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), node_count());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    out.row(static_cast<Eigen::Index>(i)).head(d()) = x.row(r);
    out(static_cast<Eigen::Index>(i), treatment_node()) = t(r);
    out(static_cast<Eigen::Index>(i), outcome_node()) = y(r);
  }
  return out;
}

Eigen::MatrixXd Dataset::covariate_rows(const std::vector<int>& rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), d());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = x.row(rows[i]);
  return out;
}

Dataset load_dataset(const std::string& csv_path, const std::string& meta_path) {
  std::ifstream meta_in(meta_path);
  if (!meta_in) throw std::runtime_error("cannot open metadata file '" + meta_path + "'");
  nlohmann::json meta_json;
  try {
    meta_in >> meta_json;
  } catch (const std::exception& e) {
    throw std::runtime_error("invalid metadata JSON in '" + meta_path + "': " + e.what());
  }
  if (!meta_json.contains("treatment") || !meta_json.contains("outcome")) {
    throw std::runtime_error("metadata must name 'treatment' and 'outcome' columns");
  }
  const std::string treatment_name = meta_json.at("treatment").get<std::string>();
  const std::string outcome_name = meta_json.at("outcome").get<std::string>();
  std::set<std::string> post_names;
  if (meta_json.contains("post_treatment")) {
    for (const auto& v : meta_json.at("post_treatment")) post_names.insert(v.get<std::string>());
  }
  std::string description = meta_json.value("description", std::string());
  std::string true_cate_col = meta_json.value("true_cate", std::string());

  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open dataset file '" + csv_path + "'");
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("dataset file '" + csv_path + "' is empty");
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty()) throw std::runtime_error("dataset header row is empty");

  std::vector<std::vector<double>> columns(header.size());
  int row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                               " cells, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) columns[c].push_back(parse_cell(cells[c], row, header[c]));
    ++row;
  }

  int t_col = -1, y_col = -1, cate_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == treatment_name) t_col = static_cast<int>(c);
    if (header[c] == outcome_name) y_col = static_cast<int>(c);
    if (!true_cate_col.empty() && header[c] == true_cate_col) cate_col = static_cast<int>(c);
  }
  if (t_col < 0) throw std::runtime_error("treatment column '" + treatment_name + "' not found in dataset");
  if (y_col < 0) throw std::runtime_error("outcome column '" + outcome_name + "' not found in dataset");
  if (!true_cate_col.empty() && cate_col < 0) {
    throw std::runtime_error("true_cate column '" + true_cate_col + "' not found in dataset");
  }
  for (const auto& p : post_names) {
    bool found = false;
    for (const auto& h : header) found = found || h == p;
    if (!found) throw std::runtime_error("post_treatment variable '" + p + "' not found in dataset");
    if (p == treatment_name || p == outcome_name) {
      throw std::runtime_error("treatment/outcome cannot be listed as post_treatment");
    }
  }

  Dataset data;
  data.description = description;
  const int n = row;
  std::vector<int> covariate_cols;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const int ci = static_cast<int>(c);
    if (ci == t_col || ci == y_col || ci == cate_col) continue;
    covariate_cols.push_back(ci);
  }
  data.x.resize(n, static_cast<Eigen::Index>(covariate_cols.size()));
  for (std::size_t j = 0; j < covariate_cols.size(); ++j) {
    const auto& col = columns[static_cast<std::size_t>(covariate_cols[j])];
    for (int i = 0; i < n; ++i) data.x(i, static_cast<Eigen::Index>(j)) = col[static_cast<std::size_t>(i)];
    VariableMeta m;
    m.name = header[static_cast<std::size_t>(covariate_cols[j])];
    m.status = post_names.count(m.name) ? TemporalStatus::post_treatment : TemporalStatus::pre_treatment;
    data.meta.push_back(m);
  }
  data.t.resize(n);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) {
    data.t(i) = columns[static_cast<std::size_t>(t_col)][static_cast<std::size_t>(i)];
    data.y(i) = columns[static_cast<std::size_t>(y_col)][static_cast<std::size_t>(i)];
  }
  data.meta.push_back({treatment_name, TemporalStatus::treatment});
  data.meta.push_back({outcome_name, TemporalStatus::outcome});
  if (cate_col >= 0) {
    Eigen::VectorXd tc(n);
    for (int i = 0; i < n; ++i) tc(i) = columns[static_cast<std::size_t>(cate_col)][static_cast<std::size_t>(i)];
    data.true_cate = tc;
  }
  validate_dataset(data);
  return data;
}

void save_dataset(const Dataset& data, const std::string& csv_path, const std::string& meta_path) {
  std::ofstream out(csv_path);
  if (!out) throw std::runtime_error("cannot write dataset file '" + csv_path + "'");
  out.precision(17);
  for (int j = 0; j < data.d(); ++j) out << data.meta[static_cast<std::size_t>(j)].name << ',';
  out << data.meta[static_cast<std::size_t>(data.treatment_node())].name << ','
      << data.meta[static_cast<std::size_t>(data.outcome_node())].name;
  if (data.true_cate) out << ",true_cate";
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.d(); ++j) out << data.x(i, j) << ',';
    out << data.t(i) << ',' << data.y(i);
    if (data.true_cate) out << ',' << (*data.true_cate)(i);
    out << '\n';
  }

  nlohmann::ordered_json meta_json;
  meta_json["treatment"] = data.meta[static_cast<std::size_t>(data.treatment_node())].name;
  meta_json["outcome"] = data.meta[static_cast<std::size_t>(data.outcome_node())].name;
  std::vector<std::string> post;
  for (int j = 0; j < data.d(); ++j) {
    if (data.meta[static_cast<std::size_t>(j)].status == TemporalStatus::post_treatment) {
      post.push_back(data.meta[static_cast<std::size_t>(j)].name);
    }
  }
  meta_json["post_treatment"] = post;
  meta_json["description"] = data.description;
  if (data.true_cate) meta_json["true_cate"] = "true_cate";
  std::ofstream mout(meta_path);
  if (!mout) throw std::runtime_error("cannot write metadata file '" + meta_path + "'");
  mout << meta_json.dump(2) << '\n';
}

SplitIndices split_dataset(const Dataset& data, double f_train, double f_cal, double f_test,
                           std::uint64_t seed) {
  if (f_train <= 0.0 || f_cal <= 0.0 || f_test <= 0.0) {
    throw std::runtime_error("split fractions must be positive");
  }
  if (std::abs(f_train + f_cal + f_test - 1.0) > 1e-9) {
    throw std::runtime_error("split fractions must sum to 1");
  }
  const int n = data.n();
  const int n_cal = static_cast<int>(std::floor(f_cal * n));
  const int n_test = static_cast<int>(std::floor(f_test * n));
  const int n_train = n - n_cal - n_test;
  if (n_train <= 0 || n_cal <= 0 || n_test <= 0) {
    throw std::runtime_error("degenerate split: every split must be non-empty");
  }

  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  Rng rng(derive_seed(seed, SeedStream::split));
  rng.shuffle(idx);

  SplitIndices split;
  split.train.assign(idx.begin(), idx.begin() + n_train);
  split.calibration.assign(idx.begin() + n_train, idx.begin() + n_train + n_cal);
  split.test.assign(idx.begin() + n_train + n_cal, idx.end());
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.calibration.begin(), split.calibration.end());
  std::sort(split.test.begin(), split.test.end());

  bool has0 = false, has1 = false;
  for (int r : split.train) {
    if (data.t(r) == 0.0) has0 = true;
    if (data.t(r) == 1.0) has1 = true;
  }
  if (!has0 || !has1) {
    throw std::runtime_error("treatment arm absent from train split; re-draw with a different seed");
  }
  return split;
}

Dataset gen_synthetic_scm(int n, std::uint64_t seed) {
  if (n < 20) throw std::runtime_error("gen_synthetic_scm requires n >= 20");
  const int n_conf = 5, n_coll = 4, n_noise = 4;
  Dataset data;
  data.description =
      "Synthetic observational study with five pre-treatment confounders driving both a binary "
      "treatment and a continuous outcome, four post-treatment collider measurements, and four "
      "inert pre-treatment noise covariates.";
  data.x.resize(n, n_conf + n_coll + n_noise);
  data.t.resize(n);
  data.y.resize(n);
  Eigen::VectorXd cate(n);

  Rng rng(derive_seed(seed, SeedStream::scm));
  for (int i = 0; i < n; ++i) {
    double csum = 0.0;
    for (int j = 0; j < n_conf; ++j) {
      data.x(i, j) = rng.normal();
      csum += data.x(i, j);
    }
    for (int j = 0; j < n_noise; ++j) data.x(i, n_conf + n_coll + j) = rng.normal();
    const double raw_prop = 1.0 / (1.0 + std::exp(-0.4 * csum));
    const double prop = std::min(std::max(raw_prop, 0.05), 0.95);
    data.t(i) = rng.uniform() < prop ? 1.0 : 0.0;
    const double tau = 1.0 + 0.5 * data.x(i, 0);
    cate(i) = tau;
    // Scale-mixture noise: a high-variance stratum keyed to C2 mimics the
    // covariate-dependent response scale of semi-synthetic benchmarks.
    const double noise_sd = data.x(i, 1) > 1.5 ? 4.0 : 0.5;
    data.y(i) = 0.5 * csum + tau * data.t(i) + noise_sd * rng.normal();
    for (int j = 0; j < n_coll; ++j) {
      data.x(i, n_conf + j) = 0.3 * data.t(i) + 0.4 * data.y(i) + 0.5 * rng.normal();
    }
  }
  data.true_cate = cate;

  for (int j = 0; j < n_conf; ++j) data.meta.push_back({"C" + std::to_string(j + 1), TemporalStatus::pre_treatment});
  for (int j = 0; j < n_coll; ++j) data.meta.push_back({"K" + std::to_string(j + 1), TemporalStatus::post_treatment});
  for (int j = 0; j < n_noise; ++j) data.meta.push_back({"N" + std::to_string(j + 1), TemporalStatus::pre_treatment});
  data.meta.push_back({"T", TemporalStatus::treatment});
  data.meta.push_back({"Y", TemporalStatus::outcome});
  validate_dataset(data);
  return data;
}

Dataset inject_collider(const Dataset& data, std::uint64_t seed) {
  for (const auto& m : data.meta) {
    if (m.name == "X_col") throw std::runtime_error("variable 'X_col' already exists");
  }
  Dataset out;
  out.description = data.description;
  out.t = data.t;
  out.y = data.y;
  out.true_cate = data.true_cate;
  out.x.resize(data.n(), data.d() + 1);
  out.x.leftCols(data.d()) = data.x;
  Rng rng(derive_seed(seed, SeedStream::collider));
  for (int i = 0; i < data.n(); ++i) {
    out.x(i, data.d()) = 0.3 * data.t(i) + 0.4 * data.y(i) + 0.5 * rng.normal();
  }
  out.meta.assign(data.meta.begin(), data.meta.begin() + data.d());
  out.meta.push_back({"X_col", TemporalStatus::post_treatment});
  out.meta.push_back(data.meta[static_cast<std::size_t>(data.treatment_node())]);
  out.meta.push_back(data.meta[static_cast<std::size_t>(data.outcome_node())]);
  validate_dataset(out);
  return out;
}

}  // namespace swc
