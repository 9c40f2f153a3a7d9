// Dataset IO, splitting, and the synthetic generators: CSV/metadata
// round-trips, contract violations, the floor-based split rule, and the
// structural identities of the synthetic data (treated fraction, collider
// coefficient recovery, exact CATE labels).

#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "swconformal/dataset.hpp"
#include "swconformal/linalg.hpp"

using namespace swc;

namespace {

struct TempPaths {
  std::string csv, meta;
  TempPaths(const std::string& stem)
      : csv("/tmp/swc_test_" + stem + ".csv"), meta("/tmp/swc_test_" + stem + ".meta.json") {}
  ~TempPaths() {
    std::remove(csv.c_str());
    std::remove(meta.c_str());
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

}  // namespace

TEST_CASE("loading a minimal three-column file") {
  TempPaths p("minimal");
  write_file(p.csv, "X1,T,Y\n0.5,0,1.2\n-0.3,1,0.4\n0.1,0,0.0\n0.2,1,1.0\n0.9,0,0.5\n"
                    "0.4,1,0.1\n-0.2,0,0.3\n0.7,1,0.8\n-0.9,0,0.2\n0.3,1,0.6\n");
  write_file(p.meta, R"({"treatment":"T","outcome":"Y","post_treatment":[],"description":"tiny"})");
  const Dataset d = load_dataset(p.csv, p.meta);
  CHECK(d.n() == 10);
  CHECK(d.d() == 1);
  CHECK(d.meta[0].name == "X1");
  CHECK(d.meta[0].status == TemporalStatus::pre_treatment);
  CHECK(d.meta[1].status == TemporalStatus::treatment);
  CHECK(d.meta[2].status == TemporalStatus::outcome);
  CHECK(d.x(0, 0) == doctest::Approx(0.5));
  CHECK(d.t(1) == 1.0);
  CHECK(d.y(0) == doctest::Approx(1.2));
}

TEST_CASE("loading rejects contract violations") {
  SUBCASE("non-binary treatment") {
    TempPaths p("badt");
    std::string rows;
    for (int i = 0; i < 10; ++i) rows += "0.1," + std::to_string(i % 3) + ",0.2\n";
    write_file(p.csv, "X1,T,Y\n" + rows);
    write_file(p.meta, R"({"treatment":"T","outcome":"Y","post_treatment":[]})");
    CHECK_THROWS_WITH_AS(load_dataset(p.csv, p.meta), doctest::Contains("binary"),
                         std::runtime_error);
  }
  SUBCASE("missing outcome column") {
    TempPaths p("noy");
    std::string rows;
    for (int i = 0; i < 10; ++i) rows += "0.1," + std::to_string(i % 2) + "\n";
    write_file(p.csv, "X1,T\n" + rows);
    write_file(p.meta, R"({"treatment":"T","outcome":"Y","post_treatment":[]})");
    CHECK_THROWS_AS(load_dataset(p.csv, p.meta), std::runtime_error);
  }
  SUBCASE("duplicate column names") {
    TempPaths p("dup");
    std::string rows;
    for (int i = 0; i < 10; ++i) rows += "0.1,0.2," + std::to_string(i % 2) + ",0.3\n";
    write_file(p.csv, "X1,X1,T,Y\n" + rows);
    write_file(p.meta, R"({"treatment":"T","outcome":"Y","post_treatment":[]})");
    CHECK_THROWS_AS(load_dataset(p.csv, p.meta), std::runtime_error);
  }
  SUBCASE("empty cell") {
    TempPaths p("nan");
    std::string rows = "0.1,0,0.3\n,1,0.2\n";
    for (int i = 0; i < 8; ++i) rows += "0.1," + std::to_string(i % 2) + ",0.3\n";
    write_file(p.csv, "X1,T,Y\n" + rows);
    write_file(p.meta, R"({"treatment":"T","outcome":"Y","post_treatment":[]})");
    CHECK_THROWS_AS(load_dataset(p.csv, p.meta), std::runtime_error);
  }
}

TEST_CASE("save and reload round-trips exactly") {
  const Dataset d = gen_synthetic_scm(60, 9);
  TempPaths p("roundtrip");
  save_dataset(d, p.csv, p.meta);
  const Dataset back = load_dataset(p.csv, p.meta);
  REQUIRE(back.n() == d.n());
  REQUIRE(back.d() == d.d());
  CHECK((back.x - d.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.y - d.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.t - d.t).cwiseAbs().maxCoeff() == 0.0);
  for (std::size_t i = 0; i < d.meta.size(); ++i) {
    CHECK(back.meta[i].name == d.meta[i].name);
    CHECK(back.meta[i].status == d.meta[i].status);
  }
}

TEST_CASE("split sizes follow the floor rule with remainder to train") {
  const Dataset d10 = gen_synthetic_scm(20, 3);
  SUBCASE("exact fractions") {
    // n=10 subset is below the generator minimum, so exercise the rule at
    // n=20 with the default fractions: floor(0.2*20)=4 each, 12 to train.
    const SplitIndices s = split_dataset(d10, 0.6, 0.2, 0.2, 42);
    CHECK(s.train.size() == 12);
    CHECK(s.calibration.size() == 4);
    CHECK(s.test.size() == 4);
  }
  SUBCASE("alternate fraction preset") {
    const Dataset d = gen_synthetic_scm(100, 4);
    const SplitIndices s = split_dataset(d, 0.5, 0.25, 0.25, 42);
    CHECK(s.train.size() == 50);
    CHECK(s.calibration.size() == 25);
    CHECK(s.test.size() == 25);
  }
  SUBCASE("indices partition the rows") {
    const Dataset d = gen_synthetic_scm(137, 5);
    const SplitIndices s = split_dataset(d, 0.6, 0.2, 0.2, 7);
    std::set<int> all;
    for (int r : s.train) all.insert(r);
    for (int r : s.calibration) all.insert(r);
    for (int r : s.test) all.insert(r);
    CHECK(all.size() == 137);
    CHECK(*all.begin() == 0);
    CHECK(*all.rbegin() == 136);
  }
  SUBCASE("same seed reproduces identical indices") {
    const Dataset d = gen_synthetic_scm(80, 6);
    const SplitIndices a = split_dataset(d, 0.6, 0.2, 0.2, 99);
    const SplitIndices b = split_dataset(d, 0.6, 0.2, 0.2, 99);
    CHECK(a.train == b.train);
    CHECK(a.calibration == b.calibration);
    CHECK(a.test == b.test);
  }
  SUBCASE("an empty split is an error") {
    const Dataset d = gen_synthetic_scm(20, 3);
    CHECK_THROWS_AS(split_dataset(d, 0.98, 0.01, 0.01, 42), std::runtime_error);
  }
  SUBCASE("a train split missing a treatment arm is an error, not a resample") {
    Dataset d = gen_synthetic_scm(20, 3);
    d.t.setZero();  // no treated units anywhere
    d.true_cate.reset();
    CHECK_THROWS_WITH_AS(split_dataset(d, 0.6, 0.2, 0.2, 42), doctest::Contains("arm"),
                         std::runtime_error);
  }
}

TEST_CASE("synthetic generator structural identities") {
  const Dataset d = gen_synthetic_scm(500, 42);
  SUBCASE("shape and roles") {
    CHECK(d.n() == 500);
    CHECK(d.d() == 13);
    int pre = 0, post = 0;
    for (int j = 0; j < d.d(); ++j) {
      if (d.meta[static_cast<std::size_t>(j)].status == TemporalStatus::pre_treatment) ++pre;
      if (d.meta[static_cast<std::size_t>(j)].status == TemporalStatus::post_treatment) ++post;
    }
    CHECK(pre == 9);   // five confounders + four inert covariates
    CHECK(post == 4);  // the K columns
    CHECK(d.meta[0].name == "C1");
    CHECK(d.covariate_index("K1") == 5);
    CHECK(d.covariate_index("N1") == 9);
  }
  SUBCASE("overlap keeps the treated fraction interior") {
    const double frac = d.t.mean();
    CHECK(frac > 0.2);
    CHECK(frac < 0.8);
  }
  SUBCASE("true CATE labels are exact") {
    REQUIRE(d.true_cate.has_value());
    for (int i = 0; i < d.n(); ++i) {
      CHECK((*d.true_cate)(i) == 1.0 + 0.5 * d.x(i, 0));
    }
  }
  SUBCASE("same seed is bit-identical") {
    const Dataset e = gen_synthetic_scm(500, 42);
    CHECK((e.x - d.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((e.y - d.y).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("post-treatment columns regress back to their generating weights") {
  const Dataset d = gen_synthetic_scm(5000, 11);
  const int k1 = d.covariate_index("K1");
  REQUIRE(k1 >= 0);
  Eigen::MatrixXd design(d.n(), 3);
  design.col(0).setOnes();
  design.col(1) = d.t;
  design.col(2) = d.y;
  const LstsqResult fit = lstsq(design, d.x.col(k1));
  REQUIRE_FALSE(fit.rank_deficient);
  CHECK(std::abs(fit.coef(1) - 0.3) < 0.05);
  CHECK(std::abs(fit.coef(2) - 0.4) < 0.05);
}

TEST_CASE("collider injection") {
  const Dataset base = gen_synthetic_scm(10000, 13);
  const Dataset with = inject_collider(base, 13);
  SUBCASE("column appended with post-treatment status") {
    CHECK(with.d() == base.d() + 1);
    const int xc = with.covariate_index("X_col");
    REQUIRE(xc >= 0);
    CHECK(with.meta[static_cast<std::size_t>(xc)].status == TemporalStatus::post_treatment);
  }
  SUBCASE("generating coefficients recovered by regression") {
    const int xc = with.covariate_index("X_col");
    Eigen::MatrixXd design(with.n(), 3);
    design.col(0).setOnes();
    design.col(1) = with.t;
    design.col(2) = with.y;
    const LstsqResult fit = lstsq(design, with.x.col(xc));
    CHECK(std::abs(fit.coef(1) - 0.3) < 0.03);
    CHECK(std::abs(fit.coef(2) - 0.4) < 0.03);
    // Residual scale matches the generator's noise.
    const Eigen::VectorXd resid = with.x.col(xc) - design * fit.coef;
    const double sd = std::sqrt(resid.squaredNorm() / with.n());
    CHECK(std::abs(sd - 0.5) < 0.03);
  }
  SUBCASE("double injection collides on the name") {
    CHECK_THROWS_AS(inject_collider(with, 14), std::runtime_error);
  }
  SUBCASE("base columns are untouched") {
    CHECK((with.x.leftCols(base.d()) - base.x).cwiseAbs().maxCoeff() == 0.0);
    CHECK((with.y - base.y).cwiseAbs().maxCoeff() == 0.0);
  }
}
