#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "oracles.hpp"
#include "sgc/datagen.hpp"
#include "sgc/numerics.hpp"

using namespace sgc;

namespace {
std::string write_temp(const std::string& name, const std::string& contents) {
  const std::string path = "datagen_tmp_" + name;
  std::ofstream out(path, std::ios::binary);
  out << contents;
  out.close();
  return path;
}
}  // namespace

TEST_CASE("generate_synthetic: full-recipe statistics") {
  SynthConfig cfg;
  cfg.m = 1000;
  cfg.ell = 100;
  cfg.feature_std = 10.0;
  cfg.label_noise_std = 1.0;
  cfg.coeff_low = 1;
  cfg.coeff_high = 10;
  cfg.seed = 20240901;
  const Dataset ds = generate_synthetic(cfg);
  REQUIRE(ds.X.rows == 1000);
  REQUIRE(ds.X.cols == 100);
  REQUIRE(ds.y.size() == 1000);
  REQUIRE(ds.beta_bar.has_value());

  // planted coefficients are integers in [1, 10]
  for (double c : *ds.beta_bar) {
    CHECK(c == static_cast<long long>(c));
    CHECK(c >= 1.0);
    CHECK(c <= 10.0);
  }

  // Column-wise sample variance: with 1000 samples the variance estimate has
  // std ~ 100*sqrt(2/999) ~ 4.5, so individual columns get a ~4.5-sigma band
  // while the average over all 100 columns (std ~ 0.45) gets a tight one.
  double var_sum = 0.0;
  for (std::size_t j = 0; j < ds.X.cols; ++j) {
    double s = 0.0, ss = 0.0;
    for (std::size_t i = 0; i < ds.X.rows; ++i) {
      s += ds.X.at(i, j);
      ss += ds.X.at(i, j) * ds.X.at(i, j);
    }
    const double mean = s / 1000.0;
    const double var = ss / 1000.0 - mean * mean;
    CHECK(var >= 80.0);
    CHECK(var <= 120.0);
    var_sum += var;
  }
  const double var_avg = var_sum / static_cast<double>(ds.X.cols);
  CHECK(var_avg >= 98.0);
  CHECK(var_avg <= 102.0);

  // residual y - X beta_bar has sample std within 10% of label_noise_std
  const Vector pred = matvec(ds.X, *ds.beta_bar);
  std::vector<double> res(ds.y.size());
  for (std::size_t i = 0; i < res.size(); ++i) res[i] = ds.y[i] - pred[i];
  const double sd = oracle::sample_std(res);
  CHECK(sd >= 0.9);
  CHECK(sd <= 1.1);
}

TEST_CASE("generate_synthetic: noiseless planted model is recovered exactly") {
  SynthConfig cfg;
  cfg.m = 80;
  cfg.ell = 6;
  cfg.feature_std = 2.0;
  cfg.label_noise_std = 0.0;
  cfg.seed = 7;
  const Dataset ds = generate_synthetic(cfg);
  const Vector beta = least_squares_optimum(ds.X, ds.y, 1e-13);
  CHECK(oracle::vec_rel_err(beta, *ds.beta_bar) <= 1e-8);
}

TEST_CASE("generate_synthetic: determinism per seed") {
  SynthConfig cfg;
  cfg.m = 50;
  cfg.ell = 8;
  cfg.seed = 4242;
  const Dataset a = generate_synthetic(cfg);
  const Dataset b = generate_synthetic(cfg);
  CHECK(a.X.a == b.X.a);  // bit-identical
  CHECK(a.y == b.y);
  CHECK(*a.beta_bar == *b.beta_bar);

  cfg.seed = 4243;
  const Dataset c = generate_synthetic(cfg);
  CHECK(a.X.a != c.X.a);
}

TEST_CASE("generate_synthetic: rejects empty shapes") {
  SynthConfig cfg;
  cfg.m = 0;
  cfg.ell = 3;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
  cfg.m = 3;
  cfg.ell = 0;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
  cfg.ell = 2;
  cfg.coeff_low = 5;
  cfg.coeff_high = 4;
  CHECK_THROWS_AS(generate_synthetic(cfg), std::invalid_argument);
}

TEST_CASE("load_csv: plain two-row file") {
  const std::string path = write_temp("plain.csv", "1,2,3\n4,5,6\n");
  const Dataset ds = load_csv(path, false);
  REQUIRE(ds.X.rows == 2);
  REQUIRE(ds.X.cols == 2);
  CHECK(ds.X.at(0, 0) == 1.0);
  CHECK(ds.X.at(0, 1) == 2.0);
  CHECK(ds.X.at(1, 0) == 4.0);
  CHECK(ds.X.at(1, 1) == 5.0);
  CHECK(ds.y == Vector{3.0, 6.0});
  CHECK(!ds.beta_bar.has_value());
  std::remove(path.c_str());
}

TEST_CASE("load_csv: header handling") {
  const std::string path = write_temp("header.csv", "f1,f2,label\n1.5,2.5,3.5\n");
  const Dataset ds = load_csv(path, true);
  REQUIRE(ds.X.rows == 1);
  CHECK(ds.X.at(0, 1) == 2.5);
  CHECK(ds.y[0] == 3.5);
  std::remove(path.c_str());
}

TEST_CASE("load_csv: rejections name the line") {
  SUBCASE("non-numeric field") {
    const std::string path = write_temp("bad.csv", "1,2,3\nabc,5,6\n");
    CHECK_THROWS_WITH_AS(load_csv(path, false), doctest::Contains("line 2"),
                         std::invalid_argument);
    std::remove(path.c_str());
  }
  SUBCASE("ragged row") {
    const std::string path = write_temp("ragged.csv", "1,2,3\n4,5\n");
    CHECK_THROWS_WITH_AS(load_csv(path, false), doctest::Contains("line 2"),
                         std::invalid_argument);
    std::remove(path.c_str());
  }
  SUBCASE("non-finite value") {
    const std::string path = write_temp("naninf.csv", "1,nan,3\n");
    CHECK_THROWS_AS(load_csv(path, false), std::invalid_argument);
    std::remove(path.c_str());
  }
  SUBCASE("empty file") {
    const std::string path = write_temp("empty.csv", "");
    CHECK_THROWS_AS(load_csv(path, false), std::invalid_argument);
    std::remove(path.c_str());
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_csv("does_not_exist_anywhere.csv", false), std::invalid_argument);
  }
}
