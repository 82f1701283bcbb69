#include "jmdm/evaluation.hpp"

#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "test_util.hpp"

using namespace jmdm;

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("parse_fraction: a/b and decimals") {
  CHECK(parse_fraction("1/8").value == doctest::Approx(0.125));
  CHECK(parse_fraction("1/8").label == "1/8");
  CHECK(parse_fraction("0.25").value == doctest::Approx(0.25));
  CHECK(parse_fraction("1").value == 1.0);
  CHECK_THROWS_AS(parse_fraction("0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fraction("3/2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fraction("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_fraction("abc"), std::invalid_argument);
}

TEST_CASE("fraction_to_count: published feature counts") {
  CHECK(fraction_to_count(617, 1.0 / 8) == 77);
  CHECK(fraction_to_count(617, 1.0 / 16) == 39);
  CHECK(fraction_to_count(617, 1.0 / 32) == 19);
  CHECK(fraction_to_count(649, 1.0 / 8) == 81);
  CHECK(fraction_to_count(649, 1.0 / 16) == 41);
  CHECK(fraction_to_count(649, 1.0 / 32) == 20);
  CHECK(fraction_to_count(10, 1.0 / 32) == 1);
}

TEST_CASE("knn: single training point labels everything") {
  Matrix train(1, 2);
  train << 0, 0;
  Matrix test(3, 2);
  test << 1, 1, -5, 2, 100, 100;
  auto pred = knn_predict(train, {4}, test, 1);
  CHECK(pred == std::vector<int>{4, 4, 4});
}

TEST_CASE("knn: k=1 on an exact training point") {
  Matrix train(3, 2);
  train << 0, 0, 5, 5, 9, 9;
  Matrix test(1, 2);
  test << 5, 5;
  CHECK(knn_predict(train, {0, 1, 2}, test, 1) == std::vector<int>{1});
}

TEST_CASE("knn: majority vote on two blobs") {
  Matrix train(6, 2);
  train << 0, 0, 0, 0, 0, 0, 10, 10, 10, 10, 10, 10;
  std::vector<int> y{0, 0, 0, 1, 1, 1};
  Matrix test(1, 2);
  test << 1, 1;
  CHECK(knn_predict(train, y, test, 3) == std::vector<int>{0});
}

TEST_CASE("knn: vote tie goes to the nearest tied class") {
  Matrix train(4, 1);
  train << 0.0, 1.0, 10.0, 11.0;
  std::vector<int> y{0, 0, 1, 1};
  Matrix test(1, 1);
  test << 4.0;  // neighbors at d {4,3,6,7}: k=2 -> one of each class
  auto pred = knn_predict(train, y, test, 2);
  CHECK(pred == std::vector<int>{0});  // nearest neighbor is class 0
}

TEST_CASE("knn: distance ties break on the lower training index") {
  Matrix train(3, 1);
  train << 1.0, -1.0, 1.0;
  std::vector<int> y{2, 1, 0};
  Matrix test(1, 1);
  test << 0.0;  // all three at distance 1
  CHECK(knn_predict(train, y, test, 1) == std::vector<int>{2});
}

TEST_CASE("knn: errors") {
  Matrix train(2, 2);
  train << 0, 0, 1, 1;
  Matrix test(1, 2);
  test << 0, 0;
  CHECK_THROWS_AS(knn_predict(train, {0, 1}, test, 3), std::invalid_argument);
  Matrix bad(1, 3);
  bad << 0, 0, 0;
  CHECK_THROWS_AS(knn_predict(train, {0, 1}, bad, 1), std::invalid_argument);
}

TEST_CASE("benchmark: perfectly separable data scores 1.0 everywhere") {
  // two classes in disjoint feature ranges
  const int n = 40;
  Matrix x(n, 4);
  std::vector<int> y(n);
  std::mt19937_64 gen(5);
  for (int i = 0; i < n; ++i) {
    y[i] = i % 2;
    for (int j = 0; j < 4; ++j)
      x(i, j) = (y[i] == 0 ? 0.0 : 100.0) + rng::uniform01(gen);
  }
  auto ds = test_util::make_dataset(x, y);

  EvalConfig cfg;
  cfg.fold_count = 4;
  cfg.knn_k = 3;
  cfg.fractions = {{1.0, "1"}};
  cfg.master_seed = 3;
  auto report = run_benchmark(ds, cfg, {}, {.dim = 2});
  REQUIRE(report.cells.size() == 3);
  for (const auto& cell : report.cells) {
    REQUIRE(cell.error.empty());
    CHECK(cell.mean_accuracy == doctest::Approx(1.0));
    CHECK(cell.k_star == 4);
  }
}

TEST_CASE("benchmark: at fraction 1 every method picks every feature") {
  auto ds = test_util::random_dataset(48, 5, 3, 606);
  EvalConfig cfg;
  cfg.fold_count = 3;
  cfg.fractions = {{1.0, "1"}};
  cfg.master_seed = 1;
  auto report = run_benchmark(ds, cfg, {.q = 0.0}, {.dim = 2});
  const auto* ref = report.find_cell("jmdm", "1");
  REQUIRE(ref != nullptr);
  for (const auto& cell : report.cells) {
    REQUIRE(cell.error.empty());
    for (const auto& sel : cell.fold_selections)
      CHECK(sel == std::vector<int>{0, 1, 2, 3, 4});
    CHECK(cell.fold_accuracies == ref->fold_accuracies);
  }
}

TEST_CASE("benchmark: shuffled labels score near chance") {
  // labels independent of features: accuracy ~ 1/C with binomial noise
  const int n = 400, c = 4;
  Matrix x = test_util::random_matrix(n, 6, 88);
  std::vector<int> y(n);
  std::mt19937_64 gen(1312);
  for (int i = 0; i < n; ++i)
    y[i] = static_cast<int>(rng::uniform_below(gen, c));
  auto ds = test_util::make_dataset(x, y);

  EvalConfig cfg;
  cfg.fold_count = 5;
  cfg.fractions = {{0.5, "1/2"}};
  cfg.methods = {"fisher", "random"};
  cfg.master_seed = 9;
  auto report = run_benchmark(ds, cfg, {}, {});
  for (const auto& cell : report.cells) {
    REQUIRE(cell.error.empty());
    // 3 standard errors of a binomial mean over the whole dataset, plus
    // slack for the fold split
    const double se = std::sqrt(0.25 * 0.75 / n);
    CHECK(std::abs(cell.mean_accuracy - 0.25) < 3 * se + 0.02);
  }
}

TEST_CASE("benchmark: accuracies bounded, means exact, report well-formed") {
  auto ds = test_util::random_dataset(60, 8, 3, 44);
  EvalConfig cfg;
  cfg.fold_count = 3;
  cfg.fractions = {parse_fraction("1/4"), parse_fraction("1/2")};
  cfg.master_seed = 17;
  auto report = run_benchmark(ds, cfg, {}, {.dim = 2});
  REQUIRE(report.cells.size() == 6);
  for (const auto& cell : report.cells) {
    REQUIRE(cell.error.empty());
    REQUIRE(cell.fold_accuracies.size() == 3);
    double sum = 0;
    for (double a : cell.fold_accuracies) {
      CHECK(a >= 0.0);
      CHECK(a <= 1.0);
      sum += a;
    }
    CHECK(std::abs(cell.mean_accuracy - sum / 3) < 1e-12);
    CHECK(cell.fold_selections.size() == 3);
    for (const auto& sel : cell.fold_selections)
      CHECK(static_cast<int>(sel.size()) == cell.k_star);
  }
  auto j = report.to_json();
  CHECK(j["dataset"]["samples"] == 60);
  CHECK(j["cells"].size() == 6);
  CHECK(j["folds"]["assignments"].size() == 60);

  const std::string csv = report.to_csv();
  CHECK(csv.find("method,fraction,fold,accuracy") != std::string::npos);
  CHECK(csv.find("jmdm,1/4,0,") != std::string::npos);
  CHECK(csv.find("master_seed=17") != std::string::npos);

  const std::string table = report.format_table();
  CHECK(table.find("jmdm") != std::string::npos);
  CHECK(table.find("1/2") != std::string::npos);
}

TEST_CASE("benchmark: no leakage - perturbing test rows keeps selections") {
  auto ds = test_util::random_dataset(60, 7, 3, 314);
  EvalConfig cfg;
  cfg.fold_count = 3;
  cfg.fractions = {parse_fraction("1/3")};
  cfg.master_seed = 5;

  auto base = run_benchmark(ds, cfg, {}, {.dim = 2});

  // fold f's selection sees only its training split, so scrambling the
  // feature values of fold f's test rows (labels untouched, fold plan
  // fixed) must leave that fold's selections bit-identical
  std::mt19937_64 gen(777);
  for (int fold = 0; fold < cfg.fold_count; ++fold) {
    auto copy = ds;
    for (int r : base.folds.test_rows(fold))
      for (int j = 0; j < copy.feature_count(); ++j)
        copy.features(r, j) += 10.0 * (rng::uniform01(gen) - 0.5);
    auto rerun = run_benchmark(copy, cfg, {}, {.dim = 2});
    REQUIRE(rerun.folds.assignments == base.folds.assignments);
    for (std::size_t c = 0; c < base.cells.size(); ++c)
      CHECK(rerun.cells[c].fold_selections[fold] ==
            base.cells[c].fold_selections[fold]);
  }
}

TEST_CASE("benchmark: byte-identical JSON across runs") {
  auto ds = test_util::random_dataset(45, 6, 3, 2718);
  EvalConfig cfg;
  cfg.fold_count = 3;
  cfg.fractions = {parse_fraction("1/2")};
  cfg.master_seed = 31337;
  auto a = run_benchmark(ds, cfg, {}, {.dim = 2});
  auto b = run_benchmark(ds, cfg, {}, {.dim = 2});
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("benchmark: unknown method fails its cells with a diagnostic") {
  auto ds = test_util::random_dataset(30, 4, 2, 12);
  EvalConfig cfg;
  cfg.fold_count = 2;
  cfg.methods = {"fisher", "bogus"};
  cfg.fractions = {parse_fraction("1/2")};
  auto report = run_benchmark(ds, cfg, {}, {.dim = 2});
  const auto* good = report.find_cell("fisher", "1/2");
  const auto* bad = report.find_cell("bogus", "1/2");
  REQUIRE(good != nullptr);
  REQUIRE(bad != nullptr);
  CHECK(good->error.empty());
  CHECK(bad->error.find("unknown selection method") != std::string::npos);
  CHECK(bad->fold_accuracies.empty());
}

TEST_SUITE_END();
