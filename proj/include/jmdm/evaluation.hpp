#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jmdm/dataset.hpp"
#include "jmdm/selection.hpp"
#include "jmdm/spectral.hpp"

namespace jmdm {

// Fraction of features to keep, remembering how the user wrote it
// ("1/8" or "0.125") for reports.
struct Fraction {
  double value = 0;
  std::string label;
};

// Parses "a/b" or a decimal in (0, 1].
Fraction parse_fraction(const std::string& text);

// round(M * fraction), floored at 1.
int fraction_to_count(int feature_count, double fraction);

struct EvalConfig {
  int knn_k = 5;
  int fold_count = 5;
  std::vector<Fraction> fractions = {{0.125, "1/8"},
                                     {0.0625, "1/16"},
                                     {0.03125, "1/32"}};
  std::vector<std::string> methods = {"jmdm", "fisher", "random"};
  std::uint64_t master_seed = 0;
};

// Euclidean k-nearest-neighbor majority vote. Neighbor ties on the
// distance boundary go to the lower training-row index; vote ties go to
// the class of the nearest neighbor among the tied classes.
std::vector<int> knn_predict(const Matrix& train_x,
                             const std::vector<int>& train_y,
                             const Matrix& test_x, int k);

// One (method, fraction) cell of the benchmark. fold_selections holds
// the per-fold selected feature indices so selection can be audited (and
// leakage tested) independently of the accuracies. A cell whose method
// fails on any fold carries the diagnostic in `error` and no accuracies.
struct EvalCell {
  std::string method;
  Fraction fraction;
  int k_star = 0;
  std::vector<double> fold_accuracies;
  std::vector<std::vector<int>> fold_selections;
  double mean_accuracy = 0;
  std::string error;
};

struct EvalReport {
  std::string dataset_name;
  int samples = 0;
  int features = 0;
  int classes = 0;
  EvalConfig config;
  SelectionConfig selection_config;
  KernelConfig kernel_config;
  FoldPlan folds;
  std::vector<EvalCell> cells;

  const EvalCell* find_cell(const std::string& method,
                            const std::string& fraction_label) const;
  nlohmann::json to_json() const;
  std::string to_csv() const;
  // Mean-accuracy table, one row per fraction and one column per method.
  std::string format_table() const;
};

// Runs the full protocol: per fold, fit the standardizer on the training
// split, compute class stats / JM profiles / the embedding on that split
// only, run every selection method at every fraction, and score a KNN
// classifier on the held-out fold restricted to the selected columns.
// Test rows never touch the selection path.
EvalReport run_benchmark(const LabeledDataset& ds, const EvalConfig& cfg,
                         const SelectionConfig& sel_cfg,
                         const KernelConfig& kernel_cfg);

}  // namespace jmdm
