#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace jmdm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Labeled tabular dataset: N samples x M features plus a class label per
// sample. Labels are mapped to contiguous indices 0..C-1; the original
// label strings live in class_names (numeric-aware sorted order, so
// "2" < "10" when every label parses as a number).
struct LabeledDataset {
  Matrix features;                        // N x M
  std::vector<int> labels;                // length N, values in [0, C)
  std::vector<std::string> class_names;   // length C
  std::vector<std::string> feature_names; // length M
  std::string name;

  int sample_count() const { return static_cast<int>(features.rows()); }
  int feature_count() const { return static_cast<int>(features.cols()); }
  int class_count() const { return static_cast<int>(class_names.size()); }
  std::vector<int> class_counts() const;
};

struct CsvOptions {
  std::string label_column;  // header name, or 0-based index as digits
  char delimiter = ',';
  bool has_header = true;
};

// Loads a CSV into a LabeledDataset. Every non-label cell must parse as
// a finite real; rejects files with fewer than 2 classes or no rows.
// Throws std::runtime_error with the offending row/column on bad cells.
LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvOptions& opts);

// Writes the dataset back out (shortest round-trip float formatting, so
// reloading reproduces features bit for bit).
void write_csv(const LabeledDataset& ds, const std::filesystem::path& path,
               char delimiter = ',');

// Stratified cross-validation fold assignment.
struct FoldPlan {
  int fold_count = 0;
  std::uint64_t seed = 0;
  std::vector<int> assignments;  // length N, values in [0, fold_count)

  std::vector<int> test_rows(int fold) const;
  std::vector<int> train_rows(int fold) const;
  nlohmann::json to_json() const;
};

// Shuffles each class's rows with the seeded generator and deals them
// round-robin, so per-fold class counts differ by at most one. Identical
// (labels, fold_count, seed) give identical assignments.
FoldPlan make_folds(const LabeledDataset& ds, int fold_count,
                    std::uint64_t seed);

// Per-feature z-scoring fit on a row subset. Standard deviations below
// 1e-12 are replaced by 1, so constant features transform to zero.
struct Standardizer {
  Vector mean;    // length M
  Vector stddev;  // length M, floored
};

Standardizer fit_standardizer(const Matrix& features,
                              std::span<const int> rows);
Matrix apply_standardizer(const Standardizer& s, const Matrix& rows);

// Row/column gathers used throughout the pipeline.
Matrix gather_rows(const Matrix& m, std::span<const int> rows);
Matrix gather_columns(const Matrix& m, std::span<const int> cols);
std::vector<int> gather_labels(const std::vector<int>& labels,
                               std::span<const int> rows);

}  // namespace jmdm
