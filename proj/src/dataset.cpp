#include "jmdm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <nlohmann/json.hpp>

#include "jmdm/rng.hpp"

namespace jmdm {

namespace {

constexpr double kStdDevFloor = 1e-12;

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) cells.push_back(cell);
  if (!line.empty() && line.back() == delim) cells.emplace_back();
  return cells;
}

bool parse_double(std::string_view s, double& out) {
  // from_chars wants no surrounding whitespace
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  if (s.empty()) return false;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Numeric-aware label ordering: when every label parses as a number,
// sort by value (ties lexicographic), otherwise lexicographic.
std::vector<std::string> sorted_class_names(
    const std::map<std::string, int>& seen) {
  std::vector<std::string> names;
  names.reserve(seen.size());
  for (const auto& [k, _] : seen) names.push_back(k);
  bool all_numeric = true;
  std::vector<double> vals(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!parse_double(names[i], vals[i])) {
      all_numeric = false;
      break;
    }
  }
  if (all_numeric) {
    std::vector<std::size_t> order(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return vals[a] < vals[b];
      return names[a] < names[b];
    });
    std::vector<std::string> out(names.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[i] = names[order[i]];
    return out;
  }
  return names;  // std::map already sorted lexicographically
}

std::string shortest_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<int> LabeledDataset::class_counts() const {
  std::vector<int> counts(class_count(), 0);
  for (int y : labels) ++counts[y];
  return counts;
}

LabeledDataset load_csv(const std::filesystem::path& path,
                        const CsvOptions& opts) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open dataset file: " + path.string());

  std::string line;
  int line_no = 0;
  std::vector<std::string> header;
  if (opts.has_header) {
    if (!std::getline(in, line))
      throw std::runtime_error(path.string() + ": empty file");
    ++line_no;
    header = split_line(line, opts.delimiter);
    for (auto& h : header) h = trim(h);
  }

  // Resolve the label column: header name first, then 0-based index.
  int label_col = -1;
  if (opts.has_header) {
    auto it = std::find(header.begin(), header.end(), opts.label_column);
    if (it != header.end())
      label_col = static_cast<int>(it - header.begin());
  }
  if (label_col < 0) {
    int idx = -1;
    auto s = opts.label_column;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec == std::errc() && p == s.data() + s.size() && idx >= 0)
      label_col = idx;
    else if (opts.has_header)
      throw std::runtime_error("label column '" + opts.label_column +
                               "' not found in header");
    else
      throw std::runtime_error("label column '" + opts.label_column +
                               "': pass a 0-based index when the file has "
                               "no header");
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::string> row_labels;
  int width = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line, opts.delimiter);
    if (width < 0) {
      width = static_cast<int>(cells.size());
      if (label_col >= width)
        throw std::runtime_error(path.string() + ": label column index " +
                                 std::to_string(label_col) +
                                 " out of range for " + std::to_string(width) +
                                 " columns");
      if (opts.has_header && static_cast<int>(header.size()) != width)
        throw std::runtime_error(path.string() +
                                 ": header width does not match data width");
    } else if (static_cast<int>(cells.size()) != width) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(width) +
                               " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(width - 1);
    for (int c = 0; c < width; ++c) {
      if (c == label_col) {
        row_labels.push_back(trim(cells[c]));
        continue;
      }
      double v;
      if (!parse_double(cells[c], v) || !std::isfinite(v))
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": column " + std::to_string(c + 1) +
                                 ": cannot parse '" + trim(cells[c]) +
                                 "' as a finite real");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }

  if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
  const int n = static_cast<int>(rows.size());
  const int m = width - 1;
  if (m < 1) throw std::runtime_error(path.string() + ": no feature columns");

  std::map<std::string, int> seen;
  for (const auto& l : row_labels) seen.emplace(l, 0);
  if (seen.size() < 2)
    throw std::runtime_error(path.string() + ": fewer than 2 classes");

  LabeledDataset ds;
  ds.name = path.stem().string();
  ds.class_names = sorted_class_names(seen);
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < ds.class_names.size(); ++i)
    index[ds.class_names[i]] = static_cast<int>(i);

  ds.features.resize(n, m);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) ds.features(i, j) = rows[i][j];
  ds.labels.resize(n);
  for (int i = 0; i < n; ++i) ds.labels[i] = index[row_labels[i]];

  if (opts.has_header) {
    for (int c = 0; c < width; ++c)
      if (c != label_col) ds.feature_names.push_back(header[c]);
  } else {
    for (int c = 0; c < width; ++c)
      if (c != label_col) ds.feature_names.push_back("f" + std::to_string(c));
  }
  return ds;
}

void write_csv(const LabeledDataset& ds, const std::filesystem::path& path,
               char delimiter) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (int j = 0; j < ds.feature_count(); ++j)
    out << ds.feature_names[j] << delimiter;
  out << "label\n";
  for (int i = 0; i < ds.sample_count(); ++i) {
    for (int j = 0; j < ds.feature_count(); ++j)
      out << shortest_double(ds.features(i, j)) << delimiter;
    out << ds.class_names[ds.labels[i]] << "\n";
  }
}

std::vector<int> FoldPlan::test_rows(int fold) const {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(assignments.size()); ++i)
    if (assignments[i] == fold) rows.push_back(i);
  return rows;
}

std::vector<int> FoldPlan::train_rows(int fold) const {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(assignments.size()); ++i)
    if (assignments[i] != fold) rows.push_back(i);
  return rows;
}

nlohmann::json FoldPlan::to_json() const {
  return {{"fold_count", fold_count},
          {"seed", seed},
          {"assignments", assignments}};
}

FoldPlan make_folds(const LabeledDataset& ds, int fold_count,
                    std::uint64_t seed) {
  if (fold_count < 1) throw std::invalid_argument("fold_count must be >= 1");
  const auto counts = ds.class_counts();
  const int min_count = *std::min_element(counts.begin(), counts.end());
  if (fold_count > min_count)
    throw std::invalid_argument(
        "fold_count " + std::to_string(fold_count) +
        " exceeds the smallest class size " + std::to_string(min_count));

  FoldPlan plan;
  plan.fold_count = fold_count;
  plan.seed = seed;
  plan.assignments.assign(ds.sample_count(), -1);

  std::mt19937_64 gen(rng::derive(seed, "folds"));
  for (int c = 0; c < ds.class_count(); ++c) {
    std::vector<int> rows;
    for (int i = 0; i < ds.sample_count(); ++i)
      if (ds.labels[i] == c) rows.push_back(i);
    rng::shuffle(rows, gen);
    for (std::size_t k = 0; k < rows.size(); ++k)
      plan.assignments[rows[k]] = static_cast<int>(k % fold_count);
  }
  return plan;
}

Standardizer fit_standardizer(const Matrix& features,
                              std::span<const int> rows) {
  if (rows.empty()) throw std::invalid_argument("empty row set");
  const Matrix sub = gather_rows(features, rows);
  Standardizer s;
  s.mean = sub.colwise().mean();
  Vector var = (sub.rowwise() - s.mean.transpose())
                   .array()
                   .square()
                   .colwise()
                   .mean();
  s.stddev = var.array().sqrt();
  for (Eigen::Index j = 0; j < s.stddev.size(); ++j)
    if (s.stddev[j] < kStdDevFloor) s.stddev[j] = 1.0;
  return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& rows) {
  if (rows.cols() != s.mean.size())
    throw std::invalid_argument("standardizer/matrix width mismatch");
  return (rows.rowwise() - s.mean.transpose()).array().rowwise() /
         s.stddev.transpose().array();
}

Matrix gather_rows(const Matrix& m, std::span<const int> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
  return out;
}

Matrix gather_columns(const Matrix& m, std::span<const int> cols) {
  Matrix out(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = m.col(cols[j]);
  return out;
}

std::vector<int> gather_labels(const std::vector<int>& labels,
                               std::span<const int> rows) {
  std::vector<int> out;
  out.reserve(rows.size());
  for (int r : rows) out.push_back(labels[r]);
  return out;
}

}  // namespace jmdm
