#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "jmdm/dataset.hpp"
#include "jmdm/rng.hpp"

namespace test_util {

inline jmdm::LabeledDataset make_dataset(jmdm::Matrix features,
                                         std::vector<int> labels) {
  jmdm::LabeledDataset ds;
  int c = 0;
  for (int y : labels) c = std::max(c, y + 1);
  ds.features = std::move(features);
  ds.labels = std::move(labels);
  for (int i = 0; i < c; ++i) ds.class_names.push_back("c" + std::to_string(i));
  for (int j = 0; j < ds.features.cols(); ++j)
    ds.feature_names.push_back("f" + std::to_string(j));
  ds.name = "synthetic";
  return ds;
}

inline double gaussian(std::mt19937_64& gen) {
  // Box-Muller on raw engine doubles keeps draws platform-stable
  double u = jmdm::rng::uniform01(gen);
  double v = jmdm::rng::uniform01(gen);
  while (u <= 0) u = jmdm::rng::uniform01(gen);
  return std::sqrt(-2.0 * std::log(u)) *
         std::cos(2.0 * 3.14159265358979323846 * v);
}

inline jmdm::Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  jmdm::Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = gaussian(gen);
  return m;
}

// Random labeled dataset with class-dependent feature shifts, so most
// features carry some signal.
inline jmdm::LabeledDataset random_dataset(int n, int m, int c,
                                           std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  jmdm::Matrix x(n, m);
  std::vector<int> y(n);
  jmdm::Matrix shift(c, m);
  for (int k = 0; k < c; ++k)
    for (int j = 0; j < m; ++j) shift(k, j) = 2.0 * gaussian(gen);
  for (int i = 0; i < n; ++i) {
    y[i] = i % c;
    for (int j = 0; j < m; ++j) x(i, j) = shift(y[i], j) + gaussian(gen);
  }
  return make_dataset(std::move(x), std::move(y));
}

// The 3-class / 8-feature complementarity construction: features 0-3
// separate the class pair (0,1) with gaps {6, 5.5, 5, 4.5} and leave
// class 2 halfway; features 4-7 separate the pair (1,2) with gaps
// {3, 2.75, 2.5, 2.25} and leave class 0 halfway. Every group-0 feature
// outranks every group-1 feature on mean JM score, so a pure top-k
// ranking picks two group-0 features while one-per-cluster selection
// must take one from each group. Within-class samples are mu +/- 1 in
// equal numbers, so every class has population variance exactly 1.
inline jmdm::LabeledDataset complementary_dataset() {
  const int per_class = 4;
  const double gaps0[4] = {6.0, 5.5, 5.0, 4.5};
  const double gaps1[4] = {3.0, 2.75, 2.5, 2.25};
  jmdm::Matrix x(3 * per_class, 8);
  std::vector<int> y(3 * per_class);
  for (int cls = 0; cls < 3; ++cls) {
    for (int s = 0; s < per_class; ++s) {
      const int row = cls * per_class + s;
      y[row] = cls;
      const double noise = (s % 2 == 0) ? -1.0 : 1.0;
      for (int f = 0; f < 8; ++f) {
        double mean;
        if (f < 4) {
          const double g = gaps0[f];
          mean = cls == 0 ? -g / 2 : cls == 1 ? g / 2 : 0.0;
        } else {
          const double g = gaps1[f - 4];
          mean = cls == 1 ? -g / 2 : cls == 2 ? g / 2 : 0.0;
        }
        x(row, f) = mean + noise;
      }
    }
  }
  return make_dataset(std::move(x), std::move(y));
}

class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            (stem + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  void write(const std::string& text) const {
    std::ofstream f(path_);
    f << text;
  }

 private:
  std::filesystem::path path_;
};

}  // namespace test_util
