#include "jmdm/separability.hpp"

#include <cmath>
#include <stdexcept>

namespace jmdm {

ClassStats compute_class_stats(const Matrix& features,
                               const std::vector<int>& labels,
                               int class_count,
                               std::span<const int> rows) {
  const int m = static_cast<int>(features.cols());
  ClassStats stats;
  stats.means = Matrix::Zero(m, class_count);
  stats.variances = Matrix::Zero(m, class_count);
  stats.counts.assign(class_count, 0);

  for (int r : rows) ++stats.counts[labels[r]];
  for (int c = 0; c < class_count; ++c)
    if (stats.counts[c] == 0)
      throw std::invalid_argument("class " + std::to_string(c) +
                                  " has no rows in the given subset");

  for (int r : rows)
    stats.means.col(labels[r]) += features.row(r).transpose();
  for (int c = 0; c < class_count; ++c) stats.means.col(c) /= stats.counts[c];

  for (int r : rows) {
    const int c = labels[r];
    stats.variances.col(c) +=
        (features.row(r).transpose() - stats.means.col(c)).array().square().matrix();
  }
  for (int c = 0; c < class_count; ++c) stats.variances.col(c) /= stats.counts[c];
  stats.variances = stats.variances.cwiseMax(kVarianceFloor);
  return stats;
}

ClassStats compute_class_stats(const LabeledDataset& ds,
                               std::span<const int> rows) {
  return compute_class_stats(ds.features, ds.labels, ds.class_count(), rows);
}

double bhattacharyya(double mu1, double var1, double mu2, double var2) {
  if (var1 <= 0.0 || var2 <= 0.0)
    throw std::invalid_argument("bhattacharyya: variances must be positive");
  const double sum = var1 + var2;
  const double gap = mu1 - mu2;
  const double b =
      0.125 * gap * gap * 2.0 / sum +
      0.5 * std::log(sum / (2.0 * std::sqrt(var1) * std::sqrt(var2)));
  return b > 0.0 ? b : 0.0;  // log term can round to -1ulp at var1==var2
}

double jm_from_b(double b) {
  return 2.0 * -std::expm1(-b);
}

std::vector<JmProfile> compute_jm_profiles(const ClassStats& stats) {
  const int m = stats.feature_count();
  const int c = stats.class_count();
  std::vector<JmProfile> profiles(m);
  for (int i = 0; i < m; ++i) {
    JmProfile& p = profiles[i];
    p.matrix = Matrix::Zero(c, c);
    for (int a = 0; a < c; ++a) {
      for (int b = a + 1; b < c; ++b) {
        const double jm = jm_from_b(
            bhattacharyya(stats.means(i, a), stats.variances(i, a),
                          stats.means(i, b), stats.variances(i, b)));
        p.matrix(a, b) = jm;
        p.matrix(b, a) = jm;
      }
    }
    p.flat.resize(c * c);
    for (int a = 0; a < c; ++a)
      for (int b = 0; b < c; ++b) p.flat[a * c + b] = p.matrix(a, b);
    p.mean_score = p.matrix.mean();
  }
  return profiles;
}

Matrix flatten_profiles(const std::vector<JmProfile>& profiles) {
  if (profiles.empty()) throw std::invalid_argument("no profiles");
  Matrix z(static_cast<Eigen::Index>(profiles.size()), profiles[0].flat.size());
  for (std::size_t i = 0; i < profiles.size(); ++i)
    z.row(static_cast<Eigen::Index>(i)) = profiles[i].flat.transpose();
  return z;
}

Vector fisher_scores(const ClassStats& stats) {
  const int m = stats.feature_count();
  const int c = stats.class_count();
  double total = 0;
  for (int k = 0; k < c; ++k) total += stats.counts[k];

  Vector scores(m);
  for (int i = 0; i < m; ++i) {
    double overall = 0;
    for (int k = 0; k < c; ++k) overall += stats.counts[k] * stats.means(i, k);
    overall /= total;
    double between = 0, within = 0;
    for (int k = 0; k < c; ++k) {
      const double d = stats.means(i, k) - overall;
      between += stats.counts[k] * d * d;
      within += stats.counts[k] * stats.variances(i, k);
    }
    scores[i] = between / within;  // within > 0 by the variance floor
  }
  return scores;
}

}  // namespace jmdm
