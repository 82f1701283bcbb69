#pragma once

#include <span>
#include <vector>

#include "jmdm/dataset.hpp"

namespace jmdm {

// Variances below this are clamped before the Bhattacharyya formula,
// which divides by sigma1*sigma2 and takes a log variance ratio. With
// both variances at the floor and equal means the distance is 0.
constexpr double kVarianceFloor = 1e-12;

// Per-feature, per-class sample statistics (population variance, so a
// singleton class is defined and lands on the floor).
struct ClassStats {
  Matrix means;      // M x C
  Matrix variances;  // M x C, floored
  std::vector<int> counts;  // length C, sums to the rows used

  int feature_count() const { return static_cast<int>(means.rows()); }
  int class_count() const { return static_cast<int>(means.cols()); }
};

ClassStats compute_class_stats(const Matrix& features,
                               const std::vector<int>& labels,
                               int class_count,
                               std::span<const int> rows);
ClassStats compute_class_stats(const LabeledDataset& ds,
                               std::span<const int> rows);

// Bhattacharyya distance between two 1-D Gaussians:
//   B = (1/8)(mu1-mu2)^2 * 2/(v1+v2) + (1/2) ln((v1+v2)/(2 s1 s2)).
// Zero iff the distributions coincide. Throws on non-positive variance.
double bhattacharyya(double mu1, double var1, double mu2, double var2);

// JM = 2(1 - exp(-B)): monotone in B, 0 at 0, asymptote 2.
double jm_from_b(double b);

// One feature's class-separability fingerprint: the C x C matrix of
// pairwise JM distances, its row-major flattening, and the mean over all
// C*C entries (zero diagonal included).
struct JmProfile {
  Matrix matrix;      // C x C, symmetric, zero diagonal
  Vector flat;        // length C*C
  double mean_score;  // mean of all entries
};

std::vector<JmProfile> compute_jm_profiles(const ClassStats& stats);

// Stacks the flattened profiles into the M x C^2 matrix the embedding
// consumes (row i = profile i).
Matrix flatten_profiles(const std::vector<JmProfile>& profiles);

// Fisher criterion per feature: between-class scatter over pooled
// within-class variance, count-weighted. Higher is better.
Vector fisher_scores(const ClassStats& stats);

}  // namespace jmdm
