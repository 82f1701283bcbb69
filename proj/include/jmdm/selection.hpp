#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "jmdm/separability.hpp"
#include "jmdm/spectral.hpp"

namespace jmdm {

struct SelectionConfig {
  int k_star = 1;          // number of features to select
  double q = 0.25;         // quantile of low-separability features to drop
  std::uint64_t kmeans_seed = 0;
  int kmeans_restarts = 10;
  int kmeans_max_iter = 300;
  double kmeans_tol = 1e-6;
};

struct SelectionResult {
  std::string method;
  int k_star = 0;
  double q = 0.0;
  std::uint64_t seed = 0;
  std::vector<int> selected;             // k_star original indices, ascending
  std::vector<int> dropped_by_quantile;  // ascending (jmdm only)
  std::map<int, int> clusters;           // surviving index -> cluster (jmdm only)

  nlohmann::json to_json() const;
};

// Survivors of the low-separability cut: feature i is dropped iff the
// empirical CDF of its mean score, #{j : m_j <= m_i} / M, is <= q.
// Equivalently, everything strictly below the smallest score whose CDF
// exceeds q is dropped, so full ties always survive and q = 0 drops
// nothing. Returns surviving indices, ascending.
std::vector<int> quantile_filter(const std::vector<JmProfile>& profiles,
                                 double q);

struct KMeansResult {
  std::vector<int> assignment;  // length n, values in [0, k)
  Matrix centers;               // k x d
  double inertia = 0;
};

// Lloyd iterations with distance-proportional seeding, `restarts`
// independent seeded runs keeping the best inertia (ties to the earlier
// restart), and empty-cluster repair by reseeding on the point farthest
// from its center. Exactly k nonempty clusters; deterministic for fixed
// inputs and seed. Requires k <= number of distinct points.
KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int restarts, int max_iter, double tol);

// The full selection stage: quantile cut on mean JM scores, k-means over
// the surviving embedded features with k = k_star, then the feature with
// the highest mean score from each cluster (ties to the lowest index).
SelectionResult select_jmdm(const std::vector<JmProfile>& profiles,
                            const SpectralEmbedding& emb,
                            const SelectionConfig& cfg);

// Uniform sample of k_star features without replacement.
SelectionResult select_random(int feature_count, int k_star,
                              std::uint64_t seed);

// The k_star highest-scored features (ties to the lowest index); shared
// driver for score-ranking baselines such as the Fisher filter.
SelectionResult select_top_ranked(const Vector& scores, int k_star,
                                  const std::string& method = "ranked");

}  // namespace jmdm
