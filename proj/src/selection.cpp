#include "jmdm/selection.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "jmdm/parallel.hpp"
#include "jmdm/rng.hpp"

namespace jmdm {

nlohmann::json SelectionResult::to_json() const {
  nlohmann::json clusters_json = nlohmann::json::object();
  for (const auto& [feature, cluster] : clusters)
    clusters_json[std::to_string(feature)] = cluster;
  return {{"method", method},
          {"k_star", k_star},
          {"q", q},
          {"seed", seed},
          {"selected", selected},
          {"dropped_by_quantile", dropped_by_quantile},
          {"clusters", clusters_json}};
}

std::vector<int> quantile_filter(const std::vector<JmProfile>& profiles,
                                 double q) {
  if (q < 0.0 || q >= 1.0)
    throw std::invalid_argument("quantile q must lie in [0, 1)");
  const int m = static_cast<int>(profiles.size());
  std::vector<double> scores(m);
  for (int i = 0; i < m; ++i) scores[i] = profiles[i].mean_score;
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());

  std::vector<int> survivors;
  for (int i = 0; i < m; ++i) {
    const auto below_or_equal =
        std::upper_bound(sorted.begin(), sorted.end(), scores[i]) -
        sorted.begin();
    if (static_cast<double>(below_or_equal) / m > q) survivors.push_back(i);
  }
  return survivors;
}

namespace {

int count_distinct_rows(const Matrix& points) {
  std::vector<int> order(points.rows());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  auto less = [&](int a, int b) {
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
      if (points(a, j) != points(b, j)) return points(a, j) < points(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  int distinct = static_cast<int>(!order.empty());
  for (std::size_t i = 1; i < order.size(); ++i)
    if (less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

struct SingleRun {
  std::vector<int> assignment;
  Matrix centers;
  double inertia = std::numeric_limits<double>::infinity();
};

// Distance-proportional seeding: first center uniform, each further
// center sampled with probability proportional to the squared distance
// to the nearest already-chosen center.
Matrix seed_centers(const Matrix& points, int k, std::mt19937_64& gen) {
  const int n = static_cast<int>(points.rows());
  Matrix centers(k, points.cols());
  centers.row(0) = points.row(rng::uniform_below(gen, n));
  Vector dist2 =
      (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = dist2.sum();
    int pick = -1;
    if (total > 0) {
      double r = rng::uniform01(gen) * total;
      for (int i = 0; i < n; ++i) {
        r -= dist2[i];
        if (r <= 0) {
          pick = i;
          break;
        }
      }
      if (pick < 0) {  // fp slack: last point with positive mass
        for (int i = n - 1; i >= 0; --i)
          if (dist2[i] > 0) {
            pick = i;
            break;
          }
      }
    }
    if (pick < 0) pick = static_cast<int>(rng::uniform_below(gen, n));
    centers.row(c) = points.row(pick);
    dist2 = dist2.cwiseMin(
        (points.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }
  return centers;
}

void assign_points(const Matrix& points, const Matrix& centers,
                   std::vector<int>& assignment, Vector& point_dist2) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (points.row(i) - centers.row(0)).squaredNorm();
    for (int c = 1; c < k; ++c) {
      const double d = (points.row(i) - centers.row(c)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[i] = best;
    point_dist2[i] = best_d;
  }
}

// Reseeds every empty cluster on the point farthest from its assigned
// center, drawing only from clusters of size >= 2 so each pass strictly
// reduces the empty count. Updates all four views consistently.
void repair_empty(const Matrix& points, Matrix& centers,
                  std::vector<int>& assignment, Vector& point_dist2,
                  std::vector<int>& sizes) {
  const int n = static_cast<int>(points.rows());
  const int k = static_cast<int>(centers.rows());
  for (int c = 0; c < k; ++c) {
    if (sizes[c] > 0) continue;
    int worst = -1;
    for (int i = 0; i < n; ++i) {
      if (sizes[assignment[i]] < 2) continue;
      if (worst < 0 || point_dist2[i] > point_dist2[worst]) worst = i;
    }
    if (worst < 0)
      throw std::logic_error("k-means repair: no donor cluster (k > n?)");
    centers.row(c) = points.row(worst);
    --sizes[assignment[worst]];
    assignment[worst] = c;
    sizes[c] = 1;
    point_dist2[worst] = 0.0;
    c = -1;  // rescan: the donor cluster may have emptied
  }
}

SingleRun run_lloyd(const Matrix& points, int k, std::uint64_t seed,
                    int max_iter, double tol) {
  const int n = static_cast<int>(points.rows());
  std::mt19937_64 gen(seed);
  SingleRun run;
  run.centers = seed_centers(points, k, gen);
  run.assignment.assign(n, 0);
  Vector point_dist2(n);

  auto assign_and_repair = [&] {
    assign_points(points, run.centers, run.assignment, point_dist2);
    std::vector<int> sizes(k, 0);
    for (int a : run.assignment) ++sizes[a];
    repair_empty(points, run.centers, run.assignment, point_dist2, sizes);
    return sizes;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    const std::vector<int> sizes = assign_and_repair();

    Matrix next = Matrix::Zero(k, points.cols());
    for (int i = 0; i < n; ++i) next.row(run.assignment[i]) += points.row(i);
    for (int c = 0; c < k; ++c) next.row(c) /= sizes[c];

    const double shift = (next - run.centers).rowwise().norm().maxCoeff();
    run.centers = next;
    if (shift <= tol) break;
  }
  assign_and_repair();
  run.inertia = point_dist2.sum();
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                    int restarts, int max_iter, double tol) {
  const int n = static_cast<int>(points.rows());
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (k > n)
    throw std::invalid_argument("k exceeds the number of points");
  if (k > count_distinct_rows(points))
    throw std::invalid_argument("k exceeds the number of distinct points");

  std::vector<SingleRun> runs(restarts);
  parallel_for(0, restarts, [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r)
      runs[r] = run_lloyd(points, k, rng::derive(seed, r), max_iter, tol);
  });

  int best = 0;
  for (int r = 1; r < restarts; ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;

  // a lone empty cluster cannot survive repair, but guard the contract
  std::vector<int> sizes(k, 0);
  for (int a : runs[best].assignment) ++sizes[a];
  if (std::count(sizes.begin(), sizes.end(), 0) > 0)
    throw std::runtime_error("k-means produced an empty cluster");

  return {std::move(runs[best].assignment), std::move(runs[best].centers),
          runs[best].inertia};
}

SelectionResult select_jmdm(const std::vector<JmProfile>& profiles,
                            const SpectralEmbedding& emb,
                            const SelectionConfig& cfg) {
  const int m = static_cast<int>(profiles.size());
  if (emb.point_count() != m)
    throw std::invalid_argument("embedding rows do not match profile count");
  if (cfg.k_star < 1) throw std::invalid_argument("k_star must be >= 1");

  SelectionResult res;
  res.method = "jmdm";
  res.k_star = cfg.k_star;
  res.q = cfg.q;
  res.seed = cfg.kmeans_seed;

  const std::vector<int> survivors = quantile_filter(profiles, cfg.q);
  if (static_cast<int>(survivors.size()) < cfg.k_star)
    throw std::runtime_error(
        "only " + std::to_string(survivors.size()) +
        " features survive the q=" + std::to_string(cfg.q) +
        " cut, need k_star=" + std::to_string(cfg.k_star) +
        "; lower q or k_star");
  {
    std::set<int> sset(survivors.begin(), survivors.end());
    for (int i = 0; i < m; ++i)
      if (!sset.count(i)) res.dropped_by_quantile.push_back(i);
  }

  const Matrix points = gather_rows(emb.coordinates, survivors);
  const KMeansResult km =
      kmeans(points, cfg.k_star, cfg.kmeans_seed, cfg.kmeans_restarts,
             cfg.kmeans_max_iter, cfg.kmeans_tol);

  for (std::size_t i = 0; i < survivors.size(); ++i)
    res.clusters[survivors[i]] = km.assignment[i];

  // representative = highest mean score per cluster, ties to lowest index
  std::vector<int> rep(cfg.k_star, -1);
  for (std::size_t i = 0; i < survivors.size(); ++i) {
    const int c = km.assignment[i];
    const int f = survivors[i];
    if (rep[c] < 0 || profiles[f].mean_score > profiles[rep[c]].mean_score)
      rep[c] = f;
  }
  res.selected.assign(rep.begin(), rep.end());
  std::sort(res.selected.begin(), res.selected.end());
  return res;
}

SelectionResult select_random(int feature_count, int k_star,
                              std::uint64_t seed) {
  if (k_star < 1 || k_star > feature_count)
    throw std::invalid_argument("k_star must lie in [1, feature_count]");
  std::mt19937_64 gen(rng::derive(seed, "random-filter"));
  SelectionResult res;
  res.method = "random";
  res.k_star = k_star;
  res.seed = seed;
  res.selected = rng::sample_without_replacement(feature_count, k_star, gen);
  std::sort(res.selected.begin(), res.selected.end());
  return res;
}

SelectionResult select_top_ranked(const Vector& scores, int k_star,
                                  const std::string& method) {
  const int m = static_cast<int>(scores.size());
  if (k_star < 1 || k_star > m)
    throw std::invalid_argument("k_star must lie in [1, feature_count]");
  std::vector<int> order(m);
  for (int i = 0; i < m; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  SelectionResult res;
  res.method = method;
  res.k_star = k_star;
  res.selected.assign(order.begin(), order.begin() + k_star);
  std::sort(res.selected.begin(), res.selected.end());
  return res;
}

}  // namespace jmdm
