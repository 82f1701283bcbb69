#include "jmdm/evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "jmdm/parallel.hpp"
#include "jmdm/rng.hpp"
#include "jmdm/separability.hpp"

namespace jmdm {

Fraction parse_fraction(const std::string& text) {
  auto parse_num = [&](std::string_view s) {
    double v;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw std::invalid_argument("cannot parse fraction '" + text + "'");
    return v;
  };
  Fraction f;
  f.label = text;
  const auto slash = text.find('/');
  if (slash == std::string::npos) {
    f.value = parse_num(text);
  } else {
    const double num = parse_num(std::string_view(text).substr(0, slash));
    const double den = parse_num(std::string_view(text).substr(slash + 1));
    if (den == 0) throw std::invalid_argument("fraction '" + text + "': zero denominator");
    f.value = num / den;
  }
  if (!(f.value > 0.0 && f.value <= 1.0))
    throw std::invalid_argument("fraction '" + text + "' must lie in (0, 1]");
  return f;
}

int fraction_to_count(int feature_count, double fraction) {
  const long k = std::lround(feature_count * fraction);
  return static_cast<int>(std::max(1L, k));
}

std::vector<int> knn_predict(const Matrix& train_x,
                             const std::vector<int>& train_y,
                             const Matrix& test_x, int k) {
  const int n_train = static_cast<int>(train_x.rows());
  const int n_test = static_cast<int>(test_x.rows());
  if (n_train == 0) throw std::invalid_argument("empty training set");
  if (k < 1 || k > n_train)
    throw std::invalid_argument("knn k must lie in [1, train size]");
  if (train_x.cols() != test_x.cols())
    throw std::invalid_argument("train/test dimension mismatch");

  const int n_classes =
      train_y.empty() ? 0 : *std::max_element(train_y.begin(), train_y.end()) + 1;
  const Vector train_sq = train_x.rowwise().squaredNorm();

  std::vector<int> predictions(n_test);
  parallel_for(0, n_test, [&](int lo, int hi) {
    std::vector<std::pair<double, int>> order(n_train);
    std::vector<int> votes(n_classes);
    const Matrix cross =
        test_x.middleRows(lo, hi - lo) * train_x.transpose();
    for (int t = lo; t < hi; ++t) {
      const double test_sq = test_x.row(t).squaredNorm();
      for (int i = 0; i < n_train; ++i) {
        const double d2 =
            std::max(0.0, test_sq + train_sq[i] - 2.0 * cross(t - lo, i));
        order[i] = {d2, i};
      }
      std::partial_sort(order.begin(), order.begin() + k, order.end());

      std::fill(votes.begin(), votes.end(), 0);
      for (int j = 0; j < k; ++j) ++votes[train_y[order[j].second]];
      const int top = *std::max_element(votes.begin(), votes.end());
      // first neighbor whose class holds the top vote count wins ties
      int label = -1;
      for (int j = 0; j < k && label < 0; ++j)
        if (votes[train_y[order[j].second]] == top)
          label = train_y[order[j].second];
      predictions[t] = label;
    }
  });
  return predictions;
}

const EvalCell* EvalReport::find_cell(const std::string& method,
                                      const std::string& fraction_label) const {
  for (const auto& c : cells)
    if (c.method == method && c.fraction.label == fraction_label) return &c;
  return nullptr;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json fracs = nlohmann::json::array();
  for (const auto& f : config.fractions)
    fracs.push_back({{"label", f.label}, {"value", f.value}});

  nlohmann::json cells_json = nlohmann::json::array();
  for (const auto& c : cells) {
    nlohmann::json cj = {{"method", c.method},
                         {"fraction", c.fraction.label},
                         {"k_star", c.k_star},
                         {"fold_accuracies", c.fold_accuracies},
                         {"mean_accuracy", c.mean_accuracy},
                         {"fold_selections", c.fold_selections}};
    if (!c.error.empty()) cj["error"] = c.error;
    cells_json.push_back(cj);
  }

  return {{"dataset",
           {{"name", dataset_name},
            {"samples", samples},
            {"features", features},
            {"classes", classes}}},
          {"config",
           {{"knn_k", config.knn_k},
            {"fold_count", config.fold_count},
            {"master_seed", config.master_seed},
            {"methods", config.methods},
            {"fractions", fracs},
            {"selection",
             {{"q", selection_config.q},
              {"kmeans_restarts", selection_config.kmeans_restarts},
              {"kmeans_max_iter", selection_config.kmeans_max_iter},
              {"kmeans_tol", selection_config.kmeans_tol}}},
            {"kernel",
             {{"epsilon_factor", kernel_config.epsilon_factor},
              {"alpha", kernel_config.alpha},
              {"dim", kernel_config.dim}}}}},
          {"folds", folds.to_json()},
          {"cells", cells_json}};
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "# dataset=" << dataset_name << " samples=" << samples
      << " features=" << features << " classes=" << classes << "\n";
  out << "# knn_k=" << config.knn_k << " fold_count=" << config.fold_count
      << " master_seed=" << config.master_seed << " q=" << selection_config.q
      << " restarts=" << selection_config.kmeans_restarts
      << " epsilon_factor=" << kernel_config.epsilon_factor
      << " alpha=" << kernel_config.alpha << " dim=" << kernel_config.dim
      << "\n";
  out << "method,fraction,fold,accuracy\n";
  out << std::setprecision(17);
  for (const auto& c : cells) {
    if (!c.error.empty()) {
      out << c.method << "," << c.fraction.label << ",error," << c.error
          << "\n";
      continue;
    }
    for (std::size_t f = 0; f < c.fold_accuracies.size(); ++f)
      out << c.method << "," << c.fraction.label << "," << f << ","
          << c.fold_accuracies[f] << "\n";
    out << c.method << "," << c.fraction.label << ",mean," << c.mean_accuracy
        << "\n";
  }
  return out.str();
}

std::string EvalReport::format_table() const {
  std::ostringstream out;
  out << std::left << std::setw(8) << "Alg." << std::setw(10) << "Fraction";
  for (const auto& m : config.methods) out << std::setw(10) << m;
  out << "\n";
  for (const auto& f : config.fractions) {
    out << std::setw(8) << "KNN" << std::setw(10) << f.label;
    for (const auto& m : config.methods) {
      const EvalCell* c = find_cell(m, f.label);
      std::ostringstream v;
      if (c == nullptr)
        v << "-";
      else if (!c->error.empty())
        v << "error";
      else
        v << std::fixed << std::setprecision(3) << c->mean_accuracy;
      out << std::setw(10) << v.str();
    }
    out << "\n";
  }
  return out.str();
}

namespace {

SelectionResult run_method(const std::string& method, int k_star,
                           std::uint64_t seed,
                           const std::vector<JmProfile>& profiles,
                           const SpectralEmbedding* emb,
                           const Vector& fisher,
                           const SelectionConfig& sel_cfg) {
  if (method == "jmdm") {
    SelectionConfig cfg = sel_cfg;
    cfg.k_star = k_star;
    cfg.kmeans_seed = seed;
    return select_jmdm(profiles, *emb, cfg);
  }
  if (method == "fisher") return select_top_ranked(fisher, k_star, "fisher");
  if (method == "random")
    return select_random(static_cast<int>(profiles.size()), k_star, seed);
  throw std::invalid_argument("unknown selection method '" + method +
                              "' (valid: jmdm, fisher, random)");
}

}  // namespace

EvalReport run_benchmark(const LabeledDataset& ds, const EvalConfig& cfg,
                         const SelectionConfig& sel_cfg,
                         const KernelConfig& kernel_cfg) {
  if (cfg.knn_k < 1) throw std::invalid_argument("knn_k must be >= 1");
  if (cfg.methods.empty()) throw std::invalid_argument("no methods requested");
  if (cfg.fractions.empty())
    throw std::invalid_argument("no fractions requested");

  EvalReport report;
  report.dataset_name = ds.name;
  report.samples = ds.sample_count();
  report.features = ds.feature_count();
  report.classes = ds.class_count();
  report.config = cfg;
  report.selection_config = sel_cfg;
  report.kernel_config = kernel_cfg;
  report.folds =
      make_folds(ds, cfg.fold_count, rng::derive(cfg.master_seed, "cv"));

  for (const auto& method : cfg.methods)
    for (const auto& fraction : cfg.fractions) {
      EvalCell cell;
      cell.method = method;
      cell.fraction = fraction;
      cell.k_star = fraction_to_count(ds.feature_count(), fraction.value);
      report.cells.push_back(std::move(cell));
    }

  const bool needs_embedding =
      std::count(cfg.methods.begin(), cfg.methods.end(), "jmdm") > 0;

  for (int fold = 0; fold < cfg.fold_count; ++fold) {
    const std::vector<int> train_rows = report.folds.train_rows(fold);
    const std::vector<int> test_rows = report.folds.test_rows(fold);

    const Standardizer std_fit = fit_standardizer(ds.features, train_rows);
    const Matrix train_x =
        apply_standardizer(std_fit, gather_rows(ds.features, train_rows));
    const Matrix test_x =
        apply_standardizer(std_fit, gather_rows(ds.features, test_rows));
    const std::vector<int> train_y = gather_labels(ds.labels, train_rows);
    const std::vector<int> test_y = gather_labels(ds.labels, test_rows);

    std::vector<int> train_idx(train_x.rows());
    for (std::size_t i = 0; i < train_idx.size(); ++i)
      train_idx[i] = static_cast<int>(i);
    const ClassStats stats =
        compute_class_stats(train_x, train_y, ds.class_count(), train_idx);
    const std::vector<JmProfile> profiles = compute_jm_profiles(stats);
    const Vector fisher = fisher_scores(stats);

    SpectralEmbedding emb;
    std::string embedding_error;
    if (needs_embedding) {
      try {
        emb = decompose(build_markov(flatten_profiles(profiles), kernel_cfg),
                        kernel_cfg.dim);
      } catch (const std::exception& e) {
        embedding_error = e.what();
      }
    }

    for (auto& cell : report.cells) {
      if (!cell.error.empty()) continue;
      try {
        if (cell.method == "jmdm" && !embedding_error.empty())
          throw std::runtime_error(embedding_error);
        const std::uint64_t seed = rng::derive(
            rng::derive(rng::derive(cfg.master_seed, cell.method),
                        cell.fraction.label),
            static_cast<std::uint64_t>(fold));
        const SelectionResult sel =
            run_method(cell.method, cell.k_star, seed, profiles,
                       &emb, fisher, sel_cfg);

        const Matrix train_sel = gather_columns(train_x, sel.selected);
        const Matrix test_sel = gather_columns(test_x, sel.selected);
        const std::vector<int> predicted =
            knn_predict(train_sel, train_y, test_sel, cfg.knn_k);
        int correct = 0;
        for (std::size_t i = 0; i < predicted.size(); ++i)
          if (predicted[i] == test_y[i]) ++correct;

        cell.fold_selections.push_back(sel.selected);
        cell.fold_accuracies.push_back(static_cast<double>(correct) /
                                       static_cast<double>(test_y.size()));
      } catch (const std::exception& e) {
        cell.error = "fold " + std::to_string(fold) + ": " + e.what();
        cell.fold_accuracies.clear();
        cell.fold_selections.clear();
      }
    }
  }

  for (auto& cell : report.cells) {
    if (!cell.error.empty() || cell.fold_accuracies.empty()) continue;
    double sum = 0;
    for (double a : cell.fold_accuracies) sum += a;
    cell.mean_accuracy = sum / static_cast<double>(cell.fold_accuracies.size());
  }
  return report;
}

}  // namespace jmdm
