// jmdm: JM-DM feature selection toolkit command line.
//
//   jmdm select     pick k features from a labeled CSV
//   jmdm embed      export the diffusion-map coordinates of the features
//   jmdm benchmark  cross-validated KNN comparison of selection methods
//
// stdout carries data, stderr carries diagnostics. Exit codes: 0 ok,
// 1 data/numeric error, 2 usage error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jmdm/dataset.hpp"
#include "jmdm/evaluation.hpp"
#include "jmdm/parallel.hpp"
#include "jmdm/selection.hpp"
#include "jmdm/separability.hpp"
#include "jmdm/spectral.hpp"

namespace {

struct CommonArgs {
  std::string data_path;
  std::string label_col = "label";
  std::string delimiter = ",";
  bool no_header = false;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--data", args.data_path, "dataset CSV path")->required();
  cmd->add_option("--label-col", args.label_col,
                  "label column: header name, or 0-based index");
  cmd->add_option("--delimiter", args.delimiter, "cell delimiter")
      ->check(CLI::Validator(
          [](std::string& s) {
            return s.size() == 1 ? "" : "delimiter must be one character";
          },
          "CHAR"));
  cmd->add_flag("--no-header", args.no_header, "file has no header row");
  cmd->add_option("--seed", args.seed, "RNG seed (env JMDM_SEED as fallback)")
      ->each([&args](const std::string&) { args.seed_given = true; });
  cmd->add_option("--threads", args.threads,
                  "max worker threads (0 = all available)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", args.out, "write output here instead of stdout");
}

void resolve_seed(CommonArgs& args) {
  if (args.seed_given) return;
  if (const char* env = std::getenv("JMDM_SEED"))
    args.seed = std::strtoull(env, nullptr, 10);
}

jmdm::LabeledDataset load(const CommonArgs& args) {
  jmdm::CsvOptions opts;
  opts.label_column = args.label_col;
  opts.delimiter = args.delimiter[0];
  opts.has_header = !args.no_header;
  return jmdm::load_csv(args.data_path, opts);
}

void emit(const CommonArgs& args, const std::string& text) {
  if (args.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(args.out);
  if (!f) throw std::runtime_error("cannot write " + args.out);
  f << text;
}

// k_star from --k or --fraction (exactly one).
int resolve_k(const jmdm::LabeledDataset& ds, std::optional<int> k,
              const std::string& fraction) {
  if (k && !fraction.empty())
    throw CLI::ValidationError("pass --k or --fraction, not both");
  if (k) return *k;
  if (fraction.empty())
    throw CLI::ValidationError("one of --k or --fraction is required");
  return jmdm::fraction_to_count(ds.feature_count(),
                                 jmdm::parse_fraction(fraction).value);
}

// Standardize the whole dataset (no CV here) and compute the per-feature
// class statistics the selection front ends share.
jmdm::ClassStats whole_dataset_stats(const jmdm::LabeledDataset& ds) {
  std::vector<int> all(ds.sample_count());
  for (int i = 0; i < ds.sample_count(); ++i) all[i] = i;
  const jmdm::Standardizer s = jmdm::fit_standardizer(ds.features, all);
  const jmdm::Matrix x = jmdm::apply_standardizer(s, ds.features);
  return jmdm::compute_class_stats(x, ds.labels, ds.class_count(), all);
}

int cmd_select(const CommonArgs& args, std::optional<int> k,
               const std::string& fraction, const std::string& method,
               const jmdm::SelectionConfig& sel_base,
               const jmdm::KernelConfig& kernel_cfg) {
  const jmdm::LabeledDataset ds = load(args);
  const int k_star = resolve_k(ds, k, fraction);

  jmdm::SelectionResult result;
  if (method == "jmdm") {
    const auto profiles = jmdm::compute_jm_profiles(whole_dataset_stats(ds));
    const auto markov =
        jmdm::build_markov(jmdm::flatten_profiles(profiles), kernel_cfg);
    const auto emb = jmdm::decompose(markov, kernel_cfg.dim);
    jmdm::SelectionConfig cfg = sel_base;
    cfg.k_star = k_star;
    cfg.kmeans_seed = args.seed;
    result = jmdm::select_jmdm(profiles, emb, cfg);
  } else if (method == "fisher") {
    result = jmdm::select_top_ranked(
        jmdm::fisher_scores(whole_dataset_stats(ds)), k_star, "fisher");
  } else if (method == "random") {
    result = jmdm::select_random(ds.feature_count(), k_star, args.seed);
  } else {
    throw CLI::ValidationError("unknown --method '" + method +
                               "' (valid: jmdm, fisher, random)");
  }
  emit(args, result.to_json().dump(2) + "\n");
  return 0;
}

int cmd_embed(const CommonArgs& args, const jmdm::KernelConfig& kernel_cfg) {
  const jmdm::LabeledDataset ds = load(args);
  const auto profiles = jmdm::compute_jm_profiles(whole_dataset_stats(ds));
  const auto markov =
      jmdm::build_markov(jmdm::flatten_profiles(profiles), kernel_cfg);
  const auto emb = jmdm::decompose(markov, kernel_cfg.dim);

  std::ostringstream out;
  out << "feature_index,mean_score";
  for (int l = 1; l <= emb.dim(); ++l) out << ",coord_" << l;
  out << "\n";
  out.precision(17);
  for (int i = 0; i < emb.point_count(); ++i) {
    out << i << "," << profiles[i].mean_score;
    for (int l = 0; l < emb.dim(); ++l) out << "," << emb.coordinates(i, l);
    out << "\n";
  }
  emit(args, out.str());
  return 0;
}

int cmd_benchmark(const CommonArgs& args, jmdm::EvalConfig eval_cfg,
                  const std::vector<std::string>& fractions,
                  const jmdm::SelectionConfig& sel_cfg,
                  const jmdm::KernelConfig& kernel_cfg,
                  const std::string& out_csv) {
  if (!fractions.empty()) {
    eval_cfg.fractions.clear();
    for (const auto& f : fractions)
      eval_cfg.fractions.push_back(jmdm::parse_fraction(f));
  }
  for (const auto& m : eval_cfg.methods)
    if (m != "jmdm" && m != "fisher" && m != "random")
      throw CLI::ValidationError("unknown method '" + m +
                                 "' (valid: jmdm, fisher, random)");
  eval_cfg.master_seed = args.seed;

  const jmdm::LabeledDataset ds = load(args);
  const jmdm::EvalReport report =
      jmdm::run_benchmark(ds, eval_cfg, sel_cfg, kernel_cfg);

  if (!args.out.empty()) {
    std::ofstream f(args.out);
    if (!f) throw std::runtime_error("cannot write " + args.out);
    f << report.to_json().dump(2) << "\n";
  }
  if (!out_csv.empty()) {
    std::ofstream f(out_csv);
    if (!f) throw std::runtime_error("cannot write " + out_csv);
    f << report.to_csv();
  }
  std::cout << report.format_table();

  for (const auto& cell : report.cells)
    if (!cell.error.empty())
      std::cerr << "warning: " << cell.method << " @ " << cell.fraction.label
                << " failed: " << cell.error << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"JM-DM feature selection toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  jmdm::SelectionConfig sel_cfg;
  jmdm::KernelConfig kernel_cfg;
  jmdm::EvalConfig eval_cfg;

  std::optional<int> k;
  std::string fraction;
  std::string method = "jmdm";
  std::vector<std::string> fractions;
  std::string out_csv;

  auto add_kernel = [&](CLI::App* cmd) {
    cmd->add_option("--dim", kernel_cfg.dim, "embedding dimensions")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--alpha", kernel_cfg.alpha,
                    "kernel density normalization power")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--epsilon-factor", kernel_cfg.epsilon_factor,
                    "multiplier on the kernel scale heuristic")
        ->check(CLI::PositiveNumber);
  };
  auto add_selection = [&](CLI::App* cmd) {
    cmd->add_option("--q", sel_cfg.q,
                    "quantile of low-separability features to drop")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--restarts", sel_cfg.kmeans_restarts, "k-means restarts")
        ->check(CLI::PositiveNumber);
  };

  CLI::App* select = app.add_subcommand("select", "select features");
  add_common(select, args);
  select->add_option("--k", k, "number of features to select")
      ->check(CLI::PositiveNumber);
  select->add_option("--fraction", fraction,
                     "fraction of features to select, e.g. 1/8 or 0.125");
  select->add_option("--method", method, "jmdm | fisher | random");
  add_kernel(select);
  add_selection(select);

  CLI::App* embed = app.add_subcommand("embed", "export DM coordinates");
  add_common(embed, args);
  add_kernel(embed);

  CLI::App* benchmark =
      app.add_subcommand("benchmark", "cross-validated KNN comparison");
  add_common(benchmark, args);
  benchmark->add_option("--methods", eval_cfg.methods,
                        "comma-separated selection methods")
      ->delimiter(',');
  benchmark->add_option("--fractions", fractions,
                        "comma-separated fractions, e.g. 1/8,1/16,1/32")
      ->delimiter(',');
  benchmark->add_option("--folds", eval_cfg.fold_count, "CV folds")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--knn-k", eval_cfg.knn_k, "KNN neighbor count")
      ->check(CLI::PositiveNumber);
  benchmark->add_option("--out-csv", out_csv, "also write the flat CSV here");
  add_kernel(benchmark);
  add_selection(benchmark);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    resolve_seed(args);
    jmdm::set_max_threads(args.threads);
    if (select->parsed())
      return cmd_select(args, k, fraction, method, sel_cfg, kernel_cfg);
    if (embed->parsed()) return cmd_embed(args, kernel_cfg);
    return cmd_benchmark(args, eval_cfg, fractions, sel_cfg, kernel_cfg,
                         out_csv);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
