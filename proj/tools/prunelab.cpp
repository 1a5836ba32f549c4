// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: trains the dense reference model, runs the pruning
// method comparison, the rewind ablation, the noise robustness sweep and
// the sparse kernel benchmark.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "prunelab/config.hpp"
#include "prunelab/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitPartial = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "Run config (JSON)");
  cmd->add_option("--out", args.out_dir, "Output directory root");
  cmd->add_option("--seed", args.seed, "Override config seed")
      ->each([&](const std::string&) { args.seed_set = true; });
  cmd->add_option("--jobs", args.jobs, "Parallel grid cells")
      ->check(CLI::PositiveNumber);
}

prunelab::RunConfig resolve_config(const CommonArgs& args) {
  prunelab::RunConfig cfg;
  if (!args.config_path.empty())
    cfg = prunelab::load_config(args.config_path);
  if (args.seed_set) cfg.seed = args.seed;
  if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
  prunelab::validate(cfg);
  return cfg;
}

int report_grid(const char* name, const prunelab::GridResult& grid) {
  std::printf("%s: %d cells run, %d skipped, %d failed -> %s\n", name,
              grid.cells_run, grid.cells_skipped, grid.failures,
              grid.report_csv.string().c_str());
  if (grid.failures > 0) {
    std::fprintf(stderr, "%s: %d cell(s) failed, see errors.log\n", name,
                 grid.failures);
    return kExitPartial;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Magnitude-pruning laboratory for a small CTC sequence model"};
  app.require_subcommand(1);

  CommonArgs train_args;
  bool dump_dataset = false;
  auto* train_cmd =
      app.add_subcommand("train-dense", "Train the dense reference model");
  add_common(train_cmd, train_args);
  train_cmd->add_flag("--dump-dataset", dump_dataset,
                      "Export train/test sets into the run directory");

  CommonArgs compare_args;
  auto* compare_cmd = app.add_subcommand(
      "compare-methods", "Pruning method x sparsity comparison grid");
  add_common(compare_cmd, compare_args);

  CommonArgs ablate_args;
  auto* ablate_cmd = app.add_subcommand(
      "ablate-rewind", "One-shot rewind-epoch ablation grid");
  add_common(ablate_cmd, ablate_args);

  CommonArgs noise_args;
  std::vector<std::string> noise_models;
  std::vector<std::string> noise_kinds;
  auto* noise_cmd = app.add_subcommand(
      "eval-noise", "Evaluate models under corruption kinds and levels");
  add_common(noise_cmd, noise_args);
  noise_cmd->add_option("--model", noise_models,
                        "Model checkpoint or directory (repeatable)");
  noise_cmd->add_option("--kind", noise_kinds,
                        "Noise kind (BW GB MB P GN C VC); default all");

  std::vector<std::size_t> bench_sizes{256, 1024, 2048};
  std::vector<double> bench_sparsities{0.5, 0.8, 0.9, 0.95};
  int bench_reps = 20;
  std::string bench_out = "bench_spmv.csv";
  auto* bench_cmd = app.add_subcommand(
      "bench-sparse", "Dense vs CSR matvec microbenchmark");
  bench_cmd->add_option("--size", bench_sizes, "Matrix sizes (n >= 64)");
  bench_cmd->add_option("--sparsity", bench_sparsities, "Sparsity levels");
  bench_cmd->add_option("--reps", bench_reps, "Repetitions per cell");
  bench_cmd->add_option("--out", bench_out, "Output CSV path");

  std::string inspect_path;
  auto* inspect_cmd = app.add_subcommand(
      "inspect", "Print the directory of a checkpoint/mask/dataset file");
  inspect_cmd->add_option("file", inspect_path, "File to inspect")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const auto cfg = resolve_config(train_args);
      const auto res = prunelab::cmd_train_dense(cfg);
      if (dump_dataset) {
        auto [train_set, test_set] = prunelab::make_datasets(cfg);
        auto spec = cfg.dataset;
        spec.num_samples = int(train_set.size());
        prunelab::save_dataset(res.run_dir / "train.plds", spec, train_set);
        spec.num_samples = int(test_set.size());
        prunelab::save_dataset(res.run_dir / "test.plds", spec, test_set);
      }
      std::printf("%s %s: test WER %.2f%% (digest %016llx)\n",
                  res.resumed ? "resumed" : "trained", res.run_id.c_str(),
                  res.test_wer * 100.0,
                  static_cast<unsigned long long>(res.final_digest));
      return kExitOk;
    }
    if (compare_cmd->parsed()) {
      const auto cfg = resolve_config(compare_args);
      return report_grid("compare-methods",
                         prunelab::cmd_compare_methods(cfg, compare_args.jobs));
    }
    if (ablate_cmd->parsed()) {
      const auto cfg = resolve_config(ablate_args);
      return report_grid("ablate-rewind",
                         prunelab::cmd_ablate_rewind(cfg, ablate_args.jobs));
    }
    if (noise_cmd->parsed()) {
      const auto cfg = resolve_config(noise_args);
      std::vector<prunelab::NoiseKind> kinds;
      for (const auto& k : noise_kinds)
        kinds.push_back(prunelab::noise_kind_from_string(k));
      return report_grid(
          "eval-noise", prunelab::cmd_eval_noise(cfg, noise_models, kinds,
                                                 noise_args.jobs));
    }
    if (bench_cmd->parsed()) {
      const auto reports = prunelab::cmd_bench_sparse(
          bench_sizes, bench_sparsities, bench_reps, bench_out);
      for (const auto& r : reports)
        std::printf("n=%zu sp=%.2f dense=%.0fns sparse=%.0fns speedup=%.2f%s\n",
                    r.size, r.sparsity, r.dense_ns, r.sparse_ns, r.speedup,
                    r.checksum_equal ? "" : "  CHECKSUM MISMATCH");
      return kExitOk;
    }
    if (inspect_cmd->parsed()) {
      prunelab::cmd_inspect(inspect_path, std::cout);
      return kExitOk;
    }
  } catch (const prunelab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return kExitOk;
}
