// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "prunelab/config.hpp"
#include "prunelab/noise.hpp"
#include "prunelab/sparse.hpp"

namespace prunelab {

// Deterministic train/test materialization from the config.
std::pair<Dataset, Dataset> make_datasets(const RunConfig& cfg);

std::filesystem::path run_dir_of(const RunConfig& cfg);

struct TrainDenseResult {
  std::string run_id;
  std::filesystem::path run_dir;
  double test_wer = 0.0;
  std::uint64_t final_digest = 0;
  bool resumed = false;  // snapshots were already complete
};

// Trains the dense model, storing snapshots on the schedule, telemetry and
// the final model artifact. Re-invocation with a complete run is a no-op.
TrainDenseResult cmd_train_dense(const RunConfig& cfg);

struct GridResult {
  std::filesystem::path report_csv;
  int cells_run = 0;
  int cells_skipped = 0;
  int failures = 0;  // per-cell errors recorded, grid continued
};

// Full (method x sparsity) comparison grid on the held-out test set.
// Requires a completed dense run for this config.
GridResult cmd_compare_methods(const RunConfig& cfg, int jobs = 1);

// One-shot generalized-rewind grid over (sparsity, rewind epoch).
GridResult cmd_ablate_rewind(const RunConfig& cfg, int jobs = 1);

// Evaluates saved models on the test set under every (kind, level) cell.
// `model_paths` point at model.ckpt files or directories holding one;
// empty means every model saved under the run's models/ directory.
GridResult cmd_eval_noise(const RunConfig& cfg,
                          std::vector<std::string> model_paths,
                          std::vector<NoiseKind> kinds = {}, int jobs = 1);

// Sparse kernel microbenchmark; writes CSV (size, sparsity, dense_ns,
// sparse_ns, speedup) and returns the reports.
std::vector<BenchReport> cmd_bench_sparse(
    const std::vector<std::size_t>& sizes,
    const std::vector<double>& sparsities, int repetitions,
    const std::filesystem::path& out_csv);

// Prints the tensor directory of a checkpoint, mask or dataset file.
void cmd_inspect(const std::filesystem::path& path, std::ostream& out);

}  // namespace prunelab
