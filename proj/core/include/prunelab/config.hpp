// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "prunelab/data.hpp"
#include "prunelab/model.hpp"
#include "prunelab/noise.hpp"
#include "prunelab/schedule.hpp"

namespace prunelab {

// Field-path-qualified configuration error ("schedule.peak_lr: ...").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PruneGridConfig {
  std::vector<double> sparsities = {0.0, 0.1, 0.2, 0.3, 0.4,
                                    0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<std::string> methods = {"naive", "finetune", "parp",  "lth",
                                      "lrr",   "iter-lth", "iter-lrr"};
  int rounds = 10;
  int round_epochs = 12;
  int finetune_epochs = 10;
  double finetune_lr = 1e-5;
  std::string iter_schedule = "linear";
};

// Everything that determines an experiment. Serialized next to results.
struct RunConfig {
  int hidden_dim = 24;
  int num_blocks = 2;
  int conv_kernel = 5;

  TrainSchedule schedule;

  DatasetSpec dataset;          // dataset.num_samples = train + test
  int train_samples = 2000;
  int test_samples = 200;

  bool augment_enabled = false;
  AugmentPolicy augment;
  SeverityTable severity;

  PruneGridConfig prune;

  std::vector<int> snapshot_epochs;        // empty -> derived default
  std::vector<int> rewind_epochs;          // empty -> snapshot schedule
  std::vector<double> ablate_sparsities = {0.2, 0.5, 0.8};

  std::string out_dir = "runs";
  std::uint64_t seed = 1;
};

// Model dims implied by the config (alphabet = graphemes + blank).
ModelConfig model_config_of(const RunConfig& cfg);

// Cross-field validation; throws ConfigError with a field path.
void validate(const RunConfig& cfg);

// Paper epoch grid {0,5,10,20,40,60,75} rescaled to `total_epochs`,
// deduplicated, always containing 0 and total_epochs.
std::vector<int> default_snapshot_epochs(int total_epochs);
std::vector<int> snapshot_epochs_of(const RunConfig& cfg);
std::vector<int> rewind_epochs_of(const RunConfig& cfg);

// JSON load/save. Accepts // comments; unknown keys are errors.
RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

// Canonical content digest and the run id derived from it.
std::string config_digest_hex(const RunConfig& cfg);
std::string run_id_of(const RunConfig& cfg);

}  // namespace prunelab
