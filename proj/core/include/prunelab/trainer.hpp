// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "prunelab/data.hpp"
#include "prunelab/mask.hpp"
#include "prunelab/model.hpp"
#include "prunelab/noise.hpp"
#include "prunelab/schedule.hpp"
#include "prunelab/wer.hpp"

namespace prunelab {

// Frame-budget batch: sample indices whose total frame count stays under
// the schedule's cap.
struct Batch {
  std::vector<std::size_t> indices;
  int total_frames = 0;
};

std::vector<Batch> pack_batches(const Dataset& data,
                                const std::vector<std::size_t>& order,
                                int batch_frames_cap);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double mean_loss = 0.0;
  double train_wer = 0.0;
};

struct TrainHooks {
  std::function<void(const ModelState&)> on_start;
  std::function<void(const ModelState&, int step)> after_step;
  std::function<void(const ModelState&, const EpochStats&)> after_epoch;
};

struct TrainOptions {
  const PruneMask* grad_mask = nullptr;   // pruned coordinates stay frozen
  const AugmentPolicy* augment = nullptr; // noise + time-mask augmentation
  SeverityTable severity;
  int word_separator_token = 12;
  std::uint64_t run_seed = 0;             // data order / augmentation streams
  int start_epoch = 0;
  std::ostream* telemetry = nullptr;      // per-epoch CSV rows
  TrainHooks hooks;
};

// Runs epochs [start_epoch, total_epochs). Gradients at masked-out
// positions are zeroed before every optimizer step, so masked parameters
// that start at zero remain exactly zero. Deterministic in
// (model, data, schedule, options).
ModelState train(ModelState model, const Dataset& data,
                 const TrainSchedule& schedule, const TrainOptions& options);

// Greedy-decode WER over a dataset, optionally under a corruption. The
// noise seed stream is keyed per sample index.
WerScore evaluate(const ModelState& model, const Dataset& data,
                  int word_separator_token,
                  const NoiseSpec& noise = NoiseSpec{},
                  std::uint64_t noise_seed = 0,
                  const SeverityTable& severity = SeverityTable{});

}  // namespace prunelab
