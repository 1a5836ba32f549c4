// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include "prunelab/checkpoint.hpp"
#include "prunelab/mask.hpp"
#include "prunelab/noise.hpp"
#include "prunelab/schedule.hpp"
#include "prunelab/trainer.hpp"

namespace prunelab {

// How kept weights recover after pruning.
//   Finetune: short constant-LR training of the kept weights.
//   Parp:     short constant-LR training with regrowth allowed, then a
//             final magnitude prune back to target.
//   Lth:      kept weights rewound to their initial values, full retrain.
//   Lrr:      kept weights stay at their trained values, LR schedule
//             restarts, full retrain.
//   Rewind:   kept weights rewound to the snapshot at an arbitrary epoch t,
//             LR schedule restarts, full retrain.
enum class Recovery { Finetune, Parp, Lth, Lrr, Rewind };

enum class IterSchedule { Linear, Geometric };

const char* to_string(Recovery r);
const char* to_string(IterSchedule s);

struct SparseModel {
  ModelState state;
  PruneMask mask;
  std::string provenance;
};

// Shared inputs for every recovery that retrains.
struct PruneContext {
  const Dataset* train_data = nullptr;
  TrainSchedule schedule;                  // the dense run's schedule
  const AugmentPolicy* augment = nullptr;  // retraining uses the same policy
  SeverityTable severity;
  int word_separator_token = 12;
  std::uint64_t train_seed = 0;
  std::ostream* telemetry = nullptr;
  TrainHooks hooks;  // forwarded to every retraining phase
};

struct PruneOptions {
  int finetune_epochs = 10;
  double finetune_lr = 1e-5;
  int round_epochs = 12;  // retraining epochs per iterative round
};

// Masks the trained dense model at the target sparsity; kept weights are
// bit-identical to the dense weights, no retraining.
SparseModel naive_prune(const ModelState& dense, double target,
                        const std::string& source_run = "");

// One-shot prune of the dense model followed by one recovery phase. The
// mask always comes from the final dense weights; `rewind_epoch` selects
// the snapshot seeding retraining when recovery == Rewind.
SparseModel one_shot_prune(const SnapshotStore& snapshots, double target,
                           Recovery recovery, int rewind_epoch,
                           const PruneContext& ctx,
                           const PruneOptions& opts = {});

// Iterative prune/retrain rounds with nested masks. Linear prunes 1/rounds
// of all prunable weights per round (capped at target); Geometric prunes
// 1/rounds of the remaining non-zeros per round and fails upfront when the
// target is unreachable within `rounds`. Recovery must be Lth or Lrr.
// `on_round` sees every intermediate sparse model.
SparseModel iterative_prune(
    const SnapshotStore& snapshots, double target, int rounds,
    Recovery recovery, IterSchedule schedule_kind, const PruneContext& ctx,
    const PruneOptions& opts = {},
    const std::function<void(int round, const SparseModel&)>& on_round = {});

}  // namespace prunelab
