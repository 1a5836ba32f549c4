// SPDX-License-Identifier: Apache-2.0
#include "prunelab/methods.hpp"

#include <cmath>
#include <stdexcept>

#include "prunelab/rng.hpp"

namespace prunelab {

const char* to_string(Recovery r) {
  switch (r) {
    case Recovery::Finetune: return "finetune";
    case Recovery::Parp: return "parp";
    case Recovery::Lth: return "lth";
    case Recovery::Lrr: return "lrr";
    case Recovery::Rewind: return "rewind";
  }
  return "?";
}

const char* to_string(IterSchedule s) {
  return s == IterSchedule::Linear ? "linear" : "geometric";
}

namespace {

void check_context(const PruneContext& ctx) {
  if (!ctx.train_data)
    throw std::invalid_argument("prune: context has no training data");
  validate(ctx.schedule);
}

std::uint64_t phase_seed(const PruneContext& ctx, const std::string& tag) {
  return ctx.train_seed ^ fnv1a64(tag);
}

TrainOptions retrain_options(const PruneContext& ctx, const PruneMask* mask,
                             const std::string& tag) {
  TrainOptions opts;
  opts.grad_mask = mask;
  opts.augment = ctx.augment;
  opts.severity = ctx.severity;
  opts.word_separator_token = ctx.word_separator_token;
  opts.run_seed = phase_seed(ctx, tag);
  opts.telemetry = ctx.telemetry;
  opts.hooks = ctx.hooks;
  return opts;
}

TrainSchedule constant_schedule(const TrainSchedule& base, int epochs,
                                double lr) {
  TrainSchedule s = base;
  s.kind = ScheduleKind::Constant;
  s.total_epochs = epochs;
  s.warmup_epochs = 0;
  s.peak_lr = lr;
  return s;
}

TrainSchedule round_schedule(const TrainSchedule& base, int round_epochs) {
  TrainSchedule s = base;
  s.total_epochs = round_epochs;
  s.warmup_epochs = std::min(
      round_epochs - 1,
      int(std::lround(double(base.warmup_epochs) * double(round_epochs) /
                      double(base.total_epochs))));
  return s;
}

}  // namespace

SparseModel naive_prune(const ModelState& dense, double target,
                        const std::string& source_run) {
  PruneMask mask = global_magnitude_mask(dense, target);
  SparseModel out;
  out.state = apply_mask(dense, mask);
  out.mask = std::move(mask);
  out.provenance = "naive@" + std::to_string(target) +
                   (source_run.empty() ? "" : ":src=" + source_run);
  return out;
}

SparseModel one_shot_prune(const SnapshotStore& snapshots, double target,
                           Recovery recovery, int rewind_epoch,
                           const PruneContext& ctx, const PruneOptions& opts) {
  check_context(ctx);
  const int T = ctx.schedule.total_epochs;
  const ModelState dense = snapshots.load(T);
  PruneMask mask = global_magnitude_mask(dense, target);

  const std::string tag = std::string("one-shot+") + to_string(recovery) +
                          "@" + std::to_string(target) +
                          (recovery == Recovery::Rewind
                               ? ",t=" + std::to_string(rewind_epoch)
                               : "") +
                          ":src=" + snapshots.run_id();

  ModelState start;
  TrainSchedule sched = ctx.schedule;
  const PruneMask* grad_mask = &mask;
  switch (recovery) {
    case Recovery::Finetune:
      start = apply_mask(dense, mask);
      sched = constant_schedule(ctx.schedule, opts.finetune_epochs,
                                opts.finetune_lr);
      break;
    case Recovery::Parp:
      start = apply_mask(dense, mask);
      sched = constant_schedule(ctx.schedule, opts.finetune_epochs,
                                opts.finetune_lr);
      grad_mask = nullptr;  // regrowth allowed during the interior phase
      break;
    case Recovery::Lth:
      start = apply_mask(snapshots.load(0), mask);
      break;
    case Recovery::Lrr:
      start = apply_mask(dense, mask);
      break;
    case Recovery::Rewind:
      start = apply_mask(snapshots.load(rewind_epoch), mask);
      break;
  }
  start.epoch_tag = 0;  // LR schedule restarts for every recovery

  TrainOptions topts = retrain_options(ctx, grad_mask, tag);
  ModelState trained = train(std::move(start), *ctx.train_data, sched, topts);

  SparseModel out;
  if (recovery == Recovery::Parp) {
    // Regrown weights are pruned back so the target sparsity holds exactly.
    PruneMask final_mask = global_magnitude_mask(trained, target);
    out.state = apply_mask(trained, final_mask);
    out.mask = std::move(final_mask);
  } else {
    out.state = std::move(trained);
    out.mask = std::move(mask);
  }
  out.provenance = tag;
  return out;
}

SparseModel iterative_prune(
    const SnapshotStore& snapshots, double target, int rounds,
    Recovery recovery, IterSchedule schedule_kind, const PruneContext& ctx,
    const PruneOptions& opts,
    const std::function<void(int round, const SparseModel&)>& on_round) {
  check_context(ctx);
  if (recovery != Recovery::Lth && recovery != Recovery::Lrr)
    throw std::invalid_argument(
        "iterative_prune: recovery must be lth or lrr");
  if (rounds < 1)
    throw std::invalid_argument("iterative_prune: rounds must be >= 1");
  if (!(target >= 0.0 && target < 1.0))
    throw std::invalid_argument("iterative_prune: target outside [0, 1)");
  if (opts.round_epochs < 1)
    throw std::invalid_argument("iterative_prune: round_epochs must be >= 1");

  const int T = ctx.schedule.total_epochs;
  const ModelState dense = snapshots.load(T);
  const std::size_t p = dense.prunable_param_count();
  const auto target_zeros = std::size_t(std::floor(target * double(p)));

  // Cumulative zero counts per executed round.
  std::vector<std::size_t> zeros_per_round;
  if (schedule_kind == IterSchedule::Linear) {
    // Equal steps of p/rounds, capped at the target count.
    for (int k = 1; k <= rounds; ++k) {
      const std::size_t z =
          std::min(std::size_t(k) * p / std::size_t(rounds), target_zeros);
      zeros_per_round.push_back(z);
      if (z == target_zeros) break;
    }
  } else {
    // Each round prunes 1/rounds of the remaining non-zeros.
    std::size_t z = 0;
    for (int k = 1; k <= rounds; ++k) {
      z += (p - z) / std::size_t(rounds);
      if (z >= target_zeros) {
        zeros_per_round.push_back(target_zeros);
        break;
      }
      zeros_per_round.push_back(z);
    }
  }
  if (zeros_per_round.empty() || zeros_per_round.back() != target_zeros)
    throw std::invalid_argument(
        "iterative_prune: schedule cannot reach target sparsity " +
        std::to_string(target) + " within " + std::to_string(rounds) +
        " rounds");

  ModelState init;
  if (recovery == Recovery::Lth) init = snapshots.load(0);

  const TrainSchedule rsched = round_schedule(ctx.schedule, opts.round_epochs);

  ModelState reference = dense;
  PruneMask mask = all_ones_mask(dense);
  SparseModel current;
  for (std::size_t k = 0; k < zeros_per_round.size(); ++k) {
    const int round = int(k) + 1;
    mask = global_magnitude_mask_count(reference, zeros_per_round[k], &mask);

    ModelState start = (recovery == Recovery::Lth)
                           ? apply_mask(init, mask)
                           : apply_mask(reference, mask);
    start.epoch_tag = 0;

    const std::string tag = std::string("iter+") + to_string(recovery) + "@" +
                            std::to_string(target) + ",round=" +
                            std::to_string(round) + ":src=" +
                            snapshots.run_id();
    TrainOptions topts = retrain_options(ctx, &mask, tag);
    reference = train(std::move(start), *ctx.train_data, rsched, topts);

    current.state = reference;
    current.mask = mask;
    current.provenance = tag;
    if (on_round) on_round(round, current);
  }
  return current;
}

}  // namespace prunelab
