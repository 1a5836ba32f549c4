// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace prunelab {

enum class ScheduleKind {
  WarmupCosine,  // linear ramp 0 -> peak, then half-cosine decay to 0
  Constant,      // peak_lr at every epoch (used by finetune recovery)
};

struct TrainSchedule {
  int total_epochs = 40;
  int warmup_epochs = 3;
  double peak_lr = 3e-3;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.98;
  int batch_frames_cap = 2400;
  ScheduleKind kind = ScheduleKind::WarmupCosine;
};

// Throws std::invalid_argument naming the offending field.
void validate(const TrainSchedule& s);

// Learning rate at a (possibly fractional) epoch in [0, total_epochs].
// Throws std::out_of_range outside that interval.
double lr_at(const TrainSchedule& s, double epoch);

}  // namespace prunelab
