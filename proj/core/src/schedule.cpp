// SPDX-License-Identifier: Apache-2.0
#include "prunelab/schedule.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace prunelab {

void validate(const TrainSchedule& s) {
  if (s.total_epochs <= 0)
    throw std::invalid_argument("schedule.total_epochs: must be positive");
  if (s.warmup_epochs < 0)
    throw std::invalid_argument("schedule.warmup_epochs: must be >= 0");
  if (s.warmup_epochs >= s.total_epochs)
    throw std::invalid_argument(
        "schedule.warmup_epochs: must be < total_epochs");
  if (!(s.peak_lr > 0))
    throw std::invalid_argument("schedule.peak_lr: must be positive");
  if (s.weight_decay < 0)
    throw std::invalid_argument("schedule.weight_decay: must be >= 0");
  if (!(s.beta1 > 0 && s.beta1 < 1))
    throw std::invalid_argument("schedule.beta1: must be in (0,1)");
  if (!(s.beta2 > 0 && s.beta2 < 1))
    throw std::invalid_argument("schedule.beta2: must be in (0,1)");
  if (s.batch_frames_cap <= 0)
    throw std::invalid_argument("schedule.batch_frames_cap: must be positive");
}

double lr_at(const TrainSchedule& s, double epoch) {
  if (epoch < 0 || epoch > double(s.total_epochs))
    throw std::out_of_range("lr_at: epoch " + std::to_string(epoch) +
                            " outside [0, " + std::to_string(s.total_epochs) +
                            "]");
  if (s.kind == ScheduleKind::Constant) return s.peak_lr;
  const double w = double(s.warmup_epochs);
  if (epoch < w) return s.peak_lr * (epoch / w);
  const double span = double(s.total_epochs) - w;
  const double x = (epoch - w) / span;
  return s.peak_lr * 0.5 * (1.0 + std::cos(std::numbers::pi * x));
}

}  // namespace prunelab
