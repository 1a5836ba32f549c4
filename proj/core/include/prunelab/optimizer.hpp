// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "prunelab/model.hpp"
#include "prunelab/tensor.hpp"

namespace prunelab {

struct AdamWConfig {
  double beta1 = 0.9;
  double beta2 = 0.98;
  double eps = 1e-8;
  double weight_decay = 0.0;
};

// AdamW with decoupled weight decay and bias-corrected moments. Moments are
// kept in double per parameter; rewinding a model discards the optimizer, so
// a fresh instance starts with zero moments and step count 0.
class AdamW {
 public:
  AdamW(const ModelState& shape_ref, AdamWConfig cfg);

  // Applies one update in place. Throws std::invalid_argument when the
  // gradient set is not keyed like the state.
  void step(ModelState& state, const GradientSet& grads, double lr);

  int step_count() const { return step_count_; }
  const AdamWConfig& config() const { return cfg_; }

 private:
  AdamWConfig cfg_;
  int step_count_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace prunelab
