// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prunelab/sequence.hpp"
#include "prunelab/tensor.hpp"

namespace prunelab {

// Architecture of the prunable sequence model:
//   1D convolution frontend (stride 1, zero padding, odd kernel)
//   -> num_blocks x { linear H->2H, gated-linear unit, residual, layernorm }
//   -> linear head to alphabet_size logits per frame.
// alphabet_size counts graphemes plus the blank symbol.
struct ModelConfig {
  int feature_dim = 12;
  int hidden_dim = 24;
  int num_blocks = 2;
  int alphabet_size = 13;
  int conv_kernel = 5;

  bool operator==(const ModelConfig&) const = default;
};

// Throws std::invalid_argument naming the offending field.
void validate(const ModelConfig& cfg);

// Closed-form parameter count implied by the architecture.
std::size_t expected_param_count(const ModelConfig& cfg);

// Deterministic initialization: weights uniform in +/- sqrt(1/fan_in),
// biases zero, layernorm gain 1 / shift 0. Identical (config, seed) pairs
// produce bit-identical states.
ModelState init_model(const ModelConfig& cfg, std::uint64_t seed);

// Recovers the configuration from tensor names and shapes, so a checkpoint
// is self-describing. Throws if the state does not look like this model.
ModelConfig config_of(const ModelState& state);

// Per-frame log-probabilities, row-major frames x alphabet. Every row
// exponentiates and sums to 1.
struct LogProbs {
  int frames = 0;
  int alphabet = 0;
  std::vector<double> v;

  double at(int t, int k) const { return v[std::size_t(t) * alphabet + k]; }
};

// Gradient per parameter tensor, stored in double and aligned with
// ModelState::params order.
class GradientSet {
 public:
  GradientSet() = default;
  explicit GradientSet(const ModelState& shape_ref);

  void zero();
  void scale(double s);

  std::size_t tensor_count() const { return grads_.size(); }
  std::vector<double>& operator[](std::size_t i) { return grads_[i]; }
  const std::vector<double>& operator[](std::size_t i) const { return grads_[i]; }

  const std::string& name(std::size_t i) const { return names_[i]; }
  // Index of a tensor by name; throws if absent.
  std::size_t index_of(std::string_view name) const;

  // True when names and element counts mirror the given state.
  bool matches(const ModelState& state) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> grads_;
};

// Activations recorded by forward() for use in backward().
struct ForwardTrace {
  int frames = 0;
  std::vector<double> input;       // frames x F
  std::vector<double> conv_out;    // frames x H
  // Per block: input, pre-activation (frames x 2H), pre-norm sum, norm stats.
  std::vector<std::vector<double>> block_in;    // frames x H
  std::vector<std::vector<double>> block_pre;   // frames x 2H
  std::vector<std::vector<double>> block_sum;   // frames x H (residual + glu)
  std::vector<std::vector<double>> norm_xhat;   // frames x H
  std::vector<std::vector<double>> norm_rstd;   // frames
  std::vector<double> final_out;   // frames x H (head input)
  LogProbs logprobs;
};

// Forward pass over one sequence. Throws std::invalid_argument on a
// feature-dimension mismatch. Pure: identical inputs give identical outputs.
LogProbs forward(const ModelState& state, const FeatureSequence& seq);

// Forward pass that also records activations for backward().
LogProbs forward(const ModelState& state, const FeatureSequence& seq,
                 ForwardTrace& trace);

// Accumulates d(loss)/d(parameter) into `grads` given d(loss)/d(logprob).
// `dlogprob` is row-major frames x alphabet, matching trace.logprobs.
void backward(const ModelState& state, const ForwardTrace& trace,
              const std::vector<double>& dlogprob, GradientSet& grads);

}  // namespace prunelab
