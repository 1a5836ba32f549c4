// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace prunelab {

// One named parameter tensor. Values are float32, the storage precision of
// the checkpoint format; all arithmetic on them happens in double.
// Prunable tensors are exactly the weight matrices of linear/convolutional
// layers (name suffix ".weight"); biases and normalization parameters are
// exempt.
struct ParamTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<float> values;
  bool prunable = false;

  std::size_t size() const { return values.size(); }
};

std::size_t shape_numel(const std::vector<std::size_t>& shape);

// Full set of model parameters at a point in training. epoch_tag counts
// completed training epochs; seed is the initialization seed.
struct ModelState {
  int epoch_tag = 0;
  std::uint64_t seed = 0;
  std::vector<ParamTensor> params;

  std::size_t total_param_count() const;
  std::size_t prunable_param_count() const;

  const ParamTensor* find(std::string_view name) const;
  ParamTensor* find(std::string_view name);
};

// Bitwise equality of every field, including float bit patterns.
bool bit_equal(const ModelState& a, const ModelState& b);

// Bitwise equality restricted to the given tensor entries where keep[i] != 0.
bool bit_equal_where(const ParamTensor& a, const ParamTensor& b,
                     const std::vector<std::uint8_t>& keep);

}  // namespace prunelab
