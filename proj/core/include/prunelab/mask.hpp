// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "prunelab/model.hpp"
#include "prunelab/tensor.hpp"

namespace prunelab {

// Binary keep/prune mask over one prunable tensor. keep[i] is 0 or 1.
struct MaskTensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<std::uint8_t> keep;
};

// Mask over exactly the prunable tensors of a model, in state order.
struct PruneMask {
  std::vector<MaskTensor> tensors;

  std::size_t total_entries() const;
  std::size_t zero_count() const;
  const MaskTensor* find(std::string_view name) const;

  // True when this mask covers exactly the prunable tensors of `state`,
  // same order, same shapes.
  bool matches(const ModelState& state) const;
};

// Zero fraction over prunable entries.
double sparsity_of(const PruneMask& mask);

PruneMask all_ones_mask(const ModelState& state);

// Global unstructured magnitude mask: prunes the floor(target * p) smallest
// magnitudes across all prunable tensors jointly. Ties break by (tensor
// order, flat index) ascending, lower index pruned first. With `existing`,
// its zeros are preserved (mask nesting) and target must not be below its
// sparsity. Throws std::invalid_argument on a target outside [0, 1).
PruneMask global_magnitude_mask(const ModelState& state, double target,
                                const PruneMask* existing = nullptr);

// Count-exact variant used by schedules that derive counts arithmetically.
PruneMask global_magnitude_mask_count(const ModelState& state,
                                      std::size_t zero_count,
                                      const PruneMask* existing = nullptr);

// Element-wise product on prunable tensors; all others untouched.
ModelState apply_mask(const ModelState& state, const PruneMask& mask);
void apply_mask_inplace(ModelState& state, const PruneMask& mask);

// Zeroes gradient entries at pruned positions.
void zero_pruned_grads(GradientSet& grads, const PruneMask& mask);

struct ParamCount {
  std::size_t total = 0;
  std::size_t nonzero = 0;
};

// nonzero = unprunable parameters + kept mask entries; total = p.
ParamCount effective_param_count(const ModelState& state,
                                 const PruneMask& mask);

// Bitset serialization with a name/shape directory and trailing checksum.
void save_mask(const std::filesystem::path& path, const PruneMask& mask);
PruneMask load_mask(const std::filesystem::path& path);

}  // namespace prunelab
