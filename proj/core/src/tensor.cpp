// SPDX-License-Identifier: Apache-2.0
#include "prunelab/tensor.hpp"

#include <cstring>

namespace prunelab {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::size_t ModelState::total_param_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.size();
  return n;
}

std::size_t ModelState::prunable_param_count() const {
  std::size_t n = 0;
  for (const auto& p : params)
    if (p.prunable) n += p.size();
  return n;
}

const ParamTensor* ModelState::find(std::string_view name) const {
  for (const auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

ParamTensor* ModelState::find(std::string_view name) {
  for (auto& p : params)
    if (p.name == name) return &p;
  return nullptr;
}

bool bit_equal(const ModelState& a, const ModelState& b) {
  if (a.epoch_tag != b.epoch_tag || a.seed != b.seed ||
      a.params.size() != b.params.size())
    return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    const auto& x = a.params[i];
    const auto& y = b.params[i];
    if (x.name != y.name || x.shape != y.shape || x.prunable != y.prunable)
      return false;
    if (x.values.size() != y.values.size()) return false;
    if (!x.values.empty() &&
        std::memcmp(x.values.data(), y.values.data(),
                    x.values.size() * sizeof(float)) != 0)
      return false;
  }
  return true;
}

bool bit_equal_where(const ParamTensor& a, const ParamTensor& b,
                     const std::vector<std::uint8_t>& keep) {
  if (a.values.size() != b.values.size() || keep.size() != a.values.size())
    return false;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!keep[i]) continue;
    std::uint32_t ba, bb;
    std::memcpy(&ba, &a.values[i], 4);
    std::memcpy(&bb, &b.values[i], 4);
    if (ba != bb) return false;
  }
  return true;
}

}  // namespace prunelab
