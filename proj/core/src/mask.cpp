// SPDX-License-Identifier: Apache-2.0
#include "prunelab/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "io_util.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

std::size_t PruneMask::total_entries() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.keep.size();
  return n;
}

std::size_t PruneMask::zero_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors)
    for (auto k : t.keep) n += (k == 0);
  return n;
}

const MaskTensor* PruneMask::find(std::string_view name) const {
  for (const auto& t : tensors)
    if (t.name == name) return &t;
  return nullptr;
}

bool PruneMask::matches(const ModelState& state) const {
  std::size_t i = 0;
  for (const auto& p : state.params) {
    if (!p.prunable) continue;
    if (i >= tensors.size()) return false;
    const auto& m = tensors[i];
    if (m.name != p.name || m.shape != p.shape ||
        m.keep.size() != p.values.size())
      return false;
    ++i;
  }
  return i == tensors.size();
}

double sparsity_of(const PruneMask& mask) {
  const std::size_t total = mask.total_entries();
  if (total == 0) return 0.0;
  return double(mask.zero_count()) / double(total);
}

PruneMask all_ones_mask(const ModelState& state) {
  PruneMask mask;
  for (const auto& p : state.params) {
    if (!p.prunable) continue;
    mask.tensors.push_back({p.name, p.shape,
                            std::vector<std::uint8_t>(p.values.size(), 1)});
  }
  return mask;
}

PruneMask global_magnitude_mask_count(const ModelState& state,
                                      std::size_t zero_count,
                                      const PruneMask* existing) {
  PruneMask mask = all_ones_mask(state);
  if (existing) {
    if (!existing->matches(state))
      throw std::invalid_argument(
          "global_magnitude_mask: existing mask does not match state");
    mask = *existing;
    if (existing->zero_count() > zero_count)
      throw std::invalid_argument(
          "global_magnitude_mask: target below existing sparsity");
  }
  if (zero_count > mask.total_entries())
    throw std::invalid_argument("global_magnitude_mask: count exceeds entries");

  const std::size_t need = zero_count - mask.zero_count();
  if (need == 0) return mask;

  struct Entry {
    float magnitude;
    std::uint32_t tensor;
    std::uint32_t index;
  };
  std::vector<Entry> candidates;
  candidates.reserve(mask.total_entries() - mask.zero_count());

  std::size_t mi = 0;
  for (const auto& p : state.params) {
    if (!p.prunable) continue;
    const auto& keep = mask.tensors[mi].keep;
    for (std::size_t j = 0; j < p.values.size(); ++j) {
      if (!keep[j]) continue;
      const float v = p.values[j];
      if (!std::isfinite(v))
        throw std::runtime_error("global_magnitude_mask: non-finite weight in " +
                                 p.name);
      candidates.push_back(
          {std::fabs(v), std::uint32_t(mi), std::uint32_t(j)});
    }
    ++mi;
  }

  // Lowest magnitude first; ties by (tensor order, flat index) ascending.
  auto cmp = [](const Entry& a, const Entry& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    if (a.tensor != b.tensor) return a.tensor < b.tensor;
    return a.index < b.index;
  };
  if (need < candidates.size()) {
    std::nth_element(candidates.begin(), candidates.begin() + long(need),
                     candidates.end(), cmp);
    std::sort(candidates.begin(), candidates.begin() + long(need), cmp);
  } else {
    std::sort(candidates.begin(), candidates.end(), cmp);
  }
  for (std::size_t i = 0; i < need; ++i)
    mask.tensors[candidates[i].tensor].keep[candidates[i].index] = 0;
  return mask;
}

PruneMask global_magnitude_mask(const ModelState& state, double target,
                                const PruneMask* existing) {
  if (!(target >= 0.0 && target < 1.0))
    throw std::invalid_argument(
        "global_magnitude_mask: target sparsity outside [0, 1)");
  const std::size_t p = state.prunable_param_count();
  const auto zeros = std::size_t(std::floor(target * double(p)));
  if (existing && sparsity_of(*existing) > target)
    throw std::invalid_argument(
        "global_magnitude_mask: target below existing sparsity");
  return global_magnitude_mask_count(state, zeros, existing);
}

void apply_mask_inplace(ModelState& state, const PruneMask& mask) {
  if (!mask.matches(state))
    throw std::invalid_argument("apply_mask: mask does not match state");
  std::size_t mi = 0;
  for (auto& p : state.params) {
    if (!p.prunable) continue;
    const auto& keep = mask.tensors[mi].keep;
    for (std::size_t j = 0; j < p.values.size(); ++j)
      if (!keep[j]) p.values[j] = 0.0f;
    ++mi;
  }
}

ModelState apply_mask(const ModelState& state, const PruneMask& mask) {
  ModelState out = state;
  apply_mask_inplace(out, mask);
  return out;
}

void zero_pruned_grads(GradientSet& grads, const PruneMask& mask) {
  for (const auto& t : mask.tensors) {
    auto& g = grads[grads.index_of(t.name)];
    if (g.size() != t.keep.size())
      throw std::invalid_argument("zero_pruned_grads: shape mismatch for " +
                                  t.name);
    for (std::size_t j = 0; j < g.size(); ++j)
      if (!t.keep[j]) g[j] = 0.0;
  }
}

ParamCount effective_param_count(const ModelState& state,
                                 const PruneMask& mask) {
  if (!mask.matches(state))
    throw std::invalid_argument("effective_param_count: mask mismatch");
  ParamCount c;
  c.total = state.total_param_count();
  const std::size_t prunable = state.prunable_param_count();
  c.nonzero = (c.total - prunable) + (prunable - mask.zero_count());
  return c;
}

void save_mask(const std::filesystem::path& path, const PruneMask& mask) {
  io::ByteWriter w;
  w.bytes("PLMASK01", 8);
  w.u32(std::uint32_t(mask.tensors.size()));
  for (const auto& t : mask.tensors) {
    w.str(t.name);
    w.u8(std::uint8_t(t.shape.size()));
    for (auto d : t.shape) w.u64(d);
    std::vector<std::uint8_t> packed((t.keep.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < t.keep.size(); ++i)
      if (t.keep[i]) packed[i / 8] |= std::uint8_t(1u << (i % 8));
    w.bytes(packed.data(), packed.size());
  }
  const std::uint64_t digest = fnv1a64(w.data());
  io::ByteWriter trailer;
  trailer.u64(digest);
  io::write_file(path.string(), w.data() + trailer.data());
}

PruneMask load_mask(const std::filesystem::path& path) {
  std::string raw = io::read_file(path.string());
  if (raw.size() < 16 || std::string_view(raw).substr(0, 8) != "PLMASK01")
    throw std::runtime_error("not a mask file: " + path.string());
  const std::string payload = raw.substr(0, raw.size() - 8);
  io::ByteReader tail(raw.substr(raw.size() - 8));
  if (tail.u64() != fnv1a64(payload))
    throw std::runtime_error("mask checksum mismatch: " + path.string());

  io::ByteReader r(payload);
  (void)r.u64();  // magic
  PruneMask mask;
  const std::uint32_t count = r.u32();
  for (std::uint32_t i = 0; i < count; ++i) {
    MaskTensor t;
    t.name = r.str();
    const int rank = r.u8();
    t.shape.resize(rank);
    std::size_t n = 1;
    for (int d = 0; d < rank; ++d) {
      t.shape[d] = r.u64();
      n *= t.shape[d];
    }
    t.keep.assign(n, 0);
    std::vector<std::uint8_t> packed((n + 7) / 8);
    for (auto& b : packed) b = r.u8();
    for (std::size_t j = 0; j < n; ++j)
      t.keep[j] = (packed[j / 8] >> (j % 8)) & 1u;
    mask.tensors.push_back(std::move(t));
  }
  return mask;
}

}  // namespace prunelab
