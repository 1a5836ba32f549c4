// SPDX-License-Identifier: Apache-2.0
#include "prunelab/noise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace prunelab {

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::Clean: return "CLEAN";
    case NoiseKind::BW: return "BW";
    case NoiseKind::GB: return "GB";
    case NoiseKind::MB: return "MB";
    case NoiseKind::P: return "P";
    case NoiseKind::GN: return "GN";
    case NoiseKind::C: return "C";
    case NoiseKind::VC: return "VC";
  }
  return "?";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  for (NoiseKind k :
       {NoiseKind::Clean, NoiseKind::BW, NoiseKind::GB, NoiseKind::MB,
        NoiseKind::P, NoiseKind::GN, NoiseKind::C, NoiseKind::VC})
    if (name == to_string(k)) return k;
  throw std::invalid_argument("unknown noise kind: " + name);
}

std::vector<NoiseKind> all_noise_kinds() {
  return {NoiseKind::BW, NoiseKind::GB, NoiseKind::MB, NoiseKind::P,
          NoiseKind::GN, NoiseKind::C,  NoiseKind::VC};
}

void validate(const NoiseSpec& spec) {
  if (spec.level < 0 || spec.level > 10)
    throw std::invalid_argument("NoiseSpec.level: outside [0, 10]");
  if ((spec.kind == NoiseKind::Clean) != (spec.level == 0))
    throw std::invalid_argument("NoiseSpec: CLEAN iff level 0");
}

void validate(const AugmentPolicy& policy) {
  if (policy.seen_kinds.empty())
    throw std::invalid_argument("AugmentPolicy.seen_kinds: must be non-empty");
  for (NoiseKind k : policy.seen_kinds)
    if (k == NoiseKind::Clean)
      throw std::invalid_argument(
          "AugmentPolicy.seen_kinds: CLEAN is implicit, not a kind");
  if (policy.time_mask_max_frames < 1)
    throw std::invalid_argument(
        "AugmentPolicy.time_mask_max_frames: must be >= 1");
  if (policy.time_mask_rate < 0)
    throw std::invalid_argument("AugmentPolicy.time_mask_rate: must be >= 0");
}

namespace {

FeatureSequence gaussian_blur(const FeatureSequence& in, double sigma) {
  const int radius = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i)
    kernel[i + radius] = std::exp(-0.5 * double(i) * double(i) / (sigma * sigma));

  FeatureSequence out = in;
  for (int t = 0; t < in.frames; ++t) {
    const int lo = std::max(0, t - radius), hi = std::min(in.frames - 1, t + radius);
    double wsum = 0.0;
    for (int u = lo; u <= hi; ++u) wsum += kernel[u - t + radius];
    for (int d = 0; d < in.dim; ++d) {
      double acc = 0.0;
      for (int u = lo; u <= hi; ++u)
        acc += kernel[u - t + radius] * double(in.at(u, d));
      out.at(t, d) = float(acc / wsum);
    }
  }
  return out;
}

FeatureSequence motion_blur(const FeatureSequence& in, int width) {
  FeatureSequence out = in;
  for (int t = 0; t < in.frames; ++t) {
    const int lo = std::max(0, t - width + 1);
    const int n = t - lo + 1;
    for (int d = 0; d < in.dim; ++d) {
      double acc = 0.0;
      for (int u = lo; u <= t; ++u) acc += double(in.at(u, d));
      out.at(t, d) = float(acc / n);
    }
  }
  return out;
}

FeatureSequence pixelate(const FeatureSequence& in, int stride) {
  FeatureSequence out = in;
  for (int t = 0; t < in.frames; ++t) {
    const int src = (t / stride) * stride;
    for (int d = 0; d < in.dim; ++d) out.at(t, d) = in.at(src, d);
  }
  return out;
}

FeatureSequence block_dropout(const FeatureSequence& in, int level,
                              const SeverityTable& tab, Rng& rng) {
  FeatureSequence out = in;
  const int blocks = int(std::ceil(tab.bw_blocks_per_level * level));
  const int span_cap =
      std::min(in.frames, 1 + int(std::floor(tab.bw_span_per_level * level)));
  const int dim_cap = std::max(1, int(std::floor(tab.bw_dim_fraction * in.dim)));
  for (int b = 0; b < blocks; ++b) {
    const int span = int(rng.uniform_int(1, span_cap));
    const int t0 = int(rng.uniform_int(0, in.frames - span));
    const int dlen = int(rng.uniform_int(1, dim_cap));
    const int d0 = int(rng.uniform_int(0, in.dim - dlen));
    for (int t = t0; t < t0 + span; ++t)
      for (int d = d0; d < d0 + dlen; ++d) out.at(t, d) = 0.0f;
  }
  return out;
}

FeatureSequence add_gaussian(const FeatureSequence& in, double sigma, Rng& rng) {
  FeatureSequence out = in;
  for (auto& v : out.values) v = float(double(v) + sigma * rng.gaussian());
  return out;
}

FeatureSequence contrast(const FeatureSequence& in, double factor) {
  FeatureSequence out = in;
  for (int d = 0; d < in.dim; ++d) {
    double mean = 0.0;
    for (int t = 0; t < in.frames; ++t) mean += double(in.at(t, d));
    mean /= in.frames;
    for (int t = 0; t < in.frames; ++t)
      out.at(t, d) = float(mean + (double(in.at(t, d)) - mean) * factor);
  }
  return out;
}

FeatureSequence quantize(const FeatureSequence& in, int level) {
  const int bits = 9 - int(std::ceil(double(level) * 0.8));
  const long bins = 1L << bits;
  float lo = in.values.empty() ? 0.0f : in.values[0];
  float hi = lo;
  for (float v : in.values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(hi > lo)) return in;
  const double width = (double(hi) - double(lo)) / double(bins);
  FeatureSequence out = in;
  for (auto& v : out.values) {
    long idx = long(std::floor((double(v) - double(lo)) / width));
    idx = std::clamp(idx, 0L, bins - 1);
    v = float(double(lo) + (double(idx) + 0.5) * width);
  }
  return out;
}

}  // namespace

FeatureSequence corrupt(const FeatureSequence& seq, const NoiseSpec& spec,
                        std::uint64_t seed, const SeverityTable& table) {
  validate(spec);
  if (spec.level == 0) return seq;
  if (seq.frames <= 0) return seq;

  Rng rng(seed, std::string("corrupt/") + to_string(spec.kind),
          std::uint64_t(spec.level));
  switch (spec.kind) {
    case NoiseKind::GB:
      return gaussian_blur(seq, table.gb_sigma_per_level * spec.level);
    case NoiseKind::MB:
      return motion_blur(
          seq, 1 + int(std::floor(table.mb_width_per_level * spec.level)));
    case NoiseKind::P:
      return pixelate(
          seq, 1 + int(std::floor(table.p_stride_per_level * spec.level)));
    case NoiseKind::BW:
      return block_dropout(seq, spec.level, table, rng);
    case NoiseKind::GN:
      return add_gaussian(seq, table.gn_sigma_per_level * spec.level, rng);
    case NoiseKind::C:
      return contrast(seq, 1.0 - table.contrast_step * spec.level);
    case NoiseKind::VC:
      return quantize(seq, spec.level);
    case NoiseKind::Clean:
      return seq;
  }
  throw std::invalid_argument("corrupt: unknown noise kind");
}

NoiseSpec sample_augmentation(const AugmentPolicy& policy, Rng& rng) {
  validate(policy);
  const int menu = int(policy.seen_kinds.size()) + (policy.include_clean ? 1 : 0);
  const int pick = int(rng.uniform_int(0, menu - 1));
  if (policy.include_clean && pick == int(policy.seen_kinds.size()))
    return NoiseSpec{NoiseKind::Clean, 0};
  return NoiseSpec{policy.seen_kinds[pick], int(rng.uniform_int(1, 10))};
}

FeatureSequence time_mask(const FeatureSequence& seq,
                          const AugmentPolicy& policy, Rng& rng) {
  validate(policy);
  FeatureSequence out = seq;
  const int n_masks = int(std::floor(policy.time_mask_rate * seq.frames));
  for (int m = 0; m < n_masks; ++m) {
    const int len =
        int(rng.uniform_int(1, std::min(policy.time_mask_max_frames, seq.frames)));
    const int t0 = int(rng.uniform_int(0, seq.frames - len));
    for (int t = t0; t < t0 + len; ++t)
      for (int d = 0; d < seq.dim; ++d) out.at(t, d) = 0.0f;
  }
  return out;
}

}  // namespace prunelab
