// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "prunelab/rng.hpp"
#include "prunelab/sequence.hpp"

namespace prunelab {

// Feature-space corruption families. BW/GB/MB/P are the training-time
// ("seen") kinds; GN/C/VC are held out for evaluation only.
enum class NoiseKind { Clean, BW, GB, MB, P, GN, C, VC };

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);
std::vector<NoiseKind> all_noise_kinds();  // excludes Clean

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Clean;
  int level = 0;  // 0 = clean, 1..10 increasing severity
};

// Throws std::invalid_argument unless kind==Clean <=> level==0 and
// level is within [0, 10].
void validate(const NoiseSpec& spec);

// Per-level severity constants. Defaults are artifact-defined; every value
// can be overridden from the run config file.
struct SeverityTable {
  double gb_sigma_per_level = 0.35;  // GB: temporal Gaussian, sigma = s*level
  double mb_width_per_level = 0.7;   // MB: box width = 1 + floor(s*level)
  double p_stride_per_level = 0.5;   // P: hold stride = 1 + floor(s*level)
  double bw_blocks_per_level = 1.0;  // BW: block count = ceil(s*level)
  double bw_span_per_level = 1.0;    // BW: frame span cap = 1 + floor(s*level)
  double bw_dim_fraction = 0.25;     // BW: feature-dim block cap (fraction)
  double gn_sigma_per_level = 0.12;  // GN: additive Gaussian, sigma = s*level
  double contrast_step = 0.09;       // C: factor = 1 - step*level
};

struct AugmentPolicy {
  std::vector<NoiseKind> seen_kinds = {NoiseKind::BW, NoiseKind::GB,
                                       NoiseKind::MB, NoiseKind::P};
  bool include_clean = true;
  int time_mask_max_frames = 10;   // 0.4 s at 25 fps
  double time_mask_rate = 0.02;    // masks per frame of utterance length
};

void validate(const AugmentPolicy& policy);

// Applies the corruption. Same (seq, spec, seed, table) always gives the
// same output; shape is preserved by every kind.
FeatureSequence corrupt(const FeatureSequence& seq, const NoiseSpec& spec,
                        std::uint64_t seed,
                        const SeverityTable& table = SeverityTable{});

// Uniform draw over seen kinds plus clean (if included); non-clean levels
// uniform in [1, 10].
NoiseSpec sample_augmentation(const AugmentPolicy& policy, Rng& rng);

// Zeroes floor(rate * N) contiguous spans of length uniform in
// [1, time_mask_max_frames].
FeatureSequence time_mask(const FeatureSequence& seq,
                          const AugmentPolicy& policy, Rng& rng);

}  // namespace prunelab
