// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace prunelab {

// Variable-length feature sequence: `frames` rows of `dim` float32 features,
// stored row-major.
struct FeatureSequence {
  int frames = 0;
  int dim = 0;
  std::vector<float> values;

  float& at(int t, int d) { return values[std::size_t(t) * dim + d]; }
  float at(int t, int d) const { return values[std::size_t(t) * dim + d]; }
};

// Grapheme transcript. Token ids live in [1, alphabet-1]; id 0 is reserved
// for the CTC blank and never appears here.
struct Transcript {
  std::vector<int> tokens;

  int length() const { return int(tokens.size()); }
  bool operator==(const Transcript&) const = default;
};

struct Sample {
  FeatureSequence features;
  Transcript transcript;
};

using Dataset = std::vector<Sample>;

}  // namespace prunelab
