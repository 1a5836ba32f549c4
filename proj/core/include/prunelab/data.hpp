// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "prunelab/sequence.hpp"

namespace prunelab {

// Recipe for the synthetic corpus. The seed fully determines the dataset.
// Transcripts are words of grapheme tokens joined by the separator token;
// every token (separators included) is emitted as a run of frames around a
// per-token prototype vector, with linear interpolation between the
// prototypes of adjacent tokens and i.i.d. Gaussian jitter on top.
struct DatasetSpec {
  int num_samples = 2200;
  int alphabet_size = 12;        // grapheme ids 1..alphabet_size; 0 is blank
  int word_separator_token = 12;
  int words_min = 3;
  int words_max = 8;
  int word_tokens_min = 1;
  int word_tokens_max = 4;
  int frames_per_token_min = 2;
  int frames_per_token_max = 6;
  int feature_dim = 12;
  float emission_noise_std = 0.3f;
  std::uint64_t seed = 1234;

  bool operator==(const DatasetSpec&) const = default;
};

// Throws std::invalid_argument naming the offending field.
void validate(const DatasetSpec& spec);

// Token prototypes, index 0 unused (blank emits nothing). When
// alphabet_size <= feature_dim the prototypes are mutually orthogonal with
// equal norm, which makes the clean task exactly recoverable by a
// nearest-prototype frame classifier.
std::vector<std::vector<float>> token_prototypes(const DatasetSpec& spec);

// Deterministic generation; sample i depends only on (spec, i).
Dataset generate(const DatasetSpec& spec);

// Deterministic disjoint partition; both halves keep the original order.
std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed);

// Flat binary export/import: header with the spec fields (little-endian),
// then per-sample records (N, frames as f32, L, tokens as u16).
void save_dataset(const std::filesystem::path& path, const DatasetSpec& spec,
                  const Dataset& data);
std::pair<DatasetSpec, Dataset> load_dataset(const std::filesystem::path& path);

}  // namespace prunelab
