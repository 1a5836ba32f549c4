// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "prunelab/sequence.hpp"

namespace prunelab {

struct WerScore {
  int substitutions = 0;
  int insertions = 0;
  int deletions = 0;
  int reference_words = 0;
  double wer = 0.0;  // (S + I + D) / reference_words; may exceed 1

  int edits() const { return substitutions + insertions + deletions; }
};

// A "word" is a run of grapheme tokens; WER compares whole words.
using Word = std::vector<int>;

// Splits a transcript into words at the separator token. The separator
// itself belongs to no word; empty words (consecutive separators) are kept
// so that decoding errors around separators count against the hypothesis.
std::vector<Word> group_words(const Transcript& t, int separator_token);

// Levenshtein alignment with unit costs. Counts come from one optimal
// alignment, ties broken substitution > insertion > deletion. Throws
// std::invalid_argument on an empty reference.
WerScore wer(const std::vector<Word>& reference,
             const std::vector<Word>& hypothesis);

// Token-level variant used by tests and telemetry.
WerScore wer_tokens(const std::vector<int>& reference,
                    const std::vector<int>& hypothesis);

// Plain edit distance over int sequences (no counts, no emptiness rule).
int edit_distance(const std::vector<int>& a, const std::vector<int>& b);

// Corpus-level accumulation: sums error counts and reference words.
class WerAccumulator {
 public:
  void add(const WerScore& s);
  WerScore total() const;

 private:
  long long subs_ = 0, ins_ = 0, dels_ = 0, ref_words_ = 0;
};

}  // namespace prunelab
