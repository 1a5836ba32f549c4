// SPDX-License-Identifier: Apache-2.0
#include "prunelab/wer.hpp"

#include <algorithm>
#include <stdexcept>

namespace prunelab {

std::vector<Word> group_words(const Transcript& t, int separator_token) {
  std::vector<Word> words;
  Word cur;
  for (int tok : t.tokens) {
    if (tok == separator_token) {
      words.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(tok);
    }
  }
  words.push_back(cur);
  return words;
}

namespace {

template <typename T>
WerScore align(const std::vector<T>& ref, const std::vector<T>& hyp) {
  const std::size_t R = ref.size(), H = hyp.size();
  // d[i][j]: edits aligning ref[0..i) with hyp[0..j).
  std::vector<int> d((R + 1) * (H + 1));
  auto at = [&](std::size_t i, std::size_t j) -> int& {
    return d[i * (H + 1) + j];
  };
  for (std::size_t i = 0; i <= R; ++i) at(i, 0) = int(i);
  for (std::size_t j = 0; j <= H; ++j) at(0, j) = int(j);
  for (std::size_t i = 1; i <= R; ++i) {
    for (std::size_t j = 1; j <= H; ++j) {
      const int sub = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const int ins = at(i, j - 1) + 1;
      const int del = at(i - 1, j) + 1;
      at(i, j) = std::min({sub, ins, del});
    }
  }

  WerScore score;
  score.reference_words = int(R);
  // Backtrace one optimal alignment: substitution > insertion > deletion.
  std::size_t i = R, j = H;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        at(i, j) == at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (!(ref[i - 1] == hyp[j - 1])) ++score.substitutions;
      --i;
      --j;
    } else if (j > 0 && at(i, j) == at(i, j - 1) + 1) {
      ++score.insertions;
      --j;
    } else {
      ++score.deletions;
      --i;
    }
  }
  score.wer = R > 0 ? double(score.edits()) / double(R) : 0.0;
  return score;
}

}  // namespace

WerScore wer(const std::vector<Word>& reference,
             const std::vector<Word>& hypothesis) {
  if (reference.empty())
    throw std::invalid_argument("wer: empty reference");
  return align(reference, hypothesis);
}

WerScore wer_tokens(const std::vector<int>& reference,
                    const std::vector<int>& hypothesis) {
  if (reference.empty())
    throw std::invalid_argument("wer: empty reference");
  return align(reference, hypothesis);
}

int edit_distance(const std::vector<int>& a, const std::vector<int>& b) {
  return align(a, b).edits();
}

void WerAccumulator::add(const WerScore& s) {
  subs_ += s.substitutions;
  ins_ += s.insertions;
  dels_ += s.deletions;
  ref_words_ += s.reference_words;
}

WerScore WerAccumulator::total() const {
  WerScore s;
  s.substitutions = int(subs_);
  s.insertions = int(ins_);
  s.deletions = int(dels_);
  s.reference_words = int(ref_words_);
  s.wer = ref_words_ > 0 ? double(subs_ + ins_ + dels_) / double(ref_words_)
                         : 0.0;
  return s;
}

}  // namespace prunelab
