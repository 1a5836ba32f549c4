// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <vector>

#include "prunelab/model.hpp"
#include "prunelab/sequence.hpp"

namespace prunelab {

// Blank symbol id, fixed across decoding, serialization and loss.
inline constexpr int kBlank = 0;

// Log-domain zero. Sentinel instead of -inf so arithmetic stays finite.
inline constexpr double kLogZero = -1e30;

// Raised when the target cannot be aligned to the frame count (too few
// frames for the label length plus required blanks between repeats).
class CtcInfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct CtcResult {
  double loss = 0.0;                 // -log P(target | logprobs)
  std::vector<double> dlogprob;      // frames x alphabet, row-major
};

// Forward-backward CTC loss in log space with its exact analytic gradient
// with respect to the per-frame log-probabilities.
CtcResult ctc_loss(const LogProbs& logprobs, const Transcript& target);

// Fewest frames on which `target` has at least one alignment.
int ctc_min_frames(const Transcript& target);

// Per-frame argmax (ties break toward the lower id), collapse repeats,
// drop blanks.
Transcript greedy_decode(const LogProbs& logprobs);

}  // namespace prunelab
