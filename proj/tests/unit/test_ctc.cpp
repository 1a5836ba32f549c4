// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "prunelab/ctc.hpp"
#include "test_util.hpp"

using namespace prunelab;

namespace {

LogProbs uniform_logprobs(int frames, int alphabet) {
  LogProbs lp;
  lp.frames = frames;
  lp.alphabet = alphabet;
  lp.v.assign(std::size_t(frames) * alphabet, -std::log(double(alphabet)));
  return lp;
}

// Rows that put almost all mass on one symbol per frame.
LogProbs peaked_logprobs(const std::vector<int>& argmax, int alphabet) {
  LogProbs lp;
  lp.frames = int(argmax.size());
  lp.alphabet = alphabet;
  lp.v.assign(std::size_t(lp.frames) * alphabet, 0.0);
  for (int t = 0; t < lp.frames; ++t)
    for (int a = 0; a < alphabet; ++a)
      lp.v[std::size_t(t) * alphabet + a] = (a == argmax[t]) ? -1e-9 : -40.0;
  return lp;
}

}  // namespace

TEST_CASE("uniform two-frame instance: loss is ln 3") {
  // Alignments for "a" on 2 frames over {blank,a,b}: aa, a-, -a, each 1/9.
  const LogProbs lp = uniform_logprobs(2, 3);
  const CtcResult res = ctc_loss(lp, Transcript{{1}});
  CHECK(res.loss == doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("certain single-frame path has zero loss") {
  LogProbs lp;
  lp.frames = 1;
  lp.alphabet = 3;
  lp.v = {kLogZero, 0.0, kLogZero};
  const CtcResult res = ctc_loss(lp, Transcript{{1}});
  CHECK(res.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("loss equals path enumeration on random small instances") {
  std::mt19937 gen(2024);
  std::uniform_int_distribution<int> frames_d(1, 6), alpha_d(2, 4), len_d(1, 3);
  int checked = 0;
  for (int it = 0; it < 400; ++it) {
    const int frames = frames_d(gen), alphabet = alpha_d(gen);
    const int L = len_d(gen);
    Transcript target;
    std::uniform_int_distribution<int> tok_d(1, alphabet - 1);
    for (int i = 0; i < L; ++i) target.tokens.push_back(tok_d(gen));
    if (frames < ctc_min_frames(target)) continue;
    const LogProbs lp = testutil::random_logprobs(gen, frames, alphabet);
    const double oracle =
        testutil::ctc_enumeration_probability(lp, target.tokens);
    const CtcResult res = ctc_loss(lp, target);
    CHECK(std::fabs(res.loss - (-std::log(oracle))) < 1e-6);
    ++checked;
  }
  CHECK(checked > 200);
}

TEST_CASE("gradient matches finite differences on the log-probabilities") {
  std::mt19937 gen(99);
  for (int it = 0; it < 25; ++it) {
    const int frames = 5, alphabet = 4;
    Transcript target{{1, 2}};
    LogProbs lp = testutil::random_logprobs(gen, frames, alphabet);
    const CtcResult res = ctc_loss(lp, target);
    const double h = 1e-6;
    for (std::size_t i = 0; i < lp.v.size(); ++i) {
      LogProbs hi = lp, lo = lp;
      hi.v[i] += h;
      lo.v[i] -= h;
      const double fd =
          (ctc_loss(hi, target).loss - ctc_loss(lo, target).loss) / (2 * h);
      CHECK(testutil::rel_error(fd, res.dlogprob[i]) < 1e-4);
    }
  }
}

TEST_CASE("identical calls give identical results") {
  std::mt19937 gen(7);
  const LogProbs lp = testutil::random_logprobs(gen, 6, 4);
  const Transcript target{{3, 1, 3}};
  const CtcResult a = ctc_loss(lp, target);
  const CtcResult b = ctc_loss(lp, target);
  CHECK(a.loss == b.loss);
  CHECK(a.dlogprob == b.dlogprob);
}

TEST_CASE("infeasible targets raise the dedicated error") {
  const LogProbs lp = uniform_logprobs(2, 3);
  CHECK(ctc_min_frames(Transcript{{1, 1}}) == 3);
  CHECK_THROWS_AS((void)ctc_loss(lp, Transcript{{1, 1}}), CtcInfeasibleError);
  CHECK_THROWS_AS((void)ctc_loss(lp, Transcript{{1, 2, 1}}),
                  CtcInfeasibleError);
  CHECK_THROWS_AS((void)ctc_loss(lp, Transcript{{}}), std::invalid_argument);
  CHECK_THROWS_AS((void)ctc_loss(lp, Transcript{{5}}), std::invalid_argument);
}

TEST_CASE("greedy decode collapses repeats and drops blanks") {
  // argmax frames: a a - a  ->  "a a"
  CHECK(greedy_decode(peaked_logprobs({1, 1, 0, 1}, 3)).tokens ==
        std::vector<int>{1, 1});
  CHECK(greedy_decode(peaked_logprobs({0, 0, 0}, 3)).tokens.empty());
  // a b b - b -> "a b b"
  CHECK(greedy_decode(peaked_logprobs({1, 2, 2, 0, 2}, 3)).tokens ==
        std::vector<int>{1, 2, 2});
}

TEST_CASE("greedy decode ties break toward the lower id") {
  const LogProbs lp = uniform_logprobs(3, 4);  // all rows tie
  CHECK(greedy_decode(lp).tokens.empty());     // blank wins every tie
}
