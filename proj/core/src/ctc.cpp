// SPDX-License-Identifier: Apache-2.0
#include "prunelab/ctc.hpp"

#include <cmath>
#include <string>

namespace prunelab {

namespace {

double log_add(double a, double b) {
  if (a <= kLogZero) return b;
  if (b <= kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

void validate_target(const Transcript& target, int alphabet) {
  if (target.tokens.empty())
    throw std::invalid_argument("ctc_loss: empty target transcript");
  for (int tok : target.tokens)
    if (tok <= kBlank || tok >= alphabet)
      throw std::invalid_argument("ctc_loss: token " + std::to_string(tok) +
                                  " outside [1, " + std::to_string(alphabet - 1) +
                                  "]");
}

}  // namespace

int ctc_min_frames(const Transcript& target) {
  int repeats = 0;
  for (std::size_t i = 1; i < target.tokens.size(); ++i)
    if (target.tokens[i] == target.tokens[i - 1]) ++repeats;
  return target.length() + repeats;
}

CtcResult ctc_loss(const LogProbs& lp, const Transcript& target) {
  validate_target(target, lp.alphabet);
  const int T = lp.frames;
  const int L = target.length();
  const int need = ctc_min_frames(target);
  if (T < need)
    throw CtcInfeasibleError("ctc_loss: " + std::to_string(T) +
                             " frames cannot align a target needing " +
                             std::to_string(need));

  // Extended label sequence: blank, y1, blank, y2, ..., yL, blank.
  const int S = 2 * L + 1;
  std::vector<int> ext(S, kBlank);
  for (int i = 0; i < L; ++i) ext[2 * i + 1] = target.tokens[i];

  auto emit = [&](int t, int s) { return lp.at(t, ext[s]); };

  std::vector<double> alpha(std::size_t(T) * S, kLogZero);
  std::vector<double> beta(std::size_t(T) * S, kLogZero);

  alpha[0] = emit(0, 0);
  if (S > 1) alpha[1] = emit(0, 1);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      double a = alpha[std::size_t(t - 1) * S + s];
      if (s >= 1) a = log_add(a, alpha[std::size_t(t - 1) * S + s - 1]);
      if (s >= 2 && ext[s] != kBlank && ext[s] != ext[s - 2])
        a = log_add(a, alpha[std::size_t(t - 1) * S + s - 2]);
      if (a <= kLogZero)
        alpha[std::size_t(t) * S + s] = kLogZero;
      else
        alpha[std::size_t(t) * S + s] = a + emit(t, s);
    }
  }

  // beta excludes the emission at its own frame; transitions pay the
  // emission of the next frame, so alpha + beta composes to full paths.
  beta[std::size_t(T - 1) * S + (S - 1)] = 0.0;
  if (S > 1) beta[std::size_t(T - 1) * S + (S - 2)] = 0.0;
  for (int t = T - 2; t >= 0; --t) {
    for (int s = S - 1; s >= 0; --s) {
      double b = kLogZero;
      b = log_add(b, beta[std::size_t(t + 1) * S + s] + emit(t + 1, s));
      if (s + 1 < S)
        b = log_add(b, beta[std::size_t(t + 1) * S + s + 1] + emit(t + 1, s + 1));
      if (s + 2 < S && ext[s + 2] != kBlank && ext[s + 2] != ext[s])
        b = log_add(b, beta[std::size_t(t + 1) * S + s + 2] + emit(t + 1, s + 2));
      beta[std::size_t(t) * S + s] = b;
    }
  }

  double log_p = log_add(alpha[std::size_t(T - 1) * S + (S - 1)],
                         S > 1 ? alpha[std::size_t(T - 1) * S + (S - 2)]
                               : kLogZero);

  CtcResult res;
  res.loss = -log_p;
  res.dlogprob.assign(std::size_t(T) * lp.alphabet, 0.0);
  for (int t = 0; t < T; ++t) {
    for (int s = 0; s < S; ++s) {
      const double occ =
          alpha[std::size_t(t) * S + s] + beta[std::size_t(t) * S + s];
      if (occ <= kLogZero) continue;
      res.dlogprob[std::size_t(t) * lp.alphabet + ext[s]] -=
          std::exp(occ - log_p);
    }
  }
  return res;
}

Transcript greedy_decode(const LogProbs& lp) {
  Transcript out;
  int prev = -1;
  for (int t = 0; t < lp.frames; ++t) {
    int best = 0;
    double best_v = lp.at(t, 0);
    for (int k = 1; k < lp.alphabet; ++k) {
      const double v = lp.at(t, k);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    if (best != kBlank && best != prev) out.tokens.push_back(best);
    prev = best;
  }
  return out;
}

}  // namespace prunelab
