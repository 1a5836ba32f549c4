// SPDX-License-Identifier: Apache-2.0
// Shared fixtures and independent oracles for the test suites. Oracles here
// deliberately re-derive results by brute force; they never call into the
// implementation paths they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "prunelab/ctc.hpp"
#include "prunelab/data.hpp"
#include "prunelab/model.hpp"
#include "prunelab/tensor.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0;; ++i) {
      auto candidate = base / ("prunelab-" + tag + "-" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directories(candidate, ec) && !ec) {
        path_ = candidate;
        return;
      }
    }
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline prunelab::ModelConfig small_model_config() {
  prunelab::ModelConfig cfg;
  cfg.feature_dim = 6;
  cfg.hidden_dim = 8;
  cfg.num_blocks = 1;
  cfg.alphabet_size = 5;
  cfg.conv_kernel = 3;
  return cfg;
}

inline prunelab::DatasetSpec tiny_dataset_spec(int samples = 24,
                                               std::uint64_t seed = 77) {
  prunelab::DatasetSpec spec;
  spec.num_samples = samples;
  spec.alphabet_size = 6;
  spec.word_separator_token = 6;
  spec.words_min = 1;
  spec.words_max = 3;
  spec.word_tokens_min = 1;
  spec.word_tokens_max = 2;
  spec.frames_per_token_min = 2;
  spec.frames_per_token_max = 4;
  spec.feature_dim = 6;
  spec.emission_noise_std = 0.2f;
  spec.seed = seed;
  return spec;
}

// ---- Finite differences ------------------------------------------------

// Central finite difference through the float32 parameter storage. The
// effective step is measured after rounding to float, which keeps the
// quotient exact.
inline double fd_param_gradient(
    prunelab::ModelState& state, std::size_t tensor, std::size_t index,
    double h, const std::function<double(const prunelab::ModelState&)>& f) {
  const float orig = state.params[tensor].values[index];
  const float hi = float(double(orig) + h);
  const float lo = float(double(orig) - h);
  state.params[tensor].values[index] = hi;
  const double fp = f(state);
  state.params[tensor].values[index] = lo;
  const double fm = f(state);
  state.params[tensor].values[index] = orig;
  return (fp - fm) / (double(hi) - double(lo));
}

inline double rel_error(double a, double b) {
  const double scale = std::max({std::fabs(a), std::fabs(b), 1e-6});
  return std::fabs(a - b) / scale;
}

// ---- CTC path enumeration oracle ----------------------------------------

// CTC collapse: merge repeats, drop blanks (blank id 0).
inline std::vector<int> collapse_path(const std::vector<int>& path) {
  std::vector<int> out;
  int prev = -1;
  for (int s : path) {
    if (s != prev && s != 0) out.push_back(s);
    prev = s;
  }
  return out;
}

// Sum of path probabilities over every alignment mapping to `target`.
// O(alphabet^frames): only for tiny instances.
inline double ctc_enumeration_probability(const prunelab::LogProbs& lp,
                                          const std::vector<int>& target) {
  const int T = lp.frames, A = lp.alphabet;
  double total = 0.0;
  std::vector<int> path(T, 0);
  const long count = long(std::pow(double(A), double(T)));
  for (long code = 0; code < count; ++code) {
    long c = code;
    for (int t = 0; t < T; ++t) {
      path[t] = int(c % A);
      c /= A;
    }
    if (collapse_path(path) != target) continue;
    double logp = 0.0;
    for (int t = 0; t < T; ++t) logp += lp.at(t, path[t]);
    total += std::exp(logp);
  }
  return total;
}

// ---- Edit distance brute force -------------------------------------------

// Plain exponential recursion, no memoization.
inline int brute_edit_distance(const std::vector<int>& a,
                               const std::vector<int>& b, std::size_t i = 0,
                               std::size_t j = 0) {
  if (i == a.size()) return int(b.size() - j);
  if (j == b.size()) return int(a.size() - i);
  const int sub =
      brute_edit_distance(a, b, i + 1, j + 1) + (a[i] == b[j] ? 0 : 1);
  const int del = brute_edit_distance(a, b, i + 1, j) + 1;
  const int ins = brute_edit_distance(a, b, i, j + 1) + 1;
  return std::min({sub, del, ins});
}

// Random normalized log-probability matrix (std::mt19937 is fine here; the
// oracle only needs arbitrary inputs, not reproducible streams).
inline prunelab::LogProbs random_logprobs(std::mt19937& gen, int frames,
                                          int alphabet) {
  prunelab::LogProbs lp;
  lp.frames = frames;
  lp.alphabet = alphabet;
  lp.v.resize(std::size_t(frames) * alphabet);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int t = 0; t < frames; ++t) {
    double mx = -1e300;
    for (int a = 0; a < alphabet; ++a) {
      lp.v[std::size_t(t) * alphabet + a] = dist(gen);
      mx = std::max(mx, lp.v[std::size_t(t) * alphabet + a]);
    }
    double z = 0.0;
    for (int a = 0; a < alphabet; ++a)
      z += std::exp(lp.v[std::size_t(t) * alphabet + a] - mx);
    const double lse = mx + std::log(z);
    for (int a = 0; a < alphabet; ++a)
      lp.v[std::size_t(t) * alphabet + a] -= lse;
  }
  return lp;
}

}  // namespace testutil
