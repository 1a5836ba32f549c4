// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "prunelab/model.hpp"
#include "prunelab/rng.hpp"
#include "test_util.hpp"

using namespace prunelab;

namespace {

FeatureSequence random_sequence(std::mt19937& gen, int frames, int dim) {
  FeatureSequence seq;
  seq.frames = frames;
  seq.dim = dim;
  seq.values.resize(std::size_t(frames) * dim);
  std::uniform_real_distribution<float> dist(-1.5f, 1.5f);
  for (auto& v : seq.values) v = dist(gen);
  return seq;
}

}  // namespace

TEST_CASE("init_model is bit-deterministic per (config, seed)") {
  const ModelConfig cfg = testutil::small_model_config();
  const ModelState a = init_model(cfg, 7);
  const ModelState b = init_model(cfg, 7);
  const ModelState c = init_model(cfg, 8);
  CHECK(bit_equal(a, b));
  bool any_diff = false;
  for (std::size_t i = 0; i < a.params.size(); ++i)
    if (a.params[i].values != c.params[i].values) any_diff = true;
  CHECK(any_diff);
  CHECK(a.epoch_tag == 0);
}

TEST_CASE("parameter count matches the hand count for the reference config") {
  // conv 16x8x3 + 16, block 32x16 + 32 + 16 + 16, head 5x16 + 5.
  ModelConfig cfg;
  cfg.feature_dim = 8;
  cfg.hidden_dim = 16;
  cfg.num_blocks = 1;
  cfg.alphabet_size = 5;
  cfg.conv_kernel = 3;
  const std::size_t expected = 384 + 16 + 512 + 32 + 16 + 16 + 80 + 5;
  CHECK(expected_param_count(cfg) == expected);
  const ModelState m = init_model(cfg, 3);
  CHECK(m.total_param_count() == expected);
  CHECK(m.prunable_param_count() == 384 + 512 + 80);
}

TEST_CASE("prunable flags cover exactly conv/linear weights") {
  const ModelState m = init_model(testutil::small_model_config(), 1);
  for (const auto& p : m.params) {
    const bool is_weight = p.name.ends_with(".weight");
    CHECK(p.prunable == is_weight);
  }
}

TEST_CASE("config_of reconstructs the configuration") {
  const ModelConfig cfg = testutil::small_model_config();
  const ModelState m = init_model(cfg, 11);
  CHECK(config_of(m) == cfg);
}

TEST_CASE("zero-weight model yields uniform log-probabilities") {
  const ModelConfig cfg = testutil::small_model_config();
  ModelState m = init_model(cfg, 4);
  for (auto& p : m.params)
    for (auto& v : p.values) v = 0.0f;
  std::mt19937 gen(5);
  const FeatureSequence seq = random_sequence(gen, 9, cfg.feature_dim);
  const LogProbs lp = forward(m, seq);
  const double expected = -std::log(double(cfg.alphabet_size));
  for (double v : lp.v) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("forward rows are normalized and the pass is pure") {
  const ModelConfig cfg = testutil::small_model_config();
  const ModelState m = init_model(cfg, 21);
  std::mt19937 gen(9);
  const FeatureSequence seq = random_sequence(gen, 17, cfg.feature_dim);
  const LogProbs a = forward(m, seq);
  const LogProbs b = forward(m, seq);
  CHECK(a.v == b.v);
  for (int t = 0; t < a.frames; ++t) {
    double s = 0.0;
    for (int k = 0; k < a.alphabet; ++k) s += std::exp(a.at(t, k));
    CHECK(std::fabs(s - 1.0) < 1e-9);
  }
}

TEST_CASE("forward rejects a feature-dimension mismatch") {
  const ModelState m = init_model(testutil::small_model_config(), 2);
  std::mt19937 gen(3);
  const FeatureSequence seq = random_sequence(gen, 5, 4);  // wrong dim
  CHECK_THROWS_AS((void)forward(m, seq), std::invalid_argument);
}

TEST_CASE("backward matches central finite differences on every parameter") {
  const ModelConfig cfg = testutil::small_model_config();
  ModelState m = init_model(cfg, 31);
  REQUIRE(m.total_param_count() <= 2000);
  std::mt19937 gen(13);
  const FeatureSequence seq = random_sequence(gen, 8, cfg.feature_dim);

  // Arbitrary linear functional of the log-probabilities as the loss.
  std::uniform_real_distribution<double> cdist(-1.0, 1.0);
  std::vector<double> c(std::size_t(8) * cfg.alphabet_size);
  for (auto& v : c) v = cdist(gen);
  auto loss = [&](const ModelState& state) {
    const LogProbs lp = forward(state, seq);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) acc += c[i] * lp.v[i];
    return acc;
  };

  ForwardTrace trace;
  (void)forward(m, seq, trace);
  GradientSet grads(m);
  backward(m, trace, c, grads);

  double max_rel = 0.0;
  for (std::size_t ti = 0; ti < m.params.size(); ++ti) {
    for (std::size_t j = 0; j < m.params[ti].values.size(); ++j) {
      const double fd = testutil::fd_param_gradient(m, ti, j, 1e-4, loss);
      max_rel = std::max(max_rel, testutil::rel_error(fd, grads[ti][j]));
    }
  }
  CHECK(max_rel < 1e-3);
}

TEST_CASE("zero upstream gradient gives zero parameter gradients") {
  const ModelConfig cfg = testutil::small_model_config();
  const ModelState m = init_model(cfg, 41);
  std::mt19937 gen(17);
  const FeatureSequence seq = random_sequence(gen, 6, cfg.feature_dim);
  ForwardTrace trace;
  (void)forward(m, seq, trace);
  GradientSet grads(m);
  backward(m, trace, std::vector<double>(6 * cfg.alphabet_size, 0.0), grads);
  for (std::size_t ti = 0; ti < grads.tensor_count(); ++ti)
    for (double g : grads[ti]) CHECK(g == 0.0);
}

TEST_CASE("backward is bit-deterministic") {
  const ModelConfig cfg = testutil::small_model_config();
  const ModelState m = init_model(cfg, 51);
  std::mt19937 gen(23);
  const FeatureSequence seq = random_sequence(gen, 7, cfg.feature_dim);
  std::vector<double> up(std::size_t(7) * cfg.alphabet_size, 0.25);

  GradientSet g1(m), g2(m);
  ForwardTrace t1, t2;
  (void)forward(m, seq, t1);
  (void)forward(m, seq, t2);
  backward(m, t1, up, g1);
  backward(m, t2, up, g2);
  for (std::size_t ti = 0; ti < g1.tensor_count(); ++ti)
    CHECK(g1[ti] == g2[ti]);
}
