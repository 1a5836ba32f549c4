// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "prunelab/optimizer.hpp"
#include "test_util.hpp"

using namespace prunelab;

namespace {

// One scalar parameter, enough to hand-evaluate the update rule.
ModelState scalar_state(float w) {
  ModelState s;
  ParamTensor t;
  t.name = "w.weight";
  t.shape = {1};
  t.values = {w};
  t.prunable = true;
  s.params.push_back(t);
  return s;
}

}  // namespace

TEST_CASE("betas default to 0.9 / 0.98") {
  const AdamWConfig cfg;
  CHECK(cfg.beta1 == 0.9);
  CHECK(cfg.beta2 == 0.98);
  CHECK(cfg.eps == 1e-8);
}

TEST_CASE("zero gradient and zero weight decay leave parameters unchanged") {
  ModelState s = init_model(testutil::small_model_config(), 5);
  const ModelState before = s;
  AdamW opt(s, AdamWConfig{});
  GradientSet grads(s);  // zeros
  opt.step(s, grads, 0.01);
  opt.step(s, grads, 0.01);
  CHECK(bit_equal(before, s));
}

TEST_CASE("first step from scratch matches the hand-evaluated update") {
  // m1 = (1-b1)g, mhat = m1/(1-b1) = g; likewise vhat = g^2, so the first
  // update is -lr * g / (|g| + eps).
  ModelState s = scalar_state(0.5f);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt(s, cfg);
  GradientSet grads(s);
  grads[0][0] = 1.0;
  opt.step(s, grads, 0.1);
  const double expected = 0.5 - 0.1 * (1.0 / (1.0 + 1e-8));
  CHECK(double(s.params[0].values[0]) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("decoupled weight decay shrinks weights independently of grads") {
  ModelState s = scalar_state(1.0f);
  AdamWConfig cfg;
  cfg.weight_decay = 0.1;
  AdamW opt(s, cfg);
  GradientSet grads(s);  // zero gradient: only the decay term acts
  opt.step(s, grads, 0.5);
  CHECK(double(s.params[0].values[0]) ==
        doctest::Approx(1.0 - 0.5 * 0.1 * 1.0).epsilon(1e-12));
}

TEST_CASE("gradient keys must match the state") {
  ModelState a = init_model(testutil::small_model_config(), 1);
  ModelConfig other = testutil::small_model_config();
  other.hidden_dim += 2;
  ModelState b = init_model(other, 1);
  AdamW opt(a, AdamWConfig{});
  GradientSet wrong(b);
  CHECK_THROWS_AS(opt.step(a, wrong, 0.01), std::invalid_argument);
}

TEST_CASE("moments persist across steps") {
  ModelState s = scalar_state(0.0f);
  AdamWConfig cfg;
  cfg.weight_decay = 0.0;
  AdamW opt(s, cfg);
  GradientSet grads(s);
  grads[0][0] = 1.0;
  opt.step(s, grads, 0.1);
  const float after_one = s.params[0].values[0];
  // A second step with the opposite gradient does not cancel exactly:
  // the second moment has grown asymmetrically.
  grads[0][0] = -1.0;
  opt.step(s, grads, 0.1);
  CHECK(s.params[0].values[0] != doctest::Approx(0.0).epsilon(1e-12));
  CHECK(opt.step_count() == 2);
  CHECK(after_one != 0.0f);
}
