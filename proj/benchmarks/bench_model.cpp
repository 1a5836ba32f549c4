// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "prunelab/ctc.hpp"
#include "prunelab/data.hpp"
#include "prunelab/model.hpp"

namespace {

using namespace prunelab;

DatasetSpec small_spec() {
  DatasetSpec spec;
  spec.num_samples = 32;
  spec.seed = 99;
  return spec;
}

void BM_ForwardBackward(benchmark::State& state) {
  const DatasetSpec spec = small_spec();
  const Dataset data = generate(spec);
  ModelConfig cfg;
  cfg.feature_dim = spec.feature_dim;
  cfg.alphabet_size = spec.alphabet_size + 1;
  ModelState model = init_model(cfg, 1);
  GradientSet grads(model);

  for (auto _ : state) {
    grads.zero();
    for (const auto& s : data) {
      ForwardTrace trace;
      const LogProbs lp = forward(model, s.features, trace);
      const CtcResult ctc = ctc_loss(lp, s.transcript);
      backward(model, trace, ctc.dlogprob, grads);
      benchmark::DoNotOptimize(ctc.loss);
    }
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(data.size()));
}

}  // namespace

BENCHMARK(BM_ForwardBackward)->Unit(benchmark::kMillisecond);
