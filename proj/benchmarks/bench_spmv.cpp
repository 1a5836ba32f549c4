// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "prunelab/rng.hpp"
#include "prunelab/sparse.hpp"

namespace {

using prunelab::CsrMatrix;
using prunelab::Rng;

struct Problem {
  std::vector<double> dense;
  CsrMatrix csr;
  std::vector<double> x;
};

Problem make_problem(std::size_t n, double sparsity) {
  Rng rng(7, "bench-fixture", n);
  std::vector<double> w(n * n);
  for (auto& v : w) v = rng.uniform(-1.0, 1.0);
  std::vector<std::size_t> idx(n * n);
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  std::vector<std::uint8_t> mask(n * n, 1);
  for (std::size_t i = 0; i < std::size_t(sparsity * double(n * n)); ++i)
    mask[idx[i]] = 0;

  Problem p;
  p.csr = prunelab::to_csr(w, mask, n, n);
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!mask[i]) w[i] = 0.0;
  p.dense = std::move(w);
  p.x.resize(n);
  for (auto& v : p.x) v = rng.uniform(-1.0, 1.0);
  return p;
}

void BM_DenseMatVec(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const double sp = double(state.range(1)) / 100.0;
  const Problem p = make_problem(n, sp);
  std::vector<double> y(n);
  for (auto _ : state) {
    for (std::size_t r = 0; r < n; ++r) {
      double acc = 0.0;
      const double* row = &p.dense[r * n];
      for (std::size_t c = 0; c < n; ++c) acc += row[c] * p.x[c];
      y[r] = acc;
    }
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) * int64_t(n) * int64_t(n));
}

void BM_CsrSpMV(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const double sp = double(state.range(1)) / 100.0;
  const Problem p = make_problem(n, sp);
  std::vector<double> y(n);
  for (auto _ : state) {
    prunelab::spmv(p.csr, p.x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(int64_t(state.iterations()) *
                          int64_t(p.csr.nnz()));
}

}  // namespace

BENCHMARK(BM_DenseMatVec)
    ->ArgsProduct({{256, 1024, 2048}, {50, 80, 90, 95}});
BENCHMARK(BM_CsrSpMV)
    ->ArgsProduct({{256, 1024, 2048}, {50, 80, 90, 95}});
