// SPDX-License-Identifier: Apache-2.0
#include "prunelab/sparse.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "prunelab/rng.hpp"

namespace prunelab {

CsrMatrix to_csr(std::span<const double> weight,
                 std::span<const std::uint8_t> mask, std::size_t rows,
                 std::size_t cols) {
  if (weight.size() != rows * cols || mask.size() != rows * cols)
    throw std::invalid_argument("to_csr: weight/mask shape mismatch");
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_offsets.resize(rows + 1, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (mask[r * cols + c]) {
        m.col_indices.push_back(c);
        m.values.push_back(weight[r * cols + c]);
      }
    }
    m.row_offsets[r + 1] = m.col_indices.size();
  }
  return m;
}

std::vector<double> densify(const CsrMatrix& m) {
  std::vector<double> out(m.rows * m.cols, 0.0);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
      out[r * m.cols + m.col_indices[i]] = m.values[i];
  return out;
}

void spmv(const CsrMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols)
    throw std::invalid_argument("spmv: x length does not match cols");
  if (y.size() != m.rows)
    throw std::invalid_argument("spmv: y length does not match rows");
  for (std::size_t r = 0; r < m.rows; ++r) {
    double acc = 0.0;
    for (std::size_t i = m.row_offsets[r]; i < m.row_offsets[r + 1]; ++i)
      acc += m.values[i] * x[m.col_indices[i]];
    y[r] = acc;
  }
}

namespace {

void dense_matvec(const std::vector<double>& w, std::size_t n,
                  const std::vector<double>& x, std::vector<double>& y) {
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = &w[r * n];
    double acc = 0.0;
    for (std::size_t c = 0; c < n; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

template <typename F>
double median_ns(F&& body, int repetitions) {
  std::vector<double> times;
  times.reserve(repetitions);
  for (int i = 0; i < 3; ++i) body();  // warmup
  for (int i = 0; i < repetitions; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    times.push_back(
        std::chrono::duration<double, std::nano>(t1 - t0).count());
  }
  std::sort(times.begin(), times.end());
  return times[times.size() / 2];
}

}  // namespace

std::vector<BenchReport> bench_spmv(const std::vector<std::size_t>& sizes,
                                    const std::vector<double>& sparsities,
                                    int repetitions, std::uint64_t seed) {
  if (repetitions < 1)
    throw std::invalid_argument("bench_spmv: repetitions must be >= 1");
  std::vector<BenchReport> reports;
  for (std::size_t n : sizes) {
    if (n < 64) throw std::invalid_argument("bench_spmv: sizes must be >= 64");
    for (double sp : sparsities) {
      if (!(sp >= 0.0 && sp < 1.0))
        throw std::invalid_argument("bench_spmv: sparsity outside [0, 1)");

      Rng rng(seed, "bench", n * 1000003 + std::size_t(sp * 1000));
      std::vector<double> w(n * n);
      for (auto& v : w) v = rng.uniform(-1.0, 1.0);
      // Exact zero count at the requested sparsity, random positions.
      std::vector<std::size_t> idx(n * n);
      std::iota(idx.begin(), idx.end(), 0);
      rng.shuffle(idx);
      std::vector<std::uint8_t> mask(n * n, 1);
      const auto zeros = std::size_t(sp * double(n * n));
      for (std::size_t i = 0; i < zeros; ++i) mask[idx[i]] = 0;

      std::vector<double> x(n);
      for (auto& v : x) v = rng.uniform(-1.0, 1.0);

      // The dense path runs the masked matrix, so outputs must agree
      // bit-for-bit with the CSR path (same accumulation order).
      std::vector<double> wm = w;
      for (std::size_t i = 0; i < wm.size(); ++i)
        if (!mask[i]) wm[i] = 0.0;
      const CsrMatrix csr = to_csr(w, mask, n, n);

      std::vector<double> y_dense(n), y_sparse(n);
      BenchReport rep;
      rep.size = n;
      rep.sparsity = sp;
      rep.dense_ns =
          median_ns([&] { dense_matvec(wm, n, x, y_dense); }, repetitions);
      rep.sparse_ns =
          median_ns([&] { spmv(csr, x, y_sparse); }, repetitions);
      rep.speedup = rep.dense_ns / rep.sparse_ns;
      rep.checksum = fnv1a64_bytes(y_sparse.data(), n * sizeof(double));
      rep.checksum_equal =
          rep.checksum == fnv1a64_bytes(y_dense.data(), n * sizeof(double));
      reports.push_back(rep);
    }
  }
  return reports;
}

}  // namespace prunelab
