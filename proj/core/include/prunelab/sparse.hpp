// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace prunelab {

// Compressed sparse row matrix over the mask-kept entries of a weight
// matrix. Kept entries are stored even when numerically zero; masked
// entries are never stored.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_offsets;  // rows + 1, nondecreasing
  std::vector<std::size_t> col_indices;  // sorted within each row
  std::vector<double> values;

  std::size_t nnz() const { return values.size(); }
};

// Throws std::invalid_argument on a weight/mask shape mismatch.
CsrMatrix to_csr(std::span<const double> weight,
                 std::span<const std::uint8_t> mask, std::size_t rows,
                 std::size_t cols);

// Dense reconstruction: mask-kept entries back in place, zeros elsewhere.
std::vector<double> densify(const CsrMatrix& m);

// y = A x. Throws std::invalid_argument on a dimension mismatch.
void spmv(const CsrMatrix& m, std::span<const double> x,
          std::span<double> y);

struct BenchReport {
  std::size_t size = 0;
  double sparsity = 0.0;
  double dense_ns = 0.0;
  double sparse_ns = 0.0;
  double speedup = 0.0;
  std::uint64_t checksum = 0;       // over the sparse output bytes
  bool checksum_equal = false;      // dense and sparse outputs identical
};

// Median-of-repetitions matvec timings for square matrices, dense loop vs
// CSR kernel, single-threaded, with 3 warmup iterations per cell.
std::vector<BenchReport> bench_spmv(const std::vector<std::size_t>& sizes,
                                    const std::vector<double>& sparsities,
                                    int repetitions, std::uint64_t seed = 42);

}  // namespace prunelab
