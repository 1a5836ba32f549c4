// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prunelab {

// One completed (method, sparsity) cell of an experiment grid.
struct RunReport {
  std::string method;    // naive | finetune | parp | lth | lrr | iter-lth | iter-lrr | dense
  std::string recovery;  // recovery tag or "-"
  double sparsity = 0.0;
  int rewind_epoch = -1;  // -1 when not applicable
  int round = 0;          // iterative round, 0 otherwise
  double test_wer = 0.0;
  std::size_t nonzero_params = 0;
  double wall_seconds = 0.0;
};

// Append-only CSV of RunReport rows; writes the header on first use.
class ReportWriter {
 public:
  explicit ReportWriter(std::filesystem::path path);
  void append(const RunReport& row);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

// Rows previously written to `path` (empty when the file is absent).
std::vector<RunReport> read_reports(const std::filesystem::path& path);

// True when a row with the same (method, sparsity, rewind_epoch, round)
// cell key already exists.
bool has_cell(const std::vector<RunReport>& rows, const std::string& method,
              double sparsity, int rewind_epoch, int round);

// Table-style markdown: rows = sparsity levels, columns = methods, each
// cell "wer% (nonzero params)".
std::string methods_markdown_table(const std::vector<RunReport>& rows,
                                   const std::vector<std::string>& methods,
                                   const std::vector<double>& sparsities);

}  // namespace prunelab
