// SPDX-License-Identifier: Apache-2.0
#include "prunelab/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace prunelab {

namespace {

constexpr const char* kHeader =
    "method,recovery,sparsity,rewind_epoch,round,test_wer,nonzero_params,"
    "wall_seconds";

std::string format_wer_percent(double wer) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", wer * 100.0);
  return buf;
}

}  // namespace

ReportWriter::ReportWriter(std::filesystem::path path)
    : path_(std::move(path)) {
  if (path_.has_parent_path())
    std::filesystem::create_directories(path_.parent_path());
  if (!std::filesystem::exists(path_) ||
      std::filesystem::file_size(path_) == 0) {
    std::ofstream f(path_, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open report: " + path_.string());
    f << kHeader << '\n';
  }
}

void ReportWriter::append(const RunReport& r) {
  std::ofstream f(path_, std::ios::app);
  if (!f) throw std::runtime_error("cannot append report: " + path_.string());
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%s,%.6f,%d,%d,%.6f,%zu,%.3f",
                r.method.c_str(), r.recovery.c_str(), r.sparsity,
                r.rewind_epoch, r.round, r.test_wer, r.nonzero_params,
                r.wall_seconds);
  f << buf << '\n';
}

std::vector<RunReport> read_reports(const std::filesystem::path& path) {
  std::vector<RunReport> rows;
  std::ifstream f(path);
  if (!f) return rows;
  std::string line;
  std::getline(f, line);  // header
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    RunReport r;
    std::getline(ss, r.method, ',');
    std::getline(ss, r.recovery, ',');
    std::getline(ss, field, ',');
    r.sparsity = std::stod(field);
    std::getline(ss, field, ',');
    r.rewind_epoch = std::stoi(field);
    std::getline(ss, field, ',');
    r.round = std::stoi(field);
    std::getline(ss, field, ',');
    r.test_wer = std::stod(field);
    std::getline(ss, field, ',');
    r.nonzero_params = std::size_t(std::stoull(field));
    std::getline(ss, field, ',');
    r.wall_seconds = std::stod(field);
    rows.push_back(std::move(r));
  }
  return rows;
}

bool has_cell(const std::vector<RunReport>& rows, const std::string& method,
              double sparsity, int rewind_epoch, int round) {
  for (const auto& r : rows)
    if (r.method == method && std::fabs(r.sparsity - sparsity) < 1e-9 &&
        r.rewind_epoch == rewind_epoch && r.round == round)
      return true;
  return false;
}

std::string methods_markdown_table(const std::vector<RunReport>& rows,
                                   const std::vector<std::string>& methods,
                                   const std::vector<double>& sparsities) {
  std::ostringstream out;
  out << "| Sp |";
  for (const auto& m : methods) out << ' ' << m << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) out << "---|";
  out << '\n';
  for (double sp : sparsities) {
    char label[16];
    std::snprintf(label, sizeof label, "%.0f%%", sp * 100.0);
    out << "| " << label << " |";
    for (const auto& m : methods) {
      const RunReport* found = nullptr;
      for (const auto& r : rows)
        if (r.method == m && std::fabs(r.sparsity - sp) < 1e-9) found = &r;
      if (found)
        out << ' ' << format_wer_percent(found->test_wer) << " ("
            << found->nonzero_params << ") |";
      else
        out << " - |";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace prunelab
