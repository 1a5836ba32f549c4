// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "prunelab/tensor.hpp"

namespace prunelab {

// Append-only snapshot store for one training run. Snapshots hold model
// parameters only; optimizer moments are never stored, so every rewind
// starts with a fresh optimizer.
class SnapshotStore {
 public:
  // Opens (or creates) `dir`. An existing index must belong to `run_id`.
  SnapshotStore(std::filesystem::path dir, std::string run_id);

  // Serializes the state under its epoch_tag. Returns the content digest.
  // Throws std::invalid_argument when the epoch is already stored.
  std::uint64_t save(const ModelState& state);

  // Bit-exact restore. Throws std::invalid_argument listing the stored
  // epochs when `epoch` is missing; std::runtime_error on digest mismatch.
  ModelState load(int epoch) const;

  bool has(int epoch) const { return index_.count(epoch) > 0; }
  std::vector<int> stored_epochs() const;
  const std::string& run_id() const { return run_id_; }
  const std::filesystem::path& directory() const { return dir_; }

 private:
  struct Entry {
    std::string file;
    std::uint64_t digest;
  };
  void persist_index() const;

  std::filesystem::path dir_;
  std::string run_id_;
  std::map<int, Entry> index_;
};

// Single-file helpers for model artifacts outside a store.
std::uint64_t save_model_file(const std::filesystem::path& path,
                              const ModelState& state,
                              const std::string& run_id);
ModelState load_model_file(const std::filesystem::path& path);

struct TensorInfo {
  std::string name;
  std::vector<std::size_t> shape;
  bool prunable = false;
};

struct CheckpointInfo {
  std::string run_id;
  int epoch = 0;
  std::uint64_t seed = 0;
  std::uint64_t digest = 0;
  std::vector<TensorInfo> tensors;
};

// Reads the tensor directory without materializing values.
CheckpointInfo inspect_checkpoint(const std::filesystem::path& path);

}  // namespace prunelab
