// SPDX-License-Identifier: Apache-2.0
#include "prunelab/checkpoint.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "io_util.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

namespace {

constexpr std::string_view kMagic = "PLCKPT01";

std::string encode_state(const ModelState& state, const std::string& run_id) {
  io::ByteWriter w;
  w.bytes(kMagic.data(), kMagic.size());
  w.str(run_id);
  w.i32(state.epoch_tag);
  w.u64(state.seed);
  w.u32(std::uint32_t(state.params.size()));
  for (const auto& p : state.params) {
    w.str(p.name);
    w.u8(1);  // dtype tag: f32
    w.u8(std::uint8_t(p.shape.size()));
    for (auto d : p.shape) w.u64(d);
    w.f32_array(p.values.data(), p.values.size());
  }
  const std::uint64_t digest = fnv1a64(w.data());
  io::ByteWriter trailer;
  trailer.u64(digest);
  return w.data() + trailer.data();
}

struct DecodeResult {
  ModelState state;
  std::string run_id;
  std::uint64_t digest;
};

DecodeResult decode_state(const std::string& raw, const std::string& path) {
  if (raw.size() < kMagic.size() + 8 ||
      std::string_view(raw).substr(0, kMagic.size()) != kMagic)
    throw std::runtime_error("not a checkpoint file: " + path);
  const std::string payload = raw.substr(0, raw.size() - 8);
  io::ByteReader tail(raw.substr(raw.size() - 8));
  const std::uint64_t stored = tail.u64();
  if (stored != fnv1a64(payload))
    throw std::runtime_error("checkpoint digest mismatch: " + path);

  io::ByteReader r(payload);
  (void)r.u64();  // magic
  DecodeResult res;
  res.digest = stored;
  res.run_id = r.str();
  res.state.epoch_tag = r.i32();
  res.state.seed = r.u64();
  const std::uint32_t count = r.u32();
  res.state.params.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ParamTensor t;
    t.name = r.str();
    const int dtype = r.u8();
    if (dtype != 1)
      throw std::runtime_error("unsupported dtype tag in " + path);
    const int rank = r.u8();
    t.shape.resize(rank);
    std::size_t n = 1;
    for (int d = 0; d < rank; ++d) {
      t.shape[d] = r.u64();
      n *= t.shape[d];
    }
    t.values.resize(n);
    r.f32_array(t.values.data(), n);
    t.prunable = t.name.ends_with(".weight");
    res.state.params.push_back(std::move(t));
  }
  return res;
}

}  // namespace

SnapshotStore::SnapshotStore(std::filesystem::path dir, std::string run_id)
    : dir_(std::move(dir)), run_id_(std::move(run_id)) {
  std::filesystem::create_directories(dir_);
  const auto index_path = dir_ / "index.json";
  if (std::filesystem::exists(index_path)) {
    nlohmann::json j =
        nlohmann::json::parse(io::read_file(index_path.string()));
    const std::string stored_run = j.at("run_id").get<std::string>();
    if (stored_run != run_id_)
      throw std::runtime_error("snapshot dir belongs to run '" + stored_run +
                               "', not '" + run_id_ + "'");
    for (const auto& [key, val] : j.at("epochs").items()) {
      Entry e;
      e.file = val.at("file").get<std::string>();
      e.digest = std::stoull(val.at("digest").get<std::string>(), nullptr, 16);
      index_[std::stoi(key)] = e;
    }
  }
}

void SnapshotStore::persist_index() const {
  nlohmann::json j;
  j["run_id"] = run_id_;
  j["epochs"] = nlohmann::json::object();
  for (const auto& [epoch, e] : index_) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(e.digest));
    j["epochs"][std::to_string(epoch)] = {{"file", e.file},
                                          {"digest", std::string(buf)}};
  }
  const auto tmp = dir_ / "index.json.tmp";
  io::write_file(tmp.string(), j.dump(2) + "\n");
  std::filesystem::rename(tmp, dir_ / "index.json");
}

std::uint64_t SnapshotStore::save(const ModelState& state) {
  if (index_.count(state.epoch_tag))
    throw std::invalid_argument("snapshot for epoch " +
                                std::to_string(state.epoch_tag) +
                                " already stored");
  char name[32];
  std::snprintf(name, sizeof name, "snap_%05d.ckpt", state.epoch_tag);
  const std::string bytes = encode_state(state, run_id_);
  io::write_file((dir_ / name).string(), bytes);
  const std::uint64_t digest =
      fnv1a64(std::string_view(bytes).substr(0, bytes.size() - 8));
  index_[state.epoch_tag] = {name, digest};
  persist_index();
  return digest;
}

ModelState SnapshotStore::load(int epoch) const {
  auto it = index_.find(epoch);
  if (it == index_.end()) {
    std::string avail;
    for (int e : stored_epochs()) avail += (avail.empty() ? "" : ", ") + std::to_string(e);
    throw std::invalid_argument("no snapshot for epoch " +
                                std::to_string(epoch) + "; stored epochs: [" +
                                avail + "]");
  }
  const auto path = dir_ / it->second.file;
  auto res = decode_state(io::read_file(path.string()), path.string());
  if (res.digest != it->second.digest)
    throw std::runtime_error("index digest mismatch for " + path.string());
  if (res.state.epoch_tag != epoch)
    throw std::runtime_error("epoch tag mismatch in " + path.string());
  return std::move(res.state);
}

std::vector<int> SnapshotStore::stored_epochs() const {
  std::vector<int> out;
  out.reserve(index_.size());
  for (const auto& [epoch, _] : index_) out.push_back(epoch);
  return out;
}

std::uint64_t save_model_file(const std::filesystem::path& path,
                              const ModelState& state,
                              const std::string& run_id) {
  const std::string bytes = encode_state(state, run_id);
  io::write_file(path.string(), bytes);
  return fnv1a64(std::string_view(bytes).substr(0, bytes.size() - 8));
}

ModelState load_model_file(const std::filesystem::path& path) {
  return std::move(
      decode_state(io::read_file(path.string()), path.string()).state);
}

CheckpointInfo inspect_checkpoint(const std::filesystem::path& path) {
  auto res = decode_state(io::read_file(path.string()), path.string());
  CheckpointInfo info;
  info.run_id = res.run_id;
  info.epoch = res.state.epoch_tag;
  info.seed = res.state.seed;
  info.digest = res.digest;
  for (const auto& p : res.state.params)
    info.tensors.push_back({p.name, p.shape, p.prunable});
  return info;
}

}  // namespace prunelab
