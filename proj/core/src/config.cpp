// SPDX-License-Identifier: Apache-2.0
#include "prunelab/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <json.hpp>

#include "io_util.hpp"
#include "prunelab/methods.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

using nlohmann::json;

namespace {

// Tracks the key path for error messages and rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Section() = default;

  template <typename T>
  void get(const char* key, T& out) {
    if (!j_.contains(key)) return;
    seen_.insert(key);
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* sub(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void finish() const {
    for (const auto& [key, _] : j_.items())
      if (!seen_.count(key))
        throw ConfigError(path_ + "." + key + ": unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_range(Section& s, const char* key, int& lo, int& hi,
                const std::string& path) {
  if (!s.has(key)) return;
  const json* arr = s.sub(key);
  if (!arr->is_array() || arr->size() != 2)
    throw ConfigError(path + "." + key + ": expected [lo, hi]");
  lo = (*arr)[0].get<int>();
  hi = (*arr)[1].get<int>();
}

}  // namespace

ModelConfig model_config_of(const RunConfig& cfg) {
  ModelConfig m;
  m.feature_dim = cfg.dataset.feature_dim;
  m.hidden_dim = cfg.hidden_dim;
  m.num_blocks = cfg.num_blocks;
  m.alphabet_size = cfg.dataset.alphabet_size + 1;  // graphemes + blank
  m.conv_kernel = cfg.conv_kernel;
  return m;
}

void validate(const RunConfig& cfg) {
  try {
    validate(model_config_of(cfg));
    validate(cfg.schedule);
    DatasetSpec spec = cfg.dataset;
    spec.num_samples = cfg.train_samples + cfg.test_samples;
    validate(spec);
    validate(cfg.augment);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (cfg.train_samples <= 0)
    throw ConfigError("dataset.train_samples: must be positive");
  if (cfg.test_samples <= 0)
    throw ConfigError("dataset.test_samples: must be positive");
  for (double sp : cfg.prune.sparsities)
    if (!(sp >= 0.0 && sp < 1.0))
      throw ConfigError("prune.sparsities: values must lie in [0, 1)");
  for (double sp : cfg.ablate_sparsities)
    if (!(sp > 0.0 && sp < 1.0))
      throw ConfigError("ablate.sparsities: values must lie in (0, 1)");
  if (cfg.prune.rounds < 1) throw ConfigError("prune.rounds: must be >= 1");
  if (cfg.prune.round_epochs < 1)
    throw ConfigError("prune.round_epochs: must be >= 1");
  if (cfg.prune.finetune_epochs < 1)
    throw ConfigError("prune.finetune_epochs: must be >= 1");
  if (!(cfg.prune.finetune_lr > 0))
    throw ConfigError("prune.finetune_lr: must be positive");
  if (cfg.prune.iter_schedule != "linear" &&
      cfg.prune.iter_schedule != "geometric")
    throw ConfigError("prune.iter_schedule: must be linear or geometric");
  static const std::set<std::string> kMethods = {
      "naive", "finetune", "parp", "lth", "lrr", "iter-lth", "iter-lrr"};
  for (const auto& m : cfg.prune.methods)
    if (!kMethods.count(m))
      throw ConfigError("prune.methods: unknown method '" + m + "'");
  for (int e : cfg.snapshot_epochs)
    if (e < 0 || e > cfg.schedule.total_epochs)
      throw ConfigError("snapshots: epoch outside [0, total_epochs]");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir: must be non-empty");
  // The maximum sample length must fit the batch cap.
  const int max_tokens =
      cfg.dataset.words_max * cfg.dataset.word_tokens_max +
      (cfg.dataset.words_max - 1);
  const int max_frames = max_tokens * cfg.dataset.frames_per_token_max;
  if (max_frames > cfg.schedule.batch_frames_cap)
    throw ConfigError(
        "schedule.batch_frames_cap: below the longest possible sample (" +
        std::to_string(max_frames) + " frames)");
}

std::vector<int> default_snapshot_epochs(int total_epochs) {
  static const int kPaperGrid[] = {0, 5, 10, 20, 40, 60, 75};
  std::set<int> epochs;
  for (int t : kPaperGrid) {
    int scaled = int(std::lround(double(t) * double(total_epochs) / 75.0));
    scaled = std::clamp(scaled, 0, total_epochs);
    epochs.insert(scaled);
  }
  epochs.insert(0);
  epochs.insert(total_epochs);
  return {epochs.begin(), epochs.end()};
}

std::vector<int> snapshot_epochs_of(const RunConfig& cfg) {
  if (!cfg.snapshot_epochs.empty()) {
    std::set<int> epochs(cfg.snapshot_epochs.begin(),
                         cfg.snapshot_epochs.end());
    epochs.insert(0);
    epochs.insert(cfg.schedule.total_epochs);
    return {epochs.begin(), epochs.end()};
  }
  return default_snapshot_epochs(cfg.schedule.total_epochs);
}

std::vector<int> rewind_epochs_of(const RunConfig& cfg) {
  if (!cfg.rewind_epochs.empty()) return cfg.rewind_epochs;
  return snapshot_epochs_of(cfg);
}

namespace {

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"hidden_dim", c.hidden_dim},
                {"num_blocks", c.num_blocks},
                {"conv_kernel", c.conv_kernel}};
  j["schedule"] = {{"total_epochs", c.schedule.total_epochs},
                   {"warmup_epochs", c.schedule.warmup_epochs},
                   {"peak_lr", c.schedule.peak_lr},
                   {"weight_decay", c.schedule.weight_decay},
                   {"beta1", c.schedule.beta1},
                   {"beta2", c.schedule.beta2},
                   {"batch_frames_cap", c.schedule.batch_frames_cap}};
  j["dataset"] = {{"train_samples", c.train_samples},
                  {"test_samples", c.test_samples},
                  {"alphabet_size", c.dataset.alphabet_size},
                  {"word_separator_token", c.dataset.word_separator_token},
                  {"words", {c.dataset.words_min, c.dataset.words_max}},
                  {"word_tokens",
                   {c.dataset.word_tokens_min, c.dataset.word_tokens_max}},
                  {"frames_per_token",
                   {c.dataset.frames_per_token_min,
                    c.dataset.frames_per_token_max}},
                  {"feature_dim", c.dataset.feature_dim},
                  {"emission_noise_std", c.dataset.emission_noise_std},
                  {"seed", c.dataset.seed}};
  json kinds = json::array();
  for (NoiseKind k : c.augment.seen_kinds) kinds.push_back(to_string(k));
  j["augment"] = {{"enabled", c.augment_enabled},
                  {"kinds", kinds},
                  {"include_clean", c.augment.include_clean},
                  {"time_mask_max_frames", c.augment.time_mask_max_frames},
                  {"time_mask_rate", c.augment.time_mask_rate}};
  j["severity"] = {{"gb_sigma_per_level", c.severity.gb_sigma_per_level},
                   {"mb_width_per_level", c.severity.mb_width_per_level},
                   {"p_stride_per_level", c.severity.p_stride_per_level},
                   {"bw_blocks_per_level", c.severity.bw_blocks_per_level},
                   {"bw_span_per_level", c.severity.bw_span_per_level},
                   {"bw_dim_fraction", c.severity.bw_dim_fraction},
                   {"gn_sigma_per_level", c.severity.gn_sigma_per_level},
                   {"contrast_step", c.severity.contrast_step}};
  j["prune"] = {{"sparsities", c.prune.sparsities},
                {"methods", c.prune.methods},
                {"rounds", c.prune.rounds},
                {"round_epochs", c.prune.round_epochs},
                {"finetune_epochs", c.prune.finetune_epochs},
                {"finetune_lr", c.prune.finetune_lr},
                {"iter_schedule", c.prune.iter_schedule}};
  j["snapshots"] = c.snapshot_epochs;
  j["ablate"] = {{"sparsities", c.ablate_sparsities},
                 {"rewind_epochs", c.rewind_epochs}};
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  Section root(j, "config");
  if (const json* m = root.sub("model")) {
    Section s(*m, "model");
    s.get("hidden_dim", c.hidden_dim);
    s.get("num_blocks", c.num_blocks);
    s.get("conv_kernel", c.conv_kernel);
    s.finish();
  }
  if (const json* m = root.sub("schedule")) {
    Section s(*m, "schedule");
    s.get("total_epochs", c.schedule.total_epochs);
    s.get("warmup_epochs", c.schedule.warmup_epochs);
    s.get("peak_lr", c.schedule.peak_lr);
    s.get("weight_decay", c.schedule.weight_decay);
    s.get("beta1", c.schedule.beta1);
    s.get("beta2", c.schedule.beta2);
    s.get("batch_frames_cap", c.schedule.batch_frames_cap);
    s.finish();
  }
  if (const json* m = root.sub("dataset")) {
    Section s(*m, "dataset");
    s.get("train_samples", c.train_samples);
    s.get("test_samples", c.test_samples);
    s.get("alphabet_size", c.dataset.alphabet_size);
    s.get("word_separator_token", c.dataset.word_separator_token);
    read_range(s, "words", c.dataset.words_min, c.dataset.words_max,
               "dataset");
    read_range(s, "word_tokens", c.dataset.word_tokens_min,
               c.dataset.word_tokens_max, "dataset");
    read_range(s, "frames_per_token", c.dataset.frames_per_token_min,
               c.dataset.frames_per_token_max, "dataset");
    s.get("feature_dim", c.dataset.feature_dim);
    s.get("emission_noise_std", c.dataset.emission_noise_std);
    s.get("seed", c.dataset.seed);
    s.finish();
  }
  if (const json* m = root.sub("augment")) {
    Section s(*m, "augment");
    s.get("enabled", c.augment_enabled);
    if (const json* kinds = s.sub("kinds")) {
      c.augment.seen_kinds.clear();
      for (const auto& k : *kinds) {
        try {
          c.augment.seen_kinds.push_back(
              noise_kind_from_string(k.get<std::string>()));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(std::string("augment.kinds: ") + e.what());
        }
      }
    }
    s.get("include_clean", c.augment.include_clean);
    s.get("time_mask_max_frames", c.augment.time_mask_max_frames);
    s.get("time_mask_rate", c.augment.time_mask_rate);
    s.finish();
  }
  if (const json* m = root.sub("severity")) {
    Section s(*m, "severity");
    s.get("gb_sigma_per_level", c.severity.gb_sigma_per_level);
    s.get("mb_width_per_level", c.severity.mb_width_per_level);
    s.get("p_stride_per_level", c.severity.p_stride_per_level);
    s.get("bw_blocks_per_level", c.severity.bw_blocks_per_level);
    s.get("bw_span_per_level", c.severity.bw_span_per_level);
    s.get("bw_dim_fraction", c.severity.bw_dim_fraction);
    s.get("gn_sigma_per_level", c.severity.gn_sigma_per_level);
    s.get("contrast_step", c.severity.contrast_step);
    s.finish();
  }
  if (const json* m = root.sub("prune")) {
    Section s(*m, "prune");
    s.get("sparsities", c.prune.sparsities);
    s.get("methods", c.prune.methods);
    s.get("rounds", c.prune.rounds);
    s.get("round_epochs", c.prune.round_epochs);
    s.get("finetune_epochs", c.prune.finetune_epochs);
    s.get("finetune_lr", c.prune.finetune_lr);
    s.get("iter_schedule", c.prune.iter_schedule);
    s.finish();
  }
  root.get("snapshots", c.snapshot_epochs);
  if (const json* m = root.sub("ablate")) {
    Section s(*m, "ablate");
    s.get("sparsities", c.ablate_sparsities);
    s.get("rewind_epochs", c.rewind_epochs);
    s.finish();
  }
  root.get("out_dir", c.out_dir);
  root.get("seed", c.seed);
  root.finish();

  c.dataset.num_samples = c.train_samples + c.test_samples;
  validate(c);
  return c;
}

}  // namespace

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config: " + path.string());
  json j;
  try {
    j = json::parse(f, nullptr, /*allow_exceptions=*/true,
                    /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return from_json(j);
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  io::write_file(path.string(), to_json(cfg).dump(2) + "\n");
}

std::string config_digest_hex(const RunConfig& cfg) {
  // out_dir does not shape the experiment; two runs of the same config into
  // different directories share an id and produce identical artifacts.
  json j = to_json(cfg);
  j.erase("out_dir");
  const std::uint64_t digest = fnv1a64(j.dump());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(digest));
  return buf;
}

std::string run_id_of(const RunConfig& cfg) {
  return "run-" + config_digest_hex(cfg).substr(0, 12);
}

}  // namespace prunelab
