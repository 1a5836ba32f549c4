// SPDX-License-Identifier: Apache-2.0
#include "prunelab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <thread>

#include "io_util.hpp"
#include "prunelab/checkpoint.hpp"
#include "prunelab/ctc.hpp"
#include "prunelab/methods.hpp"
#include "prunelab/report.hpp"
#include "prunelab/rng.hpp"
#include "prunelab/trainer.hpp"

namespace prunelab {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void run_parallel(int jobs, std::vector<std::function<void()>>& tasks) {
  if (jobs <= 1 || tasks.size() <= 1) {
    for (auto& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      tasks[i]();
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(jobs, int(tasks.size()));
  pool.reserve(n);
  for (int i = 0; i < n; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

std::string sp_label(double sp) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "sp%02d", int(std::lround(sp * 100)));
  return buf;
}

void save_sparse_artifact(const fs::path& dir, const SparseModel& sm,
                          const std::string& run_id) {
  fs::create_directories(dir);
  save_model_file(dir / "model.ckpt", sm.state, run_id);
  save_mask(dir / "mask.bin", sm.mask);
}

// Appends a line to the run's error log; cells fail independently.
class ErrorLog {
 public:
  explicit ErrorLog(fs::path path) : path_(std::move(path)) {}
  void record(const std::string& cell, const std::string& what) {
    std::lock_guard<std::mutex> lock(mu_);
    std::ofstream f(path_, std::ios::app);
    f << cell << ": " << what << '\n';
    ++count_;
  }
  int count() const { return count_; }

 private:
  fs::path path_;
  std::mutex mu_;
  int count_ = 0;
};

PruneContext make_context(const RunConfig& cfg, const Dataset& train) {
  PruneContext ctx;
  ctx.train_data = &train;
  ctx.schedule = cfg.schedule;
  ctx.augment = cfg.augment_enabled ? &cfg.augment : nullptr;
  ctx.severity = cfg.severity;
  ctx.word_separator_token = cfg.dataset.word_separator_token;
  ctx.train_seed = cfg.seed;
  return ctx;
}

PruneOptions make_prune_options(const RunConfig& cfg) {
  PruneOptions opts;
  opts.finetune_epochs = cfg.prune.finetune_epochs;
  opts.finetune_lr = cfg.prune.finetune_lr;
  opts.round_epochs = cfg.prune.round_epochs;
  return opts;
}

SnapshotStore open_dense_run(const RunConfig& cfg) {
  const fs::path dir = run_dir_of(cfg) / "snapshots";
  if (!fs::exists(dir / "index.json"))
    throw std::runtime_error("no dense run at " + dir.string() +
                             "; run train-dense first");
  SnapshotStore store(dir, run_id_of(cfg));
  if (!store.has(cfg.schedule.total_epochs))
    throw std::runtime_error("dense run incomplete: epoch " +
                             std::to_string(cfg.schedule.total_epochs) +
                             " missing");
  return store;
}

}  // namespace

std::pair<Dataset, Dataset> make_datasets(const RunConfig& cfg) {
  DatasetSpec spec = cfg.dataset;
  spec.num_samples = cfg.train_samples + cfg.test_samples;
  const Dataset all = generate(spec);
  const double fraction =
      double(cfg.train_samples) / double(spec.num_samples);
  return split(all, fraction, spec.seed ^ fnv1a64("train-test-split"));
}

fs::path run_dir_of(const RunConfig& cfg) {
  return fs::path(cfg.out_dir) / run_id_of(cfg);
}

TrainDenseResult cmd_train_dense(const RunConfig& cfg) {
  validate(cfg);
  TrainDenseResult res;
  res.run_id = run_id_of(cfg);
  res.run_dir = run_dir_of(cfg);
  fs::create_directories(res.run_dir);
  save_config(res.run_dir / "config.json", cfg);

  const auto [train_set, test_set] = make_datasets(cfg);
  const int T = cfg.schedule.total_epochs;
  const auto snapshot_epochs = snapshot_epochs_of(cfg);

  SnapshotStore store(res.run_dir / "snapshots", res.run_id);
  res.resumed = store.has(T);

  if (!res.resumed) {
    ModelState model = init_model(model_config_of(cfg), cfg.seed);
    if (!store.has(0)) store.save(model);

    std::ofstream telemetry;
    {
      const fs::path tpath = res.run_dir / "telemetry.csv";
      const bool fresh = !fs::exists(tpath) || fs::file_size(tpath) == 0;
      telemetry.open(tpath, std::ios::app);
      if (fresh) telemetry << "epoch,lr,mean_loss,train_wer\n";
    }

    TrainOptions opts;
    opts.augment = cfg.augment_enabled ? &cfg.augment : nullptr;
    opts.severity = cfg.severity;
    opts.word_separator_token = cfg.dataset.word_separator_token;
    opts.run_seed = cfg.seed;
    opts.telemetry = &telemetry;
    opts.hooks.after_epoch = [&](const ModelState& state, const EpochStats&) {
      if (std::find(snapshot_epochs.begin(), snapshot_epochs.end(),
                    state.epoch_tag) != snapshot_epochs.end() &&
          !store.has(state.epoch_tag))
        store.save(state);
    };
    train(std::move(model), train_set, cfg.schedule, opts);
  }

  const ModelState final_state = store.load(T);
  res.final_digest = save_model_file(res.run_dir / "models/dense/model.ckpt",
                                     final_state, res.run_id);
  res.test_wer = evaluate(final_state, test_set,
                          cfg.dataset.word_separator_token);
  return res;
}

GridResult cmd_compare_methods(const RunConfig& cfg, int jobs) {
  validate(cfg);
  GridResult grid;
  std::atomic<int> cells_run{0}, cells_skipped{0};
  const fs::path run_dir = run_dir_of(cfg);
  SnapshotStore store = open_dense_run(cfg);
  save_config(run_dir / "config-compare.json", cfg);

  const auto [train_set, test_set] = make_datasets(cfg);
  const ModelState dense = store.load(cfg.schedule.total_epochs);
  const int sep = cfg.dataset.word_separator_token;

  ReportWriter writer(run_dir / "reports" / "methods.csv");
  grid.report_csv = writer.path();
  auto existing = read_reports(writer.path());
  std::mutex report_mu;
  ErrorLog errors(run_dir / "reports" / "errors.log");

  const double dense_wer = evaluate(dense, test_set, sep);
  const std::size_t total_params = dense.total_param_count();

  auto append_row = [&](RunReport row) {
    std::lock_guard<std::mutex> lock(report_mu);
    writer.append(row);
  };

  // Sparsity-0 rows: every method equals the dense model.
  for (const auto& method : cfg.prune.methods) {
    if (has_cell(existing, method, 0.0, -1, 0)) {
      ++cells_skipped;
      continue;
    }
    RunReport row;
    row.method = method;
    row.recovery = "-";
    row.sparsity = 0.0;
    row.test_wer = dense_wer;
    row.nonzero_params = total_params;
    append_row(row);
    ++cells_run;
  }

  PruneContext ctx = make_context(cfg, train_set);
  const PruneOptions popts = make_prune_options(cfg);

  std::vector<double> grid_sparsities;
  for (double sp : cfg.prune.sparsities)
    if (sp > 0.0) grid_sparsities.push_back(sp);

  std::vector<std::function<void()>> tasks;

  auto eval_and_report = [&](const std::string& method,
                             const std::string& recovery, double sp,
                             int round, const SparseModel& sm,
                             double wall_s) {
    RunReport row;
    row.method = method;
    row.recovery = recovery;
    row.sparsity = sp;
    row.round = round;
    row.test_wer = evaluate(sm.state, test_set, sep);
    row.nonzero_params = effective_param_count(sm.state, sm.mask).nonzero;
    row.wall_seconds = wall_s;
    append_row(row);
    save_sparse_artifact(run_dir / "models" /
                             (method + "-" + sp_label(sp)),
                         sm, store.run_id());
  };

  for (const auto& method : cfg.prune.methods) {
    if (method == "iter-lth" || method == "iter-lrr") {
      // One iterative run to the deepest grid sparsity covers every row.
      bool complete = true;
      for (double sp : grid_sparsities) {
        const int round = int(std::lround(sp * cfg.prune.rounds));
        if (!has_cell(existing, method, sp, -1, round)) complete = false;
      }
      if (complete) {
        cells_skipped += int(grid_sparsities.size());
        continue;
      }
      tasks.push_back([&, method] {
        const Recovery rec =
            method == "iter-lth" ? Recovery::Lth : Recovery::Lrr;
        const IterSchedule sched = cfg.prune.iter_schedule == "geometric"
                                       ? IterSchedule::Geometric
                                       : IterSchedule::Linear;
        const double target =
            *std::max_element(grid_sparsities.begin(), grid_sparsities.end());
        const auto t0 = Clock::now();
        try {
          iterative_prune(
              store, target, cfg.prune.rounds, rec, sched, ctx, popts,
              [&](int round, const SparseModel& sm) {
                const double nominal =
                    std::min(double(round) / cfg.prune.rounds, target);
                for (double sp : grid_sparsities)
                  if (std::fabs(nominal - sp) < 1e-9)
                    eval_and_report(method, to_string(rec), sp, round, sm,
                                    seconds_since(t0));
              });
          ++cells_run;
        } catch (const std::exception& e) {
          errors.record(method, e.what());
        }
      });
      continue;
    }

    for (double sp : grid_sparsities) {
      if (has_cell(existing, method, sp, -1, 0)) {
        ++cells_skipped;
        continue;
      }
      tasks.push_back([&, method, sp] {
        const auto t0 = Clock::now();
        try {
          SparseModel sm;
          std::string recovery = "-";
          if (method == "naive") {
            sm = naive_prune(dense, sp, store.run_id());
          } else {
            Recovery rec;
            if (method == "finetune") rec = Recovery::Finetune;
            else if (method == "parp") rec = Recovery::Parp;
            else if (method == "lth") rec = Recovery::Lth;
            else if (method == "lrr") rec = Recovery::Lrr;
            else throw std::invalid_argument("unknown method: " + method);
            recovery = to_string(rec);
            sm = one_shot_prune(store, sp, rec, 0, ctx, popts);
          }
          eval_and_report(method, recovery, sp, 0, sm, seconds_since(t0));
          ++cells_run;
        } catch (const std::exception& e) {
          errors.record(method + "-" + sp_label(sp), e.what());
        }
      });
    }
  }

  run_parallel(jobs, tasks);
  grid.cells_run = cells_run;
  grid.cells_skipped = cells_skipped;
  grid.failures = errors.count();

  // Markdown table mirrors the report, one column per method.
  const auto rows = read_reports(writer.path());
  const std::string md = methods_markdown_table(rows, cfg.prune.methods,
                                                cfg.prune.sparsities);
  io::write_file((run_dir / "reports" / "methods.md").string(), md);
  return grid;
}

GridResult cmd_ablate_rewind(const RunConfig& cfg, int jobs) {
  validate(cfg);
  GridResult grid;
  std::atomic<int> cells_run{0}, cells_skipped{0};
  const fs::path run_dir = run_dir_of(cfg);
  SnapshotStore store = open_dense_run(cfg);
  save_config(run_dir / "config-ablate.json", cfg);

  const auto [train_set, test_set] = make_datasets(cfg);
  const int sep = cfg.dataset.word_separator_token;
  const auto epochs = rewind_epochs_of(cfg);

  const fs::path csv = run_dir / "reports" / "rewind.csv";
  grid.report_csv = csv;
  fs::create_directories(csv.parent_path());

  // Plot-data CSV: x = rewind epoch, y = WER, one curve per sparsity.
  struct Key {
    double sp;
    int t;
  };
  std::vector<Key> done;
  if (fs::exists(csv)) {
    std::ifstream f(csv);
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      Key k{};
      double wer_unused;
      if (std::sscanf(line.c_str(), "%lf,%d,%lf", &k.sp, &k.t, &wer_unused) == 3)
        done.push_back(k);
    }
  } else {
    std::ofstream f(csv);
    f << "sparsity,rewind_epoch,test_wer\n";
  }
  auto is_done = [&](double sp, int t) {
    for (const auto& k : done)
      if (std::fabs(k.sp - sp) < 1e-9 && k.t == t) return true;
    return false;
  };

  std::mutex mu;
  ErrorLog errors(run_dir / "reports" / "errors.log");
  PruneContext ctx = make_context(cfg, train_set);
  const PruneOptions popts = make_prune_options(cfg);

  std::vector<std::function<void()>> tasks;
  for (double sp : cfg.ablate_sparsities) {
    for (int t : epochs) {
      if (is_done(sp, t)) {
        ++cells_skipped;
        continue;
      }
      tasks.push_back([&, sp, t] {
        try {
          const SparseModel sm =
              one_shot_prune(store, sp, Recovery::Rewind, t, ctx, popts);
          const double wer_v = evaluate(sm.state, test_set, sep);
          {
            std::lock_guard<std::mutex> lock(mu);
            std::ofstream f(csv, std::ios::app);
            char buf[96];
            std::snprintf(buf, sizeof buf, "%.6f,%d,%.6f", sp, t, wer_v);
            f << buf << '\n';
          }
          save_sparse_artifact(run_dir / "models" /
                                   ("rewind-t" + std::to_string(t) + "-" +
                                    sp_label(sp)),
                               sm, store.run_id());
          ++cells_run;
        } catch (const std::exception& e) {
          errors.record("rewind-t" + std::to_string(t) + "-" + sp_label(sp),
                        e.what());
        }
      });
    }
  }
  run_parallel(jobs, tasks);
  grid.cells_run = cells_run;
  grid.cells_skipped = cells_skipped;
  grid.failures = errors.count();
  return grid;
}

GridResult cmd_eval_noise(const RunConfig& cfg,
                          std::vector<std::string> model_paths,
                          std::vector<NoiseKind> kinds, int jobs) {
  validate(cfg);
  GridResult grid;
  std::atomic<int> cells_run{0}, cells_skipped{0};
  const fs::path run_dir = run_dir_of(cfg);
  const auto [train_set, test_set] = make_datasets(cfg);
  const int sep = cfg.dataset.word_separator_token;

  if (kinds.empty()) kinds = all_noise_kinds();
  if (model_paths.empty()) {
    const fs::path models = run_dir / "models";
    if (fs::exists(models))
      for (const auto& entry : fs::directory_iterator(models))
        if (entry.is_directory() &&
            fs::exists(entry.path() / "model.ckpt"))
          model_paths.push_back(entry.path().string());
    std::sort(model_paths.begin(), model_paths.end());
  }
  if (model_paths.empty())
    throw std::runtime_error("eval-noise: no models found; pass --model");

  const fs::path csv = run_dir / "reports" / "noise.csv";
  grid.report_csv = csv;
  fs::create_directories(csv.parent_path());
  std::vector<std::string> done;
  if (fs::exists(csv)) {
    std::ifstream f(csv);
    std::string line;
    std::getline(f, line);
    while (std::getline(f, line)) {
      const auto c1 = line.find(',');
      const auto c2 = line.find(',', c1 + 1);
      const auto c3 = line.find(',', c2 + 1);
      if (c3 != std::string::npos) done.push_back(line.substr(0, c3));
    }
  } else {
    std::ofstream f(csv);
    f << "model,kind,level,wer\n";
  }

  std::mutex mu;
  ErrorLog errors(run_dir / "reports" / "errors.log");
  std::vector<std::function<void()>> tasks;

  for (const auto& path_str : model_paths) {
    fs::path mpath(path_str);
    if (fs::is_directory(mpath)) mpath /= "model.ckpt";
    const std::string model_id =
        mpath.parent_path().filename().string().empty()
            ? mpath.stem().string()
            : mpath.parent_path().filename().string();
    tasks.push_back([&, mpath, model_id] {
      try {
        const ModelState model = load_model_file(mpath);
        double clean_wer = -1.0;
        for (NoiseKind kind : kinds) {
          for (int level = 0; level <= 10; ++level) {
            const std::string key = model_id + "," +
                                    std::string(to_string(kind)) + "," +
                                    std::to_string(level);
            if (std::find(done.begin(), done.end(), key) != done.end()) {
              ++cells_skipped;
              continue;
            }
            double wer_v;
            if (level == 0) {
              if (clean_wer < 0)
                clean_wer = evaluate(model, test_set, sep);
              wer_v = clean_wer;
            } else {
              const NoiseSpec spec{kind, level};
              wer_v = evaluate(model, test_set, sep, spec,
                               cfg.seed ^ fnv1a64("eval-noise"),
                               cfg.severity);
            }
            std::lock_guard<std::mutex> lock(mu);
            std::ofstream f(csv, std::ios::app);
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s,%s,%d,%.6f", model_id.c_str(),
                          to_string(kind), level, wer_v);
            f << buf << '\n';
            ++cells_run;
          }
        }
      } catch (const std::exception& e) {
        errors.record("eval-noise/" + model_id, e.what());
      }
    });
  }
  run_parallel(jobs, tasks);
  grid.cells_run = cells_run;
  grid.cells_skipped = cells_skipped;
  grid.failures = errors.count();
  return grid;
}

std::vector<BenchReport> cmd_bench_sparse(
    const std::vector<std::size_t>& sizes,
    const std::vector<double>& sparsities, int repetitions,
    const fs::path& out_csv) {
  const auto reports = bench_spmv(sizes, sparsities, repetitions);
  if (out_csv.has_parent_path())
    fs::create_directories(out_csv.parent_path());
  std::ofstream f(out_csv);
  f << "size,sparsity,dense_ns,sparse_ns,speedup\n";
  for (const auto& r : reports) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu,%.3f,%.1f,%.1f,%.4f", r.size,
                  r.sparsity, r.dense_ns, r.sparse_ns, r.speedup);
    f << buf << '\n';
  }
  return reports;
}

void cmd_inspect(const fs::path& path, std::ostream& out) {
  const std::string head = [&] {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path.string());
    char buf[8] = {};
    f.read(buf, 8);
    return std::string(buf, std::size_t(f.gcount()));
  }();

  if (head == "PLCKPT01") {
    const CheckpointInfo info = inspect_checkpoint(path);
    out << "checkpoint " << path.string() << '\n';
    out << "  run_id: " << info.run_id << "  epoch: " << info.epoch
        << "  seed: " << info.seed << '\n';
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(info.digest));
    out << "  digest: " << buf << '\n';
    std::size_t total = 0;
    for (const auto& t : info.tensors) {
      out << "  " << t.name << "  [";
      for (std::size_t i = 0; i < t.shape.size(); ++i)
        out << (i ? "x" : "") << t.shape[i];
      out << "]" << (t.prunable ? "  prunable" : "") << '\n';
      total += shape_numel(t.shape);
    }
    out << "  total params: " << total << '\n';
  } else if (head == "PLMASK01") {
    const PruneMask mask = load_mask(path);
    out << "mask " << path.string() << '\n';
    for (const auto& t : mask.tensors) {
      std::size_t kept = 0;
      for (auto k : t.keep) kept += k;
      out << "  " << t.name << "  kept " << kept << "/" << t.keep.size()
          << '\n';
    }
    out << "  sparsity: " << sparsity_of(mask) << '\n';
  } else if (head == "PLDATA01") {
    const auto [spec, data] = load_dataset(path);
    out << "dataset " << path.string() << '\n';
    out << "  samples: " << data.size() << "  feature_dim: "
        << spec.feature_dim << "  alphabet: " << spec.alphabet_size
        << "  seed: " << spec.seed << '\n';
  } else {
    throw std::runtime_error("unrecognized file format: " + path.string());
  }
}

}  // namespace prunelab
