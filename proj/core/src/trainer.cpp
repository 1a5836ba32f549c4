// SPDX-License-Identifier: Apache-2.0
#include "prunelab/trainer.hpp"

#include <numeric>
#include <ostream>
#include <stdexcept>

#include "prunelab/ctc.hpp"
#include "prunelab/optimizer.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

std::vector<Batch> pack_batches(const Dataset& data,
                                const std::vector<std::size_t>& order,
                                int batch_frames_cap) {
  std::vector<Batch> batches;
  Batch cur;
  for (std::size_t idx : order) {
    const int frames = data[idx].features.frames;
    if (frames > batch_frames_cap)
      throw std::invalid_argument(
          "pack_batches: sample of " + std::to_string(frames) +
          " frames exceeds batch_frames_cap " +
          std::to_string(batch_frames_cap));
    if (!cur.indices.empty() && cur.total_frames + frames > batch_frames_cap) {
      batches.push_back(std::move(cur));
      cur = Batch{};
    }
    cur.indices.push_back(idx);
    cur.total_frames += frames;
  }
  if (!cur.indices.empty()) batches.push_back(std::move(cur));
  return batches;
}

namespace {

FeatureSequence augmented_view(const Sample& sample,
                               const AugmentPolicy& policy,
                               const SeverityTable& severity, Rng& rng) {
  const NoiseSpec spec = sample_augmentation(policy, rng);
  FeatureSequence seq = corrupt(sample.features, spec, rng.next_u64(), severity);
  return time_mask(seq, policy, rng);
}

}  // namespace

ModelState train(ModelState model, const Dataset& data,
                 const TrainSchedule& schedule, const TrainOptions& options) {
  validate(schedule);
  if (data.empty()) throw std::invalid_argument("train: empty dataset");
  if (options.start_epoch < 0 || options.start_epoch > schedule.total_epochs)
    throw std::invalid_argument("train: start_epoch outside [0, total_epochs]");
  if (options.grad_mask && !options.grad_mask->matches(model))
    throw std::invalid_argument("train: grad_mask does not match model");
  if (options.augment) validate(*options.augment);

  const ModelConfig cfg = config_of(model);
  for (const auto& s : data) {
    if (s.features.dim != cfg.feature_dim)
      throw std::invalid_argument("train: sample feature dim mismatch");
    if (s.features.frames < ctc_min_frames(s.transcript))
      throw std::invalid_argument("train: sample too short for its transcript");
  }

  AdamW optimizer(model, {schedule.beta1, schedule.beta2, 1e-8,
                          schedule.weight_decay});
  GradientSet grads(model);

  if (options.hooks.on_start) options.hooks.on_start(model);

  int global_step = 0;
  for (int epoch = options.start_epoch; epoch < schedule.total_epochs; ++epoch) {
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(options.run_seed, "shuffle", std::uint64_t(epoch));
    shuffle_rng.shuffle(order);
    const auto batches = pack_batches(data, order, schedule.batch_frames_cap);
    const double steps = double(batches.size());

    double loss_sum = 0.0;
    WerAccumulator wer_acc;

    for (std::size_t b = 0; b < batches.size(); ++b) {
      const double lr = lr_at(schedule, double(epoch) + double(b) / steps);
      grads.zero();
      for (std::size_t idx : batches[b].indices) {
        const Sample& sample = data[idx];
        ForwardTrace trace;
        LogProbs lp;
        if (options.augment) {
          Rng aug_rng(options.run_seed, "augment",
                      (std::uint64_t(epoch) << 32) | std::uint64_t(idx));
          const FeatureSequence seq = augmented_view(
              sample, *options.augment, options.severity, aug_rng);
          lp = forward(model, seq, trace);
        } else {
          lp = forward(model, sample.features, trace);
        }
        const CtcResult ctc = ctc_loss(lp, sample.transcript);
        loss_sum += ctc.loss;
        wer_acc.add(wer(group_words(sample.transcript,
                                    options.word_separator_token),
                        group_words(greedy_decode(lp),
                                    options.word_separator_token)));
        backward(model, trace, ctc.dlogprob, grads);
      }
      grads.scale(1.0 / double(batches[b].indices.size()));
      if (options.grad_mask) zero_pruned_grads(grads, *options.grad_mask);
      optimizer.step(model, grads, lr);
      if (options.hooks.after_step)
        options.hooks.after_step(model, global_step);
      ++global_step;
    }

    model.epoch_tag = epoch + 1;
    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr_at(schedule, double(epoch));
    stats.mean_loss = loss_sum / double(data.size());
    stats.train_wer = wer_acc.total().wer;
    if (options.telemetry) {
      auto& out = *options.telemetry;
      out << stats.epoch << ',' << stats.lr << ',' << stats.mean_loss << ','
          << stats.train_wer << '\n';
      out.flush();
    }
    if (options.hooks.after_epoch) options.hooks.after_epoch(model, stats);
  }
  return model;
}

WerScore evaluate(const ModelState& model, const Dataset& data,
                  int word_separator_token, const NoiseSpec& noise,
                  std::uint64_t noise_seed, const SeverityTable& severity) {
  validate(noise);
  WerAccumulator acc;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Sample& sample = data[i];
    LogProbs lp;
    if (noise.level > 0) {
      Rng rng(noise_seed, "eval-noise", i);
      const FeatureSequence seq =
          corrupt(sample.features, noise, rng.next_u64(), severity);
      lp = forward(model, seq);
    } else {
      lp = forward(model, sample.features);
    }
    acc.add(wer(group_words(sample.transcript, word_separator_token),
                group_words(greedy_decode(lp), word_separator_token)));
  }
  return acc.total();
}

}  // namespace prunelab
