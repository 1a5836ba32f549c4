// SPDX-License-Identifier: Apache-2.0
#include "prunelab/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "io_util.hpp"
#include "prunelab/rng.hpp"

namespace prunelab {

namespace {

constexpr double kPrototypeNorm = 2.0;

void check_range(int lo, int hi, int floor, const char* field) {
  if (lo < floor || hi < lo)
    throw std::invalid_argument(std::string("DatasetSpec.") + field +
                                ": empty or invalid range");
}

}  // namespace

void validate(const DatasetSpec& spec) {
  if (spec.num_samples <= 0)
    throw std::invalid_argument("DatasetSpec.num_samples: must be positive");
  if (spec.alphabet_size < 3)
    throw std::invalid_argument(
        "DatasetSpec.alphabet_size: need the separator plus two graphemes");
  if (spec.word_separator_token < 1 ||
      spec.word_separator_token > spec.alphabet_size)
    throw std::invalid_argument(
        "DatasetSpec.word_separator_token: outside [1, alphabet_size]");
  check_range(spec.words_min, spec.words_max, 1, "words");
  check_range(spec.word_tokens_min, spec.word_tokens_max, 1, "word_tokens");
  check_range(spec.frames_per_token_min, spec.frames_per_token_max, 1,
              "frames_per_token");
  if (spec.feature_dim <= 0)
    throw std::invalid_argument("DatasetSpec.feature_dim: must be positive");
  if (spec.emission_noise_std < 0)
    throw std::invalid_argument(
        "DatasetSpec.emission_noise_std: must be >= 0");
}

std::vector<std::vector<float>> token_prototypes(const DatasetSpec& spec) {
  validate(spec);
  const int A = spec.alphabet_size, D = spec.feature_dim;
  Rng rng(spec.seed, "prototypes");

  std::vector<std::vector<double>> protos(std::size_t(A) + 1);
  for (int a = 1; a <= A; ++a) {
    std::vector<double> v(D);
    for (auto& x : v) x = rng.gaussian();
    if (A <= D) {
      // Gram-Schmidt against earlier prototypes: orthogonal directions give
      // the clean task an exact nearest-prototype decoding.
      for (int b = 1; b < a; ++b) {
        const auto& u = protos[b];
        double dot = 0.0;
        for (int d = 0; d < D; ++d) dot += v[d] * u[d];
        const double s = dot / (kPrototypeNorm * kPrototypeNorm);
        for (int d = 0; d < D; ++d) v[d] -= s * u[d];
      }
    }
    double norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    while (norm < 1e-9) {  // degenerate draw; redraw deterministically
      for (auto& x : v) x = rng.gaussian();
      norm = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    }
    for (auto& x : v) x *= kPrototypeNorm / norm;
    protos[a] = std::move(v);
  }

  std::vector<std::vector<float>> out(std::size_t(A) + 1,
                                      std::vector<float>(D, 0.0f));
  for (int a = 1; a <= A; ++a)
    for (int d = 0; d < D; ++d) out[a][d] = float(protos[a][d]);
  return out;
}

namespace {

Sample make_sample(const DatasetSpec& spec,
                   const std::vector<std::vector<float>>& protos,
                   std::uint64_t index) {
  Rng rng(spec.seed, "sample", index);

  Transcript tr;
  const int words = int(rng.uniform_int(spec.words_min, spec.words_max));
  for (int w = 0; w < words; ++w) {
    if (w > 0) tr.tokens.push_back(spec.word_separator_token);
    const int toks =
        int(rng.uniform_int(spec.word_tokens_min, spec.word_tokens_max));
    for (int k = 0; k < toks; ++k) {
      // Any grapheme except the separator; adjacent duplicates are redrawn
      // so a frame classifier can recover the transcript without blanks.
      int tok;
      do {
        tok = int(rng.uniform_int(1, spec.alphabet_size - 1));
        if (tok >= spec.word_separator_token) ++tok;
      } while (!tr.tokens.empty() && tok == tr.tokens.back());
      tr.tokens.push_back(tok);
    }
  }

  std::vector<int> durations(tr.tokens.size());
  int total = 0;
  for (auto& d : durations) {
    d = int(rng.uniform_int(spec.frames_per_token_min,
                            spec.frames_per_token_max));
    total += d;
  }

  // Knot at the center of each token's span; linear interpolation between
  // consecutive knots, constant before the first and after the last.
  std::vector<double> centers(tr.tokens.size());
  {
    int start = 0;
    for (std::size_t i = 0; i < durations.size(); ++i) {
      centers[i] = start + (durations[i] - 1) * 0.5;
      start += durations[i];
    }
  }

  FeatureSequence seq;
  seq.frames = total;
  seq.dim = spec.feature_dim;
  seq.values.resize(std::size_t(total) * spec.feature_dim);

  std::size_t knot = 0;
  for (int t = 0; t < total; ++t) {
    while (knot + 1 < centers.size() && centers[knot + 1] <= double(t)) ++knot;
    const float* lo = protos[tr.tokens[knot]].data();
    const float* hi = lo;
    double w = 0.0;
    if (knot + 1 < centers.size() && double(t) > centers[knot]) {
      hi = protos[tr.tokens[knot + 1]].data();
      w = (double(t) - centers[knot]) / (centers[knot + 1] - centers[knot]);
    }
    float* row = &seq.values[std::size_t(t) * spec.feature_dim];
    for (int d = 0; d < spec.feature_dim; ++d)
      row[d] = float((1.0 - w) * lo[d] + w * hi[d]);
  }

  if (spec.emission_noise_std > 0) {
    for (auto& v : seq.values)
      v = float(double(v) + double(spec.emission_noise_std) * rng.gaussian());
  }

  return Sample{std::move(seq), std::move(tr)};
}

}  // namespace

Dataset generate(const DatasetSpec& spec) {
  validate(spec);
  const auto protos = token_prototypes(spec);
  Dataset data;
  data.reserve(spec.num_samples);
  for (int i = 0; i < spec.num_samples; ++i)
    data.push_back(make_sample(spec, protos, std::uint64_t(i)));
  return data;
}

std::pair<Dataset, Dataset> split(const Dataset& data, double train_fraction,
                                  std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("split: train_fraction must be in (0,1)");
  const std::size_t n = data.size();
  const std::size_t k =
      std::size_t(std::llround(train_fraction * double(n)));

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed, "split");
  rng.shuffle(idx);

  std::vector<std::uint8_t> in_train(n, 0);
  for (std::size_t i = 0; i < k && i < n; ++i) in_train[idx[i]] = 1;

  Dataset train, test;
  train.reserve(k);
  test.reserve(n - k);
  for (std::size_t i = 0; i < n; ++i)
    (in_train[i] ? train : test).push_back(data[i]);
  return {std::move(train), std::move(test)};
}

void save_dataset(const std::filesystem::path& path, const DatasetSpec& spec,
                  const Dataset& data) {
  io::ByteWriter w;
  w.bytes("PLDATA01", 8);
  w.i32(spec.num_samples);
  w.i32(spec.alphabet_size);
  w.i32(spec.word_separator_token);
  w.i32(spec.words_min);
  w.i32(spec.words_max);
  w.i32(spec.word_tokens_min);
  w.i32(spec.word_tokens_max);
  w.i32(spec.frames_per_token_min);
  w.i32(spec.frames_per_token_max);
  w.i32(spec.feature_dim);
  w.f32(spec.emission_noise_std);
  w.u64(spec.seed);
  w.u32(std::uint32_t(data.size()));
  for (const auto& s : data) {
    w.u32(std::uint32_t(s.features.frames));
    w.f32_array(s.features.values.data(), s.features.values.size());
    w.u32(std::uint32_t(s.transcript.tokens.size()));
    for (int tok : s.transcript.tokens) w.u16(std::uint16_t(tok));
  }
  io::write_file(path.string(), w.data());
}

std::pair<DatasetSpec, Dataset> load_dataset(const std::filesystem::path& path) {
  io::ByteReader r(io::read_file(path.string()));
  char magic[8];
  std::memcpy(magic, r.data().data(), 8);
  if (std::string_view(magic, 8) != "PLDATA01")
    throw std::runtime_error("not a dataset file: " + path.string());
  (void)r.u64();  // skip magic

  DatasetSpec spec;
  spec.num_samples = r.i32();
  spec.alphabet_size = r.i32();
  spec.word_separator_token = r.i32();
  spec.words_min = r.i32();
  spec.words_max = r.i32();
  spec.word_tokens_min = r.i32();
  spec.word_tokens_max = r.i32();
  spec.frames_per_token_min = r.i32();
  spec.frames_per_token_max = r.i32();
  spec.feature_dim = r.i32();
  spec.emission_noise_std = r.f32();
  spec.seed = r.u64();

  const std::uint32_t count = r.u32();
  Dataset data;
  data.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    Sample s;
    s.features.frames = int(r.u32());
    s.features.dim = spec.feature_dim;
    s.features.values.resize(std::size_t(s.features.frames) *
                             spec.feature_dim);
    r.f32_array(s.features.values.data(), s.features.values.size());
    const std::uint32_t L = r.u32();
    s.transcript.tokens.resize(L);
    for (std::uint32_t j = 0; j < L; ++j)
      s.transcript.tokens[j] = int(r.u16());
    data.push_back(std::move(s));
  }
  return {spec, std::move(data)};
}

}  // namespace prunelab
