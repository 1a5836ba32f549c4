// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <set>

#include "prunelab/data.hpp"
#include "test_util.hpp"

using namespace prunelab;

TEST_CASE("generation is a pure function of the spec") {
  const DatasetSpec spec = testutil::tiny_dataset_spec();
  const Dataset a = generate(spec);
  const Dataset b = generate(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].features.values == b[i].features.values);
    CHECK(a[i].transcript == b[i].transcript);
  }
}

TEST_CASE("tokens avoid the separator and adjacent duplicates") {
  const Dataset data = generate(testutil::tiny_dataset_spec(64));
  for (const auto& s : data) {
    const auto& toks = s.transcript.tokens;
    REQUIRE(!toks.empty());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      CHECK(toks[i] >= 1);
      CHECK(toks[i] <= 6);
      if (i > 0 && toks[i] != 6) CHECK(toks[i] != toks[i - 1]);
    }
  }
}

TEST_CASE("noiseless single token yields identical prototype frames") {
  DatasetSpec spec = testutil::tiny_dataset_spec(8);
  spec.words_min = spec.words_max = 1;
  spec.word_tokens_min = spec.word_tokens_max = 1;
  spec.frames_per_token_min = spec.frames_per_token_max = 4;
  spec.emission_noise_std = 0.0f;
  const auto protos = token_prototypes(spec);
  const Dataset data = generate(spec);
  for (const auto& s : data) {
    REQUIRE(s.features.frames == 4);
    const int tok = s.transcript.tokens[0];
    for (int t = 0; t < 4; ++t)
      for (int d = 0; d < spec.feature_dim; ++d)
        CHECK(s.features.at(t, d) == protos[tok][d]);
  }
}

TEST_CASE("noiseless nearest-prototype decode recovers every transcript") {
  DatasetSpec spec = testutil::tiny_dataset_spec(64);
  spec.emission_noise_std = 0.0f;
  const auto protos = token_prototypes(spec);
  const Dataset data = generate(spec);
  for (const auto& s : data) {
    std::vector<int> classified;
    for (int t = 0; t < s.features.frames; ++t) {
      int best = 1;
      double best_d = 1e300;
      for (int a = 1; a <= spec.alphabet_size; ++a) {
        double d2 = 0.0;
        for (int d = 0; d < spec.feature_dim; ++d) {
          const double diff =
              double(s.features.at(t, d)) - double(protos[a][d]);
          d2 += diff * diff;
        }
        if (d2 < best_d) {
          best_d = d2;
          best = a;
        }
      }
      classified.push_back(best);
    }
    std::vector<int> collapsed;
    for (int tok : classified)
      if (collapsed.empty() || collapsed.back() != tok)
        collapsed.push_back(tok);
    CHECK(collapsed == s.transcript.tokens);
  }
}

TEST_CASE("prototypes are orthogonal with equal norm when they fit") {
  const DatasetSpec spec = testutil::tiny_dataset_spec();
  const auto protos = token_prototypes(spec);
  for (int a = 1; a <= spec.alphabet_size; ++a) {
    double norm = 0.0;
    for (int d = 0; d < spec.feature_dim; ++d)
      norm += double(protos[a][d]) * double(protos[a][d]);
    CHECK(std::sqrt(norm) == doctest::Approx(2.0).epsilon(1e-5));
    for (int b = a + 1; b <= spec.alphabet_size; ++b) {
      double dot = 0.0;
      for (int d = 0; d < spec.feature_dim; ++d)
        dot += double(protos[a][d]) * double(protos[b][d]);
      CHECK(std::fabs(dot) < 1e-5);
    }
  }
}

TEST_CASE("split partitions deterministically") {
  const Dataset data = generate(testutil::tiny_dataset_spec(100));
  const auto [train1, test1] = split(data, 0.9, 5);
  const auto [train2, test2] = split(data, 0.9, 5);
  CHECK(train1.size() == 90);
  CHECK(test1.size() == 10);
  CHECK(train1.size() == train2.size());
  for (std::size_t i = 0; i < train1.size(); ++i)
    CHECK(train1[i].transcript == train2[i].transcript);

  // Union sizes match and samples are not duplicated across halves.
  std::multiset<std::string> keys;
  auto key_of = [](const Sample& s) {
    std::string k;
    for (int t : s.transcript.tokens) k += char('0' + t);
    k += ':' + std::to_string(s.features.frames);
    for (float v : s.features.values) k += std::to_string(v);
    return k;
  };
  for (const auto& s : data) keys.insert(key_of(s));
  std::multiset<std::string> both;
  for (const auto& s : train1) both.insert(key_of(s));
  for (const auto& s : test1) both.insert(key_of(s));
  CHECK(keys == both);

  const auto [train3, _] = split(data, 0.9, 6);
  bool differs = train3.size() != train1.size();
  for (std::size_t i = 0; !differs && i < train1.size(); ++i)
    differs = !(train1[i].transcript == train3[i].transcript);
  CHECK(differs);
}

TEST_CASE("split rejects degenerate fractions") {
  const Dataset data = generate(testutil::tiny_dataset_spec(10));
  CHECK_THROWS_AS((void)split(data, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS((void)split(data, 1.0, 1), std::invalid_argument);
}

TEST_CASE("dataset file round-trips") {
  testutil::TempDir tmp("data");
  const DatasetSpec spec = testutil::tiny_dataset_spec(16);
  const Dataset data = generate(spec);
  const auto path = tmp.path() / "corpus.plds";
  save_dataset(path, spec, data);
  const auto [spec2, data2] = load_dataset(path);
  CHECK(spec2 == spec);
  REQUIRE(data2.size() == data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(data2[i].features.values == data[i].features.values);
    CHECK(data2[i].transcript == data[i].transcript);
  }
}

TEST_CASE("infeasible ranges are rejected with the field name") {
  DatasetSpec spec = testutil::tiny_dataset_spec();
  spec.words_min = 5;
  spec.words_max = 2;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = testutil::tiny_dataset_spec();
  spec.word_separator_token = 99;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
  spec = testutil::tiny_dataset_spec();
  spec.frames_per_token_min = 0;
  CHECK_THROWS_AS(validate(spec), std::invalid_argument);
}
