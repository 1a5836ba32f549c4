// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <vector>

#include "prunelab/rng.hpp"

using prunelab::Rng;

TEST_CASE("fnv1a64 known vectors") {
  CHECK(prunelab::fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(prunelab::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(prunelab::fnv1a64("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("streams are deterministic and label-separated") {
  Rng a(42, "weights");
  Rng b(42, "weights");
  Rng c(42, "biases");
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    all_equal = all_equal && (x == b.next_u64());
    any_diff = any_diff || (x != c.next_u64());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform_int stays inside inclusive bounds") {
  Rng rng(7);
  for (int i = 0; i < 10000; ++i) {
    const auto v = rng.uniform_int(-3, 5);
    CHECK(v >= -3);
    CHECK(v <= 5);
  }
  Rng one(9);
  for (int i = 0; i < 100; ++i) CHECK(one.uniform_int(4, 4) == 4);
}

TEST_CASE("next_double in [0,1), gaussian has sane moments") {
  Rng rng(123);
  double sum = 0.0, sum2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double g = rng.gaussian();
    sum += g;
    sum2 += g * g;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);
  CHECK(std::fabs(var - 1.0) < 0.03);
}

TEST_CASE("shuffle is a deterministic permutation") {
  std::vector<int> v1(50), v2(50);
  for (int i = 0; i < 50; ++i) v1[i] = v2[i] = i;
  Rng a(5, "shuffle", 3), b(5, "shuffle", 3);
  a.shuffle(v1);
  b.shuffle(v2);
  CHECK(v1 == v2);
  std::vector<int> sorted = v1;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
}
