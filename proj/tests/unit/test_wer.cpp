// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "prunelab/wer.hpp"
#include "test_util.hpp"

using namespace prunelab;

namespace {

std::vector<int> chars(const std::string& s) {
  std::vector<int> out;
  for (char c : s) out.push_back(int(c));
  return out;
}

}  // namespace

TEST_CASE("identical sequences have zero WER") {
  const std::vector<Word> ref = {{1, 2}, {3}, {4, 5}};
  const WerScore s = wer(ref, ref);
  CHECK(s.edits() == 0);
  CHECK(s.wer == 0.0);
  CHECK(s.reference_words == 3);
}

TEST_CASE("kitten vs sitting has distance 3") {
  const WerScore s = wer_tokens(chars("kitten"), chars("sitting"));
  CHECK(s.edits() == 3);
  // One classical alignment: 2 substitutions + 1 insertion.
  CHECK(s.substitutions == 2);
  CHECK(s.insertions == 1);
  CHECK(s.deletions == 0);
}

TEST_CASE("dropped word counts as one deletion") {
  const std::vector<Word> ref = {{'t'}, {'c'}, {'s'}};
  const std::vector<Word> hyp = {{'t'}, {'c'}};
  const WerScore s = wer(ref, hyp);
  CHECK(s.deletions == 1);
  CHECK(s.insertions == 0);
  CHECK(s.substitutions == 0);
  CHECK(s.wer == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("empty reference is rejected") {
  CHECK_THROWS_AS((void)wer({}, {{1}}), std::invalid_argument);
}

TEST_CASE("wer can exceed one") {
  const WerScore s = wer_tokens({1}, {2, 3, 4});
  CHECK(s.wer > 1.0);
}

TEST_CASE("tie-break prefers substitution") {
  const WerScore s = wer_tokens({1}, {2});
  CHECK(s.substitutions == 1);
  CHECK(s.insertions == 0);
  CHECK(s.deletions == 0);
}

TEST_CASE("DP distance equals brute force on random pairs") {
  std::mt19937 gen(31337);
  std::uniform_int_distribution<int> len_d(0, 6), sym_d(0, 2);
  for (int it = 0; it < 500; ++it) {
    std::vector<int> a(len_d(gen)), b(len_d(gen));
    for (auto& v : a) v = sym_d(gen);
    for (auto& v : b) v = sym_d(gen);
    CHECK(edit_distance(a, b) == testutil::brute_edit_distance(a, b));
  }
}

TEST_CASE("triangle inequality on random triples") {
  std::mt19937 gen(4242);
  std::uniform_int_distribution<int> len_d(0, 8), sym_d(0, 3);
  for (int it = 0; it < 300; ++it) {
    std::vector<int> a(len_d(gen)), b(len_d(gen)), c(len_d(gen));
    for (auto& v : a) v = sym_d(gen);
    for (auto& v : b) v = sym_d(gen);
    for (auto& v : c) v = sym_d(gen);
    CHECK(edit_distance(a, c) <=
          edit_distance(a, b) + edit_distance(b, c));
  }
}

TEST_CASE("WER is invariant under joint relabeling") {
  std::mt19937 gen(99);
  std::uniform_int_distribution<int> len_d(1, 6), sym_d(0, 3);
  for (int it = 0; it < 200; ++it) {
    std::vector<int> a(len_d(gen)), b(len_d(gen));
    for (auto& v : a) v = sym_d(gen);
    for (auto& v : b) v = sym_d(gen);
    const int relabel[4] = {7, 3, 9, 5};
    std::vector<int> ra = a, rb = b;
    for (auto& v : ra) v = relabel[v];
    for (auto& v : rb) v = relabel[v];
    const WerScore s1 = wer_tokens(a, b);
    const WerScore s2 = wer_tokens(ra, rb);
    CHECK(s1.edits() == s2.edits());
    CHECK(s1.wer == s2.wer);
  }
}

TEST_CASE("group_words splits at the separator and keeps empties") {
  const Transcript t{{1, 2, 9, 3, 9, 9, 4}};
  const auto words = group_words(t, 9);
  REQUIRE(words.size() == 4);
  CHECK(words[0] == Word{1, 2});
  CHECK(words[1] == Word{3});
  CHECK(words[2] == Word{});
  CHECK(words[3] == Word{4});
}
