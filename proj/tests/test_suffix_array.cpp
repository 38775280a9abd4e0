#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <map>

#include "reader/suffix_array.hpp"
#include "test_util.hpp"

using namespace reader;

namespace {

// oracle: all positions where pattern occurs in the concatenated stream
std::set<std::size_t> naive_occurrences(const std::vector<TokenId>& toks,
                                        const std::vector<TokenId>& pat) {
  std::set<std::size_t> out;
  if (pat.empty() || toks.size() < pat.size()) return out;
  for (std::size_t i = 0; i + pat.size() <= toks.size(); ++i)
    if (std::equal(pat.begin(), pat.end(), toks.begin() + i)) out.insert(i);
  return out;
}

}  // namespace

TEST_CASE("suffix array is a sorted permutation of all suffix starts") {
  Rng rng(71);
  const auto doc = testutil::random_tokens(rng, 60, 5);
  const auto s = SuffixArrayStore::build({doc}, 5);
  const auto& sa = s.suffix_array();
  REQUIRE(sa.size() == doc.size() + 1);  // + separator
  std::set<std::size_t> seen(sa.begin(), sa.end());
  CHECK(seen.size() == sa.size());
  const auto& toks = s.tokens();
  for (std::size_t i = 0; i + 1 < sa.size(); ++i) {
    CHECK_FALSE(std::lexicographical_compare(toks.begin() + sa[i + 1], toks.end(),
                                             toks.begin() + sa[i], toks.end()));
  }
}

TEST_CASE("search range matches a naive scan") {
  Rng rng(72);
  std::vector<std::vector<TokenId>> docs;
  for (int d = 0; d < 4; ++d) docs.push_back(testutil::random_tokens(rng, 50, 4));
  const auto s = SuffixArrayStore::build(docs, 4);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pat = testutil::random_tokens(rng, 1 + static_cast<int>(rng.below(4)), 4);
    const auto [lo, hi] = s.search(pat);
    std::set<std::size_t> got(s.suffix_array().begin() + lo, s.suffix_array().begin() + hi);
    REQUIRE(got == naive_occurrences(s.tokens(), pat));
  }
}

TEST_CASE("search misses give an empty range") {
  const auto s = SuffixArrayStore::build({{1, 2, 3}}, 10);
  const auto [lo, hi] = s.search(std::vector<TokenId>{7});
  CHECK(lo == hi);
  CHECK_THROWS_AS(s.search(std::vector<TokenId>{}), input_error);
}

TEST_CASE("branch follows the majority continuation") {
  // after [1,2]: 3 occurs twice, 4 once; after [1,2,3]: 5 both times
  const auto s = SuffixArrayStore::build({{1, 2, 3, 5}, {1, 2, 3, 5}, {1, 2, 4}}, 10);
  const Branch b = s.branch(std::vector<TokenId>{1, 2}, 4);
  CHECK(b.tokens == std::vector<TokenId>{3, 5});
}

TEST_CASE("branch stops at document separators") {
  const auto s = SuffixArrayStore::build({{1, 2}, {1, 2}}, 10);
  const Branch b = s.branch(std::vector<TokenId>{1}, 8);
  CHECK(b.tokens == std::vector<TokenId>{2});
}

TEST_CASE("branch ties break to the lowest token id") {
  const auto s = SuffixArrayStore::build({{1, 9}, {1, 4}}, 10);
  CHECK(s.branch(std::vector<TokenId>{1}, 1).tokens == std::vector<TokenId>{4});
}

TEST_CASE("branch respects the depth cap and missing patterns") {
  const auto s = SuffixArrayStore::build({{1, 2, 3, 4, 5}}, 10);
  CHECK(s.branch(std::vector<TokenId>{1}, 2).tokens == std::vector<TokenId>{2, 3});
  CHECK(s.branch(std::vector<TokenId>{8}, 4).empty());
  CHECK_THROWS_AS(s.branch(std::vector<TokenId>{1}, 0), input_error);
}

TEST_CASE("capacity bound applies to the concatenated stream") {
  CHECK_THROWS_AS(SuffixArrayStore::build({{1, 2, 3}}, 10, 3), capacity_error);
  CHECK_NOTHROW(SuffixArrayStore::build({{1, 2, 3}}, 10, 4));
}

TEST_CASE("save and load round-trip bit-exactly") {
  Rng rng(73);
  const auto s = SuffixArrayStore::build(
      {testutil::random_tokens(rng, 40, 9), testutil::random_tokens(rng, 25, 9)}, 9);
  const std::string path = "sa_roundtrip.bin";
  s.save(path);
  const auto loaded = SuffixArrayStore::load(path);
  CHECK(loaded.vocab() == s.vocab());
  CHECK(loaded.tokens() == s.tokens());
  CHECK(loaded.suffix_array() == s.suffix_array());
  std::remove(path.c_str());
}
