#include <catch2/catch_amalgamated.hpp>

#include <map>

#include "reader/trie.hpp"
#include "test_util.hpp"

using namespace reader;

TEST_CASE("insert creates the path with unit counts") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2, 3});
  CHECK(trie.count_of(std::vector<TokenId>{1}) == 1);
  CHECK(trie.count_of(std::vector<TokenId>{1, 2}) == 1);
  CHECK(trie.count_of(std::vector<TokenId>{1, 2, 3}) == 1);
  CHECK(trie.count_of(std::vector<TokenId>{2}) == 0);
}

TEST_CASE("sibling branches split counts") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2, 3});
  trie.insert(std::vector<TokenId>{1, 2, 4});
  CHECK(trie.count_of(std::vector<TokenId>{1}) == 2);
  CHECK(trie.count_of(std::vector<TokenId>{1, 2, 3}) == 1);
  CHECK(trie.count_of(std::vector<TokenId>{1, 2, 4}) == 1);
}

TEST_CASE("repeated insert doubles counts without new structure") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{5, 6});
  const auto nodes = trie.node_count();
  trie.insert(std::vector<TokenId>{5, 6});
  CHECK(trie.node_count() == nodes);
  CHECK(trie.count_of(std::vector<TokenId>{5, 6}) == 2);
}

TEST_CASE("counts match a naive scan over inserted sequences") {
  Rng rng(31);
  TrieStore trie;
  std::vector<std::vector<TokenId>> inserted;
  for (int i = 0; i < 200; ++i) {
    auto seq = testutil::random_tokens(rng, 1 + static_cast<int>(rng.below(12)), 6);
    trie.insert(seq);
    inserted.push_back(std::move(seq));
  }
  for (int trial = 0; trial < 300; ++trial) {
    const auto probe = testutil::random_tokens(rng, 1 + static_cast<int>(rng.below(5)), 6);
    std::uint64_t naive = 0;
    for (const auto& seq : inserted) {
      if (seq.size() < probe.size()) continue;
      if (std::equal(probe.begin(), probe.end(), seq.begin())) ++naive;
    }
    REQUIRE(trie.count_of(probe) == naive);
  }
}

TEST_CASE("subtree misses when the suffix is absent") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2});
  CHECK(trie_subtree(trie, std::vector<TokenId>{9}, 4, 8).empty());
}

TEST_CASE("subtree children come in descending frequency order") {
  // "the cat sat" once, "the cat ran" twice, tokens: the=1 cat=2 sat=3 ran=4
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2, 3});
  trie.insert(std::vector<TokenId>{1, 2, 4});
  trie.insert(std::vector<TokenId>{1, 2, 4});
  const TreeFragment frag = trie_subtree(trie, std::vector<TokenId>{1, 2}, 1, 8);
  REQUIRE(frag.tokens.size() == 3);
  CHECK(frag.tokens[1] == 4);  // ran first (count 2)
  CHECK(frag.tokens[2] == 3);
}

TEST_CASE("max_nodes=1 keeps only the most frequent child") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2});
  trie.insert(std::vector<TokenId>{1, 3});
  trie.insert(std::vector<TokenId>{1, 3});
  const TreeFragment frag = trie_subtree(trie, std::vector<TokenId>{1}, 4, 1);
  REQUIRE(frag.tokens.size() == 2);
  CHECK(frag.tokens[1] == 3);
}

TEST_CASE("subtree extraction is a truncated DFS") {
  TrieStore trie;
  trie.insert(std::vector<TokenId>{1, 2, 3, 4});
  trie.insert(std::vector<TokenId>{1, 2, 3, 4});
  trie.insert(std::vector<TokenId>{1, 5});
  const TreeFragment frag = trie_subtree(trie, std::vector<TokenId>{1}, 8, 3);
  // DFS follows the frequent child 2 -> 3 -> 4 and exhausts the budget
  REQUIRE(frag.tokens.size() == 4);
  CHECK(frag.tokens[1] == 2);
  CHECK(frag.tokens[2] == 3);
  CHECK(frag.tokens[3] == 4);
  CHECK(fragment_deepest_branch(frag) == std::vector<TokenId>{2, 3, 4});
}

TEST_CASE("deepest branch of an empty fragment is empty") {
  TrieStore trie;
  CHECK(fragment_deepest_branch(trie_subtree(trie, std::vector<TokenId>{1}, 4, 4)).empty());
}
