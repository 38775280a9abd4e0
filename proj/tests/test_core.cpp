#include <catch2/catch_amalgamated.hpp>

#include "reader/core.hpp"
#include "test_util.hpp"

using namespace reader;

TEST_CASE("validate_template accepts valid trees") {
  CHECK(validate_template({{DraftTreeTemplate::kNoParent}}).empty());
  CHECK(validate_template({{DraftTreeTemplate::kNoParent, 0, 0, 1}}).empty());
}

TEST_CASE("validate_template reports topological-order breach") {
  DraftTreeTemplate t{{DraftTreeTemplate::kNoParent, 2, 0}};
  auto v = validate_template(t);
  REQUIRE(v.size() == 1);
  CHECK(v[0].find("parents[1]=2") != std::string::npos);
}

TEST_CASE("validate_template enforces limits") {
  TemplateLimits limits;
  limits.max_depth = 2;
  CHECK_FALSE(validate_template(DraftTreeTemplate::chain(4), limits).empty());
  limits.max_depth = 3;
  CHECK(validate_template(DraftTreeTemplate::chain(4), limits).empty());
  limits.max_nodes = 3;
  CHECK_FALSE(validate_template(DraftTreeTemplate::chain(4), limits).empty());
}

TEST_CASE("derive_mask on a chain is causal") {
  const AncestorMask m = derive_mask(DraftTreeTemplate::chain(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m.at(i, j) == (j <= i));
}

TEST_CASE("siblings do not attend to each other") {
  const AncestorMask m = derive_mask({{DraftTreeTemplate::kNoParent, 0, 0}});
  const bool expect[3][3] = {{1, 0, 0}, {1, 1, 0}, {1, 0, 1}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(m.at(i, j) == expect[i][j]);
}

TEST_CASE("derive_mask equals brute-force ancestor walk on random templates") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int nodes = 2 + static_cast<int>(rng.below(63));
    const DraftTreeTemplate t = testutil::random_template(rng, nodes);
    const AncestorMask m = derive_mask(t);
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j)
        REQUIRE(m.at(i, j) == testutil::is_ancestor_or_self(t, i, j));
  }
}

TEST_CASE("derive_mask rejects invalid templates") {
  CHECK_THROWS_AS(derive_mask({{DraftTreeTemplate::kNoParent, 2, 0}}), structural_error);
}

TEST_CASE("flatten_branches basics") {
  DraftTree root_only{DraftTreeTemplate::root_only(), {7}};
  CHECK(flatten_branches(root_only).empty());

  DraftTree chain{DraftTreeTemplate::chain(4), {9, 1, 2, 3}};
  const auto paths = flatten_branches(chain);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == std::vector<TokenId>{1, 2, 3});
}

TEST_CASE("flatten_branches enumerates one path per leaf") {
  // two branches sharing a prefix: "it is the" and "it was"
  DraftTree tree;
  tree.tmpl.parents = {DraftTreeTemplate::kNoParent, 0, 1, 2, 1};
  tree.tokens = {0, 10, 11, 12, 13};  // root, it, is, the, was
  const auto paths = flatten_branches(tree);
  REQUIRE(paths.size() == 2);
  CHECK(paths[0] == std::vector<TokenId>{10, 11, 12});
  CHECK(paths[1] == std::vector<TokenId>{10, 13});
}

TEST_CASE("flatten_branches paths are prefix-consistent with tree edges") {
  Rng rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const int nodes = 2 + static_cast<int>(rng.below(30));
    DraftTree tree;
    tree.tmpl = testutil::random_template(rng, nodes);
    tree.tokens = testutil::random_tokens(rng, nodes, 20);
    const auto paths = flatten_branches(tree);
    int leaves = 0;
    for (int i = 1; i < nodes; ++i)
      if (tree.tmpl.children_of(i).empty()) ++leaves;
    REQUIRE(static_cast<int>(paths.size()) == leaves);
    std::size_t at = 0;
    for (int i = 1; i < nodes; ++i) {
      if (!tree.tmpl.children_of(i).empty()) continue;
      auto expect = tree.path_tokens(i);
      expect.erase(expect.begin());
      REQUIRE(paths[at++] == expect);
    }
  }
}
