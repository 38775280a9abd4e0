#include <catch2/catch_amalgamated.hpp>

#include "reader/engine.hpp"
#include "reader/transformer.hpp"
#include "test_util.hpp"

using namespace reader;

namespace {

NGramModel repetitive_model(int vocab = 20, int order = 3) {
  Rng rng(101);
  NGramModel m(order, vocab);
  std::vector<TokenId> seq;
  for (int i = 0; i < 400; ++i) seq.push_back(static_cast<TokenId>(1 + rng.below(vocab - 1)));
  // splice in repeats so speculation has something to find
  for (int i = 60; i + 20 < static_cast<int>(seq.size()); i += 40)
    std::copy(seq.begin(), seq.begin() + 12, seq.begin() + i);
  m.train_sequence(seq);
  return m;
}

std::vector<std::vector<TokenId>> prompts_for(int batch, int len, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<TokenId>> out(batch);
  for (auto& p : out) p = testutil::random_tokens(rng, len, vocab);
  return out;
}

DraftTreeTemplate small_tree() {
  DraftTreeTemplate t;  // root, two children, chain under the first
  t.parents = {DraftTreeTemplate::kNoParent, 0, 0, 1, 3};
  return t;
}

void check_lossless(const EngineConfig& cfg, int batch, const SuffixArrayStore* ds = nullptr) {
  const NGramModel base = repetitive_model();
  const NGramModel drafter(2, base.vocab_size());
  NGramModel trained_drafter = drafter;
  {
    Rng rng(55);
    trained_drafter.train_sequence(testutil::random_tokens(rng, 300, base.vocab_size()));
  }
  const auto prompts = prompts_for(batch, 6, base.vocab_size(), 7 + batch);
  const auto expect = autoregressive_generate(base, prompts, cfg.max_new_tokens, cfg.eos);

  NGramBatchModel bm(base, batch);
  TrieStore trie;
  const auto got = speculative_generate(bm, trained_drafter, trie, ds, prompts, cfg);
  REQUIRE(got.outputs == expect);
}

}  // namespace

TEST_CASE("verify_row accepts the argmax-matching chain and returns a bonus") {
  DraftTree tree{DraftTreeTemplate::chain(3), {5, 1, 2}};
  auto dist_to = [](TokenId t, int vocab = 8) {
    Distribution d;
    d.scores.assign(vocab, 0.0f);
    d.scores[t] = 1.0f;
    return d;
  };
  const VerifyOutcome all = verify_row(tree, {dist_to(1), dist_to(2), dist_to(3)});
  CHECK(all.accepted_tokens == std::vector<TokenId>{1, 2});
  CHECK(all.bonus == 3);

  const VerifyOutcome none = verify_row(tree, {dist_to(7), dist_to(2), dist_to(3)});
  CHECK(none.accepted_tokens.empty());
  CHECK(none.bonus == 7);

  // lowest-index child wins when duplicates match
  DraftTree dup{{{DraftTreeTemplate::kNoParent, 0, 0}}, {5, 1, 1}};
  const VerifyOutcome d = verify_row(dup, {dist_to(1), dist_to(2), dist_to(3)});
  REQUIRE(d.accepted_nodes == std::vector<int>{1});
  CHECK(d.bonus == 2);
}

TEST_CASE("autoregressive_generate is greedy and stops at eos") {
  NGramModel m(2, 6);
  m.train_sequence(std::vector<TokenId>{2, 3, 4, 1});
  const auto out = autoregressive_generate(m, {{2}}, 10, 1);
  CHECK(out[0] == std::vector<TokenId>{3, 4, 1});
  const auto capped = autoregressive_generate(m, {{2}}, 2);
  CHECK(capped[0].size() == 2);
}

TEST_CASE("speculative output equals autoregressive output, single row") {
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 40;
  check_lossless(cfg, 1);
}

TEST_CASE("speculative output equals autoregressive output, batch of 4") {
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 30;
  check_lossless(cfg, 4);
}

TEST_CASE("losslessness holds without the statistical branch") {
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.use_stat_branch = false;
  cfg.deepen = false;
  cfg.max_new_tokens = 25;
  check_lossless(cfg, 2);
}

TEST_CASE("losslessness holds with deepening off and rearrangement on") {
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.deepen = false;
  cfg.rearrange_every = 2;
  cfg.max_new_tokens = 30;
  check_lossless(cfg, 3);
}

TEST_CASE("losslessness holds with a datastore attached") {
  Rng rng(61);
  std::vector<std::vector<TokenId>> docs;
  for (int d = 0; d < 3; ++d) docs.push_back(testutil::random_tokens(rng, 80, 20));
  const auto ds = SuffixArrayStore::build(docs, 20);
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 30;
  check_lossless(cfg, 2, &ds);
}

TEST_CASE("losslessness holds for the transformer cache path") {
  TransformerDims dims;
  dims.layers = 2;
  dims.heads = 2;
  dims.width = 16;
  dims.vocab = 19;
  dims.max_positions = 512;
  const TinyTransformer base(77, dims);
  const NGramModel drafter = repetitive_model(19, 2);

  const auto prompts = prompts_for(2, 5, 19, 13);
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 20;
  cfg.rearrange_every = 3;
  const auto expect = autoregressive_generate(base, prompts, cfg.max_new_tokens);

  TransformerBatchModel bm(base, 2);
  TrieStore trie;
  const auto got = speculative_generate(bm, drafter, trie, nullptr, prompts, cfg);
  CHECK(got.outputs == expect);
}

TEST_CASE("eos truncates the emitted block at its first occurrence") {
  NGramModel m(2, 6);
  m.train_sequence(std::vector<TokenId>{2, 3, 4, 1});
  EngineConfig cfg;
  cfg.tmpl = DraftTreeTemplate::chain(4);
  cfg.use_stat_branch = false;
  cfg.deepen = false;
  cfg.eos = 1;
  cfg.max_new_tokens = 20;
  NGramBatchModel bm(m, 1);
  TrieStore trie;
  const auto got = speculative_generate(bm, m, trie, nullptr, {{2}}, cfg);
  CHECK(got.outputs[0] == std::vector<TokenId>{3, 4, 1});
}

TEST_CASE("the token budget is never exceeded") {
  const NGramModel base = repetitive_model();
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 7;
  NGramBatchModel bm(base, 2);
  TrieStore trie;
  const auto prompts = prompts_for(2, 6, base.vocab_size(), 3);
  const auto got = speculative_generate(bm, base, trie, nullptr, prompts, cfg);
  for (const auto& out : got.outputs) CHECK(static_cast<int>(out.size()) == 7);
  CHECK(got.metrics.emitted_tokens == 14);
}

TEST_CASE("root-only drafting degenerates to one token per pass") {
  const NGramModel base = repetitive_model();
  EngineConfig cfg;  // root_only template, no speculation
  cfg.use_stat_branch = false;
  cfg.deepen = false;
  cfg.max_new_tokens = 12;
  NGramBatchModel bm(base, 1);
  TrieStore trie;
  const auto got = speculative_generate(bm, base, trie, nullptr,
                                        prompts_for(1, 5, base.vocab_size(), 9), cfg);
  CHECK(got.metrics.mean_acceptance_length() == 1.0);
  CHECK(got.metrics.forward_passes == 12);
}

TEST_CASE("speculation with a perfect drafter beats one token per pass") {
  const NGramModel base = repetitive_model();
  EngineConfig cfg;
  cfg.tmpl = DraftTreeTemplate::chain(5);  // drafter == base, every draft accepted
  cfg.use_stat_branch = false;
  cfg.deepen = false;
  cfg.max_new_tokens = 40;
  NGramBatchModel bm(base, 1);
  TrieStore trie;
  const auto got = speculative_generate(bm, base, trie, nullptr,
                                        prompts_for(1, 6, base.vocab_size(), 17), cfg);
  CHECK(got.metrics.mean_acceptance_length() > 3.0);
}

TEST_CASE("histogram buckets sum to the emitted total") {
  const NGramModel base = repetitive_model();
  EngineConfig cfg;
  cfg.tmpl = small_tree();
  cfg.max_new_tokens = 25;
  NGramBatchModel bm(base, 2);
  TrieStore trie;
  const auto got = speculative_generate(bm, base, trie, nullptr,
                                        prompts_for(2, 6, base.vocab_size(), 23), cfg);
  std::uint64_t total = 0, passes = 0;
  for (const auto& [len, count] : got.metrics.acceptance_histogram) {
    total += static_cast<std::uint64_t>(len) * count;
    passes += count;
  }
  CHECK(total == got.metrics.emitted_tokens);
  CHECK(passes == got.metrics.forward_passes);
  CHECK_FALSE(got.metrics.cache_occupancy_series.empty());
}

TEST_CASE("engine validates configuration and prompts") {
  const NGramModel base = repetitive_model();
  NGramBatchModel bm(base, 1);
  TrieStore trie;
  EngineConfig cfg;
  CHECK_THROWS_AS(speculative_generate(bm, base, trie, nullptr, {}, cfg), input_error);
  CHECK_THROWS_AS(speculative_generate(bm, base, trie, nullptr, {{}}, cfg), input_error);
  CHECK_THROWS_AS(speculative_generate(bm, base, trie, nullptr, {{1}, {2}}, cfg), input_error);
  cfg.tmpl.parents = {DraftTreeTemplate::kNoParent, 2, 0};
  CHECK_THROWS_AS(speculative_generate(bm, base, trie, nullptr, {{1}}, cfg), input_error);
  cfg.tmpl = DraftTreeTemplate::root_only();
  cfg.search.min_suffix_len = 0;
  CHECK_THROWS_AS(speculative_generate(bm, base, trie, nullptr, {{1}}, cfg), input_error);
}

TEST_CASE("default knobs depend on batch size") {
  EngineConfig cfg;
  CHECK(cfg.deepen_resolved(4));
  CHECK_FALSE(cfg.deepen_resolved(16));
  CHECK(cfg.rearrange_resolved(4) == 0);
  CHECK(cfg.rearrange_resolved(16) == 50);
  CHECK(cfg.rearrange_resolved(32) == 25);
  cfg.deepen = false;
  cfg.rearrange_every = 9;
  CHECK_FALSE(cfg.deepen_resolved(1));
  CHECK(cfg.rearrange_resolved(1) == 9);
}

TEST_CASE("node acceptance rates are on-path frequencies") {
  const NGramModel base = repetitive_model();
  NGramModel drafter(2, base.vocab_size());
  {
    Rng rng(91);
    drafter.train_sequence(testutil::random_tokens(rng, 300, base.vocab_size()));
  }
  const DraftTreeTemplate t0 = small_tree();
  NGramBatchModel bm(base, 2);
  const auto rates = collect_node_acceptance(bm, drafter, prompts_for(2, 6, base.vocab_size(), 29),
                                             t0, 20);
  REQUIRE(static_cast<int>(rates.size()) == t0.size());
  CHECK(rates[0] == 1.0);
  for (int i = 1; i < t0.size(); ++i) {
    CHECK(rates[i] >= 0.0);
    CHECK(rates[i] <= rates[t0.parents[i]]);  // a node needs its parent on the path
  }
}
