#include <catch2/catch_amalgamated.hpp>

#include "reader/tokenizer.hpp"

using namespace reader;

TEST_CASE("reserved ids come first") {
  Tokenizer t;
  CHECK(t.vocab_size() == 2);
  CHECK(t.words()[Tokenizer::kUnk] == "<unk>");
  CHECK(t.words()[Tokenizer::kEos] == "</s>");
}

TEST_CASE("words split on whitespace and punctuation") {
  const auto w = Tokenizer::split_words("hello, world!  it's_fine");
  CHECK(w == std::vector<std::string>{"hello", ",", "world", "!", "it's_fine"});
}

TEST_CASE("learn then tokenize round-trips through detokenize") {
  Tokenizer t;
  t.learn("the cat sat");
  const auto ids = t.tokenize("the cat sat");
  CHECK(ids.size() == 3);
  CHECK(t.detokenize(ids) == "the cat sat");
}

TEST_CASE("unknown words map to unk") {
  Tokenizer t;
  t.learn("a b");
  const auto ids = t.tokenize("a z b");
  CHECK(ids[1] == Tokenizer::kUnk);
  CHECK(t.detokenize(ids) == "a <unk> b");
}

TEST_CASE("learning is idempotent") {
  Tokenizer t;
  t.learn("x y");
  const int n = t.vocab_size();
  t.learn("y x");
  CHECK(t.vocab_size() == n);
}

TEST_CASE("set_vocab restores an exact id mapping") {
  Tokenizer a;
  a.learn("alpha beta gamma");
  Tokenizer b;
  b.set_vocab(a.words());
  CHECK(b.tokenize("gamma alpha") == a.tokenize("gamma alpha"));
  CHECK(b.vocab_size() == a.vocab_size());
}
