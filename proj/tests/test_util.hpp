#pragma once

#include <vector>

#include "reader/corpus.hpp"
#include "reader/core.hpp"

namespace testutil {

using reader::Rng;

inline reader::DraftTreeTemplate random_template(Rng& rng, int nodes) {
  reader::DraftTreeTemplate t;
  t.parents.push_back(reader::DraftTreeTemplate::kNoParent);
  for (int i = 1; i < nodes; ++i)
    t.parents.push_back(static_cast<int>(rng.below(i)));
  return t;
}

inline std::vector<reader::TokenId> random_tokens(Rng& rng, int len, int vocab) {
  std::vector<reader::TokenId> out(len);
  for (auto& t : out) t = static_cast<reader::TokenId>(rng.below(vocab));
  return out;
}

// brute-force ancestor test: walk the parent chain
inline bool is_ancestor_or_self(const reader::DraftTreeTemplate& t, int node, int candidate) {
  for (int cur = node; cur != reader::DraftTreeTemplate::kNoParent; cur = t.parents[cur])
    if (cur == candidate) return true;
  return false;
}

}  // namespace testutil
