#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace reader {

using TokenId = std::int32_t;

// id 0 is reserved for the unknown token; the PAD sentinel lives outside
// the vocabulary and can never equal an argmax over real token ids.
inline constexpr TokenId kUnkToken = 0;
inline constexpr TokenId kPadToken = -1;
// separates documents inside a concatenated datastore token stream
inline constexpr TokenId kDocSeparator = -2;

struct input_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct structural_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct capacity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fixed tree shape as a parent-index array in topological order.
// parents[0] == kNoParent marks the root; for i >= 1, parents[i] < i.
struct DraftTreeTemplate {
  static constexpr int kNoParent = -1;

  std::vector<int> parents;

  int size() const { return static_cast<int>(parents.size()); }

  int depth_of(int node) const {
    int d = 0;
    for (int cur = node; parents[cur] != kNoParent; cur = parents[cur]) ++d;
    return d;
  }

  int max_depth() const {
    int best = 0;
    for (int i = 0; i < size(); ++i) best = std::max(best, depth_of(i));
    return best;
  }

  std::vector<int> children_of(int node) const {
    std::vector<int> out;
    for (int i = node + 1; i < size(); ++i)
      if (parents[i] == node) out.push_back(i);
    return out;
  }

  // nodes on the path root -> node, inclusive, in root-first order
  std::vector<int> path_to(int node) const {
    std::vector<int> path;
    for (int cur = node; cur != kNoParent; cur = parents[cur]) path.push_back(cur);
    return {path.rbegin(), path.rend()};
  }

  bool operator==(const DraftTreeTemplate&) const = default;

  static DraftTreeTemplate chain(int n) {
    DraftTreeTemplate t;
    t.parents.resize(n);
    t.parents[0] = kNoParent;
    for (int i = 1; i < n; ++i) t.parents[i] = i - 1;
    return t;
  }

  static DraftTreeTemplate root_only() { return chain(1); }
};

struct TemplateLimits {
  int max_depth = 64;
  int max_nodes = 512;
};

// Template plus one token per node. The root token is the last accepted
// context token, so draft candidates start at the root's children.
struct DraftTree {
  DraftTreeTemplate tmpl;
  std::vector<TokenId> tokens;

  int size() const { return tmpl.size(); }
  TokenId root_token() const { return tokens.at(0); }

  std::vector<TokenId> path_tokens(int node) const {
    std::vector<TokenId> out;
    for (int n : tmpl.path_to(node)) out.push_back(tokens[n]);
    return out;
  }
};

// A retrieved continuation to hang off a tree node. Empty tokens means
// "no match".
struct Branch {
  std::vector<TokenId> tokens;
  int attach_at = 0;

  bool empty() const { return tokens.empty(); }
};

// bits[i][j] == true iff j is an ancestor of i or j == i
struct AncestorMask {
  int n = 0;
  std::vector<uint8_t> bits;  // row-major n*n

  bool at(int i, int j) const { return bits[static_cast<size_t>(i) * n + j] != 0; }
  void set(int i, int j) { bits[static_cast<size_t>(i) * n + j] = 1; }
};

inline std::vector<std::string> validate_template(const DraftTreeTemplate& t,
                                                  const TemplateLimits& limits = {}) {
  std::vector<std::string> violations;
  const int n = t.size();
  if (n == 0) {
    violations.push_back("template is empty");
    return violations;
  }
  if (n > limits.max_nodes)
    violations.push_back("node count " + std::to_string(n) + " > max_nodes " +
                         std::to_string(limits.max_nodes));
  if (t.parents[0] != DraftTreeTemplate::kNoParent)
    violations.push_back("parents[0]=" + std::to_string(t.parents[0]) + " is not the null marker");
  for (int i = 1; i < n; ++i) {
    if (t.parents[i] < 0 || t.parents[i] >= i)
      violations.push_back("parents[" + std::to_string(i) + "]=" + std::to_string(t.parents[i]) +
                           " breaks topological order");
  }
  if (!violations.empty()) return violations;  // depths need valid parents
  for (int i = 0; i < n; ++i) {
    if (t.depth_of(i) > limits.max_depth) {
      violations.push_back("node " + std::to_string(i) + " depth " +
                           std::to_string(t.depth_of(i)) + " > max_depth " +
                           std::to_string(limits.max_depth));
    }
  }
  return violations;
}

inline bool template_ok(const DraftTreeTemplate& t, const TemplateLimits& limits = {}) {
  return validate_template(t, limits).empty();
}

inline AncestorMask derive_mask(const DraftTreeTemplate& t) {
  if (!template_ok(t)) throw structural_error("derive_mask: invalid template");
  const int n = t.size();
  AncestorMask m;
  m.n = n;
  m.bits.assign(static_cast<size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) {
    // ancestors-or-self of i: row i of parent extends row parents[i]
    m.set(i, i);
    if (t.parents[i] != DraftTreeTemplate::kNoParent) {
      const int p = t.parents[i];
      for (int j = 0; j < n; ++j)
        if (m.at(p, j)) m.set(i, j);
    }
  }
  return m;
}

// One token path per leaf, root excluded (the root is context).
inline std::vector<std::vector<TokenId>> flatten_branches(const DraftTree& tree) {
  const int n = tree.size();
  std::vector<bool> has_child(n, false);
  for (int i = 1; i < n; ++i) has_child[tree.tmpl.parents[i]] = true;
  std::vector<std::vector<TokenId>> paths;
  for (int i = 1; i < n; ++i) {
    if (has_child[i]) continue;
    auto toks = tree.path_tokens(i);
    toks.erase(toks.begin());
    paths.push_back(std::move(toks));
  }
  return paths;
}

}  // namespace reader
