#pragma once

#include <functional>
#include <span>
#include <vector>

#include "reader/core.hpp"

namespace reader {

enum class NodeOrigin { DraftModel, StatSearch, Shared };

// A draft tree with per-node provenance tags.
struct ComposedTree {
  DraftTree tree;
  std::vector<NodeOrigin> origin;

  static ComposedTree from_draft(DraftTree t) {
    ComposedTree c;
    c.origin.assign(t.size(), NodeOrigin::DraftModel);
    c.tree = std::move(t);
    return c;
  }
};

// Prefix-tree union: path-set(result) = path-set(a) + path-set(b), shared
// prefixes merged. The result template depends on token values, so this is
// a comparison-only operation; the batched engine uses append_branch instead.
inline ComposedTree tree_union(const DraftTree& a, const DraftTree& b) {
  if (a.root_token() != b.root_token()) throw input_error("tree_union: root token mismatch");
  ComposedTree out = ComposedTree::from_draft(a);
  std::vector<bool> in_b(a.size(), false);
  in_b[0] = true;
  std::vector<int> map_b(b.size(), -1);
  map_b[0] = 0;
  for (int j = 1; j < b.size(); ++j) {
    const int parent = map_b[b.tmpl.parents[j]];
    int merged = -1;
    for (int k = parent + 1; k < out.tree.size(); ++k) {
      if (out.tree.tmpl.parents[k] == parent && out.tree.tokens[k] == b.tokens[j]) {
        merged = k;
        break;
      }
    }
    if (merged < 0) {
      out.tree.tmpl.parents.push_back(parent);
      out.tree.tokens.push_back(b.tokens[j]);
      out.origin.push_back(NodeOrigin::StatSearch);
      in_b.push_back(true);
      merged = out.tree.size() - 1;
    } else {
      in_b[merged] = true;
    }
    map_b[j] = merged;
  }
  for (int i = 0; i < out.tree.size(); ++i)
    if (in_b[i] && out.origin[i] == NodeOrigin::DraftModel) out.origin[i] = NodeOrigin::Shared;
  return out;
}

// Appends a retrieved branch as a chain child of the root, after all
// existing nodes. Existing node indices, tokens, and mask rows are untouched;
// duplicates with existing paths are kept as-is.
inline ComposedTree append_branch(const ComposedTree& tree, const Branch& branch,
                                  int max_nodes = 0) {
  if (branch.attach_at != 0) throw input_error("append_branch: branch must attach at the root");
  ComposedTree out = tree;
  if (branch.empty()) return out;
  if (max_nodes > 0 && tree.tree.size() + static_cast<int>(branch.tokens.size()) > max_nodes)
    throw capacity_error("append_branch: max_nodes exceeded");
  int parent = 0;
  for (TokenId t : branch.tokens) {
    out.tree.tmpl.parents.push_back(parent);
    out.tree.tokens.push_back(t);
    out.origin.push_back(NodeOrigin::StatSearch);
    parent = out.tree.size() - 1;
  }
  return out;
}

inline ComposedTree append_branch(const DraftTree& tree, const Branch& branch,
                                  int max_nodes = 0) {
  return append_branch(ComposedTree::from_draft(tree), branch, max_nodes);
}

// Pads a branch to a fixed length with PAD-token nodes so that every batch
// row composes to the same template.
inline Branch pad_branch(Branch b, int length) {
  if (static_cast<int>(b.tokens.size()) > length) b.tokens.resize(length);
  while (static_cast<int>(b.tokens.size()) < length) b.tokens.push_back(kPadToken);
  return b;
}

// Search callback: receives the selected branch-prefix tokens (root
// excluded); the caller combines them with its verified context.
using DeepenSearch = std::function<Branch(const std::vector<TokenId>&)>;

// Extends one root-to-leaf branch: the search runs on the branch's first
// prefix_len tokens and its result hangs as a chain under the node at depth
// prefix_len of that branch.
inline ComposedTree deepen(const ComposedTree& tree, int branch_index, int prefix_len,
                           const DeepenSearch& search, int max_nodes = 0) {
  // leaves in index order define branch numbering
  std::vector<int> leaves;
  {
    std::vector<bool> has_child(tree.tree.size(), false);
    for (int i = 1; i < tree.tree.size(); ++i) has_child[tree.tree.tmpl.parents[i]] = true;
    for (int i = 1; i < tree.tree.size(); ++i)
      if (!has_child[i]) leaves.push_back(i);
  }
  if (branch_index < 0 || branch_index >= static_cast<int>(leaves.size()))
    throw input_error("deepen: branch_index out of range");
  const std::vector<int> path = tree.tree.tmpl.path_to(leaves[branch_index]);
  if (prefix_len < 1 || prefix_len > static_cast<int>(path.size()) - 1)
    throw input_error("deepen: prefix_len out of range");

  std::vector<TokenId> prefix;
  for (int p = 1; p <= prefix_len; ++p) prefix.push_back(tree.tree.tokens[path[p]]);
  const Branch found = search(prefix);
  if (found.empty()) return tree;
  if (max_nodes > 0 && tree.tree.size() + static_cast<int>(found.tokens.size()) > max_nodes)
    throw capacity_error("deepen: max_nodes exceeded");

  ComposedTree out = tree;
  int parent = path[prefix_len];
  for (TokenId t : found.tokens) {
    out.tree.tmpl.parents.push_back(parent);
    out.tree.tokens.push_back(t);
    out.origin.push_back(NodeOrigin::StatSearch);
    parent = out.tree.size() - 1;
  }
  return out;
}

inline ComposedTree deepen(const DraftTree& tree, int branch_index, int prefix_len,
                           const DeepenSearch& search, int max_nodes = 0) {
  return deepen(ComposedTree::from_draft(tree), branch_index, prefix_len, search, max_nodes);
}

}  // namespace reader
