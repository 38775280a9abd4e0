#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "reader/core.hpp"
#include "reader/suffix_array.hpp"

namespace reader {

// ---- self-repetition metric ----

struct SelfRepetitionResult {
  double metric = 1.0;
  int increments = 0;
  std::vector<int> match_lengths;
};

// Greedy longest-match cover: at the pointer, find the largest sub-array of
// the response that also occurs in the input, in the response prefix before
// the pointer, or in the datastore; advance by its length (by 1 on a miss).
// metric = |response| / increments — the acceptance length of an idealized
// infinite retrieval drafter.
inline SelfRepetitionResult self_repetition(std::span<const TokenId> input,
                                            std::span<const TokenId> response,
                                            const SuffixArrayStore* datastore = nullptr) {
  if (response.empty()) throw input_error("self_repetition: empty response");

  // index the fixed reference (input + datastore documents) once
  std::vector<std::vector<TokenId>> docs;
  if (!input.empty()) docs.emplace_back(input.begin(), input.end());
  if (datastore) {
    std::vector<TokenId> doc;
    for (TokenId t : datastore->tokens()) {
      if (t == kDocSeparator) {
        if (!doc.empty()) docs.push_back(std::move(doc));
        doc.clear();
      } else {
        doc.push_back(t);
      }
    }
    if (!doc.empty()) docs.push_back(std::move(doc));
  }
  const SuffixArrayStore fixed = SuffixArrayStore::build(docs);

  auto longest_in_fixed = [&](std::span<const TokenId> pat) {
    int len = 0;
    while (len < static_cast<int>(pat.size())) {
      auto [lo, hi] = fixed.search(pat.subspan(0, len + 1));
      if (lo == hi) break;
      ++len;
    }
    return len;
  };

  SelfRepetitionResult res;
  std::size_t p = 0;
  while (p < response.size()) {
    const auto rest = response.subspan(p);
    int best = docs.empty() ? 0 : longest_in_fixed(rest);
    // occurrences entirely inside the response prefix before the pointer
    for (std::size_t q = 0; q < p; ++q) {
      int len = 0;
      while (q + len < p && len < static_cast<int>(rest.size()) &&
             response[q + len] == rest[len])
        ++len;
      best = std::max(best, len);
    }
    res.match_lengths.push_back(best);
    p += best == 0 ? 1 : static_cast<std::size_t>(best);
    ++res.increments;
  }
  res.metric = static_cast<double>(response.size()) / static_cast<double>(res.increments);
  return res;
}

// ---- FLOPs / reads cost model ----

struct CostInputs {
  long long batch;        // b
  long long tree_size;    // t
  long long cache_len;    // s
  long long hidden;       // h
};

struct StageCost {
  double flops = 0;
  double reads = 0;
  double ratio() const { return flops / reads; }
};

struct CostBreakdown {
  StageCost qkv, sdpa, output;
};

// Concrete constants behind the asymptotic stage costs: a multiply-add is
// 2 FLOPs, an element read is 1. These are reporting conventions.
inline CostBreakdown cost_model(const CostInputs& c) {
  if (c.batch <= 0 || c.tree_size <= 0 || c.cache_len < 0 || c.hidden <= 0)
    throw input_error("cost_model: dimensions must be positive");
  const double b = static_cast<double>(c.batch);
  const double t = static_cast<double>(c.tree_size);
  const double s = static_cast<double>(c.cache_len);
  const double h = static_cast<double>(c.hidden);
  CostBreakdown out;
  // projection reads count the activations only; the weight matrices are
  // resident, so the flops/reads ratio cancels t exactly (2h per stage)
  out.qkv.flops = 3 * 2 * b * t * h * h;
  out.qkv.reads = 3 * b * t * h;
  out.sdpa.flops = 2 * 2 * b * h * t * (t + s);
  out.sdpa.reads = b * h * t + 2 * b * h * (t + s);
  out.output.flops = 2 * b * t * h * h;
  out.output.reads = b * t * h;
  return out;
}

inline double long_seq_probability(double p, int b) {
  if (p < 0.0 || p > 1.0 || b < 1) throw input_error("long_seq_probability: domain violation");
  return 1.0 - std::pow(1.0 - p, b);
}

// ---- acceptance-rate tree pruning ----

struct PruneResult {
  DraftTreeTemplate tmpl;
  std::vector<int> kept;  // original node index of each kept node
  bool rates_clamped = false;
};

// Removes the n lowest-rate non-root nodes (ties: deeper first, then higher
// index). Rates are clamped to min(own, parent) first so the survivor set
// is always connected.
inline PruneResult prune_tree(const DraftTreeTemplate& t0, std::span<const double> rates, int n) {
  if (static_cast<int>(rates.size()) != t0.size())
    throw input_error("prune_tree: rates size mismatch");
  if (n < 0 || n >= t0.size()) throw input_error("prune_tree: n out of range");
  PruneResult res;
  std::vector<double> clamped(rates.begin(), rates.end());
  for (int i = 1; i < t0.size(); ++i) {
    const double cap = clamped[t0.parents[i]];
    if (clamped[i] > cap) {
      clamped[i] = cap;
      res.rates_clamped = true;
    }
  }
  std::vector<int> order;
  for (int i = 1; i < t0.size(); ++i) order.push_back(i);
  std::vector<int> depth(t0.size());
  for (int i = 0; i < t0.size(); ++i) depth[i] = t0.depth_of(i);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (clamped[a] != clamped[b]) return clamped[a] < clamped[b];
    if (depth[a] != depth[b]) return depth[a] > depth[b];
    return a > b;
  });
  std::vector<bool> removed(t0.size(), false);
  for (int i = 0; i < n; ++i) removed[order[i]] = true;

  std::vector<int> new_index(t0.size(), -1);
  for (int i = 0; i < t0.size(); ++i) {
    if (removed[i]) continue;
    new_index[i] = static_cast<int>(res.kept.size());
    res.kept.push_back(i);
    res.tmpl.parents.push_back(
        i == 0 ? DraftTreeTemplate::kNoParent : new_index[t0.parents[i]]);
  }
  return res;
}

// ---- golden-section tuning over the removal count ----

struct TuneResult {
  int n_star = 0;
  DraftTreeTemplate tuned;
  std::vector<std::pair<int, double>> evaluations;  // in evaluation order
};

// Integer golden-section search for the n maximizing evaluate(T_n),
// assuming unimodal speed in n. Endpoints are always evaluated and the
// final bracket (<= 4 candidates) is swept exhaustively; the best n seen
// wins, ties to the lowest n.
inline TuneResult golden_section_tune(
    const DraftTreeTemplate& t0, std::span<const double> rates,
    const std::function<double(const DraftTreeTemplate&)>& evaluate) {
  TuneResult res;
  std::map<int, double> memo;
  auto eval_n = [&](int n) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    const double v = evaluate(prune_tree(t0, rates, n).tmpl);
    memo[n] = v;
    res.evaluations.emplace_back(n, v);
    return v;
  };

  int lo = 0, hi = t0.size() - 1;
  eval_n(lo);
  eval_n(hi);
  constexpr double kInvPhi = 0.6180339887498949;
  while (hi - lo > 3) {
    const int d = hi - lo;
    int x1 = hi - static_cast<int>(d * kInvPhi);
    int x2 = lo + static_cast<int>(d * kInvPhi);
    x1 = std::clamp(x1, lo + 1, hi - 2);
    x2 = std::clamp(x2, x1 + 1, hi - 1);
    const double f1 = eval_n(x1);
    const double f2 = eval_n(x2);
    if (f1 < f2) lo = x1 + 1;
    else if (f1 > f2) hi = x2 - 1;
    else {
      lo = x1 + 1;
      hi = x2 - 1;
    }
  }
  for (int n = lo; n <= hi; ++n) eval_n(n);

  int best_n = -1;
  double best_v = -std::numeric_limits<double>::infinity();
  for (const auto& [n, v] : memo) {
    if (v > best_v) {
      best_v = v;
      best_n = n;
    }
  }
  res.n_star = best_n;
  res.tuned = prune_tree(t0, rates, best_n).tmpl;
  return res;
}

}  // namespace reader
