#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "reader/batch_model.hpp"
#include "reader/composer.hpp"
#include "reader/core.hpp"
#include "reader/drafter.hpp"
#include "reader/model.hpp"

namespace reader {

struct EngineConfig {
  DraftTreeTemplate tmpl = DraftTreeTemplate::root_only();
  SearchParams search;
  bool use_stat_branch = true;
  std::optional<bool> deepen;           // unset: on for batch <= 8
  std::optional<int> rearrange_every;   // unset: by batch size; 0 = never
  int max_new_tokens = 128;
  TokenId eos = -1;  // -1: no EOS handling
  TemplateLimits limits;

  bool deepen_resolved(int batch) const { return deepen.value_or(batch <= 8); }
  int rearrange_resolved(int batch) const {
    if (rearrange_every) return *rearrange_every;
    if (batch <= 8) return 0;
    if (batch <= 16) return 50;
    return 25;
  }
};

struct StepResult {
  int accepted = 0;
  TokenId bonus = kPadToken;
  std::vector<TokenId> emitted;
  std::size_t cache_width_before = 0;
  std::size_t cache_width_after = 0;
};

struct RunMetrics {
  std::uint64_t emitted_tokens = 0;
  std::uint64_t forward_passes = 0;  // per-row verifications; autoregression = 1 token each
  std::map<int, std::uint64_t> acceptance_histogram;
  std::vector<double> cache_occupancy_series;
  double draft_seconds = 0, compose_seconds = 0, verify_seconds = 0, rearrange_seconds = 0;

  double mean_acceptance_length() const {
    return forward_passes == 0
               ? 0.0
               : static_cast<double>(emitted_tokens) / static_cast<double>(forward_passes);
  }
};

struct GenerationResult {
  std::vector<std::vector<TokenId>> outputs;  // newly generated tokens per row
  RunMetrics metrics;
};

// The exact-greedy baseline and ground truth for losslessness.
inline std::vector<std::vector<TokenId>> autoregressive_generate(
    const ScoringModel& model, const std::vector<std::vector<TokenId>>& prompts,
    int max_new_tokens, TokenId eos = -1) {
  if (prompts.empty()) throw input_error("autoregressive_generate: no prompts");
  std::vector<std::vector<TokenId>> outputs(prompts.size());
  for (std::size_t r = 0; r < prompts.size(); ++r) {
    std::vector<TokenId> ctx = prompts[r];
    for (int i = 0; i < max_new_tokens; ++i) {
      const TokenId next = model.next_distribution(ctx).argmax();
      outputs[r].push_back(next);
      ctx.push_back(next);
      if (next == eos) break;
    }
  }
  return outputs;
}

struct VerifyOutcome {
  std::vector<int> accepted_nodes;  // excludes the root
  std::vector<TokenId> accepted_tokens;
  TokenId bonus;
};

// Greedy argmax-match walk: at each node accept the lowest-index child whose
// token equals the node's argmax; the last accepted node's argmax is the
// bonus token, so a drafting miss still emits one token.
inline VerifyOutcome verify_row(const DraftTree& tree,
                                const std::vector<Distribution>& dists) {
  VerifyOutcome out;
  int cur = 0;
  for (;;) {
    const TokenId target = dists[cur].argmax();
    int next = -1;
    for (int c : tree.tmpl.children_of(cur)) {
      if (tree.tokens[c] == target) {
        next = c;
        break;
      }
    }
    if (next < 0) {
      out.bonus = target;
      return out;
    }
    out.accepted_nodes.push_back(next);
    out.accepted_tokens.push_back(target);
    cur = next;
  }
}

namespace detail {

// rolling trie insertions: one window of length win ending at each position
inline void trie_insert_windows(TrieStore& trie, std::span<const TokenId> seq,
                                std::size_t from, int win) {
  for (std::size_t p = from; p < seq.size(); ++p) {
    const std::size_t lo = (p + 1 >= static_cast<std::size_t>(win)) ? p + 1 - win : 0;
    trie.insert(seq.subspan(lo, p + 1 - lo));
  }
}

class PhaseTimer {
 public:
  explicit PhaseTimer(double& sink) : sink_(sink), start_(clock::now()) {}
  ~PhaseTimer() {
    sink_ += std::chrono::duration<double>(clock::now() - start_).count();
  }

 private:
  using clock = std::chrono::steady_clock;
  double& sink_;
  clock::time_point start_;
};

}  // namespace detail

using StepObserver =
    std::function<void(int row, const ComposedTree& tree, const std::vector<int>& on_path)>;

// depth of the first (lowest-leaf-index) root-to-leaf branch of a template
inline int first_branch_depth(const DraftTreeTemplate& tmpl) {
  std::vector<bool> has_child(tmpl.size(), false);
  for (int i = 1; i < tmpl.size(); ++i) has_child[tmpl.parents[i]] = true;
  for (int i = 1; i < tmpl.size(); ++i)
    if (!has_child[i]) return tmpl.depth_of(i);
  return 0;
}

// The main loop: draft, attach statistical branch, optionally deepen,
// verify in one batched pass, commit accepted states, rearrange every N
// steps. Output is token-for-token equal to autoregressive_generate.
inline GenerationResult speculative_generate(BatchModel& model, const ScoringModel& drafter,
                                             TrieStore& trie, const SuffixArrayStore* datastore,
                                             const std::vector<std::vector<TokenId>>& prompts,
                                             const EngineConfig& cfg,
                                             const StepObserver& observer = nullptr) {
  const int batch = static_cast<int>(prompts.size());
  if (batch == 0) throw input_error("speculative_generate: no prompts");
  if (batch != model.num_rows()) throw input_error("speculative_generate: batch/model mismatch");
  for (const auto& p : prompts)
    if (p.empty()) throw input_error("speculative_generate: empty prompt");
  {
    auto violations = validate_template(cfg.tmpl, cfg.limits);
    if (!violations.empty())
      throw input_error("speculative_generate: invalid template: " + violations.front());
    if (!cfg.search.valid()) throw input_error("speculative_generate: invalid search params");
    int composed = cfg.tmpl.size();
    if (cfg.use_stat_branch) composed += cfg.search.branch_depth;
    if (cfg.deepen_resolved(batch)) composed += cfg.search.branch_depth;
    if (composed > cfg.limits.max_nodes)
      throw input_error("speculative_generate: composed tree exceeds max_nodes");
  }
  const bool deepen_on = cfg.deepen_resolved(batch);
  const int rearrange_every = cfg.rearrange_resolved(batch);
  const int window = cfg.search.max_suffix_len + cfg.search.branch_depth;

  GenerationResult result;
  result.outputs.resize(batch);
  RunMetrics& metrics = result.metrics;

  std::vector<std::vector<TokenId>> contexts = prompts;
  std::vector<bool> finished(batch, false);
  std::vector<int> remaining(batch, cfg.max_new_tokens);

  {
    std::vector<std::vector<TokenId>> prefill(batch);
    for (int r = 0; r < batch; ++r)
      prefill[r].assign(contexts[r].begin(), contexts[r].end() - 1);
    model.prefill(prefill);
    for (int r = 0; r < batch; ++r)
      detail::trie_insert_windows(trie, contexts[r], 0, window);
  }
  if (cfg.max_new_tokens <= 0)
    for (int r = 0; r < batch; ++r) finished[r] = true;

  // composed templates are token-independent, so mask and template are
  // computed once per distinct shape
  std::optional<DraftTreeTemplate> shared_tmpl;
  std::optional<AncestorMask> shared_mask;

  std::vector<ComposedTree> composed(batch);
  int step = 0;
  for (;;) {
    bool any_active = false;
    for (int r = 0; r < batch; ++r)
      if (!finished[r]) any_active = true;
    if (!any_active) break;
    ++step;

    {
      detail::PhaseTimer t(metrics.draft_seconds);
      for (int r = 0; r < batch; ++r) {
        if (finished[r]) continue;
        composed[r] = ComposedTree::from_draft(model_draft(drafter, contexts[r], cfg.tmpl));
      }
    }
    {
      detail::PhaseTimer t(metrics.compose_seconds);
      for (int r = 0; r < batch; ++r) {
        if (finished[r]) continue;
        if (cfg.use_stat_branch) {
          Branch br = pad_branch(stat_search(trie, datastore, contexts[r], cfg.search),
                                 cfg.search.branch_depth);
          composed[r] = append_branch(composed[r], br, cfg.limits.max_nodes);
        }
        if (deepen_on && cfg.tmpl.size() > 1) {
          const auto& ctx = contexts[r];
          auto search = [&](const std::vector<TokenId>& prefix) {
            std::vector<TokenId> full = ctx;
            full.insert(full.end(), prefix.begin(), prefix.end());
            return pad_branch(stat_search(trie, datastore, full, cfg.search),
                              cfg.search.branch_depth);
          };
          // first branch, full prefix, per the default deepening policy
          const int prefix_len = first_branch_depth(cfg.tmpl);
          composed[r] = deepen(composed[r], 0, prefix_len, search, cfg.limits.max_nodes);
        }
      }
    }

    // all rows share one template; derive the mask once
    const DraftTreeTemplate* step_tmpl = nullptr;
    for (int r = 0; r < batch; ++r) {
      if (finished[r]) continue;
      if (!step_tmpl) step_tmpl = &composed[r].tree.tmpl;
      else if (*step_tmpl != composed[r].tree.tmpl)
        throw structural_error("speculative_generate: template mismatch across rows");
    }
    if (!shared_tmpl || *shared_tmpl != *step_tmpl) {
      shared_tmpl = *step_tmpl;
      shared_mask = derive_mask(*shared_tmpl);
    }

    std::vector<const DraftTree*> trees(batch, nullptr);
    for (int r = 0; r < batch; ++r)
      if (!finished[r]) trees[r] = &composed[r].tree;

    std::vector<std::vector<Distribution>> dists;
    {
      detail::PhaseTimer t(metrics.verify_seconds);
      dists = model.forward_tree(trees, *shared_mask);
    }

    std::vector<std::vector<int>> to_commit(batch);
    for (int r = 0; r < batch; ++r) {
      if (finished[r]) continue;
      const VerifyOutcome v = verify_row(composed[r].tree, dists[r]);
      std::vector<TokenId> emit = v.accepted_tokens;
      emit.push_back(v.bonus);
      // first EOS ends the row, even inside a long accepted branch
      for (std::size_t i = 0; i < emit.size(); ++i) {
        if (emit[i] == cfg.eos) {
          emit.resize(i + 1);
          finished[r] = true;
          break;
        }
      }
      if (static_cast<int>(emit.size()) >= remaining[r]) {
        emit.resize(remaining[r]);
        finished[r] = true;
      }
      remaining[r] -= static_cast<int>(emit.size());

      const int accepted_emitted =
          static_cast<int>(std::min(v.accepted_nodes.size(), emit.size()));
      to_commit[r].push_back(0);
      for (int i = 0; i < accepted_emitted; ++i) to_commit[r].push_back(v.accepted_nodes[i]);
      if (observer) observer(r, composed[r], to_commit[r]);

      metrics.forward_passes += 1;
      metrics.emitted_tokens += emit.size();
      metrics.acceptance_histogram[static_cast<int>(emit.size())] += 1;

      const std::size_t old_len = contexts[r].size();
      contexts[r].insert(contexts[r].end(), emit.begin(), emit.end());
      result.outputs[r].insert(result.outputs[r].end(), emit.begin(), emit.end());
      detail::trie_insert_windows(trie, contexts[r], old_len, window);
    }
    model.commit(to_commit);

    if (rearrange_every > 0 && step % rearrange_every == 0) {
      detail::PhaseTimer t(metrics.rearrange_seconds);
      model.rearrange();
    }
    metrics.cache_occupancy_series.push_back(model.cache_occupancy());
  }
  return result;
}

// Per-node probability of lying on the accepted path when drafting with
// template t0 alone; the input to pruning.
inline std::vector<double> collect_node_acceptance(BatchModel& model, const ScoringModel& drafter,
                                                   const std::vector<std::vector<TokenId>>& prompts,
                                                   const DraftTreeTemplate& t0,
                                                   int max_new_tokens, TokenId eos = -1) {
  std::vector<std::uint64_t> hits(t0.size(), 0);
  std::uint64_t passes = 0;
  EngineConfig cfg;
  cfg.tmpl = t0;
  cfg.use_stat_branch = false;
  cfg.deepen = false;
  cfg.max_new_tokens = max_new_tokens;
  cfg.eos = eos;
  TrieStore trie;
  auto observer = [&](int, const ComposedTree&, const std::vector<int>& on_path) {
    ++passes;
    for (int node : on_path) ++hits[node];
  };
  speculative_generate(model, drafter, trie, nullptr, prompts, cfg, observer);
  std::vector<double> rates(t0.size(), 0.0);
  for (int i = 0; i < t0.size(); ++i)
    rates[i] = passes == 0 ? 0.0 : static_cast<double>(hits[i]) / static_cast<double>(passes);
  return rates;
}

}  // namespace reader
