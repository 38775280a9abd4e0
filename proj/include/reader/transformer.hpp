#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "reader/core.hpp"
#include "reader/kv_cache.hpp"
#include "reader/model.hpp"

namespace reader {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace detail

struct TransformerDims {
  int layers = 2;
  int heads = 2;
  int width = 64;  // hidden dimension
  int vocab = 0;
  int max_positions = 4096;
};

// Seeded, untrained decoder-only transformer. Same seed and dims give
// bit-identical weights and outputs on any machine: weights come from a
// counter-based PRNG keyed by (seed, tensor name, index) and every
// reduction runs in a fixed sequential order.
class TinyTransformer : public ScoringModel {
 public:
  TinyTransformer(std::uint64_t seed, TransformerDims dims) : seed_(seed), dims_(dims) {
    if (dims.vocab <= 0 || dims.width % dims.heads != 0)
      throw input_error("transformer: bad dims");
    const int h = dims.width;
    embed_ = gen("embed", static_cast<std::size_t>(dims.vocab) * h);
    layers_.resize(dims.layers);
    for (int l = 0; l < dims.layers; ++l) {
      const std::string p = "layer" + std::to_string(l) + ".";
      auto& L = layers_[l];
      L.wq = gen(p + "wq", static_cast<std::size_t>(h) * h);
      L.wk = gen(p + "wk", static_cast<std::size_t>(h) * h);
      L.wv = gen(p + "wv", static_cast<std::size_t>(h) * h);
      L.wo = gen(p + "wo", static_cast<std::size_t>(h) * h);
      L.w1 = gen(p + "w1", static_cast<std::size_t>(h) * 4 * h);
      L.w2 = gen(p + "w2", static_cast<std::size_t>(4) * h * h);
    }
  }

  std::uint64_t seed() const { return seed_; }
  const TransformerDims& dims() const { return dims_; }
  int vocab_size() const override { return dims_.vocab; }
  std::size_t kv_state_dim() const { return static_cast<std::size_t>(2) * dims_.width; }

  // per-token staged K|V, indexed [layer][token], each of size 2h
  using StagedKV = std::vector<std::vector<std::vector<float>>>;

  // Runs the new tokens of one row through the stack. Each token attends to
  // every valid cache slot of `row` (in slot order) and then to the staged
  // tokens listed in attend_new[i] (ascending, including i itself).
  // layer_caches may be null for a from-scratch pass.
  std::vector<Distribution> forward_row(std::span<const TokenId> toks,
                                        std::span<const int> positions,
                                        const std::vector<std::vector<int>>& attend_new,
                                        const std::vector<PaddedKVCache>* layer_caches, int row,
                                        StagedKV* staged_out = nullptr) const {
    const int h = dims_.width;
    const int n = static_cast<int>(toks.size());
    const int dh = h / dims_.heads;
    const float scale = 1.0f / std::sqrt(static_cast<float>(dh));

    std::vector<std::vector<float>> x(n);
    for (int i = 0; i < n; ++i) {
      if (positions[i] >= dims_.max_positions) throw capacity_error("transformer: position overflow");
      x[i] = embed_token(toks[i]);
      add_positional(x[i], positions[i]);
    }

    StagedKV staged(dims_.layers);
    for (int l = 0; l < dims_.layers; ++l) {
      const auto& L = layers_[l];
      staged[l].resize(n);
      // projections
      std::vector<std::vector<float>> q(n);
      for (int i = 0; i < n; ++i) {
        std::vector<float> xn = layer_norm(x[i]);
        q[i] = matvec(L.wq, xn, h, h);
        std::vector<float> k = matvec(L.wk, xn, h, h);
        std::vector<float> v = matvec(L.wv, xn, h, h);
        staged[l][i].reserve(2 * h);
        staged[l][i].insert(staged[l][i].end(), k.begin(), k.end());
        staged[l][i].insert(staged[l][i].end(), v.begin(), v.end());
      }
      // attention
      for (int i = 0; i < n; ++i) {
        // gather attended K|V states in position order: cache slots first
        std::vector<const float*> kv;
        if (layer_caches) {
          for (const auto& slot : (*layer_caches)[l].row(row))
            if (slot.valid) kv.push_back(slot.state.data());
        }
        for (int j : attend_new[i]) kv.push_back(staged[l][j].data());

        std::vector<float> attn(h, 0.0f);
        const std::size_t m = kv.size();
        std::vector<float> scores(m);
        for (int head = 0; head < dims_.heads; ++head) {
          const int off = head * dh;
          float maxs = -std::numeric_limits<float>::infinity();
          for (std::size_t j = 0; j < m; ++j) {
            float s = 0.0f;
            for (int d = 0; d < dh; ++d) s += q[i][off + d] * kv[j][off + d];
            scores[j] = s * scale;
            if (scores[j] > maxs) maxs = scores[j];
          }
          float denom = 0.0f;
          for (std::size_t j = 0; j < m; ++j) {
            scores[j] = std::exp(scores[j] - maxs);
            denom += scores[j];
          }
          for (std::size_t j = 0; j < m; ++j) {
            const float w = scores[j] / denom;
            const float* v = kv[j] + h;  // V half of the state
            for (int d = 0; d < dh; ++d) attn[off + d] += w * v[off + d];
          }
        }
        std::vector<float> out = matvec(L.wo, attn, h, h);
        for (int d = 0; d < h; ++d) x[i][d] += out[d];
      }
      // mlp
      for (int i = 0; i < n; ++i) {
        std::vector<float> xn = layer_norm(x[i]);
        std::vector<float> hid = matvec(L.w1, xn, 4 * h, h);
        for (float& v : hid) v = gelu(v);
        std::vector<float> out = matvec(L.w2, hid, h, 4 * h);
        for (int d = 0; d < h; ++d) x[i][d] += out[d];
      }
    }

    std::vector<Distribution> dists(n);
    for (int i = 0; i < n; ++i) {
      std::vector<float> xn = layer_norm(x[i]);
      Distribution d;
      d.scores.resize(dims_.vocab);
      for (int v = 0; v < dims_.vocab; ++v) {
        float s = 0.0f;
        const float* e = embed_.data() + static_cast<std::size_t>(v) * h;
        for (int dd = 0; dd < h; ++dd) s += xn[dd] * e[dd];
        d.scores[v] = s;
      }
      dists[i] = std::move(d);
    }
    if (staged_out) *staged_out = std::move(staged);
    return dists;
  }

  // pure from-scratch scoring of a full context with a causal mask
  Distribution next_distribution(std::span<const TokenId> context) const override {
    if (context.empty()) throw input_error("transformer: empty context");
    for (TokenId t : context)
      if (t < 0 || t >= dims_.vocab) throw input_error("transformer: token out of vocab");
    const int n = static_cast<int>(context.size());
    std::vector<int> positions(n);
    std::vector<std::vector<int>> attend(n);
    for (int i = 0; i < n; ++i) {
      positions[i] = i;
      attend[i].resize(i + 1);
      for (int j = 0; j <= i; ++j) attend[i][j] = j;
    }
    return forward_row(context, positions, attend, nullptr, 0).back();
  }

 private:
  struct LayerWeights {
    std::vector<float> wq, wk, wv, wo, w1, w2;
  };

  std::vector<float> gen(const std::string& name, std::size_t count) const {
    std::vector<float> out(count);
    const std::uint64_t key = detail::splitmix64(seed_ ^ detail::fnv1a(name));
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint64_t r = detail::splitmix64(key + i);
      const double u = static_cast<double>(r >> 11) * 0x1.0p-53;  // [0,1)
      out[i] = static_cast<float>((u - 0.5) * 0.1);               // uniform(-0.05, 0.05)
    }
    return out;
  }

  std::vector<float> embed_token(TokenId t) const {
    const int h = dims_.width;
    std::vector<float> e(h, 0.0f);
    if (t == kPadToken) return e;  // PAD embeds to zero
    if (t < 0 || t >= dims_.vocab) throw input_error("transformer: token out of vocab");
    const float* src = embed_.data() + static_cast<std::size_t>(t) * h;
    for (int d = 0; d < h; ++d) e[d] = src[d];
    return e;
  }

  void add_positional(std::vector<float>& x, int pos) const {
    const int h = dims_.width;
    for (int d = 0; d < h; d += 2) {
      const double freq = std::pow(10000.0, -static_cast<double>(d) / h);
      x[d] += static_cast<float>(std::sin(pos * freq));
      if (d + 1 < h) x[d + 1] += static_cast<float>(std::cos(pos * freq));
    }
  }

  static std::vector<float> matvec(const std::vector<float>& w, const std::vector<float>& x,
                                   int rows, int cols) {
    std::vector<float> y(rows);
    for (int r = 0; r < rows; ++r) {
      float s = 0.0f;
      const float* wr = w.data() + static_cast<std::size_t>(r) * cols;
      for (int c = 0; c < cols; ++c) s += wr[c] * x[c];
      y[r] = s;
    }
    return y;
  }

  static std::vector<float> layer_norm(const std::vector<float>& x) {
    const int h = static_cast<int>(x.size());
    float mean = 0.0f;
    for (float v : x) mean += v;
    mean /= h;
    float var = 0.0f;
    for (float v : x) var += (v - mean) * (v - mean);
    var /= h;
    const float inv = 1.0f / std::sqrt(var + 1e-5f);
    std::vector<float> y(h);
    for (int d = 0; d < h; ++d) y[d] = (x[d] - mean) * inv;
    return y;
  }

  static float gelu(float v) {
    return 0.5f * v * (1.0f + std::tanh(0.7978845608f * (v + 0.044715f * v * v * v)));
  }

  std::uint64_t seed_;
  TransformerDims dims_;
  std::vector<float> embed_;
  std::vector<LayerWeights> layers_;
};

}  // namespace reader
