#pragma once

#include <bit>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "reader/core.hpp"
#include "reader/model.hpp"
#include "reader/tokenizer.hpp"
#include "reader/transformer.hpp"

namespace reader {

// ---- tree-template JSON: {"parents": [null, 0, 0, 1, ...]} ----

inline nlohmann::json template_to_json(const DraftTreeTemplate& t) {
  nlohmann::json parents = nlohmann::json::array();
  for (int p : t.parents) {
    if (p == DraftTreeTemplate::kNoParent) parents.push_back(nullptr);
    else parents.push_back(p);
  }
  return nlohmann::json{{"parents", parents}};
}

inline DraftTreeTemplate template_from_json(const nlohmann::json& j) {
  DraftTreeTemplate t;
  for (const auto& p : j.at("parents")) {
    if (p.is_null()) t.parents.push_back(DraftTreeTemplate::kNoParent);
    else t.parents.push_back(p.get<int>());
  }
  auto violations = validate_template(t);
  if (!violations.empty()) throw input_error("template file invalid: " + violations.front());
  return t;
}

inline void save_template(const DraftTreeTemplate& t, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw input_error("cannot open for write: " + path);
  f << template_to_json(t).dump(2) << '\n';
}

inline DraftTreeTemplate load_template(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw input_error("cannot open: " + path);
  nlohmann::json j;
  f >> j;
  return template_from_json(j);
}

// ---- model snapshot: magic "RDRM", version, kind, tokenizer vocab, params ----

struct ModelSnapshot {
  enum Kind : std::uint8_t { kNGram = 0, kTransformer = 1 };

  Kind kind = kNGram;
  Tokenizer tokenizer;
  std::optional<NGramModel> ngram;
  std::uint64_t seed = 0;
  TransformerDims dims;

  std::unique_ptr<ScoringModel> instantiate() const {
    if (kind == kNGram) return std::make_unique<NGramModel>(*ngram);
    return std::make_unique<TinyTransformer>(seed, dims);
  }
};

namespace detail {

inline void write_u32(std::ostream& o, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) o.put(static_cast<char>(v >> (8 * i)));
}
inline void write_u64(std::ostream& o, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) o.put(static_cast<char>(v >> (8 * i)));
}
inline std::uint32_t read_u32(std::istream& in) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in.get())) << (8 * i);
  return v;
}
inline std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in.get())) << (8 * i);
  return v;
}
inline void write_str(std::ostream& o, const std::string& s) {
  write_u32(o, static_cast<std::uint32_t>(s.size()));
  o.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline std::string read_str(std::istream& in) {
  const std::uint32_t len = read_u32(in);
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}

}  // namespace detail

inline void save_model(const ModelSnapshot& snap, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open for write: " + path);
  f.write("RDRM", 4);
  detail::write_u32(f, 1);
  f.put(static_cast<char>(snap.kind));
  detail::write_u32(f, static_cast<std::uint32_t>(snap.tokenizer.words().size()));
  for (const auto& w : snap.tokenizer.words()) detail::write_str(f, w);
  if (snap.kind == ModelSnapshot::kNGram) {
    const NGramModel& m = *snap.ngram;
    detail::write_u32(f, static_cast<std::uint32_t>(m.order()));
    detail::write_u32(f, static_cast<std::uint32_t>(m.vocab_size()));
    detail::write_u64(f, std::bit_cast<std::uint64_t>(m.alpha()));
    for (const auto& table : m.tables()) {
      detail::write_u64(f, table.size());
      for (const auto& [ctx, counts] : table) {
        detail::write_u32(f, static_cast<std::uint32_t>(ctx.size()));
        for (TokenId t : ctx) detail::write_u32(f, static_cast<std::uint32_t>(t));
        detail::write_u64(f, counts.size());
        for (const auto& [tok, cnt] : counts) {
          detail::write_u32(f, static_cast<std::uint32_t>(tok));
          detail::write_u64(f, cnt);
        }
      }
    }
  } else {
    detail::write_u64(f, snap.seed);
    detail::write_u32(f, static_cast<std::uint32_t>(snap.dims.layers));
    detail::write_u32(f, static_cast<std::uint32_t>(snap.dims.heads));
    detail::write_u32(f, static_cast<std::uint32_t>(snap.dims.width));
    detail::write_u32(f, static_cast<std::uint32_t>(snap.dims.vocab));
    detail::write_u32(f, static_cast<std::uint32_t>(snap.dims.max_positions));
  }
  if (!f) throw input_error("write failed: " + path);
}

inline ModelSnapshot load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw input_error("cannot open: " + path);
  char magic[4];
  f.read(magic, 4);
  if (!f || std::string(magic, 4) != "RDRM") throw input_error("bad model magic");
  if (detail::read_u32(f) != 1) throw input_error("unsupported model version");
  ModelSnapshot snap;
  snap.kind = static_cast<ModelSnapshot::Kind>(f.get());
  std::vector<std::string> words(detail::read_u32(f));
  for (auto& w : words) w = detail::read_str(f);
  snap.tokenizer.set_vocab(std::move(words));
  if (snap.kind == ModelSnapshot::kNGram) {
    const int order = static_cast<int>(detail::read_u32(f));
    const int vocab = static_cast<int>(detail::read_u32(f));
    const double alpha = std::bit_cast<double>(detail::read_u64(f));
    NGramModel m(order, vocab, alpha);
    for (int ctx_len = 0; ctx_len < order; ++ctx_len) {
      const std::uint64_t table_size = detail::read_u64(f);
      for (std::uint64_t e = 0; e < table_size; ++e) {
        std::vector<TokenId> ctx(detail::read_u32(f));
        for (auto& t : ctx) t = static_cast<TokenId>(detail::read_u32(f));
        const std::uint64_t inner = detail::read_u64(f);
        auto& counts = m.tables()[ctx_len][ctx];
        for (std::uint64_t i = 0; i < inner; ++i) {
          const TokenId tok = static_cast<TokenId>(detail::read_u32(f));
          counts[tok] = detail::read_u64(f);
        }
      }
    }
    snap.ngram = std::move(m);
  } else {
    snap.seed = detail::read_u64(f);
    snap.dims.layers = static_cast<int>(detail::read_u32(f));
    snap.dims.heads = static_cast<int>(detail::read_u32(f));
    snap.dims.width = static_cast<int>(detail::read_u32(f));
    snap.dims.vocab = static_cast<int>(detail::read_u32(f));
    snap.dims.max_positions = static_cast<int>(detail::read_u32(f));
  }
  if (!f) throw input_error("truncated model snapshot: " + path);
  return snap;
}

}  // namespace reader
