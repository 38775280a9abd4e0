// Command-line front end: corpus synthesis, model/datastore building,
// generation, benchmarking, self-repetition reports, and tree tuning.
//
// Exit codes: 0 success, 2 configuration error, 3 oracle mismatch, 4 IO.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "reader/reader.hpp"

using namespace reader;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;
constexpr int kExitIo = 4;

struct io_exit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require_file(const std::string& path) {
  if (!std::filesystem::exists(path)) throw io_exit("file not found: " + path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw io_exit("cannot open for write: " + path);
  f << text;
  if (!f) throw io_exit("write failed: " + path);
}

// "chain:N" or a JSON template file
DraftTreeTemplate resolve_template(const std::string& spec) {
  if (spec.rfind("chain:", 0) == 0) {
    const int n = std::stoi(spec.substr(6));
    if (n < 1) throw input_error("chain length must be >= 1");
    return DraftTreeTemplate::chain(n);
  }
  require_file(spec);
  return load_template(spec);
}

struct LoadedModel {
  ModelSnapshot snap;
  std::unique_ptr<ScoringModel> scorer;

  std::unique_ptr<BatchModel> batch(int rows) const {
    if (snap.kind == ModelSnapshot::kNGram)
      return std::make_unique<NGramBatchModel>(dynamic_cast<const NGramModel&>(*scorer), rows);
    return std::make_unique<TransformerBatchModel>(dynamic_cast<const TinyTransformer&>(*scorer),
                                                   rows);
  }
};

LoadedModel open_model(const std::string& path) {
  require_file(path);
  LoadedModel m;
  m.snap = load_model(path);
  m.scorer = m.snap.instantiate();
  return m;
}

std::vector<std::vector<TokenId>> corpus_prompts(const std::vector<CorpusEntry>& entries,
                                                 const Tokenizer& tok) {
  std::vector<std::vector<TokenId>> out;
  for (const auto& e : entries) {
    auto ids = tok.tokenize(e.prompt);
    if (!ids.empty()) out.push_back(std::move(ids));
  }
  if (out.empty()) throw input_error("corpus has no usable prompts");
  return out;
}

// rows of `batch` prompts; a short tail wraps around to fill the last group
std::vector<std::vector<std::vector<TokenId>>> group_prompts(
    const std::vector<std::vector<TokenId>>& prompts, int batch) {
  std::vector<std::vector<std::vector<TokenId>>> groups;
  for (std::size_t at = 0; at < prompts.size(); at += batch) {
    std::vector<std::vector<TokenId>> g;
    for (int r = 0; r < batch; ++r) g.push_back(prompts[(at + r) % prompts.size()]);
    groups.push_back(std::move(g));
  }
  return groups;
}

struct EngineFlags {
  std::string template_spec = "chain:4";
  int branch_depth = 16;
  int max_suffix = 8;
  int min_suffix = 2;
  int rearrange_every = -1;  // -1: auto by batch size
  int batch = 1;
  std::string deepen = "auto";  // on / off / auto
  std::string datastore_path;
  int max_new_tokens = 64;

  void attach(CLI::App* cmd) {
    cmd->add_option("--template", template_spec, "template JSON file or chain:N");
    cmd->add_option("--branch-depth", branch_depth, "statistical branch length");
    cmd->add_option("--max-suffix", max_suffix, "longest context suffix searched");
    cmd->add_option("--min-suffix", min_suffix, "shortest context suffix searched");
    cmd->add_option("--rearrange-every", rearrange_every,
                    "compact the cache every N steps (0 never, -1 auto)");
    cmd->add_option("--batch", batch, "rows decoded together");
    cmd->add_option("--deepen", deepen, "branch deepening: on, off, auto")
        ->check(CLI::IsMember({"on", "off", "auto"}));
    cmd->add_option("--datastore", datastore_path, "suffix-array datastore file");
    cmd->add_option("--max-new", max_new_tokens, "token budget per row");
  }

  EngineConfig config() const {
    EngineConfig cfg;
    cfg.tmpl = resolve_template(template_spec);
    cfg.search.branch_depth = branch_depth < 1 ? 1 : branch_depth;
    cfg.use_stat_branch = branch_depth >= 1;
    cfg.search.max_suffix_len = max_suffix;
    cfg.search.min_suffix_len = min_suffix;
    if (rearrange_every >= 0) cfg.rearrange_every = rearrange_every;
    if (deepen != "auto") cfg.deepen = deepen == "on";
    if (!cfg.use_stat_branch) cfg.deepen = false;  // deepening needs the searcher
    cfg.max_new_tokens = max_new_tokens;
    return cfg;
  }

  json to_json() const {
    return json{{"template", template_spec}, {"branch_depth", branch_depth},
                {"max_suffix", max_suffix},  {"min_suffix", min_suffix},
                {"rearrange_every", rearrange_every}, {"batch", batch},
                {"deepen", deepen},          {"datastore", datastore_path},
                {"max_new", max_new_tokens}};
  }
};

struct CorpusRun {
  std::vector<std::vector<TokenId>> outputs;
  RunMetrics metrics;
};

// decode a whole corpus in batch-sized groups under one engine configuration
CorpusRun run_corpus(const LoadedModel& base, const ScoringModel& drafter,
                     const std::vector<std::vector<TokenId>>& prompts, const EngineConfig& cfg,
                     int batch, const SuffixArrayStore* ds) {
  CorpusRun run;
  for (const auto& group : group_prompts(prompts, batch)) {
    auto bm = base.batch(batch);
    TrieStore trie;
    GenerationResult res = speculative_generate(*bm, drafter, trie, ds, group, cfg);
    for (auto& out : res.outputs) run.outputs.push_back(std::move(out));
    run.metrics.emitted_tokens += res.metrics.emitted_tokens;
    run.metrics.forward_passes += res.metrics.forward_passes;
    for (const auto& [len, n] : res.metrics.acceptance_histogram)
      run.metrics.acceptance_histogram[len] += n;
    for (double occ : res.metrics.cache_occupancy_series)
      run.metrics.cache_occupancy_series.push_back(occ);
    run.metrics.draft_seconds += res.metrics.draft_seconds;
    run.metrics.compose_seconds += res.metrics.compose_seconds;
    run.metrics.verify_seconds += res.metrics.verify_seconds;
    run.metrics.rearrange_seconds += res.metrics.rearrange_seconds;
  }
  return run;
}

json metrics_json(const RunMetrics& m) {
  json hist = json::object();
  for (const auto& [len, n] : m.acceptance_histogram) hist[std::to_string(len)] = n;
  double occ = 0;
  for (double o : m.cache_occupancy_series) occ += o;
  if (!m.cache_occupancy_series.empty()) occ /= static_cast<double>(m.cache_occupancy_series.size());
  return json{{"emitted_tokens", m.emitted_tokens},
              {"forward_passes", m.forward_passes},
              {"mean_acceptance_length", m.mean_acceptance_length()},
              {"acceptance_histogram", hist},
              {"mean_cache_occupancy", occ}};
}

// wall-clock goes to stderr only, so reports stay byte-identical across runs
void print_timings(const RunMetrics& m) {
  std::cerr << "draft " << m.draft_seconds << "s, compose " << m.compose_seconds << "s, verify "
            << m.verify_seconds << "s, rearrange " << m.rearrange_seconds << "s\n";
}

void emit_report(const json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  if (out_path.empty()) std::cout << text;
  else write_text(out_path, text);
}

// ---- synth-corpus ----

int cmd_synth_corpus(const std::string& kind, int size, std::uint64_t seed,
                     const std::string& out) {
  if (kind == "markov") {
    corpus::save_jsonl(corpus::synth_markov(size, seed), out);
  } else if (kind == "copy-task") {
    corpus::save_jsonl(corpus::synth_copy_task(size, seed), out);
  } else {  // mixed: half markov, half copy-task, in prompt/response layout
    auto entries = corpus::synth_markov(size - size / 2, seed);
    for (const auto& c : corpus::synth_copy_task(size / 2, seed + 1))
      entries.push_back(corpus::to_prompt_response(c));
    corpus::save_jsonl(entries, out);
  }
  std::cerr << "wrote " << out << "\n";
  return 0;
}

// ---- build-model ----

int cmd_build_model(const std::string& corpus_path, const std::string& kind, int order,
                    double alpha, std::uint64_t seed, int layers, int heads, int width,
                    int max_positions, const std::string& out) {
  require_file(corpus_path);
  const auto entries = corpus::load_jsonl(corpus_path);
  ModelSnapshot snap;
  for (const auto& e : entries) {
    snap.tokenizer.learn(e.prompt);
    snap.tokenizer.learn(e.response);
  }
  if (kind == "ngram") {
    snap.kind = ModelSnapshot::kNGram;
    NGramModel m(order, snap.tokenizer.vocab_size(), alpha);
    for (const auto& e : entries)
      m.train_sequence(snap.tokenizer.tokenize(e.prompt + " " + e.response));
    snap.ngram = std::move(m);
  } else {
    snap.kind = ModelSnapshot::kTransformer;
    snap.seed = seed;
    snap.dims.layers = layers;
    snap.dims.heads = heads;
    snap.dims.width = width;
    snap.dims.vocab = snap.tokenizer.vocab_size();
    snap.dims.max_positions = max_positions;
  }
  save_model(snap, out);
  std::cerr << "wrote " << out << " (vocab " << snap.tokenizer.vocab_size() << ")\n";
  return 0;
}

// ---- build-datastore ----

int cmd_build_datastore(const std::string& corpus_path, const std::string& model_path,
                        std::size_t capacity, const std::string& out) {
  require_file(corpus_path);
  const LoadedModel base = open_model(model_path);
  std::vector<std::vector<TokenId>> docs;
  for (const auto& e : corpus::load_jsonl(corpus_path)) {
    auto ids = base.snap.tokenizer.tokenize(e.response);
    if (!ids.empty()) docs.push_back(std::move(ids));
  }
  const auto store =
      SuffixArrayStore::build(docs, base.snap.tokenizer.vocab_size(), capacity);
  store.save(out);
  std::cerr << "wrote " << out << " (" << store.size() << " tokens)\n";
  return 0;
}

// ---- generate ----

int cmd_generate(const std::string& model_path, const std::string& drafter_path,
                 const std::string& corpus_path, const EngineFlags& flags, std::uint64_t seed,
                 bool oracle_check, bool timings, const std::string& out_path) {
  require_file(corpus_path);
  const LoadedModel base = open_model(model_path);
  const LoadedModel drafter = open_model(drafter_path.empty() ? model_path : drafter_path);
  const auto prompts = corpus_prompts(corpus::load_jsonl(corpus_path), base.snap.tokenizer);

  SuffixArrayStore ds;
  const SuffixArrayStore* ds_ptr = nullptr;
  if (!flags.datastore_path.empty()) {
    require_file(flags.datastore_path);
    ds = SuffixArrayStore::load(flags.datastore_path);
    ds_ptr = &ds;
  }

  const EngineConfig cfg = flags.config();
  const CorpusRun run = run_corpus(base, *drafter.scorer, prompts, cfg, flags.batch, ds_ptr);
  if (timings) print_timings(run.metrics);

  json rows = json::array();
  for (std::size_t r = 0; r < run.outputs.size(); ++r) {
    rows.push_back(json{{"prompt", base.snap.tokenizer.detokenize(prompts[r % prompts.size()])},
                        {"output", base.snap.tokenizer.detokenize(run.outputs[r])}});
  }
  json report{{"command", "generate"},
              {"seed", seed},
              {"config", flags.to_json()},
              {"rows", rows},
              {"metrics", metrics_json(run.metrics)}};

  if (oracle_check) {
    bool mismatch = false;
    const auto groups = group_prompts(prompts, flags.batch);
    std::size_t at = 0;
    for (const auto& group : groups) {
      const auto expect =
          autoregressive_generate(*base.scorer, group, cfg.max_new_tokens, cfg.eos);
      for (const auto& e : expect) mismatch = mismatch || e != run.outputs[at++];
    }
    report["oracle_check"] = mismatch ? "mismatch" : "pass";
    emit_report(report, out_path);
    return mismatch ? kExitOracle : 0;
  }
  emit_report(report, out_path);
  return 0;
}

// ---- bench ----

int cmd_bench(const std::string& model_path, const std::string& drafter_path,
              const std::string& corpus_path, const EngineFlags& flags,
              std::vector<std::string> methods, std::vector<int> batches, std::uint64_t seed,
              bool timings, const std::string& out_json, const std::string& out_csv) {
  require_file(corpus_path);
  const LoadedModel base = open_model(model_path);
  const LoadedModel drafter = open_model(drafter_path.empty() ? model_path : drafter_path);
  const auto prompts = corpus_prompts(corpus::load_jsonl(corpus_path), base.snap.tokenizer);

  SuffixArrayStore ds;
  const SuffixArrayStore* ds_ptr = nullptr;
  if (!flags.datastore_path.empty()) {
    require_file(flags.datastore_path);
    ds = SuffixArrayStore::load(flags.datastore_path);
    ds_ptr = &ds;
  }

  auto config_for = [&](const std::string& method) {
    EngineConfig cfg = flags.config();
    if (method == "autoregression") {
      cfg.tmpl = DraftTreeTemplate::root_only();
      cfg.use_stat_branch = false;
      cfg.deepen = false;
    } else if (method == "model-only") {
      cfg.use_stat_branch = false;
      cfg.deepen = false;
    } else if (method == "stat-only") {
      cfg.tmpl = DraftTreeTemplate::root_only();
    } else if (method != "reader") {
      throw input_error("unknown method: " + method);
    }
    return cfg;
  };

  json rows = json::array();
  std::ostringstream csv;
  csv << "method,batch,mean_acceptance_length,forward_passes_per_token,step_reduction\n";
  for (int batch : batches) {
    for (const auto& method : methods) {
      const CorpusRun run =
          run_corpus(base, *drafter.scorer, prompts, config_for(method), batch, ds_ptr);
      if (timings) {
        std::cerr << method << " b" << batch << ": ";
        print_timings(run.metrics);
      }
      const double accept = run.metrics.mean_acceptance_length();
      const double passes_per_token = accept == 0 ? 0 : 1.0 / accept;
      rows.push_back(json{{"method", method},
                          {"batch", batch},
                          {"mean_acceptance_length", accept},
                          {"forward_passes_per_token", passes_per_token},
                          {"step_reduction_vs_autoregression", accept}});
      csv << method << ',' << batch << ',' << accept << ',' << passes_per_token << ',' << accept
          << '\n';
    }
  }
  json report{{"command", "bench"}, {"seed", seed},   {"config", flags.to_json()},
              {"methods", methods}, {"batches", batches}, {"rows", rows}};
  emit_report(report, out_json);
  if (!out_csv.empty()) write_text(out_csv, csv.str());
  return 0;
}

// ---- selfrep ----

int cmd_selfrep(const std::vector<std::string>& corpora, const std::string& model_path,
                const std::string& datastore_path, const std::string& out_path) {
  const LoadedModel base = open_model(model_path);
  SuffixArrayStore ds;
  const SuffixArrayStore* ds_ptr = nullptr;
  if (!datastore_path.empty()) {
    require_file(datastore_path);
    ds = SuffixArrayStore::load(datastore_path);
    ds_ptr = &ds;
  }

  json rows = json::array();
  for (const auto& path : corpora) {
    require_file(path);
    double without = 0, with_ds = 0;
    int n = 0;
    for (const auto& e : corpus::load_jsonl(path)) {
      const auto input = base.snap.tokenizer.tokenize(e.prompt);
      const auto response = base.snap.tokenizer.tokenize(e.response);
      if (response.empty()) continue;
      without += self_repetition(input, response).metric;
      with_ds += self_repetition(input, response, ds_ptr).metric;
      ++n;
    }
    if (n == 0) throw input_error("corpus has no responses: " + path);
    rows.push_back(json{{"corpus", path},
                        {"entries", n},
                        {"without_datastore", without / n},
                        {"with_datastore", with_ds / n}});
  }
  emit_report(json{{"command", "selfrep"}, {"datastore", datastore_path}, {"rows", rows}},
              out_path);
  return 0;
}

// ---- tune-tree ----

int cmd_tune_tree(const std::string& model_path, const std::string& drafter_path,
                  const std::string& corpus_path, const std::string& template_spec, int batch,
                  int max_new, const std::string& out_path) {
  require_file(corpus_path);
  const LoadedModel base = open_model(model_path);
  const LoadedModel drafter = open_model(drafter_path.empty() ? model_path : drafter_path);
  const DraftTreeTemplate t0 = resolve_template(template_spec);
  auto prompts = corpus_prompts(corpus::load_jsonl(corpus_path), base.snap.tokenizer);
  if (static_cast<int>(prompts.size()) > batch) prompts.resize(batch);
  while (static_cast<int>(prompts.size()) < batch) prompts.push_back(prompts.front());

  auto bm0 = base.batch(batch);
  const auto rates =
      collect_node_acceptance(*bm0, *drafter.scorer, prompts, t0, max_new);

  auto evaluate = [&](const DraftTreeTemplate& t) {
    EngineConfig cfg;
    cfg.tmpl = t;
    cfg.use_stat_branch = false;
    cfg.deepen = false;
    cfg.max_new_tokens = max_new;
    auto bm = base.batch(batch);
    TrieStore trie;
    const auto res = speculative_generate(*bm, *drafter.scorer, trie, nullptr, prompts, cfg);
    return res.metrics.mean_acceptance_length();
  };
  const TuneResult tuned = golden_section_tune(t0, rates, evaluate);

  save_template(tuned.tuned, out_path);
  json evals = json::array();
  for (const auto& [n, v] : tuned.evaluations) evals.push_back(json{{"n", n}, {"value", v}});
  json meta{{"n_star", tuned.n_star},
            {"initial_nodes", t0.size()},
            {"tuned_nodes", tuned.tuned.size()},
            {"node_acceptance_rates", rates},
            {"evaluations", evals}};
  write_text(out_path + ".meta.json", meta.dump(2) + "\n");

  json report{{"command", "tune-tree"},
              {"template", template_spec},
              {"batch", batch},
              {"max_new", max_new},
              {"n_star", tuned.n_star},
              {"tuned_template", template_to_json(tuned.tuned)},
              {"tuned_out", out_path}};
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lossless speculative decoding with statistical draft-tree search"};
  app.require_subcommand(1);

  // synth-corpus
  std::string sc_kind = "markov", sc_out = "corpus.jsonl";
  int sc_size = 100;
  std::uint64_t seed = 1;
  auto* sc = app.add_subcommand("synth-corpus", "write a synthetic JSONL corpus");
  sc->add_option("--kind", sc_kind)->check(CLI::IsMember({"markov", "copy-task", "mixed"}));
  sc->add_option("--size", sc_size, "number of entries");
  sc->add_option("--seed", seed);
  sc->add_option("--out", sc_out)->required();

  // build-model
  std::string bm_corpus, bm_kind = "ngram", bm_out = "model.bin";
  int bm_order = 4, bm_layers = 2, bm_heads = 2, bm_width = 32, bm_maxpos = 4096;
  double bm_alpha = 0.1;
  std::uint64_t bm_seed = 1;
  auto* bm = app.add_subcommand("build-model", "train a model snapshot from a corpus");
  bm->add_option("--corpus", bm_corpus)->required();
  bm->add_option("--kind", bm_kind)->check(CLI::IsMember({"ngram", "transformer"}));
  bm->add_option("--order", bm_order, "n-gram order");
  bm->add_option("--alpha", bm_alpha, "n-gram smoothing");
  bm->add_option("--seed", bm_seed, "transformer weight seed");
  bm->add_option("--layers", bm_layers);
  bm->add_option("--heads", bm_heads);
  bm->add_option("--width", bm_width);
  bm->add_option("--max-positions", bm_maxpos);
  bm->add_option("--out", bm_out)->required();

  // build-datastore
  std::string bd_corpus, bd_model, bd_out = "datastore.bin";
  std::size_t bd_capacity = 0;
  auto* bd = app.add_subcommand("build-datastore", "index corpus responses in a suffix array");
  bd->add_option("--corpus", bd_corpus)->required();
  bd->add_option("--model", bd_model, "model snapshot supplying the tokenizer")->required();
  bd->add_option("--capacity", bd_capacity, "max tokens (0 unlimited)");
  bd->add_option("--out", bd_out)->required();

  // generate
  std::string g_model, g_drafter, g_corpus, g_out;
  EngineFlags g_flags;
  bool g_oracle = false, g_timings = false;
  std::uint64_t g_seed = 1;
  auto* gen = app.add_subcommand("generate", "speculative generation over corpus prompts");
  gen->add_option("--model", g_model)->required();
  gen->add_option("--drafter", g_drafter, "drafter snapshot (default: the base model)");
  gen->add_option("--prompts", g_corpus, "JSONL corpus supplying prompts")->required();
  g_flags.attach(gen);
  gen->add_option("--seed", g_seed);
  gen->add_flag("--oracle-check", g_oracle, "diff against exact autoregression");
  gen->add_flag("--timings", g_timings, "phase timings on stderr");
  gen->add_option("--out", g_out, "report file (default stdout)");

  // bench
  std::string b_model, b_drafter, b_corpus, b_out_json, b_out_csv;
  EngineFlags b_flags;
  std::vector<std::string> b_methods{"autoregression", "model-only", "stat-only", "reader"};
  std::vector<int> b_batches{1, 8, 16, 32};
  bool b_timings = false;
  std::uint64_t b_seed = 1;
  auto* bench = app.add_subcommand("bench", "acceptance-length comparison across methods");
  bench->add_option("--model", b_model)->required();
  bench->add_option("--drafter", b_drafter);
  bench->add_option("--corpus", b_corpus)->required();
  b_flags.attach(bench);
  bench->add_option("--methods", b_methods)->delimiter(',');
  bench->add_option("--batches", b_batches)->delimiter(',');
  bench->add_option("--seed", b_seed);
  bench->add_flag("--timings", b_timings);
  bench->add_option("--out-json", b_out_json, "report file (default stdout)");
  bench->add_option("--out-csv", b_out_csv);

  // selfrep
  std::vector<std::string> s_corpora;
  std::string s_model, s_datastore, s_out;
  auto* selfrep = app.add_subcommand("selfrep", "self-repetition metric per corpus");
  selfrep->add_option("--corpus", s_corpora)->required();
  selfrep->add_option("--model", s_model, "model snapshot supplying the tokenizer")->required();
  selfrep->add_option("--datastore", s_datastore);
  selfrep->add_option("--out", s_out, "report file (default stdout)");

  // tune-tree
  std::string t_model, t_drafter, t_corpus, t_template = "chain:24", t_out = "tuned.json";
  int t_batch = 4, t_max_new = 32;
  auto* tune = app.add_subcommand("tune-tree", "prune a template by node acceptance rates");
  tune->add_option("--model", t_model)->required();
  tune->add_option("--drafter", t_drafter);
  tune->add_option("--corpus", t_corpus, "calibration corpus")->required();
  tune->add_option("--template", t_template, "initial oversized template");
  tune->add_option("--batch", t_batch);
  tune->add_option("--max-new", t_max_new);
  tune->add_option("--out", t_out, "tuned template path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (sc->parsed()) return cmd_synth_corpus(sc_kind, sc_size, seed, sc_out);
    if (bm->parsed())
      return cmd_build_model(bm_corpus, bm_kind, bm_order, bm_alpha, bm_seed, bm_layers, bm_heads,
                             bm_width, bm_maxpos, bm_out);
    if (bd->parsed()) return cmd_build_datastore(bd_corpus, bd_model, bd_capacity, bd_out);
    if (gen->parsed())
      return cmd_generate(g_model, g_drafter, g_corpus, g_flags, g_seed, g_oracle, g_timings,
                          g_out);
    if (bench->parsed())
      return cmd_bench(b_model, b_drafter, b_corpus, b_flags, b_methods, b_batches, b_seed,
                       b_timings, b_out_json, b_out_csv);
    if (selfrep->parsed()) return cmd_selfrep(s_corpora, s_model, s_datastore, s_out);
    if (tune->parsed())
      return cmd_tune_tree(t_model, t_drafter, t_corpus, t_template, t_batch, t_max_new, t_out);
  } catch (const io_exit& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
