#include "tweetprobe/cli.h"

#include <cstdlib>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "tweetprobe/analysis.h"
#include "tweetprobe/corpus.h"
#include "tweetprobe/embedders.h"
#include "tweetprobe/error.h"
#include "tweetprobe/fasttext.h"
#include "tweetprobe/probe.h"
#include "tweetprobe/random.h"
#include "tweetprobe/report.h"
#include "tweetprobe/synth.h"
#include "tweetprobe/tasks.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Option tables. Every option has a typed JSON default; a --config file
// fills unset options and explicit flags override both.

struct OptSpec {
  std::string name;
  json fallback;
  std::string help;
};

struct Context {
  std::ostream& out;
  std::ostream& err;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptSpec> options;
  std::function<void(const json& cfg, Context& ctx)> run;
};

json parse_flag_value(const OptSpec& spec, const std::string& raw) {
  const json& d = spec.fallback;
  if (d.is_number_unsigned() || d.is_number_integer()) {
    auto v = parse_int(raw);
    if (!v || (d.is_number_unsigned() && *v < 0)) {
      throw Error(ErrorCode::kUsage, "--" + spec.name + " expects an integer, got '" + raw + "'");
    }
    return d.is_number_unsigned() ? json(static_cast<uint64_t>(*v)) : json(*v);
  }
  if (d.is_number_float()) {
    auto v = parse_double(raw);
    if (!v) throw Error(ErrorCode::kUsage, "--" + spec.name + " expects a number, got '" + raw + "'");
    return *v;
  }
  return raw;
}

json check_config_value(const OptSpec& spec, const json& v) {
  const json& d = spec.fallback;
  const bool ok = (d.is_boolean() && v.is_boolean()) || (d.is_string() && v.is_string()) ||
                  (d.is_number_unsigned() && v.is_number_unsigned()) ||
                  (d.is_number_integer() && !d.is_number_unsigned() && v.is_number_integer()) ||
                  (d.is_number_float() && v.is_number());
  if (!ok) throw Error(ErrorCode::kInvalidConfig, "config key '" + spec.name + "' has wrong type");
  return d.is_number_float() ? json(v.get<double>()) : v;
}

json read_config_file(const std::string& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig, "config " + path + " is not a JSON object");
  }
  // A manifest carries the resolved configuration under "config".
  if (j.contains("config") && j["config"].is_object()) return j["config"];
  return j;
}

// ---------------------------------------------------------------------------
// Manifest

std::string file_hash(const fs::path& p) { return hex64(fnv1a64(read_file(p))); }

class Manifest {
 public:
  Manifest(std::string command, const json& cfg) {
    doc_["tool"] = "tweetprobe";
    doc_["version"] = kToolVersion;
    doc_["command"] = std::move(command);
    doc_["config"] = cfg;
    doc_["seeds"] = json::object();
    doc_["config_hashes"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
  }
  void seed(const std::string& name, uint64_t value) { doc_["seeds"][name] = value; }
  void config_hash(const std::string& name, const std::string& h) { doc_["config_hashes"][name] = h; }
  void input(const std::string& path) {
    if (!path.empty()) doc_["inputs"][path] = file_hash(path);
  }
  void output(const fs::path& root, const fs::path& file) {
    doc_["outputs"][fs::relative(file, root).generic_string()] = file_hash(file);
  }
  void note(const std::string& key, json value) { doc_[key] = std::move(value); }
  void write(const fs::path& path) const { write_file(path, doc_.dump(2) + "\n"); }

 private:
  json doc_;
};

fs::path manifest_for_file(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }
fs::path root_for_file(const fs::path& out) {
  return out.has_parent_path() ? out.parent_path() : fs::path(".");
}

// ---------------------------------------------------------------------------
// Shared pipeline pieces

std::string req(const json& cfg, const char* key) {
  std::string v = cfg[key].get<std::string>();
  if (v.empty()) throw Error(ErrorCode::kUsage, std::string("--") + key + " is required");
  return v;
}

CorpusFormat parse_format(const std::string& s) {
  if (s == "jsonl") return CorpusFormat::kJsonl;
  if (s == "csv") return CorpusFormat::kSentiment140Csv;
  throw Error(ErrorCode::kInvalidConfig, "unknown corpus format '" + s + "'");
}

std::vector<TaskKind> parse_task_list(const std::string& s) {
  if (s == "all") return {kAllTasks.begin(), kAllTasks.end()};
  std::vector<TaskKind> out;
  for (std::string_view part : split(s, ',')) {
    auto t = parse_task(trim(part));
    if (!t) throw Error(ErrorCode::kInvalidConfig, "unknown task '" + std::string(part) + "'");
    out.push_back(*t);
  }
  return out;
}

TaskKind single_task(const json& cfg) {
  auto t = parse_task(req(cfg, "task"));
  if (!t) throw Error(ErrorCode::kInvalidConfig, "unknown task '" + cfg["task"].get<std::string>() + "'");
  return *t;
}

std::vector<size_t> parse_sizes(const std::string& s) {
  std::vector<size_t> out;
  for (std::string_view part : split(s, ',')) {
    auto v = parse_int(trim(part));
    if (!v || *v <= 0) throw Error(ErrorCode::kInvalidConfig, "bad size '" + std::string(part) + "'");
    out.push_back(static_cast<size_t>(*v));
  }
  return out;
}

TaskConfig task_config(const json& cfg) {
  TaskConfig tc;
  tc.length_bin_width = cfg["length-bin-width"].get<size_t>();
  tc.reply_bin_minutes = cfg["reply-bin-minutes"].get<size_t>();
  validate(tc);
  return tc;
}

TrainConfig train_config(const json& cfg) {
  TrainConfig tc;
  tc.learning_rate = cfg["lr"].get<double>();
  tc.batch_size = cfg["batch-size"].get<size_t>();
  tc.max_epochs = cfg["epochs"].get<size_t>();
  tc.patience = cfg["patience"].get<size_t>();
  tc.l2 = cfg["l2"].get<double>();
  tc.seed = derive_seed(cfg["seed"].get<uint64_t>(), 0x7a1);
  validate(tc);
  return tc;
}

FtConfig ft_config(const json& cfg, size_t dim) {
  FtConfig fc;
  fc.dim = dim;
  fc.buckets = cfg["buckets"].get<size_t>();
  fc.max_n = cfg["ft-max-n"].get<size_t>();
  fc.learning_rate = cfg["ft-lr"].get<double>();
  fc.batch_size = cfg["batch-size"].get<size_t>();
  fc.max_epochs = cfg["epochs"].get<size_t>();
  fc.patience = cfg["patience"].get<size_t>();
  fc.l2 = cfg["l2"].get<double>();
  fc.seed = derive_seed(cfg["seed"].get<uint64_t>(), 0x7a1);
  validate(fc);
  return fc;
}

// Fitted-model cache keyed by corpus fingerprint and fit parameters.
std::optional<fs::path> cache_path(const std::string& kind, const std::string& key) {
  const char* dir = std::getenv("TWEETPROBE_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return std::nullopt;
  return fs::path(dir) / (kind + "-" + hex64(fnv1a64(key)) + ".json");
}

std::shared_ptr<const BowVocab> fitted_bow(const Corpus& corpus, size_t k, size_t max_n) {
  const auto cached = cache_path("bow", corpus.fingerprint() + "|" + std::to_string(k) + "|" +
                                            std::to_string(max_n));
  if (cached && fs::exists(*cached)) return std::make_shared<BowVocab>(load_bow(*cached));
  auto vocab = std::make_shared<BowVocab>(fit_bow(corpus, k, max_n));
  if (cached) save_bow(*vocab, *cached);
  return vocab;
}

std::shared_ptr<const LdaModel> fitted_lda(const Corpus& corpus, const LdaConfig& lc) {
  const auto cached = cache_path(
      "lda", corpus.fingerprint() + "|" + std::to_string(lc.topics) + "|" +
                 std::to_string(lc.iterations) + "|" + format_double(lc.beta) + "|" +
                 std::to_string(lc.inference_sweeps) + "|" + std::to_string(lc.seed));
  if (cached && fs::exists(*cached)) return std::make_shared<LdaModel>(load_lda(*cached));
  auto model = std::make_shared<LdaModel>(fit_lda(corpus, lc));
  if (cached) save_lda(*model, *cached);
  return model;
}

std::shared_ptr<const WordVecStore> word_store(const json& cfg) {
  const std::string path = cfg["word-vectors"].get<std::string>();
  if (!path.empty()) return std::make_shared<WordVecStore>(load_word_vectors(path));
  return std::make_shared<WordVecStore>(cfg["word-dim"].get<size_t>());
}

LdaConfig lda_config(const json& cfg, size_t topics) {
  LdaConfig lc;
  lc.topics = topics;
  lc.iterations = cfg["lda-iterations"].get<size_t>();
  lc.seed = derive_seed(cfg["seed"].get<uint64_t>(), 0x1da);
  return lc;
}

// Tweet encoder for a native or external model at a given size.
std::shared_ptr<const TweetEncoder> tweet_encoder(const std::string& model, const json& cfg,
                                                  const Corpus& corpus, size_t size,
                                                  const std::string& external) {
  if (model == "bow") {
    return std::make_shared<BowEncoder>(
        fitted_bow(corpus, cfg["bow-k"].get<size_t>(), cfg["bow-max-n"].get<size_t>()));
  }
  if (model == "bom") return std::make_shared<BomEncoder>(word_store(cfg));
  if (model == "lda") return std::make_shared<LdaEncoder>(fitted_lda(corpus, lda_config(cfg, size)));
  if (model == "random") {
    return std::make_shared<RandomEncoder>(size, derive_seed(cfg["seed"].get<uint64_t>(), 0x4a4d));
  }
  if (model == "length-oracle") return std::make_shared<LengthOracleEncoder>();
  if (model == "external") {
    if (external.empty()) throw Error(ErrorCode::kUsage, "--external-embeddings is required");
    return std::make_shared<TableEncoder>(std::make_shared<EmbeddingTable>(load_external(external)));
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown model '" + model + "'");
}

std::shared_ptr<const AuxEncoder> aux_encoder(const std::string& model, const json& cfg,
                                              const Corpus& corpus) {
  std::string source = cfg["aux"].get<std::string>();
  if (source == "default") source = model == "random" ? "random" : "store";
  if (source == "store") return std::make_shared<StoreAuxEncoder>(word_store(cfg));
  if (source == "random") {
    return std::make_shared<RandomAuxEncoder>(cfg["word-dim"].get<size_t>(),
                                              derive_seed(cfg["seed"].get<uint64_t>(), 0x4a58));
  }
  if (source == "native") {
    if (model != "bow") throw Error(ErrorCode::kInvalidConfig, "--aux native is only defined for bow");
    return std::make_shared<BowAuxEncoder>(
        fitted_bow(corpus, cfg["bow-k"].get<size_t>(), cfg["bow-max-n"].get<size_t>()));
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown aux source '" + source + "'");
}

struct CellResult {
  Metrics metrics;
  size_t epochs = 0;
};

// Trains and evaluates one (model, task) cell, writing its artifacts under
// `dir` when given.
CellResult run_cell(const std::string& model, const json& cfg, const Corpus& corpus,
                    const TaskDataset& ds, size_t size, const std::string& external,
                    const std::optional<fs::path>& dir, Manifest* manifest, const fs::path& root) {
  CellResult result;
  std::vector<EpochRecord> history;
  std::string model_file;
  if (model == "fasttext") {
    const FtConfig fc = ft_config(cfg, size);
    const auto features = featurize_dataset(ds, corpus, fc.max_n, fc.buckets);
    const std::vector<int> labels = dataset_labels(ds);
    FtModel m = train_ft(features, labels, ds.class_count, ds.train, ds.val, fc, &history);
    result.metrics = evaluate_ft(m, features, ds, ds.test);
    if (dir && cfg["save-model"].get<bool>()) {
      model_file = (*dir / "model.ft.txt").string();
      save_ft(m, model_file);
    }
    if (manifest) manifest->config_hash("train", fc.hash());
  } else {
    FeatureSpec spec;
    spec.tweet = tweet_encoder(model, cfg, corpus, size, external);
    if (aux_arity(ds.kind) > 0) spec.aux = aux_encoder(model, cfg, corpus);
    const FeatureMatrix x = assemble_features(ds, corpus, spec);
    const std::vector<int> labels = dataset_labels(ds);
    const TrainConfig tc = train_config(cfg);
    ProbeModel m = train(x, labels, ds.class_count, ds.train, ds.val, tc, &history);
    result.metrics = evaluate(m, x, ds, ds.test);
    if (dir && cfg["save-model"].get<bool>()) {
      model_file = (*dir / "model.probe.txt").string();
      save_probe(m, model_file);
    }
    if (manifest) manifest->config_hash("train", tc.hash());
  }
  result.epochs = history.size();
  if (dir) {
    fs::create_directories(*dir);
    const fs::path metrics_json = *dir / "metrics.json";
    const fs::path metrics_csv = *dir / "metrics.csv";
    write_file(metrics_json, metrics_to_json(result.metrics));
    write_file(metrics_csv, metrics_to_csv(result.metrics));
    std::ostringstream hist;
    hist << "epoch,train_loss,val_macro_f1\n";
    for (const EpochRecord& e : history) {
      hist << e.epoch << ',' << format_double(e.train_loss) << ',' << format_double(e.val_macro_f1)
           << '\n';
    }
    write_file(*dir / "history.csv", hist.str());
    if (manifest) {
      manifest->output(root, metrics_json);
      manifest->output(root, metrics_csv);
      manifest->output(root, *dir / "history.csv");
      if (!model_file.empty()) manifest->output(root, model_file);
    }
  }
  return result;
}

std::string display_name(const std::string& model, const json& cfg) {
  const std::string label = cfg["label"].get<std::string>();
  if (!label.empty()) return label;
  if (model == "bow") return "BOW";
  if (model == "bom") return "BOM";
  if (model == "lda") return "LDA";
  if (model == "fasttext") return "FastText";
  return model;
}

// ---------------------------------------------------------------------------
// Subcommands

const std::vector<OptSpec> kCorpusOpts = {
    {"corpus", "", "corpus path"},
    {"format", "jsonl", "corpus format: jsonl or csv"},
};

const std::vector<OptSpec> kTaskOpts = {
    {"length-bin-width", uint64_t{4}, "Length task bin width"},
    {"reply-bin-minutes", uint64_t{10}, "ReplyTime bin width in minutes"},
};

const std::vector<OptSpec> kModelOpts = {
    {"model", "", "bow, bom, lda, fasttext, random, length-oracle or external"},
    {"label", "", "model name used in grids (defaults to the model's display name)"},
    {"word-vectors", "", "GloVe-format word vectors (default: hashed vectors)"},
    {"word-dim", uint64_t{50}, "dimension of hashed word vectors when no file is given"},
    {"external-embeddings", "", "interchange file; in sweeps '{size}' is replaced by the size"},
    {"aux", "default", "aux source: default, store, native (bow only) or random"},
    {"dim", uint64_t{0}, "representation size (LDA topics, FastText dim, random dim; 0 = model default)"},
    {"bow-k", uint64_t{50000}, "BOW vocabulary size"},
    {"bow-max-n", uint64_t{5}, "BOW maximum n-gram order"},
    {"lda-iterations", uint64_t{200}, "LDA Gibbs iterations"},
    {"buckets", uint64_t{65536}, "FastText hash buckets"},
    {"ft-max-n", uint64_t{2}, "FastText maximum n-gram order"},
    {"ft-lr", 1e-2, "FastText learning rate"},
    {"lr", 1e-3, "probe learning rate"},
    {"batch-size", uint64_t{64}, "mini-batch size"},
    {"epochs", uint64_t{100}, "maximum epochs"},
    {"patience", uint64_t{5}, "early-stopping patience (epochs)"},
    {"l2", 1e-5, "L2 weight"},
    {"save-model", true, "write the trained model artifact"},
};

size_t default_size(const std::string& model) {
  if (model == "lda") return 200;
  if (model == "fasttext") return 10;
  if (model == "random") return 50;
  return 0;
}

std::vector<OptSpec> concat(std::initializer_list<std::vector<OptSpec>> parts) {
  std::vector<OptSpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

void cmd_synth(const json& cfg, Context& ctx) {
  SynthConfig sc;
  sc.n_tweets = cfg["n"].get<size_t>();
  sc.vocab_size = cfg["vocab"].get<size_t>();
  sc.hashtag_rate = cfg["hashtag-rate"].get<double>();
  sc.mention_rate = cfg["mention-rate"].get<double>();
  sc.reply_probability = cfg["reply-probability"].get<double>();
  sc.slang_rate = cfg["slang-rate"].get<double>();
  sc.rare_word_rate = cfg["rare-word-rate"].get<double>();
  sc.dangling_rate = cfg["dangling-rate"].get<double>();
  sc.seed = cfg["seed"].get<uint64_t>();
  const fs::path out = req(cfg, "out");
  const SynthResult result = generate_synthetic(sc);
  save_corpus(result.corpus, out);
  Manifest m("synth", cfg);
  m.seed("synth", sc.seed);
  m.output(root_for_file(out), out);
  m.note("corpus_id", result.corpus.fingerprint());
  m.write(manifest_for_file(out));
  ctx.out << "wrote " << result.corpus.size() << " tweets to " << out.string() << '\n';
}

void cmd_ingest(const json& cfg, Context& ctx) {
  const std::string in = req(cfg, "corpus");
  const Corpus corpus = load_corpus(in, parse_format(cfg["format"].get<std::string>()));
  const Threading threads = thread_conversations(corpus);
  const fs::path out = req(cfg, "out");
  save_corpus(corpus, out);
  Manifest m("ingest", cfg);
  m.input(in);
  m.output(root_for_file(out), out);
  m.note("corpus_id", corpus.fingerprint());
  m.write(manifest_for_file(out));
  ctx.out << "tweets " << corpus.size() << "\nconversations " << threads.conversations.size()
          << "\ndangling " << threads.dangling.size() << '\n';
}

void cmd_tasks(const json& cfg, Context& ctx) {
  const std::string in = req(cfg, "corpus");
  const Corpus corpus = load_corpus(in, parse_format(cfg["format"].get<std::string>()));
  const TaskConfig tc = task_config(cfg);
  const uint64_t seed = cfg["seed"].get<uint64_t>();
  const fs::path out = req(cfg, "out");
  fs::create_directories(out);
  Manifest m("tasks", cfg);
  m.input(in);
  m.seed("tasks", seed);
  m.config_hash("tasks", tc.hash());
  for (TaskKind kind : parse_task_list(cfg["task"].get<std::string>())) {
    const TaskDataset ds = build_task(kind, corpus, tc, seed);
    const fs::path inst = out / (std::string(task_name(kind)) + ".jsonl");
    const fs::path meta = out / (std::string(task_name(kind)) + ".meta.json");
    save_task_dataset(ds, inst, meta);
    m.output(out, inst);
    m.output(out, meta);
    ctx.out << task_name(kind) << ' ' << ds.instances.size() << " instances (train "
            << ds.train.size() << ", val " << ds.val.size() << ", test " << ds.test.size() << ")\n";
  }
  m.write(out / "manifest.json");
}

void cmd_embed(const json& cfg, Context& ctx) {
  const std::string in = req(cfg, "corpus");
  const Corpus corpus = load_corpus(in, parse_format(cfg["format"].get<std::string>()));
  const std::string model = req(cfg, "model");
  if (model == "fasttext" || model == "external") {
    throw Error(ErrorCode::kInvalidConfig, "embed supports native unsupervised models only");
  }
  size_t size = cfg["dim"].get<size_t>();
  if (size == 0) size = default_size(model);
  const auto encoder = tweet_encoder(model, cfg, corpus, size, "");
  EmbeddingTable table(encoder->dim());
  SparseVector sv;
  std::vector<double> dense(encoder->dim());
  for (const Tweet& t : corpus.tweets()) {
    sv.index.clear();
    sv.value.clear();
    encoder->encode(t, sv, 0);
    std::fill(dense.begin(), dense.end(), 0.0);
    for (size_t i = 0; i < sv.nnz(); ++i) dense[sv.index[i]] = sv.value[i];
    table.add(t.id, dense);
  }
  const fs::path out = req(cfg, "out");
  save_external(table, out);
  Manifest m("embed", cfg);
  m.input(in);
  m.seed("model", cfg["seed"].get<uint64_t>());
  m.output(root_for_file(out), out);
  m.write(manifest_for_file(out));
  ctx.out << "wrote " << table.size() << " x " << table.dim() << " embeddings to " << out.string()
          << '\n';
}

void cmd_probe(const json& cfg, Context& ctx) {
  const std::string in = req(cfg, "corpus");
  const Corpus corpus = load_corpus(in, parse_format(cfg["format"].get<std::string>()));
  const std::string model = req(cfg, "model");
  const TaskKind kind = single_task(cfg);
  const TaskConfig tc = task_config(cfg);
  const uint64_t seed = cfg["seed"].get<uint64_t>();
  const fs::path out = req(cfg, "out");
  fs::create_directories(out);
  Manifest m("probe", cfg);
  m.input(in);
  const std::string external = cfg["external-embeddings"].get<std::string>();
  m.input(external);
  m.input(cfg["word-vectors"].get<std::string>());
  m.seed("tasks", seed);
  m.config_hash("tasks", tc.hash());

  const TaskDataset ds = build_task(kind, corpus, tc, seed);
  save_task_dataset(ds, out / "dataset.jsonl", out / "dataset.meta.json");
  m.output(out, out / "dataset.jsonl");
  m.output(out, out / "dataset.meta.json");

  size_t size = cfg["dim"].get<size_t>();
  if (size == 0) size = default_size(model);
  const CellResult cell = run_cell(model, cfg, corpus, ds, size, external, out, &m, out);

  const std::vector<LengthBin> bins =
      slice_by_length(cell.metrics, corpus, cfg["length-bin-width"].get<size_t>(),
                      cfg["min-support"].get<size_t>());
  const std::string name = display_name(model, cfg);
  write_file(out / "length_slices.csv", length_slices_csv(name, kind, bins));
  m.output(out, out / "length_slices.csv");
  MetricsGrid grid;
  grid.set(name, kind, cell.metrics.macro_f1);
  write_file(out / "cell.csv", render_grid(grid, GridFormat::kCsv));
  m.output(out, out / "cell.csv");
  m.note("metric", "macro_f1");
  m.write(out / "manifest.json");
  ctx.out << name << ' ' << task_name(kind) << " macro_f1 " << format_double(cell.metrics.macro_f1)
          << " accuracy " << format_double(cell.metrics.micro_f1) << " epochs " << cell.epochs
          << '\n';
}

void cmd_sweep(const json& cfg, Context& ctx) {
  const std::string in = req(cfg, "corpus");
  const Corpus corpus = load_corpus(in, parse_format(cfg["format"].get<std::string>()));
  const std::string model = req(cfg, "model");
  const TaskKind kind = single_task(cfg);
  const TaskConfig tc = task_config(cfg);
  const uint64_t seed = cfg["seed"].get<uint64_t>();
  const std::string analysis = cfg["analysis"].get<std::string>();
  if (analysis != "size" && analysis != "length" && analysis != "both") {
    throw Error(ErrorCode::kInvalidConfig, "--analysis must be size, length or both");
  }
  const fs::path out = req(cfg, "out");
  fs::create_directories(out);
  Manifest m("sweep", cfg);
  m.input(in);
  m.seed("tasks", seed);
  m.config_hash("tasks", tc.hash());
  const TaskDataset ds = build_task(kind, corpus, tc, seed);
  const std::string name = display_name(model, cfg);
  const std::string external = cfg["external-embeddings"].get<std::string>();
  TrendConfig trend;
  trend.invariance_band = cfg["invariance-band"].get<double>();
  trend.rho_threshold = cfg["rho-threshold"].get<double>();
  json trends = json::object();

  if (analysis == "size" || analysis == "both") {
    const std::vector<size_t> sizes = parse_sizes(cfg["sizes"].get<std::string>());
    if (model != "fasttext" && model != "lda" && model != "random" && model != "external") {
      throw Error(ErrorCode::kInvalidConfig, "model '" + model + "' has no size knob");
    }
    std::vector<std::string> paths(sizes.size());
    if (model == "external") {
      const std::string tmpl = external;
      if (tmpl.find("{size}") == std::string::npos) {
        throw Error(ErrorCode::kInvalidConfig, "--external-embeddings needs a '{size}' placeholder");
      }
      for (size_t i = 0; i < sizes.size(); ++i) {
        std::string p = tmpl;
        p.replace(p.find("{size}"), 6, std::to_string(sizes[i]));
        if (!fs::exists(p)) {
          throw Error(ErrorCode::kMissingSizeVariant, "no embeddings for size " +
                                                          std::to_string(sizes[i]) + " at " + p);
        }
        paths[i] = p;
      }
    }
    std::vector<SizePoint> points = size_sweep(
        [&](size_t s) {
          size_t i = 0;
          while (sizes[i] != s) ++i;
          const fs::path dir = out / ("size_" + std::to_string(s));
          return run_cell(model, cfg, corpus, ds, s, paths[i], dir, nullptr, out).metrics.macro_f1;
        },
        sizes, cfg["jobs"].get<size_t>());
    for (size_t s : sizes) {
      for (const char* f : {"metrics.json", "metrics.csv", "history.csv"}) {
        m.output(out, out / ("size_" + std::to_string(s)) / f);
      }
      for (const char* f : {"model.ft.txt", "model.probe.txt"}) {
        const fs::path p = out / ("size_" + std::to_string(s)) / f;
        if (fs::exists(p)) m.output(out, p);
      }
    }
    write_file(out / "size_sweep.csv", size_sweep_csv(name, kind, points, ds.test.size()));
    m.output(out, out / "size_sweep.csv");
    std::vector<double> values;
    for (const SizePoint& p : points) values.push_back(p.f1);
    const TrendLabel label = classify_trend(values, trend);
    trends["size"] = std::string(trend_name(label));
    double lo = values.front(), hi = values.front();
    for (double v : values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    ctx.out << "size sweep " << name << ' ' << task_name(kind) << ": range "
            << format_double(hi - lo) << ", trend " << trend_name(label) << '\n';
    for (const SizePoint& p : points) ctx.out << "  " << p.size << ' ' << format_double(p.f1) << '\n';
  }

  if (analysis == "length" || analysis == "both") {
    size_t size = cfg["dim"].get<size_t>();
    if (size == 0) size = default_size(model);
    const fs::path dir = out / "length";
    const CellResult cell = run_cell(model, cfg, corpus, ds, size, external, dir, &m, out);
    const std::vector<LengthBin> bins =
        slice_by_length(cell.metrics, corpus, cfg["length-bin-width"].get<size_t>(),
                        cfg["min-support"].get<size_t>());
    write_file(out / "length_slices.csv", length_slices_csv(name, kind, bins));
    m.output(out, out / "length_slices.csv");
    std::vector<double> values;
    for (const LengthBin& b : bins) {
      if (b.reported) values.push_back(b.f1);
    }
    if (values.size() >= 3) {
      const TrendLabel label = classify_trend(values, trend);
      trends["length"] = std::string(trend_name(label));
      ctx.out << "length slices " << name << ' ' << task_name(kind) << ": trend "
              << trend_name(label) << '\n';
    } else {
      trends["length"] = nullptr;
      ctx.out << "length slices " << name << ' ' << task_name(kind)
              << ": fewer than 3 bins with enough support\n";
    }
  }
  m.note("trends", trends);
  m.note("trend_config", json{{"invariance_band", trend.invariance_band},
                              {"rho_threshold", trend.rho_threshold}});
  m.write(out / "manifest.json");
}

void cmd_report(const json& cfg, Context& ctx) {
  MetricsGrid grid;
  Manifest m("report", cfg);
  const std::string grids = cfg["grid"].get<std::string>();
  if (cfg["paper"].get<bool>()) {
    grid = load_paper_reference();
  } else {
    if (grids.empty()) throw Error(ErrorCode::kUsage, "--grid or --paper is required");
    for (std::string_view p : split(grids, ',')) {
      const std::string path(trim(p));
      m.input(path);
      const MetricsGrid part = parse_grid_csv(read_file(path));
      for (const auto& [key, v] : part.cells()) grid.set(key.first, key.second, v);
    }
  }
  std::ostringstream md;
  md << "# Elementary property probing: macro-F1 (%)\n\n"
     << "Metric: macro-F1 over the classes present in gold labels or predictions.\n"
     << "Best value per column in bold.\n\n"
     << render_grid(grid, GridFormat::kMarkdown);
  const fs::path out = req(cfg, "out");
  fs::create_directories(out);
  write_file(out / "grid.csv", render_grid(grid, GridFormat::kCsv));
  m.output(out, out / "grid.csv");
  if (cfg["reference"].get<bool>()) {
    const MetricsGrid ref = load_paper_reference();
    const GridDiff diff = diff_grids(grid, ref);
    write_file(out / "diff.csv", render_diff(diff));
    m.output(out, out / "diff.csv");
    md << "\nComparison against the published table (reference, not reproduction target; "
       << "checksum " << kPaperReferenceChecksum << "):\n\n| Task | Models | Kendall tau |\n|---|---:|---:|\n";
    for (const TaskAgreement& t : diff.tasks) {
      md << "| " << task_title(t.task) << " | " << t.models << " | "
         << (t.kendall_tau ? format_double(*t.kendall_tau) : std::string("-")) << " |\n";
    }
    for (const std::string& w : diff.warnings) {
      md << "\nwarning: " << w << '\n';
      ctx.err << "warning: " << w << '\n';
    }
  }
  write_file(out / "report.md", md.str());
  m.output(out, out / "report.md");
  m.write(out / "manifest.json");
  ctx.out << md.str();
}

std::vector<Command> commands();

int dispatch(const std::string& name, const json& cfg, Context& ctx);

void cmd_replay(const json& cfg, Context& ctx) {
  const std::string path = req(cfg, "manifest");
  auto doc = json::parse(read_file(path), nullptr, false);
  if (doc.is_discarded() || !doc.contains("command") || !doc.contains("config")) {
    throw Error(ErrorCode::kInvalidConfig, path + " is not a manifest");
  }
  const std::string command = doc["command"].get<std::string>();
  if (command == "replay") throw Error(ErrorCode::kInvalidConfig, "cannot replay a replay");
  json run_cfg = doc["config"];
  const std::string out = cfg["out"].get<std::string>();
  if (!out.empty()) run_cfg["out"] = out;
  dispatch(command, run_cfg, ctx);
  if (!cfg["verify"].get<bool>()) return;

  // Compare every recorded output hash against the fresh run.
  const fs::path target = run_cfg["out"].get<std::string>();
  const bool file_output = command == "synth" || command == "ingest" || command == "embed";
  const fs::path root = file_output ? root_for_file(target) : target;
  size_t mismatches = 0;
  for (const auto& [rel, hash] : doc["outputs"].items()) {
    fs::path produced = root / rel;
    if (file_output) produced = target;
    const bool same = fs::exists(produced) && file_hash(produced) == hash.get<std::string>();
    if (!same) {
      ++mismatches;
      ctx.err << "mismatch: " << rel << '\n';
    }
  }
  if (mismatches > 0) {
    throw Error(ErrorCode::kMalformed, std::to_string(mismatches) + " outputs differ from manifest");
  }
  ctx.out << "verified " << doc["outputs"].size() << " outputs\n";
}

std::vector<Command> commands() {
  const OptSpec seed{"seed", uint64_t{1}, "random seed"};
  const OptSpec out_file{"out", "", "output file"};
  const OptSpec out_dir{"out", "", "output directory"};
  return {
      {"synth", "generate a synthetic corpus",
       {{"n", uint64_t{1000}, "number of tweets"},
        {"vocab", uint64_t{300}, "core lexicon size"},
        {"hashtag-rate", 0.2, "hashtag rate"},
        {"mention-rate", 0.3, "mention rate"},
        {"reply-probability", 0.3, "reply probability"},
        {"slang-rate", 0.15, "slang substitution rate"},
        {"rare-word-rate", 0.05, "rare word rate"},
        {"dangling-rate", 0.0, "rate of replies to tweets outside the corpus"},
        seed,
        out_file},
       cmd_synth},
      {"ingest", "convert and validate a corpus",
       concat({kCorpusOpts, {out_file}}), cmd_ingest},
      {"tasks", "build task datasets",
       concat({kCorpusOpts, kTaskOpts, {{"task", "all", "task name list or 'all'"}, seed, out_dir}}),
       cmd_tasks},
      {"embed", "run a native embedder and write an interchange file",
       concat({kCorpusOpts, kModelOpts, {seed, out_file}}), cmd_embed},
      {"probe", "train and evaluate one (model, task) cell",
       concat({kCorpusOpts, kTaskOpts, kModelOpts,
               {{"task", "", "task name"}, {"min-support", uint64_t{50}, "length-slice minimum support"},
                seed, out_dir}}),
       cmd_probe},
      {"sweep", "representation-size and tweet-length analyses",
       concat({kCorpusOpts, kTaskOpts, kModelOpts,
               {{"task", "", "task name"},
                {"analysis", "size", "size, length or both"},
                {"sizes", "10,25,50,100,200", "comma-separated sizes"},
                {"jobs", uint64_t{1}, "parallel cells"},
                {"min-support", uint64_t{50}, "length-slice minimum support"},
                {"invariance-band", 0.02, "trend invariance band"},
                {"rho-threshold", 0.5, "trend Spearman threshold"},
                seed, out_dir}}),
       cmd_sweep},
      {"report", "render grids and compare with the published table",
       {{"grid", "", "comma-separated grid CSV files (model,task,f1)"},
        {"paper", false, "render the bundled published table"},
        {"reference", false, "add a comparison against the published table"},
        out_dir},
       cmd_report},
      {"replay", "rerun a command from its manifest",
       {{"manifest", "", "manifest path"},
        {"out", "", "alternative output location"},
        {"verify", false, "check outputs against the manifest hashes"}},
       cmd_replay},
  };
}

const Command& find_command(const std::string& name) {
  static const std::vector<Command> all = commands();
  for (const Command& c : all) {
    if (c.name == name) return c;
  }
  throw Error(ErrorCode::kUsage, "unknown command '" + name + "'");
}

// Fills defaults for keys missing from a stored configuration.
json complete(const Command& cmd, const json& partial) {
  json cfg = json::object();
  for (const OptSpec& o : cmd.options) {
    cfg[o.name] = partial.contains(o.name) ? check_config_value(o, partial[o.name]) : o.fallback;
  }
  for (const auto& [k, v] : partial.items()) {
    if (!cfg.contains(k)) throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + k + "'");
  }
  return cfg;
}

int dispatch(const std::string& name, const json& cfg, Context& ctx) {
  const Command& cmd = find_command(name);
  cmd.run(complete(cmd, cfg), ctx);
  return 0;
}

int exit_code_for(const Error& e) {
  if (e.code() == ErrorCode::kUsage) return 1;
  return is_validation_error(e.code()) ? 1 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx{out, err};
  CLI::App app{"Probing harness for tweet representations", "tweetprobe"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  const std::vector<Command> cmds = commands();
  struct Bound {
    CLI::App* sub;
    std::vector<std::string> values;
    std::vector<bool> flags;
    std::string config;
  };
  std::vector<Bound> bound(cmds.size());
  for (size_t i = 0; i < cmds.size(); ++i) {
    Bound& b = bound[i];
    b.sub = app.add_subcommand(cmds[i].name, cmds[i].help);
    b.values.resize(cmds[i].options.size());
    b.flags.assign(cmds[i].options.size(), false);
    b.sub->add_option("--config", b.config, "JSON config or manifest; flags override it");
    for (size_t k = 0; k < cmds[i].options.size(); ++k) {
      const OptSpec& o = cmds[i].options[k];
      const std::string help = o.help + " (default: " + o.fallback.dump() + ")";
      if (o.fallback.is_boolean()) {
        b.sub->add_option("--" + o.name, b.values[k], help)->expected(0, 1)->default_str("");
      } else {
        b.sub->add_option("--" + o.name, b.values[k], help);
      }
    }
  }

  std::vector<std::string> argv_store = {"tweetprobe"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    for (size_t i = 0; i < cmds.size(); ++i) {
      Bound& b = bound[i];
      if (!b.sub->parsed()) continue;
      const Command& cmd = cmds[i];
      json partial = b.config.empty() ? json::object() : read_config_file(b.config);
      for (size_t k = 0; k < cmd.options.size(); ++k) {
        const OptSpec& o = cmd.options[k];
        if (b.sub->count("--" + o.name) == 0) continue;
        if (o.fallback.is_boolean()) {
          const std::string& v = b.values[k];
          if (v.empty() || v == "true" || v == "1") {
            partial[o.name] = true;
          } else if (v == "false" || v == "0") {
            partial[o.name] = false;
          } else {
            throw Error(ErrorCode::kUsage, "--" + o.name + " expects true or false");
          }
        } else {
          partial[o.name] = parse_flag_value(o, b.values[k]);
        }
      }
      return dispatch(cmd.name, partial, ctx);
    }
    throw Error(ErrorCode::kUsage, "no command given");
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    if (e.code() == ErrorCode::kUsage) err << app.help();
    return exit_code_for(e);
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace tweetprobe
