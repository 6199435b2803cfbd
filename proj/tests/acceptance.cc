// Acceptance checks on seeded synthetic data. Prints one PASS/FAIL line per
// criterion. Exits 0 unless --strict is given and a criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "scans.h"
#include "test_util.h"
#include "tweetprobe/analysis.h"
#include "tweetprobe/cli.h"
#include "tweetprobe/embedders.h"
#include "tweetprobe/fasttext.h"
#include "tweetprobe/probe.h"
#include "tweetprobe/random.h"
#include "tweetprobe/report.h"
#include "tweetprobe/synth.h"
#include "tweetprobe/tasks.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

constexpr uint64_t kCorpusSeed = 7;
constexpr uint64_t kTaskSeed = 1;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [unmet]");
  }
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

const Corpus& corpus5k() {
  static const Corpus corpus = [] {
    SynthConfig cfg;
    cfg.n_tweets = 5000;
    cfg.seed = kCorpusSeed;
    return generate_synthetic(cfg).corpus;
  }();
  return corpus;
}

const TaskDataset& dataset(TaskKind kind) {
  static std::map<TaskKind, TaskDataset> cache;
  auto it = cache.find(kind);
  if (it == cache.end()) {
    it = cache.emplace(kind, build_task(kind, corpus5k(), TaskConfig{}, kTaskSeed)).first;
  }
  return it->second;
}

double probe_f1(TaskKind kind, const FeatureSpec& spec, const TrainConfig& cfg) {
  const TaskDataset& ds = dataset(kind);
  const FeatureMatrix x = assemble_features(ds, corpus5k(), spec);
  const std::vector<int> labels = dataset_labels(ds);
  const ProbeModel m = train(x, labels, ds.class_count, ds.train, ds.val, cfg);
  return evaluate(m, x, ds, ds.test).macro_f1;
}

// Length-oracle schedule: the single raw count feature needs biases far
// from zero, which the default step size reaches only after thousands of
// epochs.
TrainConfig oracle_schedule() {
  TrainConfig cfg;
  cfg.learning_rate = 0.1;
  cfg.max_epochs = 1000;
  cfg.patience = 1000;
  return cfg;
}

Outcome criterion1() {
  Outcome o;
  size_t built = 0, unbalanced = 0;
  for (TaskKind kind : kAllTasks) {
    const TaskDataset& ds = dataset(kind);
    built += !ds.instances.empty();
    if (is_binary(kind)) {
      const auto [neg, pos] = scans::label_balance(ds);
      unbalanced += neg != pos;
    }
  }
  const Corpus& c = corpus5k();
  const size_t content = scans::content_violations(dataset(TaskKind::kContent), c);
  const size_t order = scans::word_order_violations(dataset(TaskKind::kWordOrder), c);
  const size_t ne = scans::named_entity_violations(dataset(TaskKind::kNamedEntity), c);
  const size_t slang = scans::slang_violations(dataset(TaskKind::kSlangWords), c);
  const size_t repeat = scans::word_repetition_violations(dataset(TaskKind::kWordRepetition), c);
  o.require(built == 13, std::to_string(built) + "/13 tasks built");
  o.require(unbalanced == 0, std::to_string(unbalanced) + " unbalanced binary tasks");
  o.require(content + order + ne + slang + repeat == 0,
            "violations content=" + std::to_string(content) + " word_order=" +
                std::to_string(order) + " named_entity=" + std::to_string(ne) +
                " slang=" + std::to_string(slang) + " word_repetition=" + std::to_string(repeat));
  return o;
}

Outcome criterion2() {
  Outcome o;
  double probe_max = 0, ft_max = 0;
  for (uint64_t seed = 1; seed <= 20; ++seed) {
    GradientCheckOptions opt;
    opt.seed = seed;
    probe_max = std::max(probe_max, probe_gradient_check(opt));
    ft_max = std::max(ft_max, ft_gradient_check(opt));
  }
  std::ostringstream p, f;
  p << "probe max rel err " << std::scientific << std::setprecision(2) << probe_max;
  f << "FastText max rel err " << std::scientific << std::setprecision(2) << ft_max;
  o.require(probe_max < 1e-4, p.str());
  o.require(ft_max < 1e-4, f.str());
  return o;
}

double g_oracle_f1 = 0.0;

Outcome criterion3() {
  Outcome o;
  FeatureSpec oracle{std::make_shared<LengthOracleEncoder>(), nullptr};
  g_oracle_f1 = probe_f1(TaskKind::kLength, oracle, oracle_schedule());
  const double default_f1 = probe_f1(TaskKind::kLength, oracle, TrainConfig{});
  o.require(g_oracle_f1 >= 0.99, "length oracle macro-F1 " + fixed(g_oracle_f1) +
                                     " (lr 0.1, 1000 epochs; default schedule gives " +
                                     fixed(default_f1) + ")");
  double lo = 1.0, hi = 0.0;
  std::ostringstream per_task;
  for (TaskKind kind : kAllTasks) {
    if (!is_binary(kind)) continue;
    FeatureSpec random{std::make_shared<RandomEncoder>(50, 0x4a4d),
                       std::make_shared<RandomAuxEncoder>(50, 0x4a58)};
    const double f1 = probe_f1(kind, random, TrainConfig{});
    lo = std::min(lo, f1);
    hi = std::max(hi, f1);
    per_task << ' ' << task_name(kind) << '=' << fixed(f1, 3);
  }
  o.require(lo >= 0.43 && hi <= 0.57,
            "random dim-50 binary macro-F1 in [" + fixed(lo, 3) + ", " + fixed(hi, 3) + "]:" +
                per_task.str());
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto vocab = std::make_shared<BowVocab>(fit_bow(corpus5k(), 50000, 5));
  FeatureSpec bow{std::make_shared<BowEncoder>(vocab), std::make_shared<BowAuxEncoder>(vocab)};
  const double content = probe_f1(TaskKind::kContent, bow, TrainConfig{});
  o.require(content >= 0.95, "BOW Content macro-F1 " + fixed(content));
  const double length = probe_f1(TaskKind::kLength, bow, TrainConfig{});
  o.require(g_oracle_f1 - length >= 0.20,
            "BOW Length " + fixed(length) + " trails oracle by " + fixed(g_oracle_f1 - length));

  LdaConfig lc;
  lc.topics = 200;
  lc.seed = kTaskSeed;
  const LdaModel lda = fit_lda(corpus5k(), lc);
  double deviation = 0.0;
  bool non_negative = true;
  for (const Tweet& t : corpus5k().tweets()) {
    const auto theta = embed_lda(lda, t);
    double sum = 0.0;
    for (double v : theta) {
      non_negative &= v >= 0.0;
      sum += v;
    }
    deviation = std::max(deviation, std::fabs(sum - 1.0));
  }
  std::ostringstream dev;
  dev << "LDA simplex max deviation " << std::scientific << std::setprecision(2) << deviation;
  o.require(non_negative && deviation <= 1e-9, dev.str());

  const std::vector<std::string> fruit = {"apple", "banana", "cherry", "grape",
                                          "lemon", "mango",  "peach",  "plum"};
  const std::vector<std::string> parts = {"engine", "wheel", "brake", "clutch",
                                          "piston", "gear",  "axle",  "valve"};
  Rng rng(17);
  std::vector<Tweet> docs;
  std::vector<int> truth;
  for (size_t i = 0; i < 400; ++i) {
    const auto& words = i % 2 ? parts : fruit;
    std::string text;
    for (int k = 0; k < 8; ++k) text += (k ? " " : "") + words[rng.uniform(words.size())];
    docs.push_back(testing::make_tweet("d" + std::to_string(i), text));
    truth.push_back(static_cast<int>(i % 2));
  }
  const Corpus two(std::move(docs));
  LdaConfig two_cfg;
  two_cfg.topics = 2;
  two_cfg.iterations = 100;
  const LdaModel m = fit_lda(two, two_cfg);
  std::map<std::pair<size_t, int>, size_t> table;
  for (size_t i = 0; i < two.size(); ++i) {
    const auto theta = m.training_theta(i);
    ++table[{static_cast<size_t>(std::max_element(theta.begin(), theta.end()) - theta.begin()),
             truth[i]}];
  }
  size_t hit = 0;
  for (size_t k = 0; k < 2; ++k) hit += std::max(table[{k, 0}], table[{k, 1}]);
  const double purity = static_cast<double>(hit) / two.size();
  o.require(purity >= 0.9, "two-topic purity " + fixed(purity));
  return o;
}

Outcome criterion5() {
  Outcome o;
  const TaskDataset& ds = dataset(TaskKind::kContent);
  const std::vector<int> labels = dataset_labels(ds);
  FtConfig base;
  const auto features = featurize_dataset(ds, corpus5k(), base.max_n, base.buckets);
  const auto points = size_sweep(
      [&](size_t size) {
        FtConfig cfg = base;
        cfg.dim = size;
        const FtModel m = train_ft(features, labels, ds.class_count, ds.train, ds.val, cfg);
        return evaluate_ft(m, features, ds, ds.test).macro_f1;
      },
      default_sizes(), 1);
  std::vector<double> values;
  std::ostringstream list;
  for (const SizePoint& p : points) {
    values.push_back(p.f1);
    list << ' ' << p.size << '=' << fixed(p.f1);
  }
  const double range = *std::max_element(values.begin(), values.end()) -
                       *std::min_element(values.begin(), values.end());
  o.require(range <= 0.05, "FastText Content range " + fixed(range) + ":" + list.str());
  const TrendLabel trend = classify_trend(values);
  o.require(trend == TrendLabel::kInvariant, "trend " + std::string(trend_name(trend)));
  return o;
}

Outcome criterion6() {
  Outcome o;
  const MetricsGrid g = load_paper_reference();
  const auto cell = [&](const std::string& m, TaskKind t) { return *g.get(m, t) * 100.0; };
  o.require(g.size() == 169, std::to_string(g.size()) + " cells");
  const bool spots = std::fabs(cell("BOW", TaskKind::kLength) - 37.83) < 1e-9 &&
                     std::fabs(cell("STV", TaskKind::kContent) - 98.85) < 1e-9 &&
                     std::fabs(cell("BLSTM", TaskKind::kSlangWords) - 80.52) < 1e-9 &&
                     std::fabs(cell("LSTM", TaskKind::kLength) - 99.79) < 1e-9;
  o.require(spots, "spot cells BOW/Length, STV/Content, BLSTM/SlangWords, LSTM/Length");
  const std::set<std::pair<std::string, TaskKind>> bold = {
      {"LSTM", TaskKind::kLength},       {"STV", TaskKind::kContent},
      {"BOM", TaskKind::kWordOrder},     {"BLSTM", TaskKind::kSlangWords},
      {"LDA", TaskKind::kHashtag},       {"CDSSM", TaskKind::kHashtag},
      {"SCBOW", TaskKind::kHashtag},     {"BOM", TaskKind::kNamedEntity},
      {"BLSTM", TaskKind::kCapCount},    {"CNN", TaskKind::kInformativeCap},
      {"STV", TaskKind::kMentionCount},  {"BLSTM", TaskKind::kMentionPosition},
      {"STV", TaskKind::kIsReply},       {"BOW", TaskKind::kReplyTime},
      {"STV", TaskKind::kWordRepetition}};
  o.require(column_maxima(g) == bold, "column argmax set equals boldface set (15 cells)");
  return o;
}

Outcome criterion7() {
  Outcome o;
  testing::TempDir dir("acceptance_replay");
  const auto p = [&](const std::string& leaf) { return (dir / leaf).string(); };
  std::ostringstream sink;
  const auto run = [&](std::vector<std::string> args) { return run_cli(args, sink, sink); };
  bool ok = run({"synth", "--n", "5000", "--seed", "7", "--out", p("c.jsonl")}) == 0;
  ok &= run({"tasks", "--corpus", p("c.jsonl"), "--out", p("tasks")}) == 0;
  ok &= run({"probe", "--corpus", p("c.jsonl"), "--model", "bow", "--task", "word_order",
             "--out", p("bow")}) == 0;
  ok &= run({"probe", "--corpus", p("c.jsonl"), "--model", "fasttext", "--task", "content",
             "--out", p("ft")}) == 0;
  o.require(ok, "pipeline synth, tasks, probe bow, probe fasttext");
  size_t verified = 0;
  const std::vector<std::pair<std::string, std::string>> manifests = {
      {"c.jsonl.manifest.json", "c_again.jsonl"},
      {"tasks/manifest.json", "tasks_again"},
      {"bow/manifest.json", "bow_again"},
      {"ft/manifest.json", "ft_again"}};
  for (const auto& [manifest, target] : manifests) {
    verified += run({"replay", "--manifest", p(manifest), "--out", p(target), "--verify"}) == 0;
  }
  o.require(verified == manifests.size(), std::to_string(verified) + "/" +
                                              std::to_string(manifests.size()) +
                                              " manifests replayed bit-identically");
  return o;
}

struct Criterion {
  int id;
  std::string title;
  double budget_seconds;
  std::function<Outcome()> check;
};

}  // namespace
}  // namespace tweetprobe

int main(int argc, char** argv) {
  using namespace tweetprobe;
  bool strict = false;
  for (int i = 1; i < argc; ++i) strict |= std::strcmp(argv[i], "--strict") == 0;

  const std::vector<Criterion> criteria = {
      {1, "constructor validity", 60, criterion1},
      {2, "gradient checks", 10, criterion2},
      {3, "oracle probes", 300, criterion3},
      {4, "encoding separations", 600, criterion4},
      {5, "size sweep", 900, criterion5},
      {6, "reference grid", 60, criterion6},
      {7, "determinism", 600, criterion7},
  };
  size_t failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ostringstream time;
    time << std::fixed << std::setprecision(1) << seconds << " s (budget "
         << c.budget_seconds << " s)";
    o.require(seconds < c.budget_seconds, time.str());
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.title << ": "
              << o.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return strict && failed > 0 ? 1 : 0;
}
