#include "tweetprobe/tasks.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {

using json = nlohmann::ordered_json;

namespace {

struct TaskInfo {
  TaskKind kind;
  std::string_view name;
  std::string_view title;
  size_t arity;
  bool binary;
};

constexpr TaskInfo kTaskInfo[] = {
    {TaskKind::kLength, "length", "Length", 0, false},
    {TaskKind::kContent, "content", "Content", 1, true},
    {TaskKind::kWordOrder, "word_order", "Word Order", 2, true},
    {TaskKind::kSlangWords, "slang_words", "Slang Words", 2, true},
    {TaskKind::kHashtag, "hashtag", "Hashtag", 1, true},
    {TaskKind::kNamedEntity, "named_entity", "Named Entity", 1, true},
    {TaskKind::kCapCount, "cap_count", "Capitalization Count", 0, false},
    {TaskKind::kInformativeCap, "informative_cap", "Informative Capitalization", 1, true},
    {TaskKind::kMentionCount, "mention_count", "Mention Count", 0, false},
    {TaskKind::kMentionPosition, "mention_position", "Mention Position", 0, false},
    {TaskKind::kIsReply, "is_reply", "Is Reply", 0, true},
    {TaskKind::kReplyTime, "reply_time", "Reply Time", 0, false},
    {TaskKind::kWordRepetition, "word_repetition", "Word Repetition", 1, true},
};

const TaskInfo& info(TaskKind kind) { return kTaskInfo[static_cast<size_t>(kind)]; }

Rng task_rng(uint64_t seed, TaskKind kind) {
  return Rng(derive_seed(seed, 1000 + static_cast<uint64_t>(kind)));
}

TaskDataset empty_dataset(TaskKind kind, size_t classes) {
  TaskDataset ds;
  ds.kind = kind;
  ds.class_count = classes;
  return ds;
}

void add(TaskDataset& ds, const Tweet& tweet, std::vector<AuxItem> aux, size_t label) {
  ds.instances.push_back({tweet.id, std::move(aux), static_cast<int>(label)});
}

// Lowercased surfaces of every token, hashtags also without '#'.
std::unordered_set<std::string> surface_set(const Tweet& tweet) {
  std::unordered_set<std::string> s;
  for (const Token& t : tweet.tokens) {
    std::string lower = to_lower_ascii(t.surface);
    if (t.kind == TokenKind::kHashtag) s.insert(lower.substr(1));
    s.insert(std::move(lower));
  }
  return s;
}

std::vector<std::string> word_vocabulary(const Corpus& corpus) {
  std::set<std::string> vocab;
  for (const Tweet& t : corpus.tweets()) {
    for (auto& w : content_words(t)) vocab.insert(std::move(w));
  }
  return {vocab.begin(), vocab.end()};
}

// Uniform draw from `pool` excluding `banned`; rejection first, then an
// exhaustive scan so rare failures stay uniform and deterministic.
std::optional<std::string> sample_excluding(Rng& rng, const std::vector<std::string>& pool,
                                            const std::unordered_set<std::string>& banned) {
  if (pool.empty()) return std::nullopt;
  for (int attempt = 0; attempt < 64; ++attempt) {
    const std::string& w = pool[rng.uniform(pool.size())];
    if (!banned.count(w)) return w;
  }
  std::vector<const std::string*> allowed;
  for (const auto& w : pool) {
    if (!banned.count(w)) allowed.push_back(&w);
  }
  if (allowed.empty()) return std::nullopt;
  return *allowed[rng.uniform(allowed.size())];
}

}  // namespace

std::string_view task_name(TaskKind kind) { return info(kind).name; }
std::string_view task_title(TaskKind kind) { return info(kind).title; }
size_t aux_arity(TaskKind kind) { return info(kind).arity; }
bool is_binary(TaskKind kind) { return info(kind).binary; }

std::optional<TaskKind> parse_task(std::string_view name) {
  for (const auto& ti : kTaskInfo) {
    if (ti.name == name) return ti.kind;
  }
  return std::nullopt;
}

std::string TaskConfig::hash() const {
  json j;
  j["length_bin_width"] = length_bin_width;
  j["length_max_bin"] = length_max_bin;
  j["cap_max_class"] = cap_max_class;
  j["mention_max_class"] = mention_max_class;
  j["mention_position_max_class"] = mention_position_max_class;
  j["reply_bin_minutes"] = reply_bin_minutes;
  j["split_ratios"] = {format_double(split_ratios[0]), format_double(split_ratios[1]),
                       format_double(split_ratios[2])};
  return hex64(fnv1a64(j.dump()));
}

void validate(const TaskConfig& cfg) {
  if (cfg.length_bin_width < 1) throw Error(ErrorCode::kInvalidConfig, "length_bin_width >= 1");
  if (cfg.reply_bin_minutes < 1 || 60 % cfg.reply_bin_minutes != 0) {
    throw Error(ErrorCode::kInvalidConfig, "reply_bin_minutes must divide 60");
  }
}

size_t class_count(TaskKind kind, const TaskConfig& cfg) {
  switch (kind) {
    case TaskKind::kLength: return cfg.length_max_bin + 1;
    case TaskKind::kCapCount: return cfg.cap_max_class + 1;
    case TaskKind::kMentionCount: return cfg.mention_max_class + 1;
    case TaskKind::kMentionPosition: return cfg.mention_position_max_class + 1;
    case TaskKind::kReplyTime: return 60 / cfg.reply_bin_minutes;
    default: return 2;
  }
}

std::vector<std::string> content_words(const Tweet& tweet) {
  std::vector<std::string> out;
  for (const Token& t : tweet.tokens) {
    if (t.kind == TokenKind::kWord) out.push_back(to_lower_ascii(t.surface));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Textual tasks

TaskDataset build_length(const Corpus& corpus, size_t bin_width, size_t max_bin) {
  if (bin_width < 1) throw Error(ErrorCode::kInvalidConfig, "bin_width must be >= 1");
  TaskDataset ds = empty_dataset(TaskKind::kLength, max_bin + 1);
  for (const Tweet& t : corpus.tweets()) add(ds, t, {}, std::min(word_count(t) / bin_width, max_bin));
  return ds;
}

TaskDataset build_content(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kContent, 2);
  const std::vector<std::string> vocab = word_vocabulary(corpus);
  if (vocab.size() < 2) throw Error(ErrorCode::kInvalidConfig, "content task needs >= 2 distinct words");
  Rng rng = task_rng(seed, TaskKind::kContent);
  for (const Tweet& t : corpus.tweets()) {
    const std::vector<std::string> words = content_words(t);
    if (words.empty()) continue;
    const std::string& positive = words[rng.uniform(words.size())];
    auto negative = sample_excluding(rng, vocab, surface_set(t));
    if (!negative) continue;
    add(ds, t, {{positive}}, 1);
    add(ds, t, {{*negative}}, 0);
  }
  return ds;
}

TaskDataset build_word_order(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kWordOrder, 2);
  Rng rng = task_rng(seed, TaskKind::kWordOrder);
  for (const Tweet& t : corpus.tweets()) {
    const std::vector<std::string> words = content_words(t);
    std::unordered_map<std::string, size_t> counts;
    for (const auto& w : words) ++counts[w];
    // Only words occurring once have an unambiguous relative order.
    std::vector<size_t> eligible;
    for (size_t i = 0; i < words.size(); ++i) {
      if (counts[words[i]] == 1) eligible.push_back(i);
    }
    if (eligible.size() < 2) continue;
    size_t a = rng.uniform(eligible.size());
    size_t b = rng.uniform(eligible.size() - 1);
    if (b >= a) ++b;
    const size_t i = eligible[std::min(a, b)];
    const size_t j = eligible[std::max(a, b)];
    add(ds, t, {{words[i]}, {words[j]}}, 1);
    add(ds, t, {{words[j]}, {words[i]}}, 0);
  }
  return ds;
}

TaskDataset build_slang(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kSlangWords, 2);
  std::set<std::string> canon_set;
  for (const Tweet& t : corpus.tweets()) {
    for (auto& w : content_words(t)) canon_set.insert(std::move(w));
    for (const SlangPair& p : t.slang) canon_set.insert(to_lower_ascii(p.canonical));
  }
  const std::vector<std::string> canon(canon_set.begin(), canon_set.end());
  Rng rng = task_rng(seed, TaskKind::kSlangWords);
  for (const Tweet& t : corpus.tweets()) {
    if (t.slang.empty()) continue;
    const SlangPair& pair = t.slang[rng.uniform(t.slang.size())];
    const std::string surface = to_lower_ascii(t.tokens[pair.index].surface);
    const std::string gold = to_lower_ascii(pair.canonical);
    auto negative = sample_excluding(rng, canon, {gold, surface});
    if (!negative) continue;
    add(ds, t, {{surface}, {gold}}, 1);
    add(ds, t, {{surface}, {*negative}}, 0);
  }
  return ds;
}

TaskDataset build_hashtag(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kHashtag, 2);
  Rng rng = task_rng(seed, TaskKind::kHashtag);
  for (const Tweet& t : corpus.tweets()) {
    std::vector<std::string> tags;
    for (const Token& tok : t.tokens) {
      if (tok.kind == TokenKind::kHashtag) tags.push_back(to_lower_ascii(tok.surface.substr(1)));
    }
    if (tags.empty()) continue;
    const std::unordered_set<std::string> tag_set(tags.begin(), tags.end());
    std::vector<std::string> words;
    for (auto& w : content_words(t)) {
      if (!tag_set.count(w)) words.push_back(std::move(w));
    }
    if (words.empty()) continue;
    add(ds, t, {{tags[rng.uniform(tags.size())]}}, 1);
    add(ds, t, {{words[rng.uniform(words.size())]}}, 0);
  }
  return ds;
}

TaskDataset build_named_entity(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kNamedEntity, 2);
  Rng rng = task_rng(seed, TaskKind::kNamedEntity);
  for (const Tweet& t : corpus.tweets()) {
    if (t.ne_spans.empty()) continue;
    const NeSpan& gold = t.ne_spans[rng.uniform(t.ne_spans.size())];
    const size_t len = gold.end - gold.begin;
    std::vector<char> blocked(t.tokens.size(), 0);
    for (const NeSpan& s : t.ne_spans) {
      for (size_t i = s.begin; i < s.end; ++i) blocked[i] = 1;
    }
    for (size_t i = 0; i < t.tokens.size(); ++i) {
      if (t.tokens[i].kind == TokenKind::kPunct || t.tokens[i].kind == TokenKind::kUrl) blocked[i] = 1;
    }
    std::vector<size_t> starts;
    for (size_t s = 0; s + len <= t.tokens.size(); ++s) {
      bool ok = true;
      for (size_t i = s; i < s + len && ok; ++i) ok = !blocked[i];
      if (ok) starts.push_back(s);
    }
    if (starts.empty()) continue;
    const size_t s = starts[rng.uniform(starts.size())];
    AuxItem positive, negative;
    for (size_t i = gold.begin; i < gold.end; ++i) positive.push_back(t.tokens[i].surface);
    for (size_t i = s; i < s + len; ++i) negative.push_back(t.tokens[i].surface);
    add(ds, t, {positive}, 1);
    add(ds, t, {negative}, 0);
  }
  return ds;
}

TaskDataset build_cap_count(const Corpus& corpus, size_t max_class) {
  TaskDataset ds = empty_dataset(TaskKind::kCapCount, max_class + 1);
  for (const Tweet& t : corpus.tweets()) {
    size_t caps = 0;
    for (const Token& tok : t.tokens) caps += tok.kind == TokenKind::kWord && tok.capitalized;
    add(ds, t, {}, std::min(caps, max_class));
  }
  return ds;
}

TaskDataset build_informative_cap(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kInformativeCap, 2);
  Rng rng = task_rng(seed, TaskKind::kInformativeCap);
  for (const Tweet& t : corpus.tweets()) {
    const std::vector<size_t> informative = informative_cap_indices(t);
    std::vector<size_t> inside, outside;
    for (size_t i = 0; i < t.tokens.size(); ++i) {
      const Token& tok = t.tokens[i];
      if (tok.kind != TokenKind::kWord || !tok.capitalized) continue;
      if (std::binary_search(informative.begin(), informative.end(), i)) {
        inside.push_back(i);
      } else {
        outside.push_back(i);
      }
    }
    if (!inside.empty()) add(ds, t, {{t.tokens[inside[rng.uniform(inside.size())]].surface}}, 1);
    if (!outside.empty()) add(ds, t, {{t.tokens[outside[rng.uniform(outside.size())]].surface}}, 0);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Social tasks

TaskDataset build_mention_count(const Corpus& corpus, size_t max_class) {
  TaskDataset ds = empty_dataset(TaskKind::kMentionCount, max_class + 1);
  for (const Tweet& t : corpus.tweets()) {
    size_t mentions = 0;
    for (const Token& tok : t.tokens) mentions += tok.kind == TokenKind::kMention;
    add(ds, t, {}, std::min(mentions, max_class));
  }
  return ds;
}

TaskDataset build_mention_position(const Corpus& corpus, size_t max_class) {
  TaskDataset ds = empty_dataset(TaskKind::kMentionPosition, max_class + 1);
  for (const Tweet& t : corpus.tweets()) {
    for (size_t i = 0; i < t.tokens.size(); ++i) {
      if (t.tokens[i].kind == TokenKind::kMention) {
        add(ds, t, {}, std::min(i, max_class));
        break;
      }
    }
  }
  return ds;
}

TaskDataset build_is_reply(const Corpus& corpus, uint64_t /*seed*/) {
  // Starters are downsampled to the reply count (or vice versa) by balance().
  TaskDataset ds = empty_dataset(TaskKind::kIsReply, 2);
  const Threading threading = thread_conversations(corpus);
  for (const Conversation& conv : threading.conversations) {
    add(ds, *corpus.find(conv.starter), {}, 0);
    for (size_t i = 1; i < conv.tweets.size(); ++i) add(ds, *corpus.find(conv.tweets[i]), {}, 1);
  }
  return ds;
}

std::vector<ReplyDelay> first_reply_delays(const Corpus& corpus) {
  std::vector<ReplyDelay> out;
  for (const Conversation& conv : thread_conversations(corpus).conversations) {
    const Tweet& starter = *corpus.find(conv.starter);
    if (!starter.timestamp) continue;
    std::optional<long long> best;
    for (size_t i = 1; i < conv.tweets.size(); ++i) {
      const Tweet& reply = *corpus.find(conv.tweets[i]);
      if (reply.reply_to != starter.id || !reply.timestamp) continue;
      const long long delay = (*reply.timestamp - *starter.timestamp).count();
      if (!best || delay < *best) best = delay;
    }
    if (best) out.push_back({starter.id, static_cast<double>(*best) / 60.0});
  }
  return out;
}

TaskDataset build_reply_time(const Corpus& corpus, size_t bin_minutes) {
  if (bin_minutes < 1 || 60 % bin_minutes != 0) {
    throw Error(ErrorCode::kInvalidConfig, "reply bin must divide 60 minutes");
  }
  const size_t bins = 60 / bin_minutes;
  TaskDataset ds = empty_dataset(TaskKind::kReplyTime, bins);
  for (const ReplyDelay& d : first_reply_delays(corpus)) {
    if (d.minutes < 0.0 || d.minutes > 60.0) continue;
    const size_t bin = static_cast<size_t>(std::floor(d.minutes / static_cast<double>(bin_minutes)));
    add(ds, *corpus.find(d.starter), {}, std::min(bin, bins - 1));
  }
  return ds;
}

TaskDataset build_word_repetition(const Corpus& corpus, uint64_t seed) {
  TaskDataset ds = empty_dataset(TaskKind::kWordRepetition, 2);
  Rng rng = task_rng(seed, TaskKind::kWordRepetition);
  for (const Conversation& conv : thread_conversations(corpus).conversations) {
    const Tweet& starter = *corpus.find(conv.starter);
    const std::vector<std::string> words = content_words(starter);
    if (words.empty()) continue;
    std::unordered_map<std::string, size_t> later;
    for (size_t i = 1; i < conv.tweets.size(); ++i) {
      for (auto& w : content_words(*corpus.find(conv.tweets[i]))) ++later[std::move(w)];
    }
    size_t best = 0;
    std::optional<size_t> best_pos;
    std::vector<std::string> unused;
    std::unordered_set<std::string> seen;
    for (size_t i = 0; i < words.size(); ++i) {
      auto it = later.find(words[i]);
      const size_t count = it == later.end() ? 0 : it->second;
      if (count > best) {
        best = count;
        best_pos = i;
      }
      if (count == 0 && seen.insert(words[i]).second) unused.push_back(words[i]);
    }
    if (!best_pos || unused.empty()) continue;
    add(ds, starter, {{words[*best_pos]}}, 1);
    add(ds, starter, {{unused[rng.uniform(unused.size())]}}, 0);
  }
  return ds;
}

// ---------------------------------------------------------------------------

void balance(TaskDataset& ds, uint64_t seed) {
  std::vector<size_t> by_label[2];
  for (size_t i = 0; i < ds.instances.size(); ++i) {
    by_label[ds.instances[i].label == 1].push_back(i);
  }
  const size_t keep = std::min(by_label[0].size(), by_label[1].size());
  if (by_label[0].size() == keep && by_label[1].size() == keep) return;
  Rng rng(derive_seed(seed, 0xba1a));
  std::vector<char> kept(ds.instances.size(), 0);
  for (auto& group : by_label) {
    rng.shuffle(std::span<size_t>(group));
    for (size_t k = 0; k < keep; ++k) kept[group[k]] = 1;
  }
  std::vector<TaskInstance> out;
  out.reserve(2 * keep);
  for (size_t i = 0; i < ds.instances.size(); ++i) {
    if (kept[i]) out.push_back(std::move(ds.instances[i]));
  }
  ds.instances = std::move(out);
}

void split(TaskDataset& ds, const std::array<double, 3>& ratios, uint64_t seed) {
  const double sum = ratios[0] + ratios[1] + ratios[2];
  if (ratios[0] < 0 || ratios[1] < 0 || ratios[2] < 0 || std::fabs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidRatios, "split ratios must be non-negative and sum to 1");
  }
  // Instances sharing a tweet form one group and always land in the same
  // split. Groups are stratified by their sorted label multiset.
  std::map<std::string_view, std::vector<size_t>> groups;
  std::vector<std::string_view> group_order;
  for (size_t i = 0; i < ds.instances.size(); ++i) {
    auto [it, inserted] = groups.try_emplace(ds.instances[i].tweet_id);
    if (inserted) group_order.push_back(it->first);
    it->second.push_back(i);
  }
  std::map<std::vector<int>, std::vector<std::string_view>> by_signature;
  for (std::string_view id : group_order) {
    std::vector<int> signature;
    for (size_t i : groups[id]) signature.push_back(ds.instances[i].label);
    std::sort(signature.begin(), signature.end());
    by_signature[signature].push_back(id);
  }
  Rng rng(derive_seed(seed, 0x5b1));
  ds.train.clear();
  ds.val.clear();
  ds.test.clear();
  for (auto& [signature, ids] : by_signature) {
    rng.shuffle(std::span<std::string_view>(ids));
    const size_t n = ids.size();
    std::array<size_t, 3> count = {static_cast<size_t>(std::floor(ratios[0] * n + 1e-9)),
                                   static_cast<size_t>(std::floor(ratios[1] * n + 1e-9)), 0};
    count[2] = n - count[0] - count[1];
    if (n >= 3) {
      for (size_t s = 0; s < 3; ++s) {
        if (count[s] > 0 || ratios[s] <= 0.0) continue;
        // Borrow from the largest other split.
        size_t donor = s == 0 ? 1 : 0;
        for (size_t d = 0; d < 3; ++d) {
          if (d != s && count[d] > count[donor]) donor = d;
        }
        if (count[donor] < 2) continue;
        --count[donor];
        ++count[s];
      }
    }
    size_t pos = 0;
    std::vector<size_t>* targets[3] = {&ds.train, &ds.val, &ds.test};
    for (size_t s = 0; s < 3; ++s) {
      for (size_t k = 0; k < count[s]; ++k) {
        const auto& members = groups[ids[pos++]];
        targets[s]->insert(targets[s]->end(), members.begin(), members.end());
      }
    }
  }
  std::sort(ds.train.begin(), ds.train.end());
  std::sort(ds.val.begin(), ds.val.end());
  std::sort(ds.test.begin(), ds.test.end());
}

TaskDataset build_task(TaskKind kind, const Corpus& corpus, const TaskConfig& cfg, uint64_t seed) {
  validate(cfg);
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no tweets");
  TaskDataset ds;
  switch (kind) {
    case TaskKind::kLength: ds = build_length(corpus, cfg.length_bin_width, cfg.length_max_bin); break;
    case TaskKind::kContent: ds = build_content(corpus, seed); break;
    case TaskKind::kWordOrder: ds = build_word_order(corpus, seed); break;
    case TaskKind::kSlangWords: ds = build_slang(corpus, seed); break;
    case TaskKind::kHashtag: ds = build_hashtag(corpus, seed); break;
    case TaskKind::kNamedEntity: ds = build_named_entity(corpus, seed); break;
    case TaskKind::kCapCount: ds = build_cap_count(corpus, cfg.cap_max_class); break;
    case TaskKind::kInformativeCap: ds = build_informative_cap(corpus, seed); break;
    case TaskKind::kMentionCount: ds = build_mention_count(corpus, cfg.mention_max_class); break;
    case TaskKind::kMentionPosition:
      ds = build_mention_position(corpus, cfg.mention_position_max_class);
      break;
    case TaskKind::kIsReply: ds = build_is_reply(corpus, seed); break;
    case TaskKind::kReplyTime: ds = build_reply_time(corpus, cfg.reply_bin_minutes); break;
    case TaskKind::kWordRepetition: ds = build_word_repetition(corpus, seed); break;
  }
  if (is_binary(kind)) balance(ds, derive_seed(seed, static_cast<uint64_t>(kind)));
  if (ds.instances.empty()) {
    throw Error(ErrorCode::kNoInstances, std::string(task_name(kind)));
  }
  Rng rng(derive_seed(seed, 2000 + static_cast<uint64_t>(kind)));
  rng.shuffle(std::span<TaskInstance>(ds.instances));
  split(ds, cfg.split_ratios, derive_seed(seed, 3000 + static_cast<uint64_t>(kind)));
  ds.provenance = {corpus.fingerprint(), seed, cfg.hash()};
  return ds;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

json aux_to_json(const std::vector<AuxItem>& aux) {
  json arr = json::array();
  for (const AuxItem& item : aux) {
    if (item.size() == 1) {
      arr.push_back(item[0]);
    } else {
      arr.push_back(item);
    }
  }
  return arr;
}

}  // namespace

void save_task_dataset(const TaskDataset& ds, const std::filesystem::path& instances_path,
                       const std::filesystem::path& meta_path) {
  std::vector<const char*> split_of(ds.instances.size(), "none");
  for (size_t i : ds.train) split_of[i] = "train";
  for (size_t i : ds.val) split_of[i] = "val";
  for (size_t i : ds.test) split_of[i] = "test";
  std::ostringstream out;
  for (size_t i = 0; i < ds.instances.size(); ++i) {
    const TaskInstance& inst = ds.instances[i];
    json line;
    line["tweet_id"] = inst.tweet_id;
    line["aux"] = aux_to_json(inst.aux);
    line["label"] = inst.label;
    line["split"] = split_of[i];
    out << line.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  write_file(instances_path, out.str());
  json meta;
  meta["kind"] = task_name(ds.kind);
  meta["class_count"] = ds.class_count;
  meta["instances"] = ds.instances.size();
  meta["seed"] = ds.provenance.seed;
  meta["config_hash"] = ds.provenance.config_hash;
  meta["corpus_id"] = ds.provenance.corpus_id;
  write_file(meta_path, meta.dump(2) + "\n");
}

TaskDataset load_task_dataset(const std::filesystem::path& instances_path,
                              const std::filesystem::path& meta_path) {
  TaskDataset ds;
  json meta = json::parse(read_file(meta_path), nullptr, false);
  if (meta.is_discarded() || !meta.is_object()) {
    throw Error(ErrorCode::kMalformed, "task metadata " + meta_path.string());
  }
  auto kind = parse_task(meta.value("kind", ""));
  if (!kind) throw Error(ErrorCode::kMalformed, "unknown task kind in " + meta_path.string());
  ds.kind = *kind;
  ds.class_count = meta.value("class_count", size_t{0});
  ds.provenance.seed = meta.value("seed", uint64_t{0});
  ds.provenance.config_hash = meta.value("config_hash", "");
  ds.provenance.corpus_id = meta.value("corpus_id", "");

  std::istringstream in(read_file(instances_path));
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj = json::parse(line, nullptr, false);
    const auto bad = [&] {
      return Error(ErrorCode::kMalformed, instances_path.string() + " line " + std::to_string(line_no));
    };
    if (obj.is_discarded() || !obj.is_object() || !obj["tweet_id"].is_string() ||
        !obj["aux"].is_array() || !obj["label"].is_number_integer() || !obj["split"].is_string()) {
      throw bad();
    }
    TaskInstance inst;
    inst.tweet_id = obj["tweet_id"].get<std::string>();
    for (const auto& item : obj["aux"]) {
      if (item.is_string()) {
        inst.aux.push_back({item.get<std::string>()});
      } else if (item.is_array()) {
        inst.aux.push_back(item.get<AuxItem>());
      } else {
        throw bad();
      }
    }
    inst.label = obj["label"].get<int>();
    if (inst.label < 0 || static_cast<size_t>(inst.label) >= ds.class_count) throw bad();
    const std::string s = obj["split"].get<std::string>();
    const size_t index = ds.instances.size();
    if (s == "train") {
      ds.train.push_back(index);
    } else if (s == "val") {
      ds.val.push_back(index);
    } else if (s == "test") {
      ds.test.push_back(index);
    }
    ds.instances.push_back(std::move(inst));
  }
  return ds;
}

}  // namespace tweetprobe
