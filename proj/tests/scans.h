#ifndef TWEETPROBE_TESTS_SCANS_H_
#define TWEETPROBE_TESTS_SCANS_H_

#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "tweetprobe/corpus.h"
#include "tweetprobe/tasks.h"

// Independent full scans of negative-sample validity. Each returns the
// number of violating instances.
namespace tweetprobe::scans {

inline std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::set<std::string> lowered_surfaces(const Tweet& t) {
  std::set<std::string> out;
  for (const Token& tok : t.tokens) {
    out.insert(lower(tok.surface));
    if (tok.kind == TokenKind::kHashtag) out.insert(lower(tok.surface.substr(1)));
  }
  return out;
}

inline size_t content_violations(const TaskDataset& ds, const Corpus& corpus) {
  size_t bad = 0;
  for (const TaskInstance& inst : ds.instances) {
    const std::set<std::string> words = lowered_surfaces(*corpus.find(inst.tweet_id));
    const bool present = words.count(lower(inst.aux.at(0).at(0))) > 0;
    bad += present != (inst.label == 1);
  }
  return bad;
}

// Every negative is the flip of exactly one positive of the same tweet, and
// positives keep the tweet's order.
inline size_t word_order_violations(const TaskDataset& ds, const Corpus& corpus) {
  size_t bad = 0;
  std::map<std::pair<std::string, std::vector<AuxItem>>, int> balance;
  for (const TaskInstance& inst : ds.instances) {
    if (inst.label == 1) {
      ++balance[{inst.tweet_id, inst.aux}];
      const Tweet& t = *corpus.find(inst.tweet_id);
      long first = -1, second = -1;
      for (size_t i = 0; i < t.tokens.size(); ++i) {
        const std::string w = lower(t.tokens[i].surface);
        if (first < 0 && w == inst.aux[0][0]) first = static_cast<long>(i);
        if (w == inst.aux[1][0]) second = static_cast<long>(i);
      }
      bad += !(first >= 0 && second > first);
    } else {
      --balance[{inst.tweet_id, {inst.aux[1], inst.aux[0]}}];
    }
  }
  for (const auto& [key, v] : balance) bad += v != 0;
  return bad;
}

// A negative n-gram must occur somewhere in its tweet without touching a
// gold span.
inline size_t named_entity_violations(const TaskDataset& ds, const Corpus& corpus) {
  size_t bad = 0;
  for (const TaskInstance& inst : ds.instances) {
    if (inst.label == 1) continue;
    const Tweet& t = *corpus.find(inst.tweet_id);
    const AuxItem& gram = inst.aux.at(0);
    bool clean_occurrence = false;
    for (size_t s = 0; s + gram.size() <= t.tokens.size() && !clean_occurrence; ++s) {
      bool match = true;
      for (size_t k = 0; k < gram.size() && match; ++k) match = t.tokens[s + k].surface == gram[k];
      if (!match) continue;
      bool overlaps = false;
      for (const NeSpan& span : t.ne_spans) {
        overlaps |= s < span.end && span.begin < s + gram.size();
      }
      clean_occurrence = !overlaps;
    }
    bad += !clean_occurrence;
  }
  return bad;
}

inline size_t slang_violations(const TaskDataset& ds, const Corpus& corpus) {
  size_t bad = 0;
  for (const TaskInstance& inst : ds.instances) {
    const Tweet& t = *corpus.find(inst.tweet_id);
    std::set<std::string> gold;
    for (const SlangPair& p : t.slang) {
      if (lower(t.tokens[p.index].surface) == inst.aux[0][0]) gold.insert(lower(p.canonical));
    }
    if (gold.empty()) {
      ++bad;
      continue;
    }
    const bool is_gold = gold.count(inst.aux[1][0]) > 0;
    bad += is_gold != (inst.label == 1);
  }
  return bad;
}

inline size_t word_repetition_violations(const TaskDataset& ds, const Corpus& corpus) {
  std::map<std::string, std::vector<std::string>> later;
  for (const Conversation& c : thread_conversations(corpus).conversations) {
    for (size_t i = 1; i < c.tweets.size(); ++i) {
      for (const Token& tok : corpus.find(c.tweets[i])->tokens) {
        if (tok.kind == TokenKind::kWord) later[c.starter].push_back(lower(tok.surface));
      }
    }
  }
  size_t bad = 0;
  for (const TaskInstance& inst : ds.instances) {
    const auto& words = later[inst.tweet_id];
    size_t count = 0;
    for (const std::string& w : words) count += w == inst.aux[0][0];
    if (inst.label == 0) {
      bad += count != 0;
    } else {
      // Positive is the most repeated starter word, earliest on ties.
      std::map<std::string, size_t> freq;
      for (const std::string& w : words) ++freq[w];
      size_t best = 0;
      std::string best_word;
      for (const Token& tok : corpus.find(inst.tweet_id)->tokens) {
        if (tok.kind != TokenKind::kWord) continue;
        const size_t f = freq[lower(tok.surface)];
        if (f > best) {
          best = f;
          best_word = lower(tok.surface);
        }
      }
      bad += best == 0 || best_word != inst.aux[0][0];
    }
  }
  return bad;
}

inline std::pair<size_t, size_t> label_balance(const TaskDataset& ds) {
  size_t pos = 0;
  for (const TaskInstance& inst : ds.instances) pos += inst.label == 1;
  return {ds.instances.size() - pos, pos};
}

}  // namespace tweetprobe::scans

#endif  // TWEETPROBE_TESTS_SCANS_H_
