#include "tweetprobe/synth.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <string_view>
#include <unordered_set>

#include "tweetprobe/error.h"
#include "tweetprobe/random.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

constexpr std::pair<std::string_view, std::string_view> kSlang[] = {
    {"tmrw", "tomorrow"}, {"2nite", "tonight"}, {"u", "you"},       {"r", "are"},
    {"gr8", "great"},     {"b4", "before"},     {"pls", "please"},  {"thx", "thanks"},
    {"luv", "love"},      {"ppl", "people"},    {"cuz", "because"}, {"toook", "took"},
    {"srsly", "seriously"}, {"nite", "night"},  {"gud", "good"},    {"wat", "what"},
    {"ur", "your"},       {"abt", "about"},     {"bday", "birthday"}, {"msg", "message"},
};

constexpr std::string_view kOnsets[] = {"b", "d", "f", "g", "h", "k", "l", "m", "n",
                                        "p", "r", "s", "t", "v", "z", "ch", "sh", "tr"};
constexpr std::string_view kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::string make_word(Rng& rng, size_t syllables) {
  std::string w;
  for (size_t i = 0; i < syllables; ++i) {
    w += kOnsets[rng.uniform(std::size(kOnsets))];
    w += kVowels[rng.uniform(std::size(kVowels))];
  }
  return w;
}

std::string capitalize(std::string w) {
  if (!w.empty() && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 'a' + 'A');
  return w;
}

std::string upper(std::string w) {
  for (char& c : w) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return w;
}

struct GenToken {
  std::string surface;
  TokenKind kind;
  bool entity = false;
  bool slang = false;
  bool emphasis = false;
  std::string canonical;
};

class Generator {
 public:
  explicit Generator(const SynthConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
    build_lexicon();
  }

  SynthResult run();

 private:
  void build_lexicon();
  std::string core_word();
  std::string rare_word();
  std::vector<GenToken> compose(const std::vector<std::string>* parent_words);

  const SynthConfig& cfg_;
  Rng rng_;
  std::vector<std::string> lexicon_;
  std::vector<double> cdf_;
  std::unordered_set<std::string> used_;
  std::vector<std::vector<std::string>> entities_;
  SynthTruth truth_;
};

void Generator::build_lexicon() {
  for (const auto& [slang, canonical] : kSlang) {
    used_.insert(std::string(slang));
    truth_.slang_lexicon.emplace_back(slang, canonical);
  }
  // Canonical forms of the slang words are ordinary lexicon entries so they
  // also occur unabbreviated.
  std::vector<std::string> canon;
  for (const auto& [slang, canonical] : kSlang) canon.emplace_back(canonical);
  std::set<std::string> seen_canon;
  for (auto& c : canon) {
    if (lexicon_.size() >= cfg_.vocab_size) break;
    if (seen_canon.insert(c).second) {
      used_.insert(c);
      lexicon_.push_back(c);
    }
  }
  while (lexicon_.size() < cfg_.vocab_size) {
    std::string w = make_word(rng_, 1 + rng_.uniform(3));
    if (used_.insert(w).second) lexicon_.push_back(w);
  }
  // Shuffle so the canonical words do not monopolize the head of the Zipf
  // distribution.
  rng_.shuffle(std::span<std::string>(lexicon_));
  double total = 0.0;
  for (size_t r = 0; r < lexicon_.size(); ++r) {
    total += std::pow(static_cast<double>(r + 1), -cfg_.zipf_exponent);
    cdf_.push_back(total);
  }
  for (double& c : cdf_) c /= total;
  truth_.core_lexicon = lexicon_;

  for (const std::string& name : cfg_.gazetteer) {
    std::vector<std::string> words;
    for (auto part : split(name, ' ')) {
      if (!part.empty()) words.emplace_back(part);
    }
    if (!words.empty()) entities_.push_back(std::move(words));
  }
}

std::string Generator::core_word() {
  const double u = rng_.uniform01();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  size_t r = std::min<size_t>(static_cast<size_t>(it - cdf_.begin()), lexicon_.size() - 1);
  return lexicon_[r];
}

std::string Generator::rare_word() {
  // Longer pseudo-words, resampled until unused, so each is a one-off.
  while (true) {
    std::string w = make_word(rng_, 3 + rng_.uniform(3));
    if (used_.insert(w).second) return w;
  }
}

std::vector<GenToken> Generator::compose(const std::vector<std::string>* parent_words) {
  const size_t n_words = cfg_.min_words + rng_.uniform(cfg_.max_words - cfg_.min_words + 1);
  std::vector<GenToken> toks;
  for (size_t i = 0; i < n_words; ++i) {
    std::string w;
    if (parent_words && !parent_words->empty() && rng_.bernoulli(cfg_.repeat_word_rate)) {
      w = (*parent_words)[rng_.uniform(parent_words->size())];
    } else if (rng_.bernoulli(cfg_.rare_word_rate)) {
      w = rare_word();
    } else {
      w = core_word();
    }
    toks.push_back({std::move(w), TokenKind::kWord});
  }
  if (rng_.bernoulli(cfg_.slang_rate)) {
    const auto& [slang, canonical] = kSlang[rng_.uniform(std::size(kSlang))];
    GenToken& t = toks[rng_.uniform(toks.size())];
    t.surface = std::string(slang);
    t.slang = true;
    t.canonical = std::string(canonical);
  }
  if (rng_.bernoulli(cfg_.emphasis_cap_rate)) {
    GenToken& t = toks[rng_.uniform(toks.size())];
    if (!t.slang) {
      t.surface = t.surface.size() <= 4 ? upper(t.surface) : capitalize(t.surface);
      t.emphasis = true;
    }
  }
  if (!entities_.empty() && rng_.bernoulli(cfg_.entity_rate)) {
    const auto& entity = entities_[rng_.uniform(entities_.size())];
    const size_t at = rng_.uniform(toks.size() + 1);
    std::vector<GenToken> ent;
    for (const auto& w : entity) ent.push_back({w, TokenKind::kWord, true});
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(at), ent.begin(), ent.end());
  }
  auto insert_at_random = [&](GenToken t) {
    // Never split an entity.
    std::vector<size_t> slots;
    for (size_t i = 0; i <= toks.size(); ++i) {
      if (i > 0 && i < toks.size() && toks[i - 1].entity && toks[i].entity) continue;
      slots.push_back(i);
    }
    toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(slots[rng_.uniform(slots.size())]),
                std::move(t));
  };
  if (rng_.bernoulli(cfg_.hashtag_rate)) {
    const size_t count = 1 + rng_.uniform(2);
    for (size_t i = 0; i < count; ++i) insert_at_random({"#" + core_word(), TokenKind::kHashtag});
  }
  if (rng_.bernoulli(cfg_.mention_rate)) {
    const size_t count = 1 + rng_.uniform(3);
    for (size_t i = 0; i < count; ++i) {
      GenToken m{"@user" + std::to_string(rng_.uniform(1000)), TokenKind::kMention};
      if (rng_.bernoulli(0.5)) {
        toks.insert(toks.begin(), std::move(m));
      } else {
        insert_at_random(std::move(m));
      }
    }
  }
  if (rng_.bernoulli(cfg_.number_rate)) {
    insert_at_random({std::to_string(1 + rng_.uniform(999)), TokenKind::kNumber});
  }
  if (rng_.bernoulli(cfg_.url_rate)) {
    std::string url = "http://t.co/";
    for (int i = 0; i < 8; ++i) url.push_back("abcdefghijklmnopqrstuvwxyz0123456789"[rng_.uniform(36)]);
    toks.push_back({std::move(url), TokenKind::kUrl});
  }
  if (rng_.bernoulli(cfg_.punct_rate)) {
    static constexpr std::string_view kPunct[] = {"!", "?", "...", "!!", "."};
    toks.push_back({std::string(kPunct[rng_.uniform(std::size(kPunct))]), TokenKind::kPunct});
  }
  return toks;
}

SynthResult Generator::run() {
  std::vector<Tweet> tweets;
  tweets.reserve(cfg_.n_tweets);
  std::vector<std::vector<std::string>> words_of;  // lowercase content words per tweet
  std::vector<long long> times;
  std::vector<bool> is_root;
  std::vector<size_t> root_of;
  std::vector<size_t> reply_count;
  // 2016-01-01T00:00:00Z
  long long clock = 1451606400;
  const int width = static_cast<int>(std::to_string(cfg_.n_tweets).size());
  size_t dangling_counter = 0;
  constexpr size_t kNoRoot = static_cast<size_t>(-1);

  for (size_t i = 0; i < cfg_.n_tweets; ++i) {
    char id[64];
    std::snprintf(id, sizeof(id), "t%0*zu", width, i + 1);
    const bool reply = i > 0 && rng_.bernoulli(cfg_.reply_probability);
    size_t parent = 0;
    bool dangling = false;
    if (reply) {
      const size_t window = std::min<size_t>(i, 50);
      parent = i - 1 - rng_.uniform(window);
      dangling = rng_.bernoulli(cfg_.dangling_rate);
    }
    std::vector<GenToken> toks = compose(reply && !dangling ? &words_of[parent] : nullptr);

    Tweet tweet;
    tweet.id = id;
    std::vector<size_t> informative;
    std::vector<std::string> content;
    bool has_hashtag = false;
    for (size_t k = 0; k < toks.size(); ++k) {
      const GenToken& t = toks[k];
      if (k > 0 && !(t.kind == TokenKind::kPunct && toks[k - 1].kind != TokenKind::kUrl)) {
        tweet.text.push_back(' ');
      }
      tweet.text += t.surface;
      ++truth_.kind_counts[t.kind];
      if (t.kind == TokenKind::kHashtag) has_hashtag = true;
      if (t.entity) informative.push_back(k);
      if (t.slang) tweet.slang.push_back({k, t.canonical});
      if (t.kind == TokenKind::kWord && !t.entity && !t.slang) {
        content.push_back(to_lower_ascii(t.surface));
      }
    }
    for (size_t k = 0; k < toks.size();) {
      if (!toks[k].entity) {
        ++k;
        continue;
      }
      size_t e = k;
      while (e < toks.size() && toks[e].entity) ++e;
      tweet.ne_spans.push_back({k, e});
      k = e;
    }
    tweet.informative_caps = std::move(informative);
    if (has_hashtag) ++truth_.hashtag_tweets;
    tweet.tokens = tokenize(tweet.text);

    long long ts;
    size_t root = i;
    if (reply && dangling) {
      tweet.reply_to = "missing" + std::to_string(++dangling_counter);
      ts = clock + static_cast<long long>(rng_.uniform(600));
      root = kNoRoot;
      ++truth_.dangling;
    } else if (reply) {
      tweet.reply_to = tweets[parent].id;
      const long long delay = std::max<long long>(
          1, std::llround(rng_.exponential(cfg_.reply_delay_mean_minutes) * 60.0));
      ts = times[parent] + delay;
      root = root_of[parent];
      if (root != kNoRoot) {
        ++truth_.replies;
        ++reply_count[root];
        if (is_root[parent]) {
          auto [it, inserted] = truth_.first_reply_delay_seconds.emplace(tweets[parent].id, delay);
          if (!inserted) it->second = std::min(it->second, delay);
        }
      } else {
        ++truth_.dangling;  // reply into a broken chain
      }
    } else {
      clock += 30 + static_cast<long long>(rng_.uniform(571));
      ts = clock;
    }
    tweet.timestamp = Timestamp(std::chrono::seconds(ts));
    times.push_back(ts);
    is_root.push_back(!reply);
    root_of.push_back(root);
    reply_count.push_back(0);
    words_of.push_back(std::move(content));
    tweets.push_back(std::move(tweet));
  }
  for (size_t i = 0; i < tweets.size(); ++i) {
    if (is_root[i] && reply_count[i] > 0) ++truth_.conversations;
  }
  return {Corpus(std::move(tweets)), std::move(truth_)};
}

}  // namespace

std::vector<std::string> SynthConfig::default_gazetteer() {
  return {"New York",       "Barack Obama",   "Taylor Swift",  "Manchester United",
          "San Francisco",  "Apple",          "Google",        "London",
          "Lady Gaga",      "Justin Bieber",  "Los Angeles",   "White House",
          "Real Madrid",    "Super Bowl",     "Star Wars",     "Kim Kardashian",
          "Paris",          "Microsoft",      "Hillary Clinton", "Premier League"};
}

void validate(const SynthConfig& cfg) {
  auto rate = [](double r, const char* name) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorCode::kInvalidConfig, std::string(name) + " must lie in [0,1]");
    }
  };
  if (cfg.n_tweets < 1) throw Error(ErrorCode::kInvalidConfig, "n_tweets must be >= 1");
  if (cfg.vocab_size < 2) throw Error(ErrorCode::kInvalidConfig, "vocab_size must be >= 2");
  if (cfg.min_words < 1 || cfg.min_words > cfg.max_words) {
    throw Error(ErrorCode::kInvalidConfig, "need 1 <= min_words <= max_words");
  }
  if (cfg.max_words > 40) throw Error(ErrorCode::kInvalidConfig, "max_words must be <= 40");
  if (!(cfg.zipf_exponent >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "zipf_exponent < 0");
  if (!(cfg.reply_delay_mean_minutes > 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "reply_delay_mean_minutes must be > 0");
  }
  rate(cfg.rare_word_rate, "rare_word_rate");
  rate(cfg.hashtag_rate, "hashtag_rate");
  rate(cfg.mention_rate, "mention_rate");
  rate(cfg.url_rate, "url_rate");
  rate(cfg.number_rate, "number_rate");
  rate(cfg.punct_rate, "punct_rate");
  rate(cfg.entity_rate, "entity_rate");
  rate(cfg.emphasis_cap_rate, "emphasis_cap_rate");
  rate(cfg.slang_rate, "slang_rate");
  rate(cfg.reply_probability, "reply_probability");
  rate(cfg.repeat_word_rate, "repeat_word_rate");
  rate(cfg.dangling_rate, "dangling_rate");
  for (const auto& e : cfg.gazetteer) {
    for (auto part : split(e, ' ')) {
      if (part.empty()) continue;
      if (part[0] < 'A' || part[0] > 'Z') {
        throw Error(ErrorCode::kInvalidConfig, "gazetteer words must be capitalized: " + e);
      }
      for (char c : part) {
        if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) {
          throw Error(ErrorCode::kInvalidConfig, "gazetteer words must be alphabetic: " + e);
        }
      }
    }
  }
}

SynthResult generate_synthetic(const SynthConfig& cfg) {
  validate(cfg);
  Generator gen(cfg);
  return gen.run();
}

}  // namespace tweetprobe
