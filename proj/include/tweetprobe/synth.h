#ifndef TWEETPROBE_SYNTH_H_
#define TWEETPROBE_SYNTH_H_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "tweetprobe/corpus.h"

namespace tweetprobe {

// Parameters of the seeded tweet generator. Tweets draw their words from a
// Zipfian core lexicon of `vocab_size` words; each word slot is replaced by
// a one-off rare token with probability `rare_word_rate`, giving the
// head/tail shape of real tweet vocabularies.
struct SynthConfig {
  size_t n_tweets = 1000;
  size_t vocab_size = 300;
  double zipf_exponent = 1.0;
  double rare_word_rate = 0.05;
  size_t min_words = 3;
  size_t max_words = 24;

  double hashtag_rate = 0.2;
  double mention_rate = 0.3;
  double url_rate = 0.1;
  double number_rate = 0.1;
  double punct_rate = 0.3;
  double entity_rate = 0.3;
  double emphasis_cap_rate = 0.15;
  double slang_rate = 0.15;

  double reply_probability = 0.3;
  double reply_delay_mean_minutes = 20.0;  // exponential delays
  double repeat_word_rate = 0.3;           // reply slot copies a parent word
  double dangling_rate = 0.0;              // replies pointing outside the corpus

  std::vector<std::string> gazetteer = default_gazetteer();
  uint64_t seed = 1;

  static std::vector<std::string> default_gazetteer();
};

// Throws InvalidConfig.
void validate(const SynthConfig& cfg);

// What the generator injected, recorded while generating (not recomputed
// from the output).
struct SynthTruth {
  std::map<TokenKind, size_t> kind_counts;
  size_t hashtag_tweets = 0;
  size_t conversations = 0;
  size_t replies = 0;
  size_t dangling = 0;
  // Starter id -> delay (seconds) of its earliest direct reply.
  std::map<std::string, long long> first_reply_delay_seconds;
  std::vector<std::string> core_lexicon;  // rank order, most frequent first
  std::vector<std::pair<std::string, std::string>> slang_lexicon;
};

struct SynthResult {
  Corpus corpus;
  SynthTruth truth;
};

// Deterministic for a given config, including the seed.
SynthResult generate_synthetic(const SynthConfig& cfg);

}  // namespace tweetprobe

#endif  // TWEETPROBE_SYNTH_H_
