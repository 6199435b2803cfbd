#include <gtest/gtest.h>

#include <set>

#include "tweetprobe/corpus.h"
#include "tweetprobe/error.h"
#include "tweetprobe/synth.h"
#include "tweetprobe/util.h"

namespace tweetprobe {
namespace {

TEST(SynthTest, SameSeedByteIdentical) {
  SynthConfig cfg;
  cfg.n_tweets = 500;
  cfg.seed = 42;
  EXPECT_EQ(corpus_to_jsonl(generate_synthetic(cfg).corpus),
            corpus_to_jsonl(generate_synthetic(cfg).corpus));
  SynthConfig other = cfg;
  other.seed = 43;
  EXPECT_NE(corpus_to_jsonl(generate_synthetic(cfg).corpus),
            corpus_to_jsonl(generate_synthetic(other).corpus));
}

TEST(SynthTest, ZeroMentionRateMeansNoMentions) {
  SynthConfig cfg;
  cfg.n_tweets = 500;
  cfg.mention_rate = 0.0;
  const SynthResult r = generate_synthetic(cfg);
  for (const Tweet& t : r.corpus.tweets()) {
    for (const Token& tok : t.tokens) ASSERT_NE(tok.kind, TokenKind::kMention) << t.text;
  }
}

TEST(SynthTest, HashtagFractionNearRate) {
  SynthConfig cfg;
  cfg.n_tweets = 5000;
  cfg.hashtag_rate = 0.2;
  const SynthResult r = generate_synthetic(cfg);
  size_t with_hashtag = 0;
  for (const Tweet& t : r.corpus.tweets()) {
    bool any = false;
    for (const Token& tok : t.tokens) any |= tok.kind == TokenKind::kHashtag;
    with_hashtag += any;
  }
  EXPECT_EQ(with_hashtag, r.truth.hashtag_tweets);
  EXPECT_NEAR(static_cast<double>(with_hashtag) / 5000.0, 0.2, 0.02);
}

TEST(SynthTest, AnnotationsAreConsistent) {
  SynthConfig cfg;
  cfg.n_tweets = 1000;
  const SynthResult r = generate_synthetic(cfg);
  std::set<std::string> ids;
  for (const Tweet& t : r.corpus.tweets()) {
    EXPECT_LE(t.text.size(), kMaxTweetBytes);
    EXPECT_TRUE(ids.insert(t.id).second);
    for (const NeSpan& s : t.ne_spans) {
      ASSERT_LT(s.begin, s.end);
      ASSERT_LE(s.end, t.tokens.size());
    }
    for (const SlangPair& p : t.slang) {
      ASSERT_LT(p.index, t.tokens.size());
      EXPECT_NE(to_lower_ascii(t.tokens[p.index].surface), p.canonical);
    }
    if (t.reply_to) {
      const Tweet* parent = r.corpus.find(*t.reply_to);
      ASSERT_NE(parent, nullptr);
      ASSERT_TRUE(parent->timestamp && t.timestamp);
      EXPECT_GE(*t.timestamp, *parent->timestamp);
    }
  }
}

TEST(SynthTest, InvalidConfigRejected) {
  SynthConfig cfg;
  cfg.hashtag_rate = 1.5;
  EXPECT_THROW(validate(cfg), Error);
  cfg = SynthConfig();
  cfg.vocab_size = 0;
  EXPECT_THROW(generate_synthetic(cfg), Error);
}

}  // namespace
}  // namespace tweetprobe
