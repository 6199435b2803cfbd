#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <sstream>

#include "test_util.h"
#include "tweetprobe/corpus.h"
#include "tweetprobe/error.h"

namespace tweetprobe {
namespace {

using testing::make_tweet;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(CorpusTest, LoadsTwoLineJsonl) {
  std::istringstream in(
      "{\"id\":\"1\",\"text\":\"hello world\"}\n"
      "{\"id\":\"2\",\"text\":\"@a yo\",\"reply_to\":\"1\","
      "\"timestamp\":\"2020-01-01T00:05:00Z\"}\n");
  const Corpus c = parse_corpus(in, CorpusFormat::kJsonl);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].reply_to, "1");
  EXPECT_EQ(c[1].tokens.size(), 2u);
  ASSERT_TRUE(c[1].timestamp.has_value());
  EXPECT_EQ(format_iso8601(*c[1].timestamp), "2020-01-01T00:05:00Z");
  EXPECT_EQ(c.find("2"), &c[1]);
  EXPECT_EQ(c.find("3"), nullptr);
}

TEST(CorpusTest, DuplicateIdRejected) {
  std::istringstream in("{\"id\":\"1\",\"text\":\"a\"}\n{\"id\":\"1\",\"text\":\"b\"}\n");
  EXPECT_EQ(code_of([&] { parse_corpus(in, CorpusFormat::kJsonl); }), ErrorCode::kDuplicateId);
}

TEST(CorpusTest, MalformedRecordReportsLine) {
  std::istringstream in("{\"id\":\"1\",\"text\":\"a\"}\n{\"id\":\"2\"}\n");
  try {
    parse_corpus(in, CorpusFormat::kJsonl);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream too_long("{\"id\":\"1\",\"text\":\"" + std::string(561, 'a') + "\"}\n");
  EXPECT_EQ(code_of([&] { parse_corpus(too_long, CorpusFormat::kJsonl); }),
            ErrorCode::kMalformedRecord);
  std::istringstream bad_span("{\"id\":\"1\",\"text\":\"a b\",\"ne_spans\":[[1,5]]}\n");
  EXPECT_EQ(code_of([&] { parse_corpus(bad_span, CorpusFormat::kJsonl); }),
            ErrorCode::kMalformedRecord);
}

TEST(CorpusTest, Sentiment140Csv) {
  std::istringstream in(
      "\"0\",\"1467810369\",\"Mon Apr 06 22:19:45 PDT 2009\",\"NO_QUERY\",\"user\","
      "\"@switchfoot http://x.co - Awww, \"\"that\"\" bummer\"\n"
      "\"4\",\"1467810672\",\"Mon Apr 06 22:19:49 PDT 2009\",\"NO_QUERY\",\"u2\",\"plain text\"\n");
  const Corpus c = parse_corpus(in, CorpusFormat::kSentiment140Csv);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "1467810369");
  EXPECT_EQ(c[0].text, "@switchfoot http://x.co - Awww, \"that\" bummer");
  ASSERT_TRUE(c[0].timestamp.has_value());
  EXPECT_EQ(format_iso8601(*c[0].timestamp), "2009-04-07T05:19:45Z");
}

TEST(CorpusTest, SyntheticRoundTripFieldByField) {
  const Corpus& original = testing::shared_synth().corpus;
  std::stringstream buf;
  write_corpus_jsonl(original, buf);
  const Corpus reloaded = parse_corpus(buf, CorpusFormat::kJsonl);
  ASSERT_EQ(reloaded.size(), original.size());
  for (size_t i = 0; i < original.size(); ++i) {
    const Tweet& a = original[i];
    const Tweet& b = reloaded[i];
    ASSERT_EQ(a.id, b.id);
    ASSERT_EQ(a.text, b.text);
    ASSERT_EQ(a.tokens, b.tokens);
    ASSERT_EQ(a.timestamp, b.timestamp);
    ASSERT_EQ(a.reply_to, b.reply_to);
    ASSERT_EQ(a.ne_spans, b.ne_spans);
    ASSERT_EQ(a.slang, b.slang);
    ASSERT_EQ(a.informative_caps, b.informative_caps);
  }
  EXPECT_EQ(reloaded.fingerprint(), original.fingerprint());
}

TEST(CorpusTest, Iso8601Offsets) {
  const auto a = parse_iso8601("2020-03-01T10:00:00+02:00");
  const auto b = parse_iso8601("2020-03-01T08:00:00.987Z");
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
  EXPECT_FALSE(parse_iso8601("2020-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
}

TEST(CorpusTest, InformativeCapsDerivedFromSpans) {
  Tweet t = make_tweet("1", "I met Barack Obama TODAY");
  t.ne_spans = {{2, 4}};
  EXPECT_EQ(informative_cap_indices(t), (std::vector<size_t>{2, 3}));
  t.informative_caps = std::vector<size_t>{2};
  EXPECT_EQ(informative_cap_indices(t), (std::vector<size_t>{2}));
}

std::vector<Tweet> chain_tweets() {
  std::vector<Tweet> tweets = {make_tweet("A", "start"), make_tweet("B", "reply", "A"),
                               make_tweet("C", "again", "B")};
  for (size_t i = 0; i < tweets.size(); ++i) {
    tweets[i].timestamp = Timestamp(std::chrono::seconds(100 * i));
  }
  return tweets;
}

TEST(ThreadingTest, ChainIsOneConversation) {
  const Threading th = thread_conversations(Corpus(chain_tweets()));
  ASSERT_EQ(th.conversations.size(), 1u);
  EXPECT_EQ(th.conversations[0].starter, "A");
  EXPECT_EQ(th.conversations[0].tweets, (std::vector<std::string>{"A", "B", "C"}));
  EXPECT_TRUE(th.dangling.empty());
}

TEST(ThreadingTest, IndependentTweetsHaveNoConversations) {
  const Threading th = thread_conversations(Corpus({make_tweet("1", "a"), make_tweet("2", "b")}));
  EXPECT_TRUE(th.conversations.empty());
}

TEST(ThreadingTest, OrderIndependentAndDanglingReported) {
  std::vector<Tweet> tweets = chain_tweets();
  tweets.push_back(make_tweet("D", "orphan", "missing"));
  tweets.push_back(make_tweet("E", "child of orphan", "D"));
  const Threading forward = thread_conversations(Corpus(tweets));
  std::reverse(tweets.begin(), tweets.end());
  const Threading backward = thread_conversations(Corpus(tweets));
  ASSERT_EQ(forward.conversations.size(), backward.conversations.size());
  EXPECT_EQ(forward.conversations[0].tweets, backward.conversations[0].tweets);
  EXPECT_EQ(forward.dangling, backward.dangling);
  EXPECT_EQ(forward.dangling, (std::vector<std::string>{"D", "E"}));
}

TEST(ThreadingTest, ConversationCountMatchesGenerator) {
  SynthConfig cfg;
  cfg.n_tweets = 1500;
  cfg.reply_probability = 0.3;
  cfg.seed = 3;
  const SynthResult r = generate_synthetic(cfg);
  const Threading th = thread_conversations(r.corpus);
  EXPECT_EQ(th.conversations.size(), r.truth.conversations);
  size_t replies = 0;
  for (const Conversation& c : th.conversations) {
    replies += c.tweets.size() - 1;
    const Tweet* starter = r.corpus.find(c.starter);
    ASSERT_NE(starter, nullptr);
    EXPECT_FALSE(starter->reply_to.has_value());
  }
  EXPECT_EQ(replies, r.truth.replies);
}

TEST(ThreadingTest, DanglingRepliesMatchGenerator) {
  SynthConfig cfg;
  cfg.n_tweets = 800;
  cfg.dangling_rate = 0.1;
  cfg.seed = 5;
  const SynthResult r = generate_synthetic(cfg);
  const Threading th = thread_conversations(r.corpus);
  EXPECT_GT(r.truth.dangling, 0u);
  EXPECT_GE(th.dangling.size(), r.truth.dangling);
}

}  // namespace
}  // namespace tweetprobe
