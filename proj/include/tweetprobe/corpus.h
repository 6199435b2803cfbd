#ifndef TWEETPROBE_CORPUS_H_
#define TWEETPROBE_CORPUS_H_

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tweetprobe {

enum class TokenKind { kWord, kHashtag, kMention, kUrl, kNumber, kPunct };

std::string_view token_kind_name(TokenKind kind);

struct Token {
  std::string surface;
  size_t start = 0;  // byte offsets into the tweet text, [start, end)
  size_t end = 0;
  TokenKind kind = TokenKind::kWord;
  bool capitalized = false;

  bool operator==(const Token&) const = default;
};

// Word, Hashtag, Mention and Number tokens count as words; Url and Punct do not.
bool counts_as_word(TokenKind kind);

// Splits UTF-8 text into tokens. Precedence: Url > Mention > Hashtag >
// Number > Word > Punct. Never fails; invalid UTF-8 bytes become Punct.
std::vector<Token> tokenize(std::string_view text);

using Timestamp = std::chrono::sys_seconds;

// Token-index range [begin, end).
struct NeSpan {
  size_t begin = 0;
  size_t end = 0;

  bool operator==(const NeSpan&) const = default;
};

struct SlangPair {
  size_t index = 0;
  std::string canonical;

  bool operator==(const SlangPair&) const = default;
};

struct Tweet {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::optional<Timestamp> timestamp;
  std::optional<std::string> reply_to;
  std::vector<NeSpan> ne_spans;
  std::vector<SlangPair> slang;
  // Absent means "not annotated": informativeness is then derived from
  // ne_spans.
  std::optional<std::vector<size_t>> informative_caps;

  bool operator==(const Tweet&) const = default;
};

constexpr size_t kMaxTweetBytes = 560;

// Number of tokens that count as words (see counts_as_word).
size_t word_count(const Tweet& tweet);

// Token indices considered informative capitalizations: the explicit
// annotation when present, else every token inside a NE span.
std::vector<size_t> informative_cap_indices(const Tweet& tweet);

// Immutable after construction; ids are unique.
class Corpus {
 public:
  Corpus() = default;
  // Throws DuplicateId.
  explicit Corpus(std::vector<Tweet> tweets);

  size_t size() const { return tweets_.size(); }
  bool empty() const { return tweets_.empty(); }
  const std::vector<Tweet>& tweets() const { return tweets_; }
  const Tweet& operator[](size_t i) const { return tweets_[i]; }

  const Tweet* find(std::string_view id) const;

  // Stable content hash (hex) of the canonical JSONL serialization.
  const std::string& fingerprint() const { return fingerprint_; }

  bool operator==(const Corpus& other) const { return tweets_ == other.tweets_; }

 private:
  std::vector<Tweet> tweets_;
  std::unordered_map<std::string, size_t> index_;
  std::string fingerprint_;
};

enum class CorpusFormat { kJsonl, kSentiment140Csv };

// Throws MalformedRecord (with the 1-based line number) or DuplicateId.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
Corpus parse_corpus(std::istream& in, CorpusFormat format);

void write_corpus_jsonl(const Corpus& corpus, std::ostream& out);
std::string corpus_to_jsonl(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

// ISO-8601 with 'Z' or +hh:mm offset; fractional seconds are truncated.
std::optional<Timestamp> parse_iso8601(std::string_view text);
std::string format_iso8601(Timestamp ts);
// "Mon Apr 06 22:19:45 PDT 2009" as found in Sentiment140 dumps.
std::optional<Timestamp> parse_twitter_date(std::string_view text);

struct Conversation {
  std::string starter;
  // Starter first; every reply follows its parent; ordered by timestamp.
  std::vector<std::string> tweets;
};

struct Threading {
  std::vector<Conversation> conversations;
  // Tweets whose reply chain never reaches a tweet without reply_to.
  std::vector<std::string> dangling;
};

// Result is independent of record order in the corpus.
Threading thread_conversations(const Corpus& corpus);

}  // namespace tweetprobe

#endif  // TWEETPROBE_CORPUS_H_
